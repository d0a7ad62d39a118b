"""Mini-batch training loop with Adagrad and best-checkpoint retention."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .data import KnowledgeGraph, build_filter
from .evaluate import evaluate
from .exceptions import NonFiniteError
from .model import (GradientBuffer, ModelParameters, init_parameters,
                    loss_and_grad, mask_gradients)


@dataclass
class TrainConfig:
    """Hyperparameters; the defaults are the tuned WN18RR-scale settings."""

    epochs: int = 200
    lr: float = 0.1
    batch_size: int = 300
    k: int = 128
    lam: float = 1.5e-1
    lam1: float = 2.0
    lam2: float = 0.5
    seed: int = 0
    eval_every: int = 10
    mode: str = "full"
    adagrad_eps: float = 1e-10

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.batch_size < 1 or self.k < 1 or self.epochs < 0:
            raise ValueError("batch_size and k must be >= 1, epochs >= 0")
        if min(self.lam, self.lam1, self.lam2) < 0:
            raise ValueError("regularization weights must be non-negative")
        if self.eval_every < 1:
            raise ValueError("eval_every must be >= 1")


@dataclass
class AdagradState:
    """Per-coordinate squared-gradient accumulators (never decrease)."""

    entities: np.ndarray
    rel_translate: np.ndarray
    rel_rotate: np.ndarray

    @classmethod
    def zeros_like(cls, params: ModelParameters) -> "AdagradState":
        return cls(entities=np.zeros_like(params.entities),
                   rel_translate=np.zeros_like(params.rel_translate),
                   rel_rotate=np.zeros_like(params.rel_rotate))

    def arrays(self):
        return self.entities, self.rel_translate, self.rel_rotate


def _apply_adagrad(theta: np.ndarray, grad: np.ndarray, acc: np.ndarray,
                   lr: float, eps: float) -> None:
    acc += grad * grad
    denom = np.sqrt(acc) + eps
    # With eps = 0 an untouched coordinate has denom 0; its update is 0.
    safe = denom > 0.0
    np.subtract(theta, lr * grad / np.where(safe, denom, 1.0),
                out=theta, where=safe)


def adagrad_step(params: ModelParameters, grads: GradientBuffer,
                 state: AdagradState, lr: float, eps: float) -> None:
    """In-place update: acc += g^2; theta -= lr * g / (sqrt(acc) + eps).

    Entity rows are updated densely (the loss touches every entity via the
    candidate sum); relation rows only where the batch touched them.
    """
    _apply_adagrad(params.entities, grads.entities, state.entities, lr, eps)
    rows = grads.touched_relations
    if rows.size == 0:
        rows = slice(None)
    for theta, grad, acc in (
        (params.rel_translate, grads.rel_translate, state.rel_translate),
        (params.rel_rotate, grads.rel_rotate, state.rel_rotate),
    ):
        sub_theta = theta[rows]
        sub_acc = acc[rows]
        _apply_adagrad(sub_theta, grad[rows], sub_acc, lr, eps)
        theta[rows] = sub_theta
        acc[rows] = sub_acc
    if not all(np.isfinite(t).all() for t in params.arrays()):
        raise NonFiniteError("parameters became non-finite after the update")


@dataclass
class TrainResult:
    params: ModelParameters
    log: list[dict] = field(default_factory=list)
    best_valid_mrr: float | None = None
    best_epoch: int | None = None


def train(kg: KnowledgeGraph, config: TrainConfig,
          eval_workers: int = 1) -> TrainResult:
    """Train on the augmented train split; deterministic for a fixed seed.

    Every ``eval_every`` epochs (and after the last one) filtered
    validation MRR is computed and the best parameters so far are
    retained; with an empty validation split the final parameters are
    returned.  The log holds one entry per epoch with the mean batch loss
    and wall-clock time, plus the validation MRR on evaluation epochs.
    """
    params = init_parameters(kg.n_entities, kg.n_relations, config.k,
                             config.seed, mode=config.mode)
    state = AdagradState.zeros_like(params)
    rng = np.random.default_rng(config.seed)
    triples = np.asarray(kg.train, dtype=np.int64).reshape(-1, 3)
    if triples.shape[0] == 0:
        raise ValueError("training split is empty")
    kg_filter = build_filter(kg) if kg.valid else None

    result = TrainResult(params=params)
    best = None
    for epoch in range(1, config.epochs + 1):
        start = time.perf_counter()
        order = rng.permutation(triples.shape[0])
        losses = []
        for lo in range(0, len(order), config.batch_size):
            batch = triples[order[lo:lo + config.batch_size]]
            try:
                loss, grads = loss_and_grad(params, batch, config.lam,
                                            config.lam1, config.lam2)
                mask_gradients(grads, config.mode)
                adagrad_step(params, grads, state, config.lr,
                             config.adagrad_eps)
            except NonFiniteError as exc:
                raise NonFiniteError(
                    f"epoch {epoch}, batch {lo // config.batch_size}: {exc}"
                ) from exc
            losses.append(loss / batch.shape[0])
        entry = {
            "epoch": epoch,
            "mean_batch_loss": float(np.mean(losses)),
            "wallclock_ms": (time.perf_counter() - start) * 1000.0,
        }
        if kg_filter is not None and (
                epoch % config.eval_every == 0 or epoch == config.epochs):
            report = evaluate(params, kg, "valid", kg_filter,
                              n_workers=eval_workers)
            entry["valid_mrr"] = report.mrr
            if best is None or report.mrr > best[0]:
                best = (report.mrr, epoch, params.copy())
        result.log.append(entry)

    if best is not None:
        result.best_valid_mrr, result.best_epoch, result.params = best
    else:
        result.params = params
    return result
