"""Finite-difference verification of the analytic gradients.

The numeric oracle is a from-scratch loss evaluator running in extended
precision (``np.longdouble``).  Plain float64 central differences at step
1e-5 carry cancellation noise of roughly ``eps * loss / (2 * step)``,
several orders of magnitude too coarse to resolve small gradient entries
at 1e-4 relative error; the 80-bit evaluation pushes that noise below
1e-12 while leaving the differencing formula untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (ModelParameters, _NORM_VARIANT_BY_MODE, init_parameters,
                    loss_and_grad)

_TABLE_NAMES = ("entities", "rel_translate", "rel_rotate")

#: Coordinates where both gradients are below this are skipped.
GRADIENT_FLOOR = 1e-8

_EPS_LD = np.longdouble(1e-12)


def _hamilton_ld(p: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Slot-wise Hamilton product on (8, k) longdouble component arrays."""
    w1, x1, y1, z1 = (p[0::2] + 1j * p[1::2])
    w2, x2, y2, z2 = (r[0::2] + 1j * r[1::2])
    out = np.empty_like(p)
    products = (
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    )
    for idx, c in enumerate(products):
        out[2 * idx] = c.real
        out[2 * idx + 1] = c.imag
    return out


def _normalize_ld(rows: np.ndarray, variant: str) -> np.ndarray:
    """Rotation normalization on a (B, 8, k) longdouble array."""
    out = rows.copy()
    for b in range(rows.shape[0]):
        for j in range(rows.shape[2]):
            slot = rows[b, :, j]
            if variant == "real_vector":
                norm = np.sqrt((slot * slot).sum())
                if norm >= _EPS_LD:
                    out[b, :, j] = slot / norm
            else:
                q1, q2 = slot[0::2], slot[1::2]
                n2 = np.sqrt((q2 * q2).sum())
                if n2 < _EPS_LD:
                    continue
                q1p = q1 - ((q1 * q2).sum() / (n2 * n2)) * q2
                n1p = np.sqrt((q1p * q1p).sum())
                if n1p < _EPS_LD:
                    continue
                out[b, 0::2, j] = np.sqrt(np.longdouble(2.0)) * q1p / n1p
                out[b, 1::2, j] = q2 / n2
    return out


def _softplus_ld(x: np.ndarray) -> np.ndarray:
    return np.where(x >= 0, x + np.log1p(np.exp(-x)), np.log1p(np.exp(x)))


def reference_loss(tables, mode: str, batch: np.ndarray, lam, lam1, lam2):
    """Loss recomputed independently in longdouble.

    ``tables`` are the (entities, rel_translate, rel_rotate) arrays,
    already converted to longdouble.
    """
    entities, rel_translate, rel_rotate = tables
    heads, rels, tails = batch[:, 0], batch[:, 1], batch[:, 2]
    q_head = entities[heads]
    q_plus = rel_translate[rels]
    q_times = rel_rotate[rels]
    variant = _NORM_VARIANT_BY_MODE.get(mode)
    rot = q_times if variant is None else _normalize_ld(q_times, variant)

    total = np.longdouble(0.0)
    flat_entities = entities.reshape(entities.shape[0], -1)
    for i in range(batch.shape[0]):
        moved = _hamilton_ld(q_head[i] + q_plus[i], rot[i])
        scores = flat_entities @ moved.reshape(-1)
        total += _softplus_ld(scores).sum() - scores[tails[i]]
    if lam > 0:
        lam, lam1, lam2 = (np.longdouble(v) for v in (lam, lam1, lam2))
        q_tail = entities[tails]
        total += lam * lam1 * ((np.abs(q_head) ** 3).sum()
                               + (np.abs(q_tail) ** 3).sum())
        total += lam * lam2 * ((np.abs(q_plus) ** 3).sum()
                               + (np.abs(q_times) ** 3).sum())
    return total


def numerical_gradient(params: ModelParameters, batch, lam: float, lam1: float,
                       lam2: float, step: float = 1e-5) -> list[np.ndarray]:
    """Central differences of the reference loss over every coordinate."""
    batch = np.asarray(batch, dtype=np.int64).reshape(-1, 3)
    tables = [t.astype(np.longdouble) for t in params.arrays()]
    step_ld = np.longdouble(step)
    grads = []
    for table in tables:
        grad = np.zeros(table.shape, dtype=np.float64)
        flat = table.reshape(-1)
        gflat = grad.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + step_ld
            high = reference_loss(tables, params.mode, batch, lam, lam1, lam2)
            flat[i] = original - step_ld
            low = reference_loss(tables, params.mode, batch, lam, lam1, lam2)
            flat[i] = original
            gflat[i] = float((high - low) / (2.0 * step_ld))
        grads.append(grad)
    return grads


@dataclass
class GradCheckResult:
    max_rel_error: float
    worst_coordinate: str
    analytic: float
    numeric: float


def compare_gradients(analytic, numeric, floor: float = GRADIENT_FLOOR
                      ) -> GradCheckResult:
    """Worst relative disagreement, ignoring coordinates below ``floor``."""
    worst = GradCheckResult(0.0, "none", 0.0, 0.0)
    for name, ga, gn in zip(_TABLE_NAMES, analytic, numeric):
        denom = np.maximum(np.abs(ga), np.abs(gn))
        mask = denom > floor
        if not mask.any():
            continue
        rel = np.zeros_like(denom)
        rel[mask] = np.abs(ga - gn)[mask] / denom[mask]
        idx = np.unravel_index(np.argmax(rel), rel.shape)
        if rel[idx] > worst.max_rel_error:
            worst = GradCheckResult(
                float(rel[idx]),
                f"{name}[{', '.join(str(int(v)) for v in idx)}]",
                float(ga[idx]), float(gn[idx]))
    return worst


def random_instance(seed: int, mode: str = "full"):
    """Small random model + batch + positive regularization weights."""
    rng = np.random.default_rng(seed)
    n_entities = int(rng.integers(2, 7))
    n_relations = int(rng.integers(1, 5))
    k = int(rng.integers(1, 4))
    batch_size = int(rng.integers(1, 5))
    params = init_parameters(n_entities, n_relations, k,
                             seed=int(rng.integers(0, 2 ** 31)), mode=mode)
    batch = np.column_stack([
        rng.integers(0, n_entities, batch_size),
        rng.integers(0, n_relations, batch_size),
        rng.integers(0, n_entities, batch_size),
    ])
    lam = float(rng.uniform(0.02, 0.3))
    lam1 = float(rng.uniform(0.5, 2.0))
    lam2 = float(rng.uniform(0.5, 2.0))
    return params, batch, lam, lam1, lam2


def check_instance(seed: int, step: float = 1e-5, mode: str = "full",
                   corrupt: bool = False) -> GradCheckResult:
    """Run one analytic-vs-numeric comparison on a random instance.

    The skip floor scales as 100 * step^2 (equal to ``GRADIENT_FLOOR`` at
    the default step): central differences carry O(step^2) truncation
    error, so entries below that scale cannot be compared relatively at
    coarser steps.  ``corrupt`` deliberately perturbs one analytic entry;
    it exists so the checker itself can be shown to catch wrong gradients.
    """
    params, batch, lam, lam1, lam2 = random_instance(seed, mode=mode)
    _, grads = loss_and_grad(params, batch, lam, lam1, lam2)
    analytic = [g.copy() for g in grads.arrays()]
    if corrupt:
        analytic[0].reshape(-1)[0] += 0.5
    numeric = numerical_gradient(params, batch, lam, lam1, lam2, step=step)
    floor = max(GRADIENT_FLOOR, 100.0 * step * step)
    return compare_gradients(analytic, numeric, floor=floor)


def check_loss_value(seed: int, mode: str = "full") -> float:
    """Relative gap between the float64 loss and the longdouble reference."""
    params, batch, lam, lam1, lam2 = random_instance(seed, mode=mode)
    fast, _ = loss_and_grad(params, batch, lam, lam1, lam2)
    slow = float(reference_loss([t.astype(np.longdouble) for t in params.arrays()],
                                params.mode, np.asarray(batch, dtype=np.int64),
                                lam, lam1, lam2))
    return abs(fast - slow) / max(abs(slow), 1e-30)
