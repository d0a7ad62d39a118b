"""Embedding tables and the translation + Hamilton-product scoring model.

An entity or relation embedding is a vector of k biquaternions stored as
8 parallel real arrays, i.e. a float64 array of shape (8, k) whose rows
are (w_r, w_i, x_r, x_i, y_r, y_i, z_r, z_i).  A triple (h, r, t) is
scored by translating the head by the relation's additive vector,
transforming it by the slot-wise Hamilton product with the relation's
multiplicative vector, and taking the real dot product of the result
with the tail over all 8k components.

Gradients are hand-derived closed forms (the score is multilinear in the
parameter blocks); the heavy kernels are delegated to the active backend.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import backends
from .algebra import Biquaternion
from .exceptions import NonFiniteError, ShapeMismatchError

log = logging.getLogger(__name__)

#: Row order of the component axis.
COMPONENT_NAMES = ("w_r", "w_i", "x_r", "x_i", "y_r", "y_i", "z_r", "z_i")

#: Rows holding imaginary parts (zeroed in quaternion_only mode).
IMAG_COMPONENTS = (1, 3, 5, 7)

MODES = ("full", "quaternion_only", "no_translation", "norm_real", "norm_biquat")

_NORM_VARIANT_BY_MODE = {"norm_real": "real_vector", "norm_biquat": "biquaternion"}

_DEGENERATE_SLOT_EPS = 1e-12


@dataclass
class ModelParameters:
    """Entity table plus the two relation tables (translate and rotate).

    Arrays have shape (count, 8, k).  Scoring treats them as read-only;
    updates happen only inside the optimizer step.
    """

    n_entities: int
    n_relations: int
    k: int
    mode: str
    seed: int
    entities: np.ndarray
    rel_translate: np.ndarray
    rel_rotate: np.ndarray

    def copy(self) -> "ModelParameters":
        return ModelParameters(
            n_entities=self.n_entities,
            n_relations=self.n_relations,
            k=self.k,
            mode=self.mode,
            seed=self.seed,
            entities=self.entities.copy(),
            rel_translate=self.rel_translate.copy(),
            rel_rotate=self.rel_rotate.copy(),
        )

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """The three tables in checkpoint order."""
        return self.entities, self.rel_translate, self.rel_rotate


@dataclass
class GradientBuffer:
    """Loss gradients with the same shapes as the parameter tables."""

    entities: np.ndarray
    rel_translate: np.ndarray
    rel_rotate: np.ndarray
    touched_relations: np.ndarray = field(
        default_factory=lambda: np.empty(0, dtype=np.int64))

    @classmethod
    def zeros_like(cls, params: ModelParameters) -> "GradientBuffer":
        return cls(
            entities=np.zeros_like(params.entities),
            rel_translate=np.zeros_like(params.rel_translate),
            rel_rotate=np.zeros_like(params.rel_rotate),
        )

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.entities, self.rel_translate, self.rel_rotate


def init_parameters(n_entities: int, n_relations: int, k: int, seed: int,
                    mode: str = "full") -> ModelParameters:
    """Fresh parameters, each real drawn i.i.d. uniform on +-1/sqrt(8k).

    The three tables are drawn in order (entities, rel_translate,
    rel_rotate) from a single seeded generator, then the mode constraints
    are applied, so identical arguments give bit-identical tables.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if min(n_entities, n_relations, k) < 1:
        raise ValueError("n_entities, n_relations and k must be positive")
    rng = np.random.default_rng(seed)
    bound = 1.0 / math.sqrt(8 * k)
    params = ModelParameters(
        n_entities=n_entities,
        n_relations=n_relations,
        k=k,
        mode=mode,
        seed=seed,
        entities=rng.uniform(-bound, bound, size=(n_entities, 8, k)),
        rel_translate=rng.uniform(-bound, bound, size=(n_relations, 8, k)),
        rel_rotate=rng.uniform(-bound, bound, size=(n_relations, 8, k)),
    )
    if mode == "quaternion_only":
        for table in params.arrays():
            table[:, IMAG_COMPONENTS, :] = 0.0
    elif mode == "no_translation":
        params.rel_translate[:] = 0.0
    return params


def mask_gradients(grads: GradientBuffer, mode: str) -> GradientBuffer:
    """Zero gradient components that the mode constrains to stay zero."""
    if mode == "quaternion_only":
        for table in grads.arrays():
            table[:, IMAG_COMPONENTS, :] = 0.0
    elif mode == "no_translation":
        grads.rel_translate[:] = 0.0
    return grads


def _check_pair(a: np.ndarray, b: np.ndarray, op: str):
    if a.shape != b.shape or a.ndim < 2 or a.shape[-2] != 8:
        raise ShapeMismatchError(
            f"{op} expects matching (.., 8, k) arrays, got {a.shape} and {b.shape}")


def translate(q_head: np.ndarray, q_rel_plus: np.ndarray) -> np.ndarray:
    """Slot-wise biquaternion sum (relation-specific translation)."""
    _check_pair(q_head, q_rel_plus, "translate")
    return q_head + q_rel_plus


def _batched(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    return a.reshape((-1,) + a.shape[-2:])


def hamilton_transform(q_vec: np.ndarray, q_rel_times: np.ndarray) -> np.ndarray:
    """Slot-wise Hamilton product q_vec (x) q_rel_times."""
    _check_pair(q_vec, q_rel_times, "hamilton_transform")
    out = backends.active().hamilton_batch(_batched(q_vec), _batched(q_rel_times))
    return out.reshape(q_vec.shape)


# ---------------------------------------------------------------------------
# Rotation-vector normalization (the two normalized model variants)
# ---------------------------------------------------------------------------

def _normalize_real_forward(q: np.ndarray):
    norms = np.sqrt((q * q).sum(axis=-2))
    degenerate = norms < _DEGENERATE_SLOT_EPS
    safe = np.where(degenerate, 1.0, norms)
    out = q / safe[..., None, :]
    return out, {"variant": "real_vector", "out": out, "safe": safe,
                 "degenerate": degenerate}


def _normalize_real_backward(cache, g_out: np.ndarray) -> np.ndarray:
    out, safe, degenerate = cache["out"], cache["safe"], cache["degenerate"]
    dot = (g_out * out).sum(axis=-2, keepdims=True)
    g = (g_out - dot * out) / safe[..., None, :]
    return np.where(degenerate[..., None, :], g_out, g)


def _normalize_biquat_forward(q: np.ndarray):
    q1 = q[..., 0::2, :]
    q2 = q[..., 1::2, :]
    n2sq = (q2 * q2).sum(axis=-2)
    n2 = np.sqrt(n2sq)
    bad2 = n2 < _DEGENERATE_SLOT_EPS
    safe_n2sq = np.where(bad2, 1.0, n2sq)
    alpha = (q1 * q2).sum(axis=-2) / safe_n2sq
    q1p = q1 - alpha[..., None, :] * q2
    n1p = np.sqrt((q1p * q1p).sum(axis=-2))
    degenerate = bad2 | (n1p < _DEGENERATE_SLOT_EPS)
    safe_n1p = np.where(degenerate, 1.0, n1p)
    safe_n2 = np.where(degenerate, 1.0, n2)
    u1 = q1p / safe_n1p[..., None, :]
    u2 = q2 / safe_n2[..., None, :]
    out = np.empty_like(q)
    deg = degenerate[..., None, :]
    out[..., 0::2, :] = np.where(deg, q1, math.sqrt(2.0) * u1)
    out[..., 1::2, :] = np.where(deg, q2, u2)
    cache = {"variant": "biquaternion", "q1": q1, "q2": q2, "alpha": alpha,
             "u1": u1, "u2": u2, "safe_n1p": safe_n1p, "safe_n2": safe_n2,
             "safe_n2sq": safe_n2sq, "degenerate": degenerate}
    return out, cache


def _normalize_biquat_backward(cache, g_out: np.ndarray) -> np.ndarray:
    q1, q2 = cache["q1"], cache["q2"]
    u1, u2 = cache["u1"], cache["u2"]
    alpha = cache["alpha"][..., None, :]
    n1p = cache["safe_n1p"][..., None, :]
    n2 = cache["safe_n2"][..., None, :]
    n2sq = cache["safe_n2sq"][..., None, :]
    g1 = g_out[..., 0::2, :]
    g2 = g_out[..., 1::2, :]
    dq1p = math.sqrt(2.0) * (g1 - (g1 * u1).sum(axis=-2, keepdims=True) * u1) / n1p
    dq2 = (g2 - (g2 * u2).sum(axis=-2, keepdims=True) * u2) / n2
    proj = (q2 * dq1p).sum(axis=-2, keepdims=True) / n2sq
    dq1 = dq1p - proj * q2
    dq2 = dq2 - alpha * dq1p - proj * (q1 - 2.0 * alpha * q2)
    g_in = np.empty_like(g_out)
    deg = cache["degenerate"][..., None, :]
    g_in[..., 0::2, :] = np.where(deg, g1, dq1)
    g_in[..., 1::2, :] = np.where(deg, g2, dq2)
    return g_in


_NORMALIZERS = {
    "real_vector": (_normalize_real_forward, _normalize_real_backward),
    "biquaternion": (_normalize_biquat_forward, _normalize_biquat_backward),
}


def normalize_rotation(q_rel_times: np.ndarray, variant: str) -> np.ndarray:
    """Normalize each biquaternion slot of a rotation vector.

    ``real_vector`` rescales each slot's 8 reals to unit Euclidean norm.
    ``biquaternion`` orthogonalizes the real quaternion against the
    imaginary one and rescales so each slot has unit biquaternion norm.
    Degenerate slots are left untouched and reported at warning level
    rather than aborting.
    """
    out, _ = _normalize_forward(q_rel_times, variant)
    return out


def _normalize_forward(q: np.ndarray, variant: str):
    try:
        forward, _ = _NORMALIZERS[variant]
    except KeyError:
        raise ValueError(f"unknown variant {variant!r}") from None
    out, cache = forward(np.asarray(q, dtype=np.float64))
    n_bad = int(cache["degenerate"].sum())
    if n_bad:
        log.warning("normalize_rotation(%s): %d degenerate slot(s) left "
                    "unnormalized", variant, n_bad)
    return out, cache


def _normalize_backward(cache, g_out: np.ndarray) -> np.ndarray:
    _, backward = _NORMALIZERS[cache["variant"]]
    return backward(cache, g_out)


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------

def _effective_rotation(params: ModelParameters, rows: np.ndarray):
    """Rotation rows as used by scoring, with the normalization cache."""
    variant = _NORM_VARIANT_BY_MODE.get(params.mode)
    if variant is None:
        return rows, None
    return _normalize_forward(rows, variant)


def transform_heads(params: ModelParameters, heads: np.ndarray,
                    rels: np.ndarray) -> np.ndarray:
    """Transformed head vectors for id arrays, shape (B, 8, k)."""
    translated = params.entities[heads] + params.rel_translate[rels]
    rot, _ = _effective_rotation(params, params.rel_rotate[rels])
    return backends.active().hamilton_batch(
        np.ascontiguousarray(translated), np.ascontiguousarray(rot))


def score(params: ModelParameters, head: int, rel: int, tail: int) -> float:
    """Plausibility score of one triple."""
    hat = transform_heads(params, np.array([head]), np.array([rel]))[0]
    return float(hat.ravel() @ params.entities[tail].ravel())


def score_all_tails(params: ModelParameters, head: int, rel: int) -> np.ndarray:
    """Scores of (head, rel, t) for every entity t, shape (n_entities,)."""
    hat = transform_heads(params, np.array([head]), np.array([rel]))[0]
    flat = params.entities.reshape(params.n_entities, -1)
    return flat @ hat.ravel()


def score_tails_batch(params: ModelParameters, heads: np.ndarray,
                      rels: np.ndarray) -> np.ndarray:
    """Score matrix (B, n_entities) for a batch of (head, rel) queries."""
    hat = transform_heads(params, heads, rels)
    flat = params.entities.reshape(params.n_entities, -1)
    return hat.reshape(len(heads), -1) @ flat.T


# ---------------------------------------------------------------------------
# Loss and analytic gradient
# ---------------------------------------------------------------------------

def _l3_grad(rows: np.ndarray) -> np.ndarray:
    # d/dv sum |v|^3 = 3 v |v|
    return 3.0 * rows * np.abs(rows)


def loss_and_grad(params: ModelParameters, batch, lam: float, lam1: float,
                  lam2: float) -> tuple[float, GradientBuffer]:
    """Cross-entropy loss over all candidate tails, plus N3 penalty.

    For each batch triple the true tail is the positive class against
    every entity.  The penalty adds, per triple occurrence,
    lam * (lam1 * (|Q_h|_3^3 + |Q_t|_3^3) + lam2 * (|Q_r+|_3^3 + |Q_rx|_3^3)).
    Returns the scalar loss and a gradient buffer covering every parameter
    the batch touches.  Raises NonFiniteError when anything overflows.
    """
    triples = np.asarray(batch, dtype=np.int64).reshape(-1, 3)
    if triples.shape[0] == 0:
        raise ValueError("batch must be non-empty")
    if min(lam, lam1, lam2) < 0:
        raise ValueError("regularization weights must be non-negative")
    heads, rels, tails = triples[:, 0], triples[:, 1], triples[:, 2]
    backend = backends.active()

    q_head = params.entities[heads]
    q_plus = params.rel_translate[rels]
    q_times = params.rel_rotate[rels]
    rot, norm_cache = _effective_rotation(params, q_times)
    rot = np.ascontiguousarray(rot)
    translated = q_head + q_plus
    hat = backend.hamilton_batch(translated, rot)

    n_entities, width = params.n_entities, 8 * params.k
    ent_flat = params.entities.reshape(n_entities, width)
    scores = hat.reshape(-1, width) @ ent_flat.T
    loss, weights = backend.ce_weights(scores, np.ascontiguousarray(tails))

    grad_hat = (weights @ ent_flat).reshape(hat.shape)
    grads = GradientBuffer(
        entities=(weights.T @ hat.reshape(-1, width)).reshape(params.entities.shape),
        rel_translate=np.zeros_like(params.rel_translate),
        rel_rotate=np.zeros_like(params.rel_rotate),
        touched_relations=np.unique(rels),
    )
    g_translated, g_rot = backend.hamilton_backward_batch(translated, rot, grad_hat)
    if norm_cache is not None:
        g_rot = _normalize_backward(norm_cache, g_rot)
    np.add.at(grads.entities, heads, g_translated)
    np.add.at(grads.rel_translate, rels, g_translated)
    np.add.at(grads.rel_rotate, rels, g_rot)

    if lam > 0.0:
        q_tail = params.entities[tails]
        ent_coeff, rel_coeff = lam * lam1, lam * lam2
        loss += ent_coeff * float((np.abs(q_head) ** 3).sum()
                                  + (np.abs(q_tail) ** 3).sum())
        loss += rel_coeff * float((np.abs(q_plus) ** 3).sum()
                                  + (np.abs(q_times) ** 3).sum())
        np.add.at(grads.entities, heads, ent_coeff * _l3_grad(q_head))
        np.add.at(grads.entities, tails, ent_coeff * _l3_grad(q_tail))
        np.add.at(grads.rel_translate, rels, rel_coeff * _l3_grad(q_plus))
        np.add.at(grads.rel_rotate, rels, rel_coeff * _l3_grad(q_times))

    if not math.isfinite(loss) or not all(
            np.isfinite(g).all() for g in grads.arrays()):
        raise NonFiniteError("loss or gradient is not finite")
    return loss, grads


# ---------------------------------------------------------------------------
# Interop with the exact algebra (handy for oracles and small experiments)
# ---------------------------------------------------------------------------

def pack_biquaternions(slots: list[Biquaternion]) -> np.ndarray:
    """List of k biquaternions -> (8, k) component array."""
    out = np.empty((8, len(slots)))
    for j, q in enumerate(slots):
        out[:, j] = (q.w.real, q.w.imag, q.x.real, q.x.imag,
                     q.y.real, q.y.imag, q.z.real, q.z.imag)
    return out


def unpack_biquaternions(vec: np.ndarray) -> list[Biquaternion]:
    """(8, k) component array -> list of k biquaternions."""
    if vec.ndim != 2 or vec.shape[0] != 8:
        raise ShapeMismatchError(f"expected (8, k) array, got {vec.shape}")
    return [Biquaternion.from_reals(*vec[:, j]) for j in range(vec.shape[1])]
