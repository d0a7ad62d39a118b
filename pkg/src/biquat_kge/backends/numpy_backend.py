"""Pure numpy implementations of the training hot kernels.

Array convention: a batch of biquaternion vectors is a float64 array of
shape (B, 8, k) whose component axis is ordered
(w_r, w_i, x_r, x_i, y_r, y_i, z_r, z_i).  The compiled backend in
``_fastcore`` implements the same three functions with identical
semantics.
"""

import numpy as np

NAME = "numpy"

# Sign pattern of the "full" conjugate (quaternion conjugate followed by
# complex conjugation of each coefficient), applied on the component axis.
_CONJ_FULL = np.array([1.0, -1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0]).reshape(8, 1)


def _complex_view(a):
    """(.., 8, k) reals -> (w, x, y, z) complex arrays of shape (.., k)."""
    c = a[..., 0::2, :] + 1j * a[..., 1::2, :]
    return c[..., 0, :], c[..., 1, :], c[..., 2, :], c[..., 3, :]


def _from_complex(w, x, y, z):
    out = np.empty(w.shape[:-1] + (8, w.shape[-1]), dtype=np.float64)
    for idx, c in enumerate((w, x, y, z)):
        out[..., 2 * idx, :] = c.real
        out[..., 2 * idx + 1, :] = c.imag
    return out


def hamilton_batch(p: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Slot-wise Hamilton product of biquaternion vectors, (B, 8, k) each."""
    w1, x1, y1, z1 = _complex_view(p)
    w2, x2, y2, z2 = _complex_view(r)
    return _from_complex(
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    )


def hamilton_backward_batch(p: np.ndarray, r: np.ndarray, ghat: np.ndarray):
    """Adjoint of ``hamilton_batch`` under the 8k-real inner product.

    Right multiplication by r pulls back as multiplication by the full
    conjugate of r (and symmetrically for the left factor), so both
    gradients reuse the forward kernel.
    """
    gp = hamilton_batch(ghat, r * _CONJ_FULL)
    gr = hamilton_batch(p * _CONJ_FULL, ghat)
    return gp, gr


def _sigmoid(x):
    z = np.exp(-np.abs(x))
    return np.where(x >= 0.0, 1.0 / (1.0 + z), z / (1.0 + z))


def ce_weights(scores: np.ndarray, tails: np.ndarray):
    """Multiclass sigmoid cross-entropy over a (B, N) score matrix.

    Every column is a negative except the true tail of its row:
    loss = sum softplus(s) - sum_i s[i, tails[i]], and the returned W is
    d(loss)/d(scores), i.e. sigmoid(s) with 1 subtracted at the true tails.
    """
    rows = np.arange(scores.shape[0])
    loss = float(np.logaddexp(0.0, scores).sum() - scores[rows, tails].sum())
    weights = _sigmoid(scores)
    weights[rows, tails] -= 1.0
    return loss, weights
