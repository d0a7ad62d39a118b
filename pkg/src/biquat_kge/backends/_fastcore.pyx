# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementations of the training hot kernels.

Same contracts as ``numpy_backend``: (B, 8, k) float64 biquaternion
batches with component order (w_r, w_i, x_r, x_i, y_r, y_i, z_r, z_i).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log1p

NAME = "compiled"

# Sign pattern of the full conjugate (quaternion conjugate + complex
# conjugate of each coefficient).
cdef double[8] _SGN
_SGN[0] = 1.0; _SGN[1] = -1.0; _SGN[2] = -1.0; _SGN[3] = 1.0
_SGN[4] = -1.0; _SGN[5] = 1.0; _SGN[6] = -1.0; _SGN[7] = 1.0


cdef inline void _hprod(const double* a, const double* b, double* o) noexcept nogil:
    # Hamilton product with complex coefficient arithmetic, expanded over
    # the 8 real components.
    o[0] = (a[0]*b[0] - a[1]*b[1]) - (a[2]*b[2] - a[3]*b[3]) - (a[4]*b[4] - a[5]*b[5]) - (a[6]*b[6] - a[7]*b[7])
    o[1] = (a[0]*b[1] + a[1]*b[0]) - (a[2]*b[3] + a[3]*b[2]) - (a[4]*b[5] + a[5]*b[4]) - (a[6]*b[7] + a[7]*b[6])
    o[2] = (a[0]*b[2] - a[1]*b[3]) + (a[2]*b[0] - a[3]*b[1]) + (a[4]*b[6] - a[5]*b[7]) - (a[6]*b[4] - a[7]*b[5])
    o[3] = (a[0]*b[3] + a[1]*b[2]) + (a[2]*b[1] + a[3]*b[0]) + (a[4]*b[7] + a[5]*b[6]) - (a[6]*b[5] + a[7]*b[4])
    o[4] = (a[0]*b[4] - a[1]*b[5]) - (a[2]*b[6] - a[3]*b[7]) + (a[4]*b[0] - a[5]*b[1]) + (a[6]*b[2] - a[7]*b[3])
    o[5] = (a[0]*b[5] + a[1]*b[4]) - (a[2]*b[7] + a[3]*b[6]) + (a[4]*b[1] + a[5]*b[0]) + (a[6]*b[3] + a[7]*b[2])
    o[6] = (a[0]*b[6] - a[1]*b[7]) + (a[2]*b[4] - a[3]*b[5]) - (a[4]*b[2] - a[5]*b[3]) + (a[6]*b[0] - a[7]*b[1])
    o[7] = (a[0]*b[7] + a[1]*b[6]) + (a[2]*b[5] + a[3]*b[4]) - (a[4]*b[3] + a[5]*b[2]) + (a[6]*b[1] + a[7]*b[0])


def hamilton_batch(double[:, :, ::1] p, double[:, :, ::1] r):
    """Slot-wise Hamilton product of biquaternion vectors, (B, 8, k) each."""
    cdef Py_ssize_t B = p.shape[0], k = p.shape[2]
    out_arr = np.empty((B, 8, k), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef double a[8], b[8], o[8]
    cdef Py_ssize_t i, j, c
    with nogil:
        for i in range(B):
            for j in range(k):
                for c in range(8):
                    a[c] = p[i, c, j]
                    b[c] = r[i, c, j]
                _hprod(a, b, o)
                for c in range(8):
                    out[i, c, j] = o[c]
    return out_arr


def hamilton_backward_batch(double[:, :, ::1] p, double[:, :, ::1] r,
                            double[:, :, ::1] ghat):
    """Adjoint of ``hamilton_batch``: gradients w.r.t. both factors."""
    cdef Py_ssize_t B = p.shape[0], k = p.shape[2]
    gp_arr = np.empty((B, 8, k), dtype=np.float64)
    gr_arr = np.empty((B, 8, k), dtype=np.float64)
    cdef double[:, :, ::1] gp = gp_arr
    cdef double[:, :, ::1] gr = gr_arr
    cdef double g[8], conj[8], o[8]
    cdef Py_ssize_t i, j, c
    with nogil:
        for i in range(B):
            for j in range(k):
                for c in range(8):
                    g[c] = ghat[i, c, j]
                # gp = ghat (x) full_conj(r)
                for c in range(8):
                    conj[c] = _SGN[c] * r[i, c, j]
                _hprod(g, conj, o)
                for c in range(8):
                    gp[i, c, j] = o[c]
                # gr = full_conj(p) (x) ghat
                for c in range(8):
                    conj[c] = _SGN[c] * p[i, c, j]
                _hprod(conj, g, o)
                for c in range(8):
                    gr[i, c, j] = o[c]
    return gp_arr, gr_arr


def ce_weights(double[:, ::1] scores, cnp.int64_t[::1] tails):
    """Multiclass sigmoid cross-entropy loss and score gradient.

    loss = sum softplus(s) - sum_i s[i, tails[i]]; the returned matrix is
    sigmoid(s) with 1 subtracted at each row's true tail.
    """
    cdef Py_ssize_t B = scores.shape[0], N = scores.shape[1]
    w_arr = np.empty((B, N), dtype=np.float64)
    cdef double[:, ::1] w = w_arr
    cdef double loss = 0.0
    cdef double s, z
    cdef Py_ssize_t i, t
    with nogil:
        for i in range(B):
            for t in range(N):
                s = scores[i, t]
                if s >= 0.0:
                    z = exp(-s)
                    loss += s + log1p(z)
                    w[i, t] = 1.0 / (1.0 + z)
                else:
                    z = exp(s)
                    loss += log1p(z)
                    w[i, t] = z / (1.0 + z)
            loss -= scores[i, tails[i]]
            w[i, tails[i]] -= 1.0
    return loss, w_arr
