"""Two-dimensional hyperbolic rotation trajectories.

Restricting a biquaternion to w + x*i, the hyperbolic factor of its
matrix acts on the column (w, x).  Splitting that action into real and
imaginary components gives two planar points that sweep hyperbolas as the
angle varies:

    real point = (w_r cosh(phi) + x_i sinh(phi), x_r cosh(phi) - w_i sinh(phi))
    imag point = (w_i cosh(phi) - x_r sinh(phi), x_i cosh(phi) + w_r sinh(phi))
"""

from __future__ import annotations

import io

import numpy as np

CSV_HEADER = ("phi", "real_x", "real_y", "imag_x", "imag_y")


def hyperbolic_trajectory(w_r: float, w_i: float, x_r: float, x_i: float,
                          phi_values: np.ndarray) -> np.ndarray:
    """Trajectory rows (phi, real_x, real_y, imag_x, imag_y)."""
    phi = np.asarray(phi_values, dtype=np.float64)
    ch, sh = np.cosh(phi), np.sinh(phi)
    return np.column_stack([
        phi,
        w_r * ch + x_i * sh,
        x_r * ch - w_i * sh,
        w_i * ch - x_r * sh,
        x_i * ch + w_r * sh,
    ])


def trajectory_csv(rows: np.ndarray) -> str:
    buffer = io.StringIO()
    buffer.write(",".join(CSV_HEADER) + "\n")
    for row in rows:
        buffer.write(",".join(repr(float(v)) for v in row) + "\n")
    return buffer.getvalue()
