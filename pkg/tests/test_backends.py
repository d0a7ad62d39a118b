"""Parity between the compiled kernels and the numpy fallback."""

import subprocess
import sys

import numpy as np
import pytest

from biquat_kge import backends
from biquat_kge.backends import numpy_backend
from biquat_kge.fdcheck import random_instance
from biquat_kge.model import loss_and_grad

needs_compiled = pytest.mark.skipif(
    "compiled" not in backends.available(),
    reason="compiled extension not built")


def _random_batch(rng, b=7, k=5):
    return (rng.normal(size=(b, 8, k)), rng.normal(size=(b, 8, k)),
            rng.normal(size=(b, 8, k)))


@needs_compiled
class TestKernelParity:
    def test_hamilton_forward(self, rng):
        compiled = backends.get("compiled")
        p, r, _ = _random_batch(rng)
        np.testing.assert_allclose(compiled.hamilton_batch(p, r),
                                   numpy_backend.hamilton_batch(p, r),
                                   rtol=1e-13, atol=1e-13)

    def test_hamilton_backward(self, rng):
        compiled = backends.get("compiled")
        p, r, ghat = _random_batch(rng)
        gp_c, gr_c = compiled.hamilton_backward_batch(p, r, ghat)
        gp_n, gr_n = numpy_backend.hamilton_backward_batch(p, r, ghat)
        np.testing.assert_allclose(gp_c, gp_n, rtol=1e-13, atol=1e-13)
        np.testing.assert_allclose(gr_c, gr_n, rtol=1e-13, atol=1e-13)

    def test_ce_weights(self, rng):
        compiled = backends.get("compiled")
        scores = np.ascontiguousarray(rng.normal(scale=8.0, size=(6, 40)))
        tails = rng.integers(0, 40, size=6)
        loss_c, w_c = compiled.ce_weights(scores, tails)
        loss_n, w_n = numpy_backend.ce_weights(scores.copy(), tails)
        assert abs(loss_c - loss_n) < 1e-10 * max(1.0, abs(loss_n))
        np.testing.assert_allclose(w_c, w_n, rtol=1e-13, atol=1e-15)

    def test_full_loss_and_grad(self):
        params, batch, lam, lam1, lam2 = random_instance(99)
        results = {}
        for name in ("numpy", "compiled"):
            backends.use(name)
            try:
                results[name] = loss_and_grad(params, batch, lam, lam1, lam2)
            finally:
                backends.use("compiled" if "compiled" in backends.available()
                             else "numpy")
        loss_n, grads_n = results["numpy"]
        loss_c, grads_c = results["compiled"]
        assert abs(loss_n - loss_c) < 1e-12 * max(1.0, abs(loss_n))
        for a, b in zip(grads_n.arrays(), grads_c.arrays()):
            np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)


class TestNumpyKernels:
    def test_ce_weights_against_direct_formula(self, rng):
        scores = rng.normal(size=(4, 9))
        tails = rng.integers(0, 9, size=4)
        loss, weights = numpy_backend.ce_weights(scores.copy(), tails)
        expected = 0.0
        for i in range(4):
            for t in range(9):
                sign = -1.0 if t == tails[i] else 1.0
                expected += np.log1p(np.exp(sign * scores[i, t]))
        assert abs(loss - expected) < 1e-10
        rows = np.arange(4)
        sig = 1.0 / (1.0 + np.exp(-scores))
        sig[rows, tails] -= 1.0
        np.testing.assert_allclose(weights, sig, rtol=1e-12, atol=1e-12)

    def test_ce_weights_extreme_scores_stay_finite(self):
        scores = np.array([[800.0, -800.0, 0.0]])
        tails = np.array([0])
        loss, weights = numpy_backend.ce_weights(scores, tails)
        assert np.isfinite(loss)
        assert np.isfinite(weights).all()


class TestSelection:
    def test_active_is_available(self):
        assert backends.active().NAME in backends.available()

    def test_use_switches(self):
        original = backends.active().NAME
        try:
            assert backends.use("numpy").NAME == "numpy"
            assert backends.active().NAME == "numpy"
        finally:
            backends.use(original)

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError):
            backends.get("fortran")

    def test_environment_override(self):
        """BIQUAT_KGE_BACKEND=numpy forces the fallback in a fresh process."""
        code = ("import biquat_kge.backends as b; "
                "print(b.active().NAME)")
        out = subprocess.run(
            [sys.executable, "-c", code],
            env={"PATH": "/usr/bin:/bin", "BIQUAT_KGE_BACKEND": "numpy"},
            capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "numpy"
