"""Randomized property suites over the algebra, gradients, and ranking.

Each suite draws from its own seeded generator, measures worst-case
errors against an independent oracle, and reports them next to the
tolerance it must meet.  The CLI ``selftest`` subcommand runs all of
them; the test suite reuses them for the acceptance checks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .algebra import (Biquaternion, Quaternion, factorize, factorize_right,
                      random_biquaternion, random_unit_biquaternion)
from .demo import hyperbolic_trajectory
from .evaluate import rank_bottom
from .fdcheck import check_instance
from .model import init_parameters, score

DEFAULT_SEED = 12345


@dataclass
class SuiteResult:
    name: str
    passed: bool
    elapsed: float
    details: dict[str, float] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = []
        for key, value in self.details.items():
            tol = self.tolerances.get(key)
            bound = f" (tol {tol:.1e})" if tol is not None else ""
            parts.append(f"{key}={value:.3e}{bound}")
        return f"{status} {self.name}: {'; '.join(parts)} [{self.elapsed:.2f}s]"


def _finish(name, start, details, tolerances) -> SuiteResult:
    passed = all(details[key] <= tol for key, tol in tolerances.items())
    return SuiteResult(name=name, passed=passed,
                       elapsed=time.perf_counter() - start,
                       details=details, tolerances=tolerances)


def _rel_err(actual: np.ndarray, reference: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(reference))), 1e-30)
    return float(np.max(np.abs(actual - reference))) / scale


def _components(q: Biquaternion) -> np.ndarray:
    return q.vector_rep()


def algebra_suite(n: int = 1000, seed: int = DEFAULT_SEED) -> SuiteResult:
    """Hamilton product versus its matrix forms, conjugation, and norms."""
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = {"vector_form": 0.0, "matrix_form": 0.0,
             "conjugation": 0.0, "norm_multiplicativity": 0.0}
    for _ in range(n):
        q1 = random_biquaternion(rng)
        q2 = random_biquaternion(rng)
        product = q1 * q2

        # V(q1 q2) = M(q2) V(q1)
        worst["vector_form"] = max(worst["vector_form"], _rel_err(
            product.vector_rep(), q2.matrix_rep() @ q1.vector_rep()))
        # M(q1 q2) = M(q2) M(q1)
        worst["matrix_form"] = max(worst["matrix_form"], _rel_err(
            product.matrix_rep(), q2.matrix_rep() @ q1.matrix_rep()))
        # conj(q1 q2) = conj(q2) conj(q1)
        worst["conjugation"] = max(worst["conjugation"], _rel_err(
            _components(product.conjugate()),
            _components(q2.conjugate() * q1.conjugate())))
        # norm(q1 q2)^2 = norm(q1)^2 norm(q2)^2
        lhs = np.array([product.norm() ** 2])
        rhs = np.array([q1.norm() ** 2 * q2.norm() ** 2])
        worst["norm_multiplicativity"] = max(
            worst["norm_multiplicativity"], _rel_err(lhs, rhs))
    tolerances = {key: 1e-10 for key in worst}
    return _finish("algebra-identities", start, worst, tolerances)


def factorization_suite(n: int = 1000, seed: int = DEFAULT_SEED) -> SuiteResult:
    """Rotation-split reconstruction and unit-factor properties."""
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    identity = np.eye(4)
    worst = {key: 0.0 for key in (
        "recon_left", "recon_right", "det_h", "det_u", "orthogonality",
        "norm_split", "pure_scalar")}
    for _ in range(n):
        q = random_unit_biquaternion(rng)
        target = q.matrix_rep()
        left = factorize(q)
        right = factorize_right(q)
        m_h = left.h.matrix_rep()
        m_u = left.u.to_biquaternion().matrix_rep()
        m_hp = right.h.matrix_rep()

        worst["recon_left"] = max(worst["recon_left"],
                                  float(np.max(np.abs(m_h @ m_u - target))))
        worst["recon_right"] = max(worst["recon_right"],
                                   float(np.max(np.abs(m_u @ m_hp - target))))
        worst["det_h"] = max(worst["det_h"], abs(np.linalg.det(m_h) - 1.0))
        worst["det_u"] = max(worst["det_u"], abs(np.linalg.det(m_u) - 1.0))
        worst["orthogonality"] = max(worst["orthogonality"],
                                     float(np.max(np.abs(m_h @ m_h.T - identity))))

        q_r, q_i = q.real_part, q.imag_part
        worst["norm_split"] = max(worst["norm_split"],
                                  abs(q_r.norm() ** 2 - q_i.norm() ** 2 - 1.0))
        worst["pure_scalar"] = max(worst["pure_scalar"],
                                   abs((q_r.conjugate() * q_i).scalar_part()))
    tolerances = {"recon_left": 1e-9, "recon_right": 1e-9, "det_h": 1e-9,
                  "det_u": 1e-9, "orthogonality": 1e-9,
                  "norm_split": 1e-10, "pure_scalar": 1e-10}
    return _finish("factorization", start, worst, tolerances)


def gradient_suite(n_instances: int = 100, seed: int = DEFAULT_SEED,
                   step: float = 1e-5, tol: float = 1e-4) -> SuiteResult:
    """Analytic gradients versus central finite differences."""
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        result = check_instance(int(rng.integers(0, 2 ** 31)), step=step)
        worst = max(worst, result.max_rel_error)
    return _finish("gradient-check", start, {"max_rel_error": worst},
                   {"max_rel_error": tol})


def _rank_oracle(scores: np.ndarray, true_id: int, filtered_out) -> int:
    """Sort-then-insert-last reference: the true entity goes after every
    equal-scored candidate."""
    removed = set(filtered_out)
    entries = [(-s, 0) for idx, s in enumerate(scores)
               if idx != true_id and idx not in removed]
    entries.append((-scores[true_id], 1))
    entries.sort()
    return entries.index((-scores[true_id], 1)) + 1


def ranking_suite(n: int = 200, seed: int = DEFAULT_SEED) -> SuiteResult:
    """rank_bottom versus the brute-force oracle, with ties forced."""
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(n):
        size = int(rng.integers(3, 40))
        if rng.random() < 0.5:
            scores = rng.integers(0, 4, size).astype(float)
        else:
            scores = rng.normal(size=size)
        true_id = int(rng.integers(0, size))
        others = [i for i in range(size) if i != true_id]
        rng.shuffle(others)
        filtered = others[: int(rng.integers(0, max(1, size // 2)))]
        if rank_bottom(scores, true_id, filtered) != _rank_oracle(
                scores, true_id, filtered):
            mismatches += 1

    # Two queries with ranks 1 and 4: MRR 0.625, H@1 0.5, H@3 0.5, H@10 1.0.
    ranks = np.array([1, 4])
    example_err = max(
        abs(float((1.0 / ranks).mean()) - 0.625),
        abs(float((ranks <= 1).mean()) - 0.5),
        abs(float((ranks <= 3).mean()) - 0.5),
        abs(float((ranks <= 10).mean()) - 1.0),
    )
    return _finish("ranking-oracle", start,
                   {"mismatches": float(mismatches), "example_error": example_err},
                   {"mismatches": 0.0, "example_error": 0.0})


def _quaternion_score_oracle(params, head: int, rel: int, tail: int) -> float:
    """Pure-quaternion expansion of the score, one slot at a time."""
    total = 0.0
    for j in range(params.k):
        def quat(table, row):
            w_r, _, x_r, _, y_r, _, z_r, _ = table[row, :, j]
            return Quaternion(w_r, x_r, y_r, z_r)

        moved = (quat(params.entities, head)
                 + quat(params.rel_translate, rel)) * quat(params.rel_rotate, rel)
        target = quat(params.entities, tail)
        total += (moved.w * target.w + moved.x * target.x
                  + moved.y * target.y + moved.z * target.z)
    return total


def quaternion_equivalence_suite(n: int = 1000, seed: int = DEFAULT_SEED,
                                 tol: float = 1e-12) -> SuiteResult:
    """quaternion_only scoring equals an independent quaternion expansion."""
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    params = init_parameters(20, 6, 4, seed=seed, mode="quaternion_only")
    # The default init is small; rescale so scores are O(1) and the
    # absolute tolerance is meaningful.
    for table in params.arrays():
        table *= 5.0
    worst = 0.0
    for _ in range(n):
        head = int(rng.integers(0, params.n_entities))
        rel = int(rng.integers(0, params.n_relations))
        tail = int(rng.integers(0, params.n_entities))
        expected = _quaternion_score_oracle(params, head, rel, tail)
        worst = max(worst, abs(score(params, head, rel, tail) - expected))
    return _finish("quaternion-subsumption", start, {"max_abs_error": worst},
                   {"max_abs_error": tol})


def rotation_demo_suite(steps: int = 81, phi_min: float = -2.0,
                        phi_max: float = 2.0,
                        coeffs: tuple = (1.0, 2.0, 3.0, 4.0),
                        tol: float = 1e-9) -> SuiteResult:
    """Trajectory rows must come back to the unit hyperbola when inverted."""
    start = time.perf_counter()
    w_r, w_i, x_r, x_i = coeffs
    phis = np.linspace(phi_min, phi_max, steps)
    rows = hyperbolic_trajectory(w_r, w_i, x_r, x_i, phis)
    real_map = np.array([[w_r, x_i], [x_r, -w_i]])
    imag_map = np.array([[w_i, -x_r], [x_i, w_r]])
    worst = 0.0
    for row in rows:
        for mat, point in ((real_map, row[1:3]), (imag_map, row[3:5])):
            c, s = np.linalg.solve(mat, point)
            worst = max(worst, abs(c * c - s * s - 1.0))
    zero_rows = rows[rows[:, 0] == 0.0]
    if zero_rows.shape[0] == 1 and tuple(zero_rows[0][1:]) == (w_r, x_r, w_i, x_i):
        zero_row_error = 0.0
    else:
        zero_row_error = 1.0
    return _finish("rotation-demo", start,
                   {"hyperbola_deviation": worst, "zero_row_error": zero_row_error},
                   {"hyperbola_deviation": tol, "zero_row_error": 0.0})


def run_all(seed: int = DEFAULT_SEED) -> list[SuiteResult]:
    return [
        algebra_suite(seed=seed),
        factorization_suite(seed=seed),
        gradient_suite(seed=seed),
        ranking_suite(seed=seed),
        quaternion_equivalence_suite(seed=seed),
        rotation_demo_suite(),
    ]
