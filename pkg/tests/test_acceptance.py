"""Acceptance suite: each test prints one pass/fail line for its criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see every line.
"""

import time

import pytest

from biquat_kge.checkpoint import checkpoint_bytes
from biquat_kge.data import build_filter, build_graph
from biquat_kge.evaluate import evaluate
from biquat_kge.selfcheck import (algebra_suite, factorization_suite,
                                  gradient_suite, quaternion_equivalence_suite,
                                  ranking_suite, rotation_demo_suite)
from biquat_kge.synthetic import toy_graph
from biquat_kge.train import TrainConfig, train

SEED = 20240809


def _report(number: int, passed: bool, detail: str):
    print(f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} - {detail}")
    assert passed, detail


def test_criterion_1_algebra_identities():
    """1000 random pairs: product identities hold to 1e-10 within 5 s."""
    result = algebra_suite(n=1000, seed=SEED)
    detail = (f"max rel err {max(result.details.values()):.2e} "
              f"(tol 1e-10) in {result.elapsed:.2f}s")
    _report(1, result.passed and result.elapsed < 5.0, detail)


def test_criterion_2_factorization():
    """1000 random unit biquaternions: reconstruction and factor properties."""
    result = factorization_suite(n=1000, seed=SEED)
    detail = "; ".join(f"{k}={v:.2e}" for k, v in result.details.items())
    _report(2, result.passed, detail)


def test_criterion_3_gradient_check():
    """100 random instances: analytic vs central differences < 1e-4, < 30 s."""
    result = gradient_suite(n_instances=100, seed=SEED, step=1e-5, tol=1e-4)
    detail = (f"max rel err {result.details['max_rel_error']:.2e} "
              f"(tol 1e-4) in {result.elapsed:.1f}s")
    _report(3, result.passed and result.elapsed < 30.0, detail)


def test_criterion_4_ranking_oracle():
    """200 random score vectors match the brute-force ranking oracle."""
    result = ranking_suite(n=200, seed=SEED)
    detail = (f"mismatches {int(result.details['mismatches'])}; "
              f"two-query example err {result.details['example_error']:.1e}")
    _report(4, result.passed, detail)


@pytest.fixture(scope="module")
def toy_runs():
    """Toy end-to-end runs shared by criteria 5, 6 and 9."""
    train_names, test_names = toy_graph(seed=0)
    kg = build_graph(train_names, [], test_names)
    kg_filter = build_filter(kg)

    def run(lam: float, epochs: int = 200):
        config = TrainConfig(epochs=epochs, lr=0.1, batch_size=25, k=8,
                             lam=lam, lam1=2.0, lam2=0.5, seed=7)
        started = time.perf_counter()
        result = train(kg, config)
        elapsed = time.perf_counter() - started
        train_mrr = evaluate(result.params, kg, "train", kg_filter).mrr
        test_mrr = evaluate(result.params, kg, "test", kg_filter).mrr
        return result, elapsed, train_mrr, test_mrr

    return kg, run


def test_criterion_5_toy_end_to_end(toy_runs):
    """50-entity graph: test MRR >= 0.60, train MRR >= 0.95, < 2 minutes."""
    _, run = toy_runs
    _, elapsed, train_mrr, test_mrr = run(lam=0.15)
    detail = (f"train MRR {train_mrr:.3f} (>=0.95), test MRR {test_mrr:.3f} "
              f"(>=0.60), {elapsed:.1f}s (<120s)")
    _report(5, train_mrr >= 0.95 and test_mrr >= 0.60 and elapsed < 120.0,
            detail)


def test_criterion_6_regularizer_ablation(toy_runs):
    """Dropping the penalty never fits the training split worse."""
    _, run = toy_runs
    _, _, reg_train_mrr, _ = run(lam=0.15)
    _, _, noreg_train_mrr, _ = run(lam=0.0)
    detail = (f"train MRR without regularizer {noreg_train_mrr:.3f} >= "
              f"with regularizer {reg_train_mrr:.3f}")
    _report(6, noreg_train_mrr >= reg_train_mrr, detail)


def test_criterion_7_quaternion_special_case():
    """quaternion_only scoring matches a pure-quaternion expansion, 1e-12."""
    result = quaternion_equivalence_suite(n=1000, seed=SEED, tol=1e-12)
    detail = f"max abs err {result.details['max_abs_error']:.2e} (tol 1e-12)"
    _report(7, result.passed, detail)


def test_criterion_8_rotate_demo_invariant():
    """81 steps over [-2, 2]: inverse-mapped points sit on the hyperbola."""
    result = rotation_demo_suite(steps=81, phi_min=-2.0, phi_max=2.0)
    detail = (f"max |c^2-s^2-1| {result.details['hyperbola_deviation']:.2e} "
              f"(tol 1e-9); zero-phi row exact="
              f"{result.details['zero_row_error'] == 0.0}")
    _report(8, result.passed, detail)


def test_criterion_9_determinism(toy_runs):
    """Same config and seed: byte-identical checkpoints, identical losses."""
    kg, _ = toy_runs
    config = TrainConfig(epochs=50, lr=0.1, batch_size=25, k=8, lam=0.15,
                         lam1=2.0, lam2=0.5, seed=11)
    first = train(kg, config)
    second = train(kg, config)
    same_bytes = checkpoint_bytes(first.params) == checkpoint_bytes(second.params)
    losses_first = [e["mean_batch_loss"] for e in first.log]
    losses_second = [e["mean_batch_loss"] for e in second.log]
    detail = (f"checkpoints byte-identical={same_bytes}, "
              f"loss logs identical={losses_first == losses_second}")
    _report(9, same_bytes and losses_first == losses_second, detail)
