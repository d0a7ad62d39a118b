"""Benchmark the compiled kernels against the numpy fallback.

Times the three hot kernels in isolation and the full loss/gradient step
that training spends almost all of its time in.

    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --sizes 64x16x2000 --repeats 50
"""

import argparse
import time

import numpy as np

from biquat_kge import backends
from biquat_kge.model import init_parameters, loss_and_grad


def _time(fn, repeats):
    fn()  # warm up
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_size(batch, k, n_entities, repeats):
    rng = np.random.default_rng(0)
    p = rng.normal(size=(batch, 8, k))
    r = rng.normal(size=(batch, 8, k))
    ghat = rng.normal(size=(batch, 8, k))
    scores = np.ascontiguousarray(rng.normal(size=(batch, n_entities)))
    tails = rng.integers(0, n_entities, size=batch)

    params = init_parameters(n_entities, 8, k, seed=1)
    triples = np.column_stack([
        rng.integers(0, n_entities, batch),
        rng.integers(0, 8, batch),
        rng.integers(0, n_entities, batch),
    ])

    rows = []
    for name in backends.available():
        kernel = backends.get(name)
        backends.use(name)
        rows.append({
            "backend": name,
            "hamilton": _time(lambda: kernel.hamilton_batch(p, r), repeats),
            "backward": _time(
                lambda: kernel.hamilton_backward_batch(p, r, ghat), repeats),
            "ce_weights": _time(
                lambda: kernel.ce_weights(scores, tails), repeats),
            "loss_and_grad": _time(
                lambda: loss_and_grad(params, triples, 0.1, 2.0, 0.5), repeats),
        })
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", nargs="+",
                        default=["32x8x500", "128x32x2000", "512x64x5000"],
                        help="problem sizes as BATCHxKxENTITIES")
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    columns = ("hamilton", "backward", "ce_weights", "loss_and_grad")
    original = backends.active().NAME
    try:
        for size in args.sizes:
            batch, k, n_entities = (int(v) for v in size.split("x"))
            print(f"\nbatch={batch} k={k} entities={n_entities} "
                  f"(best of {args.repeats}, milliseconds)")
            print(f"  {'backend':<10}" + "".join(f"{c:>16}" for c in columns))
            rows = bench_size(batch, k, n_entities, args.repeats)
            for row in rows:
                cells = "".join(f"{row[c] * 1e3:>16.3f}" for c in columns)
                print(f"  {row['backend']:<10}{cells}")
            if len(rows) == 2:
                speedup = {c: rows[0][c] / rows[1][c] for c in columns}
                cells = "".join(f"{speedup[c]:>15.2f}x" for c in columns)
                print(f"  {'speedup':<10}{cells}")
    finally:
        backends.use(original)


if __name__ == "__main__":
    main()
