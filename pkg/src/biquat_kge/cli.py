"""Command-line interface.

Subcommands: train, eval, gradcheck, factorize, rotate-demo, selftest.
Exit codes: 0 success, 1 computation failure, 2 usage error.  Metrics and
logs go to files; human-readable summaries go to stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import backends
from .algebra import Biquaternion, factorize
from .checkpoint import load_checkpoint, save_checkpoint
from .data import build_graph, build_filter, load_split
from .demo import hyperbolic_trajectory, trajectory_csv
from .evaluate import evaluate, per_relation_csv, report_to_json, report_to_text
from .exceptions import Error
from .fdcheck import check_instance
from .model import MODES
from .selfcheck import DEFAULT_SEED, run_all
from .train import TrainConfig, train


def _existing_file(value: str) -> str:
    if not os.path.isfile(value):
        raise argparse.ArgumentTypeError(f"file not found: {value}")
    return value


def _min_steps(value: str) -> int:
    steps = int(value)
    if steps < 2:
        raise argparse.ArgumentTypeError("steps must be >= 2")
    return steps


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biquat-kge",
        description="Biquaternion knowledge-graph embeddings: training, "
                    "evaluation, and algebra demos.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a model and keep the best "
                                           "validation checkpoint")
    p_train.add_argument("--train", required=True, type=_existing_file,
                         help="training triples (TSV)")
    p_train.add_argument("--valid", required=True, type=_existing_file,
                         help="validation triples (TSV)")
    p_train.add_argument("--test", type=_existing_file,
                         help="test triples (TSV); include so that ids cover "
                              "the full entity set")
    p_train.add_argument("--dim", type=int, default=128,
                         help="biquaternions per embedding (k)")
    p_train.add_argument("--epochs", type=int, default=200)
    p_train.add_argument("--lr", type=float, default=0.1)
    p_train.add_argument("--batch", type=int, default=300)
    p_train.add_argument("--lambda", dest="lam", type=float, default=1.5e-1,
                         help="global regularization weight")
    p_train.add_argument("--lambda1", type=float, default=2.0,
                         help="entity regularization weight")
    p_train.add_argument("--lambda2", type=float, default=0.5,
                         help="relation regularization weight")
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--eval-every", type=int, default=10)
    p_train.add_argument("--mode", choices=MODES, default="full")
    p_train.add_argument("--threads", type=int, default=1,
                         help="evaluation workers (training is single-worker)")
    p_train.add_argument("--out", required=True, help="checkpoint output path")
    p_train.add_argument("--log", help="JSONL training log path "
                                       "(default: <out>.log.jsonl)")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a checkpoint with filtered "
                                         "ranking")
    p_eval.add_argument("--ckpt", required=True, type=_existing_file)
    p_eval.add_argument("--train", required=True, type=_existing_file,
                        help="the same triple files used for training, so "
                             "that ids line up")
    p_eval.add_argument("--valid", type=_existing_file)
    p_eval.add_argument("--test", type=_existing_file)
    p_eval.add_argument("--split", choices=("train", "valid", "test"),
                        default="test")
    p_eval.add_argument("--threads", type=int, default=1)
    p_eval.add_argument("--report-json", help="write the full report here")
    p_eval.add_argument("--per-relation-csv",
                        help="write relation,count,mrr,hits10 rows here "
                             "(merged raw-relation view)")
    p_eval.set_defaults(func=cmd_eval)

    p_grad = sub.add_parser("gradcheck", help="compare analytic gradients "
                                              "with finite differences")
    p_grad.add_argument("--seed", type=int, default=0)
    p_grad.add_argument("--steps", type=float, default=1e-5,
                        help="finite-difference step size")
    p_grad.add_argument("--threshold", type=float, default=1e-4,
                        help="maximum acceptable relative error")
    p_grad.add_argument("--corrupt", action="store_true",
                        help=argparse.SUPPRESS)
    p_grad.set_defaults(func=cmd_gradcheck)

    p_fact = sub.add_parser("factorize", help="split a unit biquaternion "
                                              "into circular and hyperbolic "
                                              "rotations")
    p_fact.add_argument("coeffs", type=float, nargs=8,
                        metavar=("w_r", "w_i", "x_r", "x_i",
                                 "y_r", "y_i", "z_r", "z_i"))
    p_fact.add_argument("--normalize", action="store_true",
                        help="divide by the norm before factorizing")
    p_fact.set_defaults(func=cmd_factorize)

    p_demo = sub.add_parser("rotate-demo", help="hyperbolic trajectory of a "
                                                "2-D biquaternion as CSV")
    p_demo.add_argument("--wr", type=float, default=1.0)
    p_demo.add_argument("--wi", type=float, default=2.0)
    p_demo.add_argument("--xr", type=float, default=3.0)
    p_demo.add_argument("--xi", type=float, default=4.0)
    p_demo.add_argument("--phi-min", type=float, default=-2.0)
    p_demo.add_argument("--phi-max", type=float, default=2.0)
    p_demo.add_argument("--steps", type=_min_steps, default=81)
    p_demo.add_argument("--out", help="CSV output path (default: stdout)")
    p_demo.set_defaults(func=cmd_rotate_demo)

    p_self = sub.add_parser("selftest", help="run the algebra, gradient, and "
                                             "ranking property suites")
    p_self.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_self.set_defaults(func=cmd_selftest)
    return parser


def cmd_train(args) -> int:
    train_triples = load_split(args.train)
    valid_triples = load_split(args.valid)
    test_triples = load_split(args.test) if args.test else []
    kg = build_graph(train_triples, valid_triples, test_triples)
    config = TrainConfig(
        epochs=args.epochs, lr=args.lr, batch_size=args.batch, k=args.dim,
        lam=args.lam, lam1=args.lambda1, lam2=args.lambda2, seed=args.seed,
        eval_every=args.eval_every, mode=args.mode)
    print(f"backend={backends.active().NAME} seed={config.seed} "
          f"entities={kg.n_entities} relations={kg.n_relations} "
          f"train={len(kg.train)}")
    result = train(kg, config, eval_workers=args.threads)
    save_checkpoint(result.params, args.out)
    log_path = args.log or args.out + ".log.jsonl"
    with open(log_path, "w", encoding="utf-8") as handle:
        for entry in result.log:
            handle.write(json.dumps(entry, sort_keys=True) + "\n")
    final_loss = result.log[-1]["mean_batch_loss"] if result.log else float("nan")
    print(f"final mean batch loss {final_loss:.6f}")
    if result.best_valid_mrr is not None:
        print(f"best valid MRR {result.best_valid_mrr:.4f} "
              f"at epoch {result.best_epoch}")
    print(f"checkpoint written to {args.out}; log written to {log_path}")
    return 0


def cmd_eval(args) -> int:
    params = load_checkpoint(args.ckpt)
    kg = build_graph(
        load_split(args.train),
        load_split(args.valid) if args.valid else [],
        load_split(args.test) if args.test else [],
    )
    if (params.n_entities, params.n_relations) != (kg.n_entities, kg.n_relations):
        raise Error(
            f"checkpoint was trained on {params.n_entities} entities / "
            f"{params.n_relations} relations, but these files define "
            f"{kg.n_entities} / {kg.n_relations}")
    report = evaluate(params, kg, args.split, build_filter(kg),
                      n_workers=args.threads)
    print(report_to_text(report))
    if args.report_json:
        with open(args.report_json, "w", encoding="utf-8") as handle:
            handle.write(report_to_json(report) + "\n")
    if args.per_relation_csv:
        with open(args.per_relation_csv, "w", encoding="utf-8") as handle:
            handle.write(per_relation_csv(report))
    return 0


def cmd_gradcheck(args) -> int:
    result = check_instance(args.seed, step=args.steps, corrupt=args.corrupt)
    print(f"seed={args.seed} step={args.steps:g} "
          f"max relative error {result.max_rel_error:.3e} "
          f"(threshold {args.threshold:g})")
    if result.max_rel_error >= args.threshold:
        print(f"worst coordinate {result.worst_coordinate}: "
              f"analytic {result.analytic:.6e} vs numeric {result.numeric:.6e}")
        return 1
    return 0


def cmd_factorize(args) -> int:
    q = Biquaternion.from_reals(*args.coeffs)
    if args.normalize:
        try:
            q = q.normalized()
        except ValueError as exc:
            raise Error(str(exc)) from exc
    result = factorize(q)
    recon = result.h.matrix_rep() @ result.u.to_biquaternion().matrix_rep()
    error = float(np.max(np.abs(recon - q.matrix_rep())))
    print(f"theta = {result.theta:.12g}")
    print(f"phi   = {result.phi:.12g}")
    print(f"axis  = ({result.axis[0]:.12g}, {result.axis[1]:.12g}, "
          f"{result.axis[2]:.12g})")
    if result.degenerate:
        print("degenerate: axis direction is not unique")
    print(f"max reconstruction error = {error:.3e}")
    return 0


def cmd_rotate_demo(args) -> int:
    phis = np.linspace(args.phi_min, args.phi_max, args.steps)
    rows = hyperbolic_trajectory(args.wr, args.wi, args.xr, args.xi, phis)
    text = trajectory_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
        print(f"{args.steps} rows written to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_selftest(args) -> int:
    print(f"backend={backends.active().NAME} seed={args.seed}")
    results = run_all(seed=args.seed)
    for result in results:
        print(result.summary())
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (Error, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
