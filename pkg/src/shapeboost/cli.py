"""Command-line harness: grid search, training, evaluation and reports.

Exit codes: 0 on success, 2 on invalid input or parameters, 3 on an
internal invariant breach.
"""

from __future__ import annotations

import argparse
import datetime
import sys
from pathlib import Path

import numpy as np

from . import experiment, theory
from .core import extract_patterns
from .data import load_ucr, znormalize
from .exceptions import InternalError, ShapeboostError
from .kernels import DEFAULT_SIGMA_GRID, KernelSpec
from .modelio import (
    load_model,
    pattern_report,
    pattern_report_csv,
    pattern_report_svg,
    save_model,
    sparsity_report,
)

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_INTERNAL = 3


def _add_common_training_flags(p):
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="norm budget of each weak hypothesis")
    p.add_argument("--rounds", type=int, default=100,
                   help="boosting iteration cap")
    p.add_argument("--dc-iters", type=int, default=10,
                   help="weak-learner iteration cap")
    p.add_argument("--eps", type=float, default=1e-4,
                   help="boosting early-stop slack")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--znorm", action="store_true",
                   help="z-normalize each series before training")
    p.add_argument("--kernel", choices=["gaussian", "linear"],
                   default="gaussian")
    p.add_argument("--sigma-grid", type=float, nargs="+", default=None,
                   help="candidate gaussian bandwidths "
                        "(default 1e-4 ... 1e4)")


def _load(path, znorm):
    ds = load_ucr(path)
    return znormalize(ds) if znorm else ds


def build_parser():
    parser = argparse.ArgumentParser(
        prog="shapeboost",
        description="Boosted kernelized-pattern time-series classifier")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("grid", help="cross-validated (length, nu) grid search")
    g.add_argument("train_path")
    g.add_argument("--lfrac", type=float, nargs="+",
                   default=list(experiment.DEFAULT_LENGTH_FRACTIONS))
    g.add_argument("--nu", type=float, nargs="+",
                   default=list(experiment.DEFAULT_NU_GRID))
    g.add_argument("--folds", type=int, default=5)
    g.add_argument("--out", default="grid_cv.csv", help="CV table CSV path")
    _add_common_training_flags(g)

    t = sub.add_parser("train", help="train on a dataset and save a model")
    t.add_argument("train_path")
    t.add_argument("--lfrac", type=float, default=None,
                   help="window length as a fraction of L")
    t.add_argument("--ell", type=int, default=None,
                   help="window length (overrides --lfrac)")
    t.add_argument("--nu", type=float, default=0.1)
    t.add_argument("--sigma", type=float, default=None,
                   help="gaussian bandwidth (default: variance heuristic)")
    t.add_argument("--model", default="model.json", help="output model path")
    t.add_argument("--trace", default=None, help="optional trace CSV path")
    _add_common_training_flags(t)

    e = sub.add_parser("eval", help="accuracy of a saved model on a dataset")
    e.add_argument("model_path")
    e.add_argument("test_path")
    e.add_argument("--znorm", action="store_true")

    r = sub.add_parser("report", help="sparsity and pattern reports")
    r.add_argument("model_path")
    r.add_argument("--instance-from", default=None,
                   help="dataset file to take the report instance from")
    r.add_argument("--instance-index", type=int, default=0)
    r.add_argument("--csv", default=None, help="pattern report CSV path")
    r.add_argument("--svg", default=None, help="pattern overlay SVG path")
    r.add_argument("--znorm", action="store_true")

    th = sub.add_parser(
        "theory",
        help="numerically check the complexity bound on 2-d pattern banks")
    th.add_argument("--data", default=None,
                    help="dataset file; omitted: random banks")
    th.add_argument("--banks", type=int, default=10,
                    help="number of random banks when no dataset is given")
    th.add_argument("--m", type=int, default=4)
    th.add_argument("--q", type=int, default=5)
    th.add_argument("--trials", type=int, default=10_000)
    th.add_argument("--directions", type=int, default=2000)
    th.add_argument("--grid-size", type=int, default=720)
    th.add_argument("--seed", type=int, default=0)
    th.add_argument("--out", default="theory.csv")
    return parser


def _cmd_grid(args) -> int:
    ds = _load(args.train_path, args.znorm)
    spec = experiment.GridSpec(length_fractions=tuple(args.lfrac),
                               nu_grid=tuple(args.nu),
                               folds=args.folds, seed=args.seed)
    result = experiment.grid_search(
        ds, spec, lam=args.lam, max_rounds=args.rounds, stop_eps=args.eps,
        dc_max_iter=args.dc_iters, kernel=args.kernel,
        sigma_grid=args.sigma_grid or DEFAULT_SIGMA_GRID)
    result.to_csv(args.out)
    for c in result.cells:
        print(f"lfrac={c.length_frac} ell={c.ell} nu={c.nu} "
              f"sigma={c.sigma} cv_accuracy={c.mean_accuracy:.4f}")
    print(f"best: ell={result.best_ell} nu={result.best_nu} "
          f"sigma={result.best_sigma}")
    print(f"table written to {args.out}")
    return EXIT_OK


def _cmd_train(args) -> int:
    ds = _load(args.train_path, args.znorm)
    if args.ell is not None:
        ell = args.ell
    elif args.lfrac is not None:
        ell = experiment.resolve_ell(args.lfrac, ds.series_length)
    else:
        ell = experiment.resolve_ell(0.1, ds.series_length)
    model, trace = experiment.fit_dataset(
        ds, ell=ell, nu=args.nu, lam=args.lam, max_rounds=args.rounds,
        stop_eps=args.eps, dc_max_iter=args.dc_iters, kernel=args.kernel,
        sigma=args.sigma, sigma_grid=args.sigma_grid or DEFAULT_SIGMA_GRID,
        seed=args.seed,
        created_at=datetime.datetime.now(datetime.timezone.utc).isoformat())
    save_model(model, args.model)
    if args.trace:
        trace.to_csv(args.trace)
    last = trace.records[-1]
    print(f"trained {len(trace.records)} rounds "
          f"(stopped_early={trace.stopped_early}); "
          f"gamma={last.gamma:.6f} margin={trace.margin:.6f} "
          f"primal_dual_gap={trace.primal_dual_gap:.2e}")
    rep = sparsity_report(model)
    print(f"active terms={rep.active_terms} nonzero alpha={rep.nonzero_alpha}"
          f"/{rep.denominator} ({rep.percent:.3f}%)")
    print(f"model written to {args.model}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    model = load_model(args.model_path)
    ds = _load(args.test_path, args.znorm)
    accuracy = experiment.evaluate_model(model, ds)
    print(f"accuracy={accuracy:.6f} ({len(ds)} instances)")
    return EXIT_OK


def _cmd_report(args) -> int:
    model = load_model(args.model_path)
    rep = sparsity_report(model)
    print(f"active_terms={rep.active_terms}")
    print(f"nonzero_alpha={rep.nonzero_alpha}")
    print(f"denominator={rep.denominator}")
    print(f"percent={rep.percent:.4f}")
    if args.instance_from:
        ds = _load(args.instance_from, args.znorm)
        series = ds.instances[args.instance_index].series
        records = pattern_report(model, series)
        print(f"pattern records: {len(records)}")
        if args.csv:
            pattern_report_csv(records, args.csv)
            print(f"pattern report written to {args.csv}")
        if args.svg:
            pattern_report_svg(records, series, args.svg)
            print(f"overlay written to {args.svg}")
    return EXIT_OK


def _theory_rows(args):
    rng = np.random.default_rng(args.seed)
    if args.data:
        ds = load_ucr(args.data)
        banks = [extract_patterns(ds.instances, 2)]
    else:
        banks = []
        for _ in range(args.banks):
            patterns = rng.normal(size=(args.m, args.q, 2))
            banks.append(extract_patterns_from_array(patterns))
    for bank in banks:
        exact = theory.count_theta_2d(bank)
        sampled = theory.count_theta_sampled(
            bank, KernelSpec("linear"), args.directions, seed=args.seed)
        R = float(np.linalg.norm(bank.flat_patterns, axis=1).max())
        grid = theory.unit_circle_grid(args.grid_size)
        estimate, stderr = theory.gaussian_complexity_mc(
            bank.patterns, grid, args.trials, seed=args.seed)
        params = theory.ComplexityParams(R=R, lam=1.0, m=bank.n_instances,
                                         Q=bank.patterns_per_instance, ell=2)
        bound = theory.gaussian_complexity_bound(params, exact.count)
        yield (bank.n_instances, bank.patterns_per_instance, 2, exact.count,
               sampled.count, estimate, bound,
               estimate <= bound + 3 * stderr)


def extract_patterns_from_array(patterns: np.ndarray):
    """Wrap an (m, Q, ell) array directly as a pattern bank."""
    from .core import PatternBank
    m, Q, ell = patterns.shape
    return PatternBank(pattern_length=ell, patterns_per_instance=Q,
                       patterns=np.asarray(patterns, dtype=float))


def _cmd_theory(args) -> int:
    header = ("m,Q,ell,theta_exact,theta_sampled,gc_estimate,"
              "complexity_bound,bound_satisfied")
    lines = [header]
    for row in _theory_rows(args):
        lines.append(",".join(str(v) for v in row))
    Path(args.out).write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    print(f"table written to {args.out}")
    return EXIT_OK


_COMMANDS = {
    "grid": _cmd_grid,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "report": _cmd_report,
    "theory": _cmd_theory,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ShapeboostError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
