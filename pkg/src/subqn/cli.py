"""Command-line entry points.

Subcommands: train a solver on a LIBSVM dataset, run a built-in
two-dimensional counterexample, demo the line-segmentation kernel, or
sweep the regularization constant.  Report paths write delimited text
plus a rendered figure alongside.  Exit codes: 0 success, 1 runtime
failure, 2 usage error.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from .data_io import DataFormatError, load_libsvm
from .objectives import (
    ANALYTIC_PROBLEMS,
    BinaryHingeObjective,
    L1LogisticObjective,
    MulticlassHingeObjective,
    MultilabelHingeObjective,
    analytic_objective,
    analytic_start,
    uniform_label_loss,
)
from .line_search import WolfeParams
from .segmentation import LineSet, naive_envelope, segment_max_lines
from .solver import SolverConfig, solve, solve_gd, solve_subgd, trace_to_csv

LOSSES = ("binary-hinge", "multiclass-hinge", "multilabel-hinge", "l1-logistic")
SOLVERS = ("sublbfgs", "subbfgs", "gd", "subgd")
LOSS_KIND = {
    "binary-hinge": "binary",
    "l1-logistic": "binary",
    "multiclass-hinge": "multiclass",
    "multilabel-hinge": "multilabel",
}
DEFAULT_LAMBDAS = "1e-6,1e-5,1e-4,1e-3,1e-2,1e-1"


class UsageError(Exception):
    pass


def _add_solver_flags(parser):
    parser.add_argument("--loss", choices=LOSSES, default="binary-hinge")
    parser.add_argument("--solver", choices=SOLVERS, default="sublbfgs")
    parser.add_argument("--lambda", dest="lam", type=float, default=1e-2,
                        help="regularization constant")
    parser.add_argument("--margin", type=float, default=1.0,
                        help="uniform label-loss margin for multiclass/multilabel")
    parser.add_argument("--buffer", type=int, default=15,
                        help="limited-memory buffer size")
    parser.add_argument("--eps", type=float, default=1e-5,
                        help="direction-finding duality-gap tolerance")
    parser.add_argument("--eps-at-zero", type=float, default=None,
                        help="relaxed direction tolerance at an all-zero start")
    parser.add_argument("--kmax", type=int, default=50,
                        help="direction-finding iteration limit")
    parser.add_argument("--h", type=float, default=1e-8,
                        help="lower bound enforced on s'y/y'y")
    parser.add_argument("--skip-ratio", type=float, default=1e-12,
                        help="skip curvature updates when s'y/s's falls below this")
    parser.add_argument("--c1", type=float, default=1e-4)
    parser.add_argument("--c2", type=float, default=0.9)
    parser.add_argument("--max-iters", type=int, default=500)
    parser.add_argument("--max-seconds", type=float, default=None)
    parser.add_argument("--tol", type=float, default=1e-8,
                        help="relative-improvement stopping tolerance")
    parser.add_argument("--window", type=int, default=5,
                        help="iterations averaged by the stopping rule")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1,
                        help="reserved; objective evaluation is vectorized")
    parser.add_argument("--dim-override", type=int, default=None,
                        help="force the feature dimension when loading data")
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="line_search", action="store_const",
                      const="exact", help="exact line search (default)")
    mode.add_argument("--backtracking", dest="line_search", action="store_const",
                      const="backtracking", help="backtracking Wolfe line search")
    parser.set_defaults(line_search="exact")


def _config_from_args(args, **overrides):
    fields = dict(
        direction_tol=args.eps,
        direction_tol_at_zero=args.eps_at_zero,
        direction_max_iterations=args.kmax,
        curvature_floor=args.h,
        skip_ratio=args.skip_ratio,
        wolfe=WolfeParams(c1=args.c1, c2=args.c2),
        buffer_size=args.buffer,
        dense=(args.solver == "subbfgs"),
        max_iterations=args.max_iters,
        max_seconds=args.max_seconds,
        improvement_tol=args.tol,
        improvement_window=args.window,
        seed=args.seed,
        line_search=args.line_search,
    )
    fields.update(overrides)
    return SolverConfig(**fields)


def _build_objective(args, dataset):
    if args.loss == "binary-hinge":
        return BinaryHingeObjective(args.lam, dataset.X, dataset.labels)
    if args.loss == "l1-logistic":
        return L1LogisticObjective(args.lam, dataset.X, dataset.labels)
    label_loss = uniform_label_loss(dataset.num_classes, args.margin)
    if args.loss == "multiclass-hinge":
        return MulticlassHingeObjective(
            args.lam, dataset.X, dataset.labels, dataset.num_classes, label_loss
        )
    return MultilabelHingeObjective(
        args.lam, dataset.X, dataset.label_sets, dataset.num_classes, label_loss
    )


def _run_solver(name, objective, config, w0=None):
    if name == "gd":
        return solve_gd(objective, config, w0)
    if name == "subgd":
        return solve_subgd(objective, config, w0)
    return solve(objective, config, w0)


def _load_for_loss(args):
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    kind = LOSS_KIND[args.loss]
    return load_libsvm(args.data, kind, dim_override=args.dim_override)


def _write_trace_outputs(trace, trace_path, no_figure, title):
    trace_to_csv(trace, trace_path)
    wrote = [str(trace_path)]
    if not no_figure:
        from .plotting import save_trace_figure

        figure_path = Path(trace_path).with_suffix(".png")
        save_trace_figure(trace, figure_path, title)
        wrote.append(str(figure_path))
    return wrote


def cmd_train(args):
    dataset = _load_for_loss(args)
    objective = _build_objective(args, dataset)
    config = _config_from_args(args)
    w, trace = _run_solver(args.solver, objective, config)
    stats = dataset.stats()
    print(f"data: n={stats['n']} d={stats['d']} nnz={stats['nnz']} "
          f"sparsity={stats['sparsity_percent']:.1f}%")
    print(f"solver: {args.solver} loss: {args.loss} lambda: {args.lam:g}")
    print(f"iterations: {trace.iterations}")
    print(f"final objective: {trace.records[-1].objective!r}")
    print(f"termination: {trace.reason}")
    if args.trace:
        for path in _write_trace_outputs(
            trace, args.trace, args.no_figure, f"{args.solver} on {Path(args.data).name}"
        ):
            print(f"wrote {path}")
    if args.weights:
        np.savetxt(args.weights, w)
        print(f"wrote {args.weights}")
    return 0


COUNTEREXAMPLE_NOTES = {
    "toy": "optimum at the origin; reached exactly at the second step",
    "wolfe": "steepest descent stalls at the origin; this solver escapes",
    "hul": "plateau objective; terminates on the -100 floor",
    "lo": "unbounded objective; descent detected within a few steps",
}


def _counterexample_verdict(name, w, trace):
    values = trace.objectives
    if name == "toy":
        ok = len(values) >= 3 and float(np.linalg.norm(w)) <= 1e-9
        detail = f"|w| = {float(np.linalg.norm(w)):.3g} after {trace.iterations} iterations"
    elif name == "wolfe":
        ok = (values < -1e3).any() and trace.iterations <= 10
        detail = f"objective {values.min():.3g} within {trace.iterations} iterations"
    elif name == "hul":
        ok = abs(values[-1] + 100.0) <= 1e-9
        detail = f"final objective {float(values[-1])!r}"
    else:
        ok = (values < -1e6).any() and trace.iterations <= 5
        detail = f"objective {values.min():.3g} within {trace.iterations} iterations"
    return ok, detail


def cmd_counterexample(args):
    objective = analytic_objective(args.name)
    config = SolverConfig(
        dense=True, direction_tol=1e-5, curvature_floor=1e-8,
        seed=args.seed, max_iterations=args.max_iters,
    )
    w0 = analytic_start(args.name)
    w, trace = solve(objective, config, w0)
    print(f"{args.name}: {COUNTEREXAMPLE_NOTES[args.name]}")
    print(f"start: {w0.tolist()}")
    for r in trace.records:
        step = "-" if not np.isfinite(r.step_size) else f"{r.step_size:.6g}"
        print(f"  iter {r.iteration}: objective {r.objective:.6g} step {step}")
    print(f"termination: {trace.reason}")
    ok, detail = _counterexample_verdict(args.name, w, trace)
    print(f"verdict: {'pass' if ok else 'FAIL'} ({detail})")
    if args.trace:
        for path in _write_trace_outputs(trace, args.trace, args.no_figure, args.name):
            print(f"wrote {path}")
    return 0 if ok else 1


def cmd_segment_demo(args):
    rows = []
    with open(args.lines) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise UsageError(f"line {lineno}: expected 'slope offset'")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise UsageError(f"line {lineno}: bad number") from None
    if not rows:
        raise UsageError(f"{args.lines}: no lines")
    lines = LineSet([a for a, _ in rows], [b for _, b in rows])
    try:
        upper = float(args.upper)
    except ValueError:
        raise UsageError(f"--upper must be a number or inf, got {args.upper!r}") from None
    stack = segment_max_lines(lines, args.lower, upper)
    print("breakpoint,line_index,slope,offset")
    for eta, idx in stack:
        print(f"{float(eta)!r},{idx},{float(lines.slopes[idx])!r},"
              f"{float(lines.offsets[idx])!r}")
    status = 0
    if args.verify:
        reference = naive_envelope(lines, args.lower, upper)
        same = len(reference) == len(stack) and all(
            abs(e1 - e2) <= 1e-9 * max(1.0, abs(e1)) for (e1, _), (e2, _) in zip(stack, reference)
        )
        print(f"verification against the quadratic-time sweep: {'OK' if same else 'MISMATCH'}")
        if not same:
            status = 1
    if args.figure:
        from .plotting import save_envelope_figure

        save_envelope_figure(lines, stack, args.lower, upper, args.figure)
        print(f"wrote {args.figure}")
    return status


def cmd_sweep(args):
    dataset = _load_for_loss(args)
    lams = [float(tok) for tok in args.lambdas.split(",") if tok]
    if not lams:
        raise UsageError("--lambdas must name at least one value")
    rows = []
    for lam in lams:
        args.lam = lam
        objective = _build_objective(args, dataset)
        reference_config = _config_from_args(
            args, improvement_tol=1e-8, improvement_window=5,
            max_iterations=args.ref_iters,
        )
        _, reference = _run_solver(args.solver, objective, reference_config)
        ref_value = reference.records[-1].objective
        threshold = ref_value + 0.02 * abs(ref_value)
        initial = objective.value(np.zeros(objective.dim))
        if initial <= threshold:
            rows.append(dict(lam=lam, reference=ref_value, threshold=threshold,
                             seconds=0.0, iterations=0, status="initial point optimal"))
            continue
        _, timed = _run_solver(args.solver, objective, _config_from_args(args))
        seconds = None
        iterations = None
        for r in timed.records:
            if r.objective <= threshold:
                seconds = r.cpu_seconds
                iterations = r.iteration
                break
        status = "ok" if seconds is not None else "not reached"
        rows.append(dict(lam=lam, reference=ref_value, threshold=threshold,
                         seconds=seconds, iterations=iterations, status=status))

    header = "lambda,reference_objective,threshold,seconds_to_threshold,iterations,status"
    print(header)
    out_lines = [header]
    for row in rows:
        seconds = "" if row["seconds"] is None else repr(row["seconds"])
        iters = "" if row["iterations"] is None else str(row["iterations"])
        text = (f"{row['lam']:g},{row['reference']!r},{row['threshold']!r},"
                f"{seconds},{iters},{row['status']}")
        print(text)
        out_lines.append(text)
    if args.out:
        Path(args.out).write_text("\n".join(out_lines) + "\n")
        print(f"wrote {args.out}")
        if not args.no_figure:
            from .plotting import save_sweep_figure

            figure_path = Path(args.out).with_suffix(".png")
            save_sweep_figure(rows, figure_path, f"{args.solver} on {Path(args.data).name}")
            print(f"wrote {figure_path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="subqn",
        description="Quasi-Newton solvers for nonsmooth convex risk minimization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="fit a loss on a LIBSVM dataset")
    train.add_argument("--data", required=True)
    train.add_argument("--trace", default=None, help="write the per-iteration CSV here")
    train.add_argument("--weights", default=None, help="write the final weights here")
    train.add_argument("--no-figure", action="store_true",
                       help="skip the figure next to the trace CSV")
    _add_solver_flags(train)
    train.set_defaults(func=cmd_train)

    ce = sub.add_parser("counterexample", help="run a built-in 2-d test objective")
    ce.add_argument("name", choices=sorted(ANALYTIC_PROBLEMS))
    ce.add_argument("--seed", type=int, default=0)
    ce.add_argument("--max-iters", type=int, default=50)
    ce.add_argument("--trace", default=None)
    ce.add_argument("--no-figure", action="store_true")
    ce.set_defaults(func=cmd_counterexample)

    seg = sub.add_parser("segment-demo", help="segment the upper envelope of lines")
    seg.add_argument("--lines", required=True, help="file of 'slope offset' rows")
    seg.add_argument("--lower", type=float, default=0.0)
    seg.add_argument("--upper", default="inf")
    seg.add_argument("--verify", action="store_true",
                     help="check against the quadratic-time sweep")
    seg.add_argument("--figure", default=None)
    seg.set_defaults(func=cmd_segment_demo)

    sweep = sub.add_parser("sweep", help="time-to-threshold across regularization values")
    sweep.add_argument("--data", required=True)
    sweep.add_argument("--lambdas", default=DEFAULT_LAMBDAS)
    sweep.add_argument("--out", default=None, help="write the summary CSV here")
    sweep.add_argument("--no-figure", action="store_true")
    sweep.add_argument("--ref-iters", type=int, default=2000,
                       help="iteration cap for the reference optimum run")
    _add_solver_flags(sweep)
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
