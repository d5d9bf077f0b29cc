"""Command line interface.

Subcommands: precondition, polysys-precondition, condition, baseline, bench.
Exit codes: 0 success, 1 usage error, 2 input error, 3 numerical failure.
Reports are CSV with the fixed header iter,value,grad_norm,duality_bound,kF,kappa
and '#'-prefixed summary rows; identical argv and seed give byte-identical files.
"""

import argparse
import math
import os
import sys

import numpy as np

from .bench import correlation_kF_kappa, run_gaussian_suite, run_matrix_suite
from .errors import (
    BreakdownError,
    ExpansionOverflowError,
    GeoprecError,
    NotConvergedError,
    SingularProbeBlockError,
)
from .group import GroupScheme
from .matrix import (
    ComplexMatrix,
    condition_euclidean,
    condition_frobenius,
    condition_skeel,
    jacobi_precondition,
    sinkhorn_equilibrate,
)
from .mmio import read_matrix, write_matrix
from .optimize import OptimizerConfig, minimize_condition
from .polysys import precondition_full, precondition_shuffle, precondition_sparse
from .stochastic import EstimatorConfig
from .sysio import read_polysys

USAGE_ERROR, INPUT_ERROR, NUMERICAL_ERROR = 1, 2, 3

_NUMERICAL = (NotConvergedError, ExpansionOverflowError, BreakdownError, SingularProbeBlockError)


def _num(x):
    if x is None:
        return ""
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return repr(float(x))


def _write_report(path, report):
    lines = ["iter,value,grad_norm,duality_bound,kF,kappa"]
    for rec in report.iterations:
        lines.append(
            f"{rec.iteration},{_num(rec.value)},{_num(rec.grad_norm)},"
            f"{_num(rec.duality_bound)},{_num(rec.kF)},{_num(rec.kappa)}"
        )
    lines.append(f"# termination={report.termination.value}")
    lines.append(f"# iterations={report.iteration_count}")
    lines.append(f"# initial_kF={_num(report.initial_kF)} final_kF={_num(report.final_kF)}")
    lines.append(
        f"# initial_kappa={_num(report.initial_kappa)} final_kappa={_num(report.final_kappa)}"
    )
    lines.append(f"# certificate={_num(report.certificate)}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _scheme_from_args(args, m, n):
    if args.scheme == "diag":
        return (
            GroupScheme.diagonal(m, n, side="both")
            if args.side == "both"
            else GroupScheme.diagonal(m, side="left")
        )
    k = args.block_size
    if k is None or k < 1:
        raise argparse.ArgumentTypeError("--block-size is required for the block scheme")
    if args.side == "both":
        return GroupScheme.blocked(m, k, n, side="both")
    return GroupScheme.blocked(m, k, side="left")


def _emit_block_diagonal(path, mat, blocks):
    triplets = []
    for a, b in blocks:
        for i in range(a, b):
            for j in range(a, b):
                if mat[i, j] != 0:
                    triplets.append((i, j, mat[i, j]))
    write_matrix(path, ComplexMatrix.sparse(mat.shape[0], mat.shape[0], triplets))


def _cmd_precondition(args):
    a = read_matrix(args.input)
    m, n = a.shape
    scheme = _scheme_from_args(args, m, n)
    config = OptimizerConfig(scheme=scheme, target_eps=args.eps, max_iters=args.max_iters,
                             seed=args.seed)
    estimator = None
    if args.stochastic:
        estimator = EstimatorConfig(num_probes=args.probes, probe_kind=args.probe_kind,
                                    cg_tol=args.cg_tol, lanczos_iters=args.lanczos_iters,
                                    seed=args.seed)
    report = minimize_condition(a, config, estimator=estimator)
    _write_report(args.out, report)
    if args.emit_preconditioner:
        paths = args.emit_preconditioner.split(",")
        g = report.final_element
        _emit_block_diagonal(paths[0], np.asarray(g.X), scheme.left_blocks)
        if scheme.side == "both":
            if len(paths) < 2:
                raise argparse.ArgumentTypeError(
                    "--emit-preconditioner needs X.mtx,Y.mtx for two-sided schemes"
                )
            _emit_block_diagonal(paths[1], np.asarray(g.Y), scheme.right_blocks)
    print(f"{report.termination.value} kF {_num(report.initial_kF)} -> {_num(report.final_kF)}")
    return 0


def _cmd_polysys(args):
    system, point = read_polysys(args.input)
    if point is None:
        print("input file carries no evaluation point", file=sys.stderr)
        return INPUT_ERROR
    m, n = system.m, system.nvars
    if args.action == "shuffle":
        scheme = GroupScheme.full(m, side="left")
        config = OptimizerConfig(scheme=scheme, target_eps=args.eps, max_iters=args.max_iters)
        _, report = precondition_shuffle(system, point, scheme, config)
    elif args.action == "full":
        scheme = GroupScheme.full(m, n, side="both")
        config = OptimizerConfig(scheme=scheme, target_eps=args.eps, max_iters=args.max_iters)
        _, report = precondition_full(system, point, scheme, config)
    else:
        scheme = GroupScheme.full(m, side="left")
        config = OptimizerConfig(scheme=scheme, target_eps=args.eps, max_iters=args.max_iters)
        _, _, report = precondition_sparse(system, point, config)
    _write_report(args.out, report)
    print(f"{report.termination.value} mu {_num(report.initial_kF)} -> {_num(report.final_kF)}")
    return 0


def _cmd_condition(args):
    a = read_matrix(args.input)
    fn = {
        "frobenius": condition_frobenius,
        "euclidean": condition_euclidean,
        "skeel": condition_skeel,
    }[args.kind]
    print(_num(fn(a)))
    return 0


def _cmd_baseline(args):
    a = read_matrix(args.input)
    dense = a.to_dense()
    if args.method == "jacobi-left":
        pre = jacobi_precondition(dense, "left")
    elif args.method == "jacobi-sym":
        pre = jacobi_precondition(dense, "two_sided")
    else:
        res = sinkhorn_equilibrate(dense)
        pre = res.X @ dense @ np.linalg.inv(res.Y)
    print(
        f"method={args.method} "
        f"kF {_num(condition_frobenius(dense))} -> {_num(condition_frobenius(pre))} "
        f"kappa {_num(condition_euclidean(dense))} -> {_num(condition_euclidean(pre))}"
    )
    return 0


def _cmd_bench(args):
    if args.suite == "gaussian":
        results = run_gaussian_suite(args.n, args.samples, block_size=args.block_size,
                                     seed=args.seed)
    else:
        if not args.dir:
            print("--dir is required with --suite dir", file=sys.stderr)
            return USAGE_ERROR
        names = sorted(f for f in os.listdir(args.dir) if f.endswith(".mtx"))
        if not names:
            print(f"no .mtx files in {args.dir}", file=sys.stderr)
            return INPUT_ERROR
        mats = [(name, read_matrix(os.path.join(args.dir, name)).to_dense()) for name in names]
        results = run_matrix_suite(mats, block_size=args.block_size)
    header = (
        "instance,n,kF_before,kF_after_diag,kF_after_block,"
        "kappa_before,kappa_after_diag,kappa_after_block,"
        "improvement_diag,improvement_block,iterations_diag,iterations_block"
    )
    lines = [header]
    for r in results:
        lines.append(
            f"{r.instance},{r.n},{_num(r.kF_before)},{_num(r.kF_after_diag)},"
            f"{_num(r.kF_after_block)},{_num(r.kappa_before)},{_num(r.kappa_after_diag)},"
            f"{_num(r.kappa_after_block)},{_num(r.improvement_diag)},"
            f"{_num(r.improvement_block)},{r.iterations_diag},{r.iterations_block}"
        )
    mean_d = float(np.mean([r.improvement_diag for r in results]))
    mean_b = float(np.mean([r.improvement_block for r in results]))
    lines.append(f"# mean_improvement_diag={_num(mean_d)}")
    lines.append(f"# mean_improvement_block={_num(mean_b)}")
    if len(results) >= 3:
        lines.append(f"# correlation_kF_kappa={_num(correlation_kF_kappa(results))}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="geoprec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("precondition", help="optimize a structured preconditioner")
    p.add_argument("--input", required=True)
    p.add_argument("--scheme", choices=["diag", "block"], default="diag")
    p.add_argument("--block-size", type=int, default=None)
    p.add_argument("--side", choices=["left", "both"], default="left")
    p.add_argument("--eps", type=float, default=1e-2)
    p.add_argument("--max-iters", type=int, default=10_000)
    p.add_argument("--stochastic", action="store_true")
    p.add_argument("--probes", type=int, default=200)
    p.add_argument("--probe-kind", choices=["rademacher", "gaussian"], default="rademacher")
    p.add_argument("--cg-tol", type=float, default=1e-8)
    p.add_argument("--lanczos-iters", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--emit-preconditioner", default=None, metavar="X.mtx[,Y.mtx]")
    p.set_defaults(func=_cmd_precondition)

    p = sub.add_parser("polysys-precondition", help="precondition a polynomial system")
    p.add_argument("--input", required=True)
    p.add_argument("--action", choices=["shuffle", "full", "sparse"], required=True)
    p.add_argument("--eps", type=float, default=1e-2)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_polysys)

    p = sub.add_parser("condition", help="print a condition number")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", choices=["frobenius", "euclidean", "skeel"], required=True)
    p.set_defaults(func=_cmd_condition)

    p = sub.add_parser("baseline", help="apply a heuristic baseline preconditioner")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=["jacobi-left", "jacobi-sym", "sinkhorn"], required=True)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("bench", help="run a seeded experiment suite")
    p.add_argument("--suite", choices=["gaussian", "dir"], default="gaussian")
    p.add_argument("--dir", default=None)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--block-size", type=int, default=5)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_bench)
    return parser


def cli_dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems and 0 on --help
        return 0 if exc.code == 0 else USAGE_ERROR
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        print(str(exc), file=sys.stderr)
        return USAGE_ERROR
    except _NUMERICAL as exc:
        print(str(exc), file=sys.stderr)
        return NUMERICAL_ERROR
    except (GeoprecError, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return INPUT_ERROR


def main():
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
