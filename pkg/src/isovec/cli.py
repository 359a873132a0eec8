"""Command-line front door: reproducible pipelines over JSON/CSV files.

Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 I/O failure.
Randomized commands require an explicit --seed, so every invocation is a
pure function of its arguments and input files.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict

import numpy as np

from . import bounds, montecarlo, mvee, reduction, selection, systems
from .systems import FORMAT_VERSION, FormatError

__all__ = ["run", "main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits the process on error; raise instead so run() can
    # return the documented usage exit code.
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="isovec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a reference isotropic system")
    gen.add_argument("--kind", required=True, choices=["simplex", "cross", "random-frame"])
    gen.add_argument("--dim", required=True, type=int)
    gen.add_argument("--m", type=int, default=None)
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", default="-")

    def add_input(cmd):
        cmd.add_argument("input", nargs="?", default=None)
        cmd.add_argument("--in", dest="in_flag", default=None, metavar="FILE")

    chk = sub.add_parser("check", help="isotropy/centeredness report for a system file")
    add_input(chk)
    chk.add_argument("--tolerance", type=float, default=1e-8)

    mv = sub.add_parser("mvee", help="John decomposition from a CSV point cloud")
    mv.add_argument("--points", required=True, help="CSV file, one point per row")
    mv.add_argument("--centered", action="store_true")
    mv.add_argument("--epsilon", type=float, default=1e-6)
    mv.add_argument("--max-iterations", type=int, default=500_000)
    mv.add_argument("--out", default="-")

    red = sub.add_parser("reduce", help="Caratheodory reduction of a system file")
    add_input(red)
    red.add_argument("--centered", action="store_true")
    red.add_argument("--out", default="-")

    sel = sub.add_parser("select", help="greedy d-vector selection certificate")
    add_input(sel)
    sel.add_argument("--best", action="store_true", help="also run the exhaustive search")

    gam = sub.add_parser("gamma", help="improvement factor gamma(d, mbar)")
    gam.add_argument("--dim", required=True, type=int)
    gam.add_argument("--m", required=True, type=int)

    p1 = sub.add_parser("p1", help="probability that d index draws are distinct")
    p1.add_argument("--dim", required=True, type=int)
    group = p1.add_mutually_exclusive_group(required=True)
    group.add_argument("--probs", help="comma-separated probabilities")
    group.add_argument("--system", help="system file; probabilities are c_i/d")

    exp = sub.add_parser("expect", help="Monte Carlo estimate of E[det^2]")
    src = exp.add_mutually_exclusive_group(required=True)
    src.add_argument("--system", help="discrete sampler from a system file")
    src.add_argument("--kind", choices=["gaussian", "sphere"])
    exp.add_argument("--dim", type=int, default=None)
    exp.add_argument("--trials", required=True, type=int)
    exp.add_argument("--seed", required=True, type=int)
    exp.add_argument("--threads", type=int, default=1)

    tl = sub.add_parser("tail", help="tail probability of a large determinant")
    tl.add_argument("--system", required=True)
    tl.add_argument("--lambda", dest="lam", required=True, type=float)
    tl.add_argument("--trials", required=True, type=int)
    tl.add_argument("--seed", required=True, type=int)
    tl.add_argument("--threads", type=int, default=1)
    return parser


def _load_system(path: str) -> systems.WeightedVectorSystem:
    if path == "-":
        return systems.load(sys.stdin)
    return systems.load(path)


def _input_path(args) -> str:
    """Positional input and --in are interchangeable; default is stdin."""
    if args.input is not None and args.in_flag is not None:
        raise _UsageError("give the input either positionally or with --in, not both")
    path = args.in_flag if args.in_flag is not None else args.input
    return "-" if path is None else path


def _emit_json(doc: dict, out: str) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_gen(args) -> int:
    if args.kind == "random-frame" and args.seed is None:
        raise _UsageError("--seed is required for --kind random-frame")
    system = systems.generate(args.kind, args.dim, m=args.m, seed=args.seed)
    _emit_json(systems.to_dict(system), args.out)
    return 0


def _cmd_check(args) -> int:
    system = _load_system(_input_path(args))
    report = systems.check(system, tolerance=args.tolerance)
    doc = {"format_version": FORMAT_VERSION, "dim": system.dim, "m": system.size}
    doc.update(asdict(report))
    _emit_json(doc, "-")
    return 0


def _cmd_mvee(args) -> int:
    try:
        points = np.loadtxt(args.points, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise FormatError(f"could not parse CSV points: {exc}") from None
    system = mvee.john_from_points(
        points,
        centered=args.centered,
        epsilon=args.epsilon,
        max_iterations=args.max_iterations,
    )
    _emit_json(systems.to_dict(system), args.out)
    return 0


def _cmd_reduce(args) -> int:
    system = _load_system(_input_path(args))
    reduced = reduction.reduce_centered(system) if args.centered else reduction.reduce_isotropic(system)
    _emit_json(systems.to_dict(reduced), args.out)
    return 0


def _cmd_select(args) -> int:
    system = _load_system(_input_path(args))
    cert = selection.dr_select(system)
    doc = {
        "format_version": FORMAT_VERSION,
        "indices": list(cert.indices),
        "basis": cert.basis.tolist(),
        "step_norms": cert.step_norms.tolist(),
        "det_squared": cert.det_squared,
    }
    if args.best:
        idx, val = selection.best_subset(system)
        doc["best_indices"] = list(idx)
        doc["best_det_squared"] = val
    _emit_json(doc, "-")
    return 0


def _cmd_gamma(args) -> int:
    value = bounds.gamma(args.dim, args.m)
    mb = bounds.m_bar(args.dim, args.m)
    if args.dim <= 20 and mb <= 200:
        gamma_value = float(bounds.gamma_exact(args.dim, args.m))
    else:
        gamma_value = value.value
    if not math.isfinite(gamma_value):
        gamma_value = None  # too large for a double; log_gamma still carries it
    doc = {
        "format_version": FORMAT_VERSION,
        "dim": args.dim,
        "m": args.m,
        "m_bar": mb,
        "gamma": gamma_value,
        "log_gamma": value.log_value,
    }
    _emit_json(doc, "-")
    return 0


def _cmd_p1(args) -> int:
    if args.probs is not None:
        try:
            probs = [float(tok) for tok in args.probs.split(",") if tok.strip()]
        except ValueError:
            raise _UsageError(f"--probs must be comma-separated numbers, got {args.probs!r}")
    else:
        system = _load_system(args.system)
        probs = (system.weights / system.weights.sum()).tolist()
    value = bounds.p1_exact(probs, args.dim)
    _emit_json(
        {"format_version": FORMAT_VERSION, "dim": args.dim, "m": len(probs), "p1": value},
        "-",
    )
    return 0


def _cmd_expect(args) -> int:
    if args.system is not None:
        sampler = montecarlo.DiscreteSampler(_load_system(args.system))
    else:
        if args.dim is None:
            raise _UsageError("--dim is required with --kind")
        cls = montecarlo.GaussianSampler if args.kind == "gaussian" else montecarlo.SphereSampler
        sampler = cls(args.dim)
    record = montecarlo.estimate_expected_det2(
        sampler, trials=args.trials, seed=args.seed, threads=args.threads
    )
    sys.stdout.write(montecarlo.CSV_HEADER + "\n" + montecarlo.csv_row(record) + "\n")
    return 0


def _cmd_tail(args) -> int:
    system = _load_system(args.system)
    record = montecarlo.tail_probability(
        system, lam=args.lam, trials=args.trials, seed=args.seed, threads=args.threads
    )
    sys.stdout.write(montecarlo.CSV_HEADER + "\n" + montecarlo.csv_row(record) + "\n")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "check": _cmd_check,
    "mvee": _cmd_mvee,
    "reduce": _cmd_reduce,
    "select": _cmd_select,
    "gamma": _cmd_gamma,
    "p1": _cmd_p1,
    "expect": _cmd_expect,
    "tail": _cmd_tail,
}


def run(argv: list[str]) -> int:
    """Execute one command; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except FormatError as exc:
        print(f"input format error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
