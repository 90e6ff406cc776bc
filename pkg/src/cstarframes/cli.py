"""Command-line dispatch: batch commands over JSON files.

Subcommands mirror the library surface: frame-bounds, dual, reconstruct,
seminorm, net, precompact, series, counterexample.  Exit codes follow
the certificate convention: 0 pass, 1 certified fail (or data error,
explained on stderr), 2 inconclusive within budget, 64 usage.  All
output is deterministic for a fixed seed: JSON goes through the
canonical serializer, CSV floats through shortest round-trip repr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .certify import (
    CertifyConfig,
    GramDefectError,
    certify_equivalences,
    check_condition_a,
    check_condition_b,
    check_condition_cd,
    free_submodule_check,
    series_decompose,
)
from .counterexample import build_setting, coeff_growth, tail_obstruction
from .frames import DegenerateFrameError, Frame, standard_basis_frame
from .seminorms import SampleSet, epsilon_net, seminorm_eval
from .serialization import SchemaError, parse, serialize

USAGE_EXIT = 64


class _Parser(argparse.ArgumentParser):
    """argparse with the sysexits usage code instead of its default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="cstarframes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("frame-bounds", help="print the optimal frame bounds of a frame file")
    p.add_argument("frame_file")

    p = sub.add_parser("dual", help="write the canonical dual frame")
    p.add_argument("frame_file")
    p.add_argument("--out", default=None)

    p = sub.add_parser("reconstruct", help="CSV of reconstruction tails per prefix")
    p.add_argument("frame_file")
    p.add_argument("vector_file")

    p = sub.add_parser("seminorm", help="CSV of seminorm values over a sample")
    p.add_argument("spec_file")
    p.add_argument("sample_file")

    p = sub.add_parser("net", help="greedy epsilon-net indices for a sample")
    p.add_argument("sample_file")
    p.add_argument("spec_file")
    p.add_argument("--eps", type=float, required=True)

    p = sub.add_parser("precompact", help="run a precompactness condition or all of them")
    p.add_argument("--condition", choices=("a", "b", "cd", "all", "free"), required=True)
    p.add_argument("--sample", required=True)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--rank-budget", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frame", default=None)
    p.add_argument("--gens", default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("series", help="theta-series decomposition of an operator")
    p.add_argument("operator_file")
    p.add_argument("--eps", type=float, default=1e-9)
    p.add_argument("--frame", default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("counterexample", help="factorial-growth obstruction tables")
    p.add_argument("--trunc", type=int, required=True)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--out", default=None)

    return parser


def _load(kind: str, path: str):
    return parse(kind, Path(path).read_bytes())


def _emit(data: bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        print(data.decode("utf-8"))


def _cmd_frame_bounds(args) -> int:
    c1, c2 = _load("frame", args.frame_file).bounds
    print(f"({c1:.12g},{c2:.12g})")
    return 0


def _cmd_dual(args) -> int:
    frame = _load("frame", args.frame_file)
    dual = Frame(tuple(frame.canonical_dual()), spanning=frame.spanning)
    _emit(serialize(dual), args.out)
    return 0


def _cmd_reconstruct(args) -> int:
    frame = _load("frame", args.frame_file)
    x = _load("vector", args.vector_file)
    print("prefix,tail")
    for n in range(frame.size + 1):
        print(f"{n},{frame.reconstruction_tail(x, n)!r}")
    return 0


def _cmd_seminorm(args) -> int:
    spec = _load("seminorm_spec", args.spec_file)
    sample = _load("sample_set", args.sample_file)
    print("index,seminorm")
    for i, x in enumerate(sample.points):
        print(f"{i},{seminorm_eval(spec, x)!r}")
    return 0


def _cmd_net(args) -> int:
    sample = _load("sample_set", args.sample_file)
    spec = _load("seminorm_spec", args.spec_file)
    print("net_index")
    for i in epsilon_net(sample, spec, args.eps):
        print(i)
    return 0


def _usage_error(message: str) -> int:
    print(f"cstarframes: error: {message}", file=sys.stderr)
    return USAGE_EXIT


def _cmd_precompact(args) -> int:
    sample = _load("sample_set", args.sample)
    frame = _load("frame", args.frame) if args.frame else None
    gens = _load("sample_set", args.gens).points if args.gens else None

    if args.condition == "all":
        grid = (args.eps,) if args.eps is not None else CertifyConfig().eps_grid
        config = CertifyConfig(
            eps_grid=grid,
            frame=frame,
            generators=gens,
            rank_budget=args.rank_budget,
            seed=args.seed,
        )
        report = certify_equivalences(sample, config)
        _emit(serialize(report), args.out)
        return report.exit_code

    if args.eps is None:
        return _usage_error(f"--eps is required for --condition {args.condition}")
    if args.condition == "a":
        if gens is None:
            return _usage_error("--gens is required for --condition a")
        cert = check_condition_a(sample, gens, args.eps)
    elif args.condition == "b":
        if frame is None:
            if not sample.points:
                return _usage_error("--frame is required for an empty sample")
            frame = standard_basis_frame(sample.shape, sample.dim)
        cert = check_condition_b(sample, frame, args.eps)
    elif args.condition == "cd":
        cert = check_condition_cd(sample, args.eps, rank_budget=args.rank_budget, frame=frame)
    else:
        if gens is None:
            return _usage_error("--gens is required for --condition free")
        cert = free_submodule_check(sample, gens, args.eps)
    _emit(serialize(cert), args.out)
    return cert.exit_code


def _cmd_series(args) -> int:
    op = _load("operator", args.operator_file)
    frame = _load("frame", args.frame) if args.frame else None
    decomposition = series_decompose(op, frame=frame, eps=args.eps)
    _emit(serialize(decomposition), args.out)
    return 0 if decomposition.achieved_rank is not None else 1


def _cmd_counterexample(args) -> int:
    setting = build_setting(args.trunc, args.dim)
    print("k,required_norm")
    for k, required in coeff_growth(setting, args.eps):
        print(f"{k},{required!r}")
    print("prefix,tail")
    for n in range(setting.dim):
        print(f"{n},{tail_obstruction(setting, n)!r}")
    witnesses = SampleSet(setting.witnesses(), label="witnesses")
    frame = standard_basis_frame(setting.shape, setting.dim)
    cert = check_condition_b(witnesses, frame, args.eps)
    if args.out:
        _emit(serialize(cert), args.out)
    return cert.exit_code


_COMMANDS = {
    "frame-bounds": _cmd_frame_bounds,
    "dual": _cmd_dual,
    "reconstruct": _cmd_reconstruct,
    "seminorm": _cmd_seminorm,
    "net": _cmd_net,
    "precompact": _cmd_precompact,
    "series": _cmd_series,
    "counterexample": _cmd_counterexample,
}


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code is None else int(exc.code)
    if args.command is None:
        return _usage_error("a subcommand is required (see --help)")
    try:
        return _COMMANDS[args.command](args)
    except (SchemaError, DegenerateFrameError, GramDefectError) as exc:
        print(f"cstarframes: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"cstarframes: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
