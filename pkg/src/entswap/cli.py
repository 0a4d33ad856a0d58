"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 parse/validation error,
4 numeric or internal error. Reports go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments, protocol
from .serialize import WRITERS

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_NUMERIC = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _seed(text: str) -> int:
    return int(text, 0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="entswap", description="Entanglement-swapping simulator and verification harness.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fmt(p):
        p.add_argument("--format", choices=sorted(WRITERS), default=None,
                       help="output format (default: table on a terminal, json otherwise)")

    fmt(sub.add_parser("exp1", help="z-spin measurements on particles 2 and 3"))
    fmt(sub.add_parser("exp2", help="Bell-basis measurement on particles 2 and 3"))
    fmt(sub.add_parser("decompose", help="initial state in the Bell basis of (2,3) x (1,4)"))

    p = sub.add_parser("nosignal", help="outcome-averaged state of particles 1 and 4")
    p.add_argument("--sweep", type=int, default=None, metavar="N", help="add N random-basis rows")
    p.add_argument("--seed", type=_seed, default=experiments.DEFAULT_SEED)
    fmt(p)

    p = sub.add_parser("run", help="execute a .qproto script")
    p.add_argument("file")
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--seed", type=_seed, default=experiments.DEFAULT_SEED)
    p.add_argument("--trials", type=_positive, default=None,
                   help="sampled mode: tally this many trials instead of showing one")
    fmt(p)

    p = sub.add_parser("sample", help="Monte Carlo sampling of a canned experiment")
    p.add_argument("experiment", choices=("exp1", "exp2"))
    p.add_argument("--trials", type=_positive, required=True)
    p.add_argument("--seed", type=_seed, default=experiments.DEFAULT_SEED)
    fmt(p)
    return parser


def _dispatch(args):
    if args.command == "exp1":
        return experiments.run_experiment_1(), None
    if args.command == "exp2":
        return experiments.run_experiment_2(), None
    if args.command == "decompose":
        return experiments.bell_decompose_eq1(), None
    if args.command == "nosignal":
        sweep = None
        if args.sweep is not None:
            if args.sweep < 0:
                raise _UsageError("--sweep must be non-negative")
            sweep = experiments.no_signaling_sweep(args.sweep, args.seed)
        return experiments.no_signaling_report(), sweep
    if args.command == "sample":
        return experiments.monte_carlo(int(args.experiment[-1]), args.trials, args.seed), None
    # run
    path = Path(args.file)
    try:
        source = path.read_bytes()
    except OSError as exc:
        raise _UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    program = protocol.load(source, name=path.stem)
    if args.mode == "sampled" and args.trials is not None:
        return protocol.monte_carlo(program, args.trials, args.seed), None
    return protocol.interpret(program, args.mode, seed=args.seed), None


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    fmt = args.format or ("table" if sys.stdout.isatty() else "json")
    try:
        obj, sweep = _dispatch(args)
        text = WRITERS[fmt](obj, sweep)
    except _UsageError as exc:
        print(f"entswap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except protocol.ParseError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except protocol.InterpretError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ArithmeticError, ValueError) as exc:
        print(f"entswap: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    sys.stdout.write(text)
    sys.stdout.flush()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
