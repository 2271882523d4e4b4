"""Command-line interface: ``python3 -m superlazy <command> ...``."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence, TextIO

from .bounds import VARIANTS, BoundVariant, Verdict, check_soundness
from .dot import to_dot
from .lam import LambdaSyntaxError, analyze_blockage, encode_cbn, encode_cbv, parse_lambda
from .lazy import STRATEGIES, StrategyTag, normalize
from .net import NetFormatError, ProofNet, deserialize, measure, serialize
from .pr import (DecodeError, PRArityError, PRSyntaxError, build_instance, decode_nat,
                 encode_nat, parse_pr)
from .rewrite import TraceFormatError, TraceStep, final_line, header_line, parse_trace, step_json, step_line

EXIT_OK = 0
EXIT_MALFORMED = 1
EXIT_FUEL = 2
EXIT_DECODE = 3
EXIT_FAIL = 4
EXIT_INCONCLUSIVE = 5


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(line: str, out: TextIO) -> None:
    out.write(line + "\n")
    out.flush()


def _stream(net: ProofNet, strategy: StrategyTag, fuel: int, fmt: str, out: TextIO):
    """Normalize ``net`` writing the trace as it grows."""
    if fmt == "text":
        _emit(header_line(strategy.value, measure(net)), out)

    def on_step(i: int, s: TraceStep) -> None:
        if fmt == "text":
            _emit(step_line(i, s), out)
        elif fmt == "json-lines":
            _emit(step_json(i, s), out)

    trace = normalize(net, strategy, fuel, on_step=on_step)
    if fmt == "text":
        _emit(final_line(trace.normal, len(trace.steps), trace.max_size), out)
    elif fmt == "json-lines":
        _emit('{"final": true, "normal": %s, "steps": %d, "maxsize": %d}'
              % (str(trace.normal).lower(), len(trace.steps), trace.max_size), out)
    return trace


def cmd_run(args: argparse.Namespace, out: TextIO, err: TextIO) -> int:
    try:
        term = parse_pr(args.term)
        nums = [int(a) for a in args.args]
        if any(n < 0 for n in nums):
            raise ValueError("arguments must be naturals")
        net = build_instance(term, nums)
    except (PRSyntaxError, PRArityError, ValueError) as e:
        print(f"error: {e}", file=err)
        return EXIT_MALFORMED
    strategy = STRATEGIES[args.strategy]
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            trace = _stream(net, strategy, args.fuel, "text", fh)
    else:
        trace = normalize(net, strategy, args.fuel)
    if not trace.normal:
        print(f"error: fuel exhausted after {len(trace.steps)} steps", file=err)
        return EXIT_FUEL
    try:
        value = decode_nat(trace.final)
    except DecodeError as e:
        print(f"error: {e}", file=err)
        return EXIT_DECODE
    _emit(f"result={value} steps={len(trace.steps)} maxsize={trace.max_size}", out)
    return EXIT_OK


def _load_net(path: str, err: TextIO) -> ProofNet | None:
    try:
        return deserialize(_read(path))
    except (OSError, NetFormatError) as e:
        print(f"error: {path}: {e}", file=err)
        return None


def cmd_reduce(args: argparse.Namespace, out: TextIO, err: TextIO) -> int:
    net = _load_net(args.net, err)
    if net is None:
        return EXIT_MALFORMED
    fmt = args.format
    trace = _stream(net, STRATEGIES[args.strategy], args.fuel, fmt, out)
    if fmt == "dot":
        out.write(to_dot(trace.final))
    if args.blockage:
        for b in analyze_blockage(trace.final):
            _emit(str(b), out)
    if args.final:
        with open(args.final, "w", encoding="utf-8") as fh:
            fh.write(serialize(trace.final))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, out: TextIO, err: TextIO) -> int:
    try:
        summary = parse_trace(_read(args.trace))
        report = check_soundness(summary, VARIANTS[args.variant])
    except (OSError, TraceFormatError, ValueError) as e:
        print(f"error: {args.trace}: {e}", file=err)
        return EXIT_MALFORMED
    _emit(report.line(), out)
    return {Verdict.PASS: EXIT_OK, Verdict.FAIL: EXIT_FAIL,
            Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}[report.verdict]


def cmd_dot(args: argparse.Namespace, out: TextIO, err: TextIO) -> int:
    net = _load_net(args.net, err)
    if net is None:
        return EXIT_MALFORMED
    out.write(to_dot(net))
    return EXIT_OK


def _write_net(net: ProofNet, fmt: str, out: TextIO) -> None:
    out.write(to_dot(net) if fmt == "dot" else serialize(net))


def cmd_encode_lambda(args: argparse.Namespace, out: TextIO, err: TextIO) -> int:
    try:
        term = parse_lambda(args.term)
    except LambdaSyntaxError as e:
        print(f"error: {e}", file=err)
        return EXIT_MALFORMED
    net = encode_cbv(term) if args.cbv else encode_cbn(term)
    _write_net(net, args.format, out)
    return EXIT_OK


def cmd_encode_nat(args: argparse.Namespace, out: TextIO, err: TextIO) -> int:
    if args.n < 0:
        print("error: numerals are natural numbers", file=err)
        return EXIT_MALFORMED
    _write_net(encode_nat(args.n), args.format, out)
    return EXIT_OK


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--strategy", choices=[s.value for s in StrategyTag], default="surface")
    common.add_argument("--fuel", type=_positive, default=1_000_000)
    common.add_argument("--variant", choices=[v.value for v in BoundVariant], default="linear")
    common.add_argument("--format", choices=["text", "dot", "json-lines"], default="text")

    parser = argparse.ArgumentParser(prog="superlazy", description="Superlazy reduction of pure proof nets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="compile a PR term, apply it and decode the result")
    p.add_argument("term")
    p.add_argument("args", nargs="*")
    p.add_argument("--trace", metavar="PATH", help="also write the reduction trace to PATH")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("reduce", parents=[common], help="normalize a net file, streaming the trace")
    p.add_argument("net", help="net file ('-' for stdin)")
    p.add_argument("--blockage", action="store_true", help="report blocked boxes of the final net")
    p.add_argument("--final", metavar="PATH", help="write the final net to PATH")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", parents=[common], help="check a trace against the soundness bound")
    p.add_argument("trace", help="trace file ('-' for stdin)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dot", parents=[common], help="export a net file as DOT")
    p.add_argument("net")
    p.set_defaults(func=cmd_dot)

    p = sub.add_parser("encode-lambda", parents=[common], help="translate a lambda term to a net")
    p.add_argument("term")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--cbn", action="store_true", help="call-by-name translation (default)")
    mode.add_argument("--cbv", action="store_true", help="call-by-value translation")
    p.set_defaults(func=cmd_encode_lambda)

    p = sub.add_parser("encode-nat", parents=[common], help="print the canonical numeral net")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_encode_nat)
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None,
         err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_MALFORMED if e.code else EXIT_OK
    return args.func(args, out, err)


if __name__ == "__main__":
    sys.exit(main())
