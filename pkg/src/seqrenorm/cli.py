"""Command-line surface: parse space expressions, evaluate, verify, estimate.

Grammar:

    expr  := "lp(" num ")" | "sup" | "l1" | "day" | "lorentz" | "tsirelson"
           | "dayAug(" expr ")" | "scBase(" expr ")"
           | "davis(" expr "," expr "," num ")"
           | "Y(" expr "," expr "," expr "," mrule ")"
           | "sym2R(" expr ")"
    mrule := "pow2"

Exit codes: 0 success/pass, 1 verification failure, 2 parse error,
3 evaluation error, 4 inconclusive verification.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path

from .vectors import FiniteVector
from .norms import (NormDescriptor, Truncation, NormError, lp, sup_norm,
                    l1_norm, day_norm, lorentz_harmonic, tsirelson_norm,
                    evaluate)
from .combinators import (day_augment, strictly_convex_unconditional_base,
                          davis_norm, y_space, symmetric_2R, OptimizerError)
from . import probes


class SpaceSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


_TOKEN = re.compile(
    r"[A-Za-z_][A-Za-z0-9_]*|\d+(?:\.\d+)?(?:[eE][+-]?\d+)?|[(),]")

_ATOMS = {
    "sup": sup_norm,
    "l1": l1_norm,
    "day": day_norm,
    "lorentz": lorentz_harmonic,
    "tsirelson": tsirelson_norm,
}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            m = _TOKEN.match(text, pos)
            if not m:
                raise SpaceSyntaxError(f"unexpected character {text[pos]!r}",
                                       pos)
            self.tokens.append((m.group(0), pos))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, lit: str):
        tok, off = self.next()
        if tok != lit:
            raise SpaceSyntaxError(f"expected {lit!r}, found {tok!r}", off)

    def number(self) -> float:
        tok, off = self.next()
        try:
            return float(tok)
        except (TypeError, ValueError):
            raise SpaceSyntaxError(f"expected a number, found {tok!r}",
                                   off) from None

    def expr(self) -> NormDescriptor:
        tok, off = self.next()
        if tok in _ATOMS:
            return _ATOMS[tok]()
        try:
            if tok == "lp":
                self.expect("(")
                p = self.number()
                self.expect(")")
                return lp(p)
            if tok == "dayAug":
                self.expect("(")
                base = self.expr()
                self.expect(")")
                return day_augment(base)
            if tok == "scBase":
                self.expect("(")
                base = self.expr()
                self.expect(")")
                return strictly_convex_unconditional_base(base)
            if tok == "sym2R":
                self.expect("(")
                base = self.expr()
                self.expect(")")
                return symmetric_2R(base)
            if tok == "davis":
                self.expect("(")
                E = self.expr()
                self.expect(",")
                F = self.expr()
                self.expect(",")
                m = self.number()
                self.expect(")")
                return davis_norm(E, F, m)
            if tok == "Y":
                self.expect("(")
                E = self.expr()
                self.expect(",")
                F = self.expr()
                self.expect(",")
                X = self.expr()
                self.expect(",")
                rule, roff = self.next()
                if rule != "pow2":
                    raise SpaceSyntaxError(
                        f"unknown m-sequence rule {rule!r}", roff)
                self.expect(")")
                return y_space(E, F, X, rule)
        except ValueError as exc:
            if isinstance(exc, SpaceSyntaxError):
                raise
            raise SpaceSyntaxError(str(exc), off) from None
        raise SpaceSyntaxError(f"unknown space identifier {tok!r}", off)


def parse_space(text: str) -> NormDescriptor:
    parser = _Parser(text)
    node = parser.expr()
    tok, off = parser.peek()
    if tok is not None:
        raise SpaceSyntaxError(f"trailing input {tok!r}", off)
    return node


def _fmt_num(x: float) -> str:
    if x == int(x):
        return str(int(x))
    return repr(x)


def format_space(norm: NormDescriptor) -> str:
    """Canonical text form; parse(format_space(t)) == t."""
    k = norm.kind
    if k == "lp":
        return f"lp({_fmt_num(norm.params[0])})"
    if k in ("sup", "l1", "day", "lorentz", "tsirelson", "weighted_l2",
             "summing"):
        return k
    if k == "day_aug":
        return f"dayAug({format_space(norm.children[0])})"
    if k == "sc_base":
        return f"scBase({format_space(norm.children[0])})"
    if k == "sym2r":
        return f"sym2R({format_space(norm.children[0])})"
    if k == "davis":
        E, F = norm.children
        return (f"davis({format_space(E)}, {format_space(F)}, "
                f"{_fmt_num(norm.params[0])})")
    if k == "y_space":
        E, F, X = norm.children
        return (f"Y({format_space(E)}, {format_space(F)}, "
                f"{format_space(X)}, {norm.params[0]})")
    raise ValueError(f"unprintable descriptor kind {k!r}")


def descriptor_to_tree(norm: NormDescriptor) -> dict:
    """JSON tree mirroring the grammar."""
    k = norm.kind
    if k == "lp":
        return {"op": "lp", "p": norm.params[0]}
    if k in ("sup", "l1", "day", "lorentz", "tsirelson"):
        return {"op": k}
    if k == "day_aug":
        return {"op": "dayAug", "base": descriptor_to_tree(norm.children[0])}
    if k == "sc_base":
        return {"op": "scBase", "base": descriptor_to_tree(norm.children[0])}
    if k == "sym2r":
        return {"op": "sym2R", "base": descriptor_to_tree(norm.children[0])}
    if k == "davis":
        return {"op": "davis", "E": descriptor_to_tree(norm.children[0]),
                "F": descriptor_to_tree(norm.children[1]),
                "m": norm.params[0]}
    if k == "y_space":
        return {"op": "Y", "E": descriptor_to_tree(norm.children[0]),
                "F": descriptor_to_tree(norm.children[1]),
                "X": descriptor_to_tree(norm.children[2]),
                "mrule": norm.params[0]}
    raise ValueError(f"descriptor kind {k!r} has no wire form")


def descriptor_from_tree(tree: dict) -> NormDescriptor:
    op = tree.get("op")
    if op == "lp":
        return lp(tree["p"])
    if op in _ATOMS:
        return _ATOMS[op]()
    if op == "dayAug":
        return day_augment(descriptor_from_tree(tree["base"]))
    if op == "scBase":
        return strictly_convex_unconditional_base(
            descriptor_from_tree(tree["base"]))
    if op == "sym2R":
        return symmetric_2R(descriptor_from_tree(tree["base"]))
    if op == "davis":
        return davis_norm(descriptor_from_tree(tree["E"]),
                          descriptor_from_tree(tree["F"]), tree["m"])
    if op == "Y":
        return y_space(descriptor_from_tree(tree["E"]),
                       descriptor_from_tree(tree["F"]),
                       descriptor_from_tree(tree["X"]), tree["mrule"])
    raise ValueError(f"unknown wire op {op!r}")


# ---------------------------------------------------------------------------
# commands


class VectorFormatError(ValueError):
    pass


def _load_vector(arg: str) -> FiniteVector:
    text = arg
    if arg.startswith("@"):
        text = Path(arg[1:]).read_text()
    try:
        return FiniteVector.from_json(text)
    except (json.JSONDecodeError, ValueError) as exc:
        raise VectorFormatError(f"bad vector JSON: {exc}") from None


def _sig7(x: float) -> str:
    return f"{x:.7g}"


def _emit(payload: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(payload, sort_keys=True,
                             separators=(",", ":")) + "\n")


def cmd_eval(args) -> int:
    space = parse_space(args.space)
    vector = _load_vector(args.vector)
    trunc = Truncation(tail_index=args.truncate,
                       terms=min(args.truncate, 12))
    enc = evaluate(space, vector, trunc)
    if args.format == "json":
        payload = {"space": format_space(space), "lo": enc.lo, "hi": enc.hi,
                   "exact": enc.is_exact, "truncate": args.truncate}
        _emit(payload, "json", sys.stdout)
    else:
        if enc.is_exact:
            print(_sig7(enc.lo))
        else:
            hi = "inf" if math.isinf(enc.hi) else _sig7(enc.hi)
            print(f"[{_sig7(enc.lo)}, {hi}] (truncate={args.truncate})")
    return 0


def _report_payload(report: probes.ProbeReport, fmt: str) -> str:
    if fmt == "json":
        return report.to_json() + "\n"
    if fmt == "csv":
        return report.to_csv()
    lines = [f"suite: {report.suite_name}",
             f"samples: {report.samples_run}",
             f"violations: {len(report.violations)}",
             f"verdict: {report.verdict}"]
    for v in report.violations[:10]:
        lines.append(f"  violation @{v.sample_index}: lhs={_sig7(v.lhs)} "
                     f"rhs={_sig7(v.rhs)} margin={_sig7(v.margin)}")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    space = parse_space(args.space)
    trunc = Truncation(tail_index=args.truncate,
                       terms=min(args.truncate, 12))
    if args.suite == "two-r":
        maker = probes.SCENARIOS.get(args.scenario)
        if maker is None:
            raise NormError(f"unknown scenario {args.scenario!r}; "
                            f"known: {', '.join(sorted(probes.SCENARIOS))}")
        report = probes.two_r_probe(space, maker(space),
                                    prefix_len=args.prefix_len)
    elif args.suite == "strict-convexity":
        report = probes.strict_convexity_probe(space, samples=args.samples,
                                               seed=args.seed)
    else:
        report = probes.inequality_suite(args.suite, space,
                                         samples=args.samples,
                                         seed=args.seed,
                                         tol=args.tolerance, trunc=trunc)
    text = _report_payload(report, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return {"pass": 0, "fail": 1, "inconclusive": 4}[report.verdict]


def cmd_boyd(args) -> int:
    space = parse_space(args.space)
    report = probes.boyd_estimate(space, m_max=args.max_m, dim=args.dim,
                                  samples=args.samples, seed=args.seed)
    if args.format == "json":
        sys.stdout.write(report.to_json() + "\n")
    else:
        print(f"{'m':>4} {'bound':>14} {'ratio':>10}")
        for row in report.rows:
            ratio = "+inf" if math.isinf(row.ratio) else _sig7(row.ratio)
            print(f"{row.m:>4} {_sig7(row.bound):>14} {ratio:>10}")
        p_est = ("+inf" if math.isinf(report.p_estimate)
                 else _sig7(report.p_estimate))
        print(f"lower Boyd index estimate: {p_est}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="seqrenorm",
        description="sequence-space norms, renormings, and verification suites")
    sub = ap.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("eval", help="evaluate a norm on a vector")
    pe.add_argument("space", help="space expression, e.g. 'sym2R(lp(2))'")
    pe.add_argument("vector", help="vector JSON (dense or sparse), or @file")
    pe.add_argument("--truncate", type=int, default=4096,
                    help="tail/term truncation for enclosure-valued norms")
    pe.add_argument("--format", choices=("text", "json"), default="text")
    pe.set_defaults(fn=cmd_eval)

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("suite")
    pv.add_argument("space")
    pv.add_argument("--samples", type=int, default=500)
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--tolerance", type=float, default=1e-9)
    pv.add_argument("--truncate", type=int, default=4096)
    pv.add_argument("--scenario", default="c0-witness",
                    help="sequence scenario for the two-r suite")
    pv.add_argument("--prefix-len", type=int, default=64)
    pv.add_argument("--format", choices=("text", "json", "csv"),
                    default="text")
    pv.add_argument("--out", help="write the report to a file")
    pv.set_defaults(fn=cmd_verify)

    pb = sub.add_parser("boyd", help="estimate the lower Boyd index")
    pb.add_argument("space")
    pb.add_argument("--max-m", type=int, default=8)
    pb.add_argument("--dim", type=int, default=12)
    pb.add_argument("--samples", type=int, default=40)
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--format", choices=("text", "json"), default="text")
    pb.set_defaults(fn=cmd_boyd)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (SpaceSyntaxError, VectorFormatError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (NormError, OptimizerError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
