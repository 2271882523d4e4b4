"""Primitive recursive terms: parser, interpreter, and compilation to proof nets.

Numerals are Church numerals ``\\f.\\x.f (... (f x))`` whose ``f`` is shared
by a right comb of contractions ending in a weakening; tuples are
right-nested tensor clusters, and a 1-tuple is just the numeral.

Compiled nets take their argument tuple on a single premise.  Reduction
only ever copies closed boxes: the unit box used to erase numerals, the
step box used to duplicate them, and the iterated step of ``rec``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .build import Builder, plug
from .lazy import StrategyTag, SuperlazyHook, normalize
from .net import Label, Port, ProofNet, find_isomorphism
from .rewrite import RewriteTrace

# -- terms --------------------------------------------------------------------------


class PRTerm:
    arity: int


@dataclass(frozen=True)
class Zero(PRTerm):
    @property
    def arity(self) -> int:
        return 0

    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class Succ(PRTerm):
    @property
    def arity(self) -> int:
        return 1

    def __str__(self) -> str:
        return "s"


@dataclass(frozen=True)
class Proj(PRTerm):
    m: int
    i: int

    def __post_init__(self):
        if not 1 <= self.i <= self.m:
            raise PRArityError(str(self), f"projection index {self.i} out of range 1..{self.m}")

    @property
    def arity(self) -> int:
        return self.m

    def __str__(self) -> str:
        return f"pi[{self.m},{self.i}]"


@dataclass(frozen=True)
class Comp(PRTerm):
    f: PRTerm
    gs: tuple[PRTerm, ...]

    def __post_init__(self):
        if not self.gs:
            raise PRArityError(str(self), "composition needs at least one inner term")
        if self.f.arity != len(self.gs):
            raise PRArityError(str(self), f"{self.f} has arity {self.f.arity} "
                               f"but is composed with {len(self.gs)} terms")
        ms = {g.arity for g in self.gs}
        if len(ms) != 1:
            raise PRArityError(str(self), "inner terms have different arities "
                               + ", ".join(f"{g}:{g.arity}" for g in self.gs))

    @property
    def arity(self) -> int:
        return self.gs[0].arity

    def __str__(self) -> str:
        return f"comp({self.f}; {', '.join(map(str, self.gs))})"


@dataclass(frozen=True)
class Rec(PRTerm):
    f: PRTerm
    g: PRTerm

    def __post_init__(self):
        if self.g.arity != self.f.arity + 2:
            raise PRArityError(str(self), f"step {self.g} has arity {self.g.arity}, "
                               f"expected {self.f.arity + 2}")

    @property
    def arity(self) -> int:
        return self.f.arity + 1

    def __str__(self) -> str:
        return f"rec({self.f}, {self.g})"


class PRSyntaxError(ValueError):
    def __init__(self, column: int, message: str):
        super().__init__(f"column {column}: {message}")
        self.column = column


class PRArityError(ValueError):
    def __init__(self, subterm: str, message: str):
        super().__init__(f"in {subterm}: {message}")
        self.subterm = subterm


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        tok = m.group(1) or m.group(2) or m.group(3)
        if tok is not None:
            out.append((tok, m.start(m.lastindex) + 1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, env: Mapping[str, PRTerm]):
        self.toks = _tokenize(text)
        self.pos = 0
        self.end = len(text) + 1
        self.env = env

    def peek(self) -> tuple[str, int]:
        return self.toks[self.pos] if self.pos < len(self.toks) else ("<end>", self.end)

    def take(self, want: str | None = None) -> tuple[str, int]:
        tok, col = self.peek()
        if want is not None and tok != want:
            raise PRSyntaxError(col, f"expected {want!r}, found {tok!r}")
        if tok == "<end>":
            raise PRSyntaxError(col, "unexpected end of input")
        self.pos += 1
        return tok, col

    def number(self) -> int:
        tok, col = self.take()
        if not tok.isdigit():
            raise PRSyntaxError(col, f"expected a number, found {tok!r}")
        return int(tok)

    def term(self) -> PRTerm:
        tok, col = self.take()
        if tok == "0":
            return Zero()
        if tok == "s":
            return Succ()
        if tok == "pi":
            self.take("[")
            m = self.number()
            self.take(",")
            i = self.number()
            self.take("]")
            return Proj(m, i)
        if tok == "comp":
            self.take("(")
            f = self.term()
            self.take(";")
            gs = [self.term()]
            while self.peek()[0] == ",":
                self.take(",")
                gs.append(self.term())
            self.take(")")
            return Comp(f, tuple(gs))
        if tok == "rec":
            self.take("(")
            f = self.term()
            self.take(",")
            g = self.term()
            self.take(")")
            return Rec(f, g)
        if tok in self.env:
            return self.env[tok]
        raise PRSyntaxError(col, f"unexpected {tok!r}")


def parse_pr(text: str, env: Mapping[str, PRTerm] | None = None) -> PRTerm:
    """Parse a term; ``env`` lets names stand for previously defined terms."""
    p = _Parser(text, env or {})
    t = p.term()
    tok, col = p.peek()
    if tok != "<end>":
        raise PRSyntaxError(col, f"trailing input {tok!r}")
    return t


def eval_pr(term: PRTerm, args: Sequence[int]) -> int:
    if len(args) != term.arity:
        raise PRArityError(str(term), f"expects {term.arity} arguments, got {len(args)}")
    if isinstance(term, Zero):
        return 0
    if isinstance(term, Succ):
        return args[0] + 1
    if isinstance(term, Proj):
        return args[term.i - 1]
    if isinstance(term, Comp):
        return eval_pr(term.f, [eval_pr(g, args) for g in term.gs])
    if isinstance(term, Rec):
        n, rest = args[0], list(args[1:])
        acc = eval_pr(term.f, rest)
        for k in range(n):
            acc = eval_pr(term.g, [k, acc, *rest])
        return acc
    raise TypeError(f"not a term: {term!r}")


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    term: PRTerm
    args: tuple[int, ...] | None


def parse_corpus(text: str) -> list[CorpusEntry]:
    """Lines ``name = term ; args...``; later terms may use earlier names."""
    env: dict[str, PRTerm] = {}
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, rest = line.partition("=")
        name = name.strip()
        if not sep or not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
            raise ValueError(f"line {lineno}: expected 'name = term ; args'")
        body, semi, args_text = rest.rpartition(";") if _has_args(rest) else (rest, "", "")
        try:
            term = parse_pr(body.strip(), env)
        except (PRSyntaxError, PRArityError) as e:
            raise ValueError(f"line {lineno}: {e}") from None
        args = None
        if semi:
            toks = args_text.replace(",", " ").split()
            if not all(t.isdigit() for t in toks):
                raise ValueError(f"line {lineno}: arguments must be naturals")
            args = tuple(int(t) for t in toks)
            if len(args) != term.arity:
                raise ValueError(f"line {lineno}: {name} has arity {term.arity}, "
                                 f"got {len(args)} arguments")
        env[name] = term
        out.append(CorpusEntry(name, term, args))
    return out


def _has_args(rest: str) -> bool:
    # a top-level ';' after the last ')' separates the arguments
    depth = 0
    for ch in rest:
        depth += ch == "("
        depth -= ch == ")"
        if ch == ";" and depth == 0:
            return True
    return False


# -- net building blocks ---------------------------------------------------------


def numeral(b: Builder, n: int) -> Port:
    def body(f: Port) -> Port:
        def inner(x: Port) -> Port:
            uses = b.uses(f, n + 1)
            b.weaken(uses[-1])
            acc = x
            for u in reversed(uses[:-1]):
                acc = b.app(b.der(u), acc)
            return acc
        return b.lam(inner)
    return b.lam(body)


def unit(b: Builder) -> Port:
    """The closed box around the identity."""
    return b.boxed([], lambda: b.lam(lambda x: x))


def to_unit(b: Builder, value: Port) -> Port:
    """Iterate the identity ``value`` times on the unit, leaving the unit."""
    return b.app(b.app(value, unit(b)), unit(b))


def erase(b: Builder, value: Port) -> None:
    b.weaken(to_unit(b, value))


def successor(b: Builder, value: Port) -> Port:
    def body(f: Port) -> Port:
        def inner(x: Port) -> Port:
            first, rest = b.contract(f)
            return b.app(b.der(first), b.app(b.app(value, rest), x))
        return b.lam(inner)
    return b.lam(body)


def duplicate(b: Builder, value: Port, k: int) -> list[Port]:
    """``k`` copies of a numeral, by iterating a closed successor-on-each step from zeros."""
    if k == 0:
        erase(b, value)
        return []
    if k == 1:
        return [value]

    def step(p: Port) -> Port:
        return b.tensor_cluster([successor(b, c) for c in b.split_cluster(p, k)])

    boxed_step = b.boxed([], lambda: b.lam(step))
    zeros = b.tensor_cluster([numeral(b, 0) for _ in range(k)])
    return b.split_cluster(b.app(b.app(value, boxed_step), zeros), k)


def emit(b: Builder, term: PRTerm, arg: Port | None) -> Port:
    """Wire the net of ``term`` onto the tuple at ``arg`` (None for arity 0)."""
    if isinstance(term, Zero):
        return numeral(b, 0)
    if isinstance(term, Succ):
        return successor(b, arg)
    if isinstance(term, Proj):
        parts = b.split_cluster(arg, term.m)
        for j, p in enumerate(parts, start=1):
            if j != term.i:
                erase(b, p)
        return parts[term.i - 1]
    if isinstance(term, Comp):
        n, m = len(term.gs), term.arity
        if m == 0:
            outs = [emit(b, g, None) for g in term.gs]
        else:
            copies = [duplicate(b, x, n) for x in b.split_cluster(arg, m)]
            outs = [emit(b, g, b.tensor_cluster([c[i] for c in copies]))
                    for i, g in enumerate(term.gs)]
        return emit(b, term.f, b.tensor_cluster(outs))
    if isinstance(term, Rec):
        return _emit_rec(b, term, arg)
    raise TypeError(f"not a term: {term!r}")


def _emit_rec(b: Builder, term: Rec, arg: Port) -> Port:
    m = term.f.arity

    def advance(pair: Port, extra: list[Port]) -> Port:
        # <c, a>  |->  <c + 1, g(c, a, extra...)>
        count, acc = b.split(pair)
        c1, c2 = duplicate(b, count, 2)
        return b.tensor(successor(b, c1), emit(b, term.g, b.tensor_cluster([c2, acc, *extra])))

    if m == 0:
        base = b.tensor(numeral(b, 0), emit(b, term.f, None))
        step = b.boxed([], lambda: b.lam(lambda p: advance(p, [])))
        pair = b.app(b.app(arg, step), base)
    else:
        counter, rest = b.split(arg)

        def iterate(h: Port) -> Port:
            def body(t: Port) -> Port:
                copies = [duplicate(b, x, 2) for x in b.split_cluster(t, m)]
                prev = b.app(h, b.tensor_cluster([c[0] for c in copies]))
                return advance(prev, [c[1] for c in copies])
            return b.lam(body)

        base = b.lam(lambda t: b.tensor(numeral(b, 0), emit(b, term.f, t)))
        step = b.boxed([], lambda: b.lam(iterate))
        pair = b.app(b.app(b.app(counter, step), base), rest)
    count, result = b.split(pair)
    erase(b, count)
    return result


# -- public constructions ---------------------------------------------------------


def encode_nat(n: int) -> ProofNet:
    if n < 0:
        raise ValueError("numerals are natural numbers")
    b = Builder(f"nat{n}")
    return b.conclude(numeral(b, n))


def encode_tuple(ns: Sequence[int]) -> ProofNet:
    if not ns:
        raise ValueError("tuples have at least one component")
    if any(n < 0 for n in ns):
        raise ValueError("numerals are natural numbers")
    b = Builder("tuple" + "_".join(map(str, ns)))
    return b.conclude(b.tensor_cluster([numeral(b, n) for n in ns]))


def unit_net() -> ProofNet:
    b = Builder("unit")
    return b.conclude(unit(b))


def erasure_net() -> ProofNet:
    """One premise (a numeral), reducing to the unit."""
    b = Builder("erasure")
    return b.conclude(to_unit(b, b.premise()))


def duplication_net(k: int = 2) -> ProofNet:
    b = Builder(f"dup{k}")
    return b.conclude(b.tensor_cluster(duplicate(b, b.premise(), k)))


def compile_pr(term: PRTerm) -> ProofNet:
    b = Builder(str(term))
    if term.arity == 0:
        return b.conclude(emit(b, term, None))
    return b.conclude(emit(b, term, b.premise()))


def apply(fun: ProofNet, arg: ProofNet) -> ProofNet:
    return plug(fun, arg)


class DecodeError(ValueError):
    pass


def decode_nat(net: ProofNet) -> int:
    """The n such that ``net`` is the canonical numeral n, or DecodeError."""
    if net.premises:
        raise DecodeError("not a canonical numeral: net has premises")
    if net.conclusion is None:
        raise DecodeError("not a canonical numeral: net has no conclusion")
    n = sum(1 for lab in net.labels.values() if lab is Label.LLIMP)
    mapping, why = find_isomorphism(net, encode_nat(n))
    if mapping is None:
        raise DecodeError(f"not a canonical numeral: {why}")
    return n


class FuelExhausted(RuntimeError):
    def __init__(self, trace: RewriteTrace):
        super().__init__(f"no normal form within {len(trace.steps)} steps")
        self.trace = trace


@dataclass
class RunResult:
    value: int
    trace: RewriteTrace


def build_instance(term: PRTerm, args: Sequence[int]) -> ProofNet:
    if len(args) != term.arity:
        raise PRArityError(str(term), f"expects {term.arity} arguments, got {len(args)}")
    net = compile_pr(term)
    if term.arity == 0:
        return net
    return apply(net, encode_tuple(args))


def run(term: PRTerm, args: Sequence[int], fuel: int = 1_000_000,
        strategy: StrategyTag = StrategyTag.SURFACE,
        hook: SuperlazyHook | None = None) -> RunResult:
    trace = normalize(build_instance(term, args), strategy, fuel, hook=hook)
    if not trace.normal:
        raise FuelExhausted(trace)
    return RunResult(decode_nat(trace.final), trace)


CORPUS = """\
succ = s
first = pi[2,1]
middle = pi[3,2]
add = rec(pi[1,1], comp(s; pi[3,2]))
pred = rec(0, pi[2,1])
zero1 = rec(0, pi[2,2])
mult = rec(zero1, comp(add; pi[3,2], pi[3,3]))
"""


def standard_corpus() -> dict[str, PRTerm]:
    return {e.name: e.term for e in parse_corpus(CORPUS)}
