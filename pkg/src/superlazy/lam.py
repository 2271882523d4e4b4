"""Untyped lambda terms and their call-by-name / call-by-value nets."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Callable, Iterator

from .build import Builder
from .lazy import NODE_COST, facing_node
from .net import STRUCTURAL, Label, Port, ProofNet


class LambdaTerm:
    pass


@dataclass(frozen=True)
class Var(LambdaTerm):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Abs(LambdaTerm):
    name: str
    body: LambdaTerm

    def __str__(self) -> str:
        return f"\\{self.name}.{self.body}"


@dataclass(frozen=True)
class App(LambdaTerm):
    fun: LambdaTerm
    arg: LambdaTerm

    def __str__(self) -> str:
        f = f"({self.fun})" if isinstance(self.fun, Abs) else str(self.fun)
        a = str(self.arg) if isinstance(self.arg, Var) else f"({self.arg})"
        return f"{f} {a}"


class LambdaSyntaxError(ValueError):
    def __init__(self, column: int, message: str):
        super().__init__(f"column {column}: {message}")
        self.column = column


_LEX = re.compile(r"\s*(?:([A-Za-z_][A-Za-z_0-9']*)|(\S))")


class _Parser:
    def __init__(self, text: str):
        self.toks: list[tuple[str, int]] = []
        pos = 0
        while True:
            m = _LEX.match(text, pos)
            if m is None or m.end() == pos:
                break
            tok = m.group(1) or m.group(2)
            self.toks.append((tok, m.start(m.lastindex) + 1))
            pos = m.end()
        self.i = 0
        self.end = len(text) + 1

    def peek(self) -> tuple[str, int]:
        return self.toks[self.i] if self.i < len(self.toks) else ("", self.end)

    def take(self) -> tuple[str, int]:
        tok = self.peek()
        self.i += 1
        return tok

    def ident(self) -> str:
        tok, col = self.take()
        if not _is_ident(tok):
            raise LambdaSyntaxError(col, f"expected a variable, found {tok or 'end of input'!r}")
        return tok

    def term(self) -> LambdaTerm:
        tok, col = self.peek()
        if tok in ("\\", "λ"):
            self.take()
            names = [self.ident()]
            while _is_ident(self.peek()[0]):
                names.append(self.ident())
            tok, col = self.take()
            if tok != ".":
                raise LambdaSyntaxError(col, f"expected '.', found {tok or 'end of input'!r}")
            body = self.term()
            for n in reversed(names):
                body = Abs(n, body)
            return body
        head = self.atom()
        while True:
            tok, _ = self.peek()
            if tok in ("\\", "λ"):
                return App(head, self.term())
            if tok == "(" or _is_ident(tok):
                head = App(head, self.atom())
            else:
                return head

    def atom(self) -> LambdaTerm:
        tok, col = self.take()
        if tok == "(":
            t = self.term()
            close, c2 = self.take()
            if close != ")":
                raise LambdaSyntaxError(c2, f"expected ')', found {close or 'end of input'!r}")
            return t
        if _is_ident(tok):
            return Var(tok)
        raise LambdaSyntaxError(col, f"unexpected {tok or 'end of input'!r}")


def _is_ident(tok: str) -> bool:
    return bool(tok) and (tok[0].isalpha() or tok[0] == "_") and tok != "λ"


def parse_lambda(text: str, rename: bool = True) -> LambdaTerm:
    """Parse ``\\x.`` abstractions with left-associative application.

    With ``rename`` every binder gets a globally fresh name (``x`` becomes
    ``x.1``, ``x.2``...), free variables keep theirs.
    """
    p = _Parser(text)
    t = p.term()
    tok, col = p.peek()
    if tok:
        raise LambdaSyntaxError(col, f"unexpected {tok!r}")
    return alpha_rename(t) if rename else t


def alpha_rename(term: LambdaTerm) -> LambdaTerm:
    counter = itertools.count(1)

    def go(t: LambdaTerm, env: dict[str, str]) -> LambdaTerm:
        if isinstance(t, Var):
            return Var(env.get(t.name, t.name))
        if isinstance(t, Abs):
            fresh = f"{t.name.split('.')[0]}.{next(counter)}"
            return Abs(fresh, go(t.body, {**env, t.name: fresh}))
        return App(go(t.fun, env), go(t.arg, env))

    return go(term, {})


def free_vars(term: LambdaTerm) -> list[str]:
    """Free variables in order of first occurrence."""
    out: list[str] = []

    def go(t: LambdaTerm, bound: frozenset[str]) -> None:
        if isinstance(t, Var):
            if t.name not in bound and t.name not in out:
                out.append(t.name)
        elif isinstance(t, Abs):
            go(t.body, bound | {t.name})
        else:
            go(t.fun, bound)
            go(t.arg, bound)

    go(term, frozenset())
    return out


DELTA_DELTA = r"(\x.x x)(\x.x x)"


# -- encodings -----------------------------------------------------------------------
#
# Both encodings count, for every variable, how many modal uses the
# translation of its scope consumes, build a right comb of contractions
# (or a weakening) with that many outputs, and hand the outputs out in
# order of occurrence.


def _uses_cbn(name: str, t: LambdaTerm) -> int:
    if isinstance(t, Var):
        return int(t.name == name)
    if isinstance(t, Abs):
        return 0 if t.name == name else _uses_cbn(name, t.body)
    arg_uses = int(name in free_vars(t.arg))
    return _uses_cbn(name, t.fun) + arg_uses


def _uses_cbv(name: str, t: LambdaTerm) -> int:
    if isinstance(t, Var):
        return int(t.name == name)
    if isinstance(t, Abs):
        return int(t.name != name and name in free_vars(t.body))
    return _uses_cbv(name, t.fun) + _uses_cbv(name, t.arg)


class _Encoder:
    def __init__(self, b: Builder, cbv: bool):
        self.b = b
        self.cbv = cbv
        self.count = _uses_cbv if cbv else _uses_cbn

    def bind(self, name: str, port: Port, scope: LambdaTerm,
             env: dict[str, Iterator[Port]]) -> dict[str, Iterator[Port]]:
        return {**env, name: iter(self.b.uses(port, self.count(name, scope)))}

    def boxed(self, t: LambdaTerm, env: dict[str, Iterator[Port]],
              inner: Callable[[dict[str, Iterator[Port]]], Port], scope: LambdaTerm) -> Port:
        names = free_vars(t)
        outside = [next(env[n]) for n in names]

        def body(*ports: Port) -> Port:
            local: dict[str, Iterator[Port]] = dict(env)
            for n, p in zip(names, ports):
                local = self.bind(n, p, scope, local)
            return inner(local)

        return self.b.boxed(outside, body)

    def enc(self, t: LambdaTerm, env: dict[str, Iterator[Port]]) -> Port:
        b = self.b
        if isinstance(t, Var):
            use = next(env[t.name])
            return use if self.cbv else b.der(use)
        if isinstance(t, Abs):
            def lam(local: dict[str, Iterator[Port]]) -> Port:
                return b.lam(lambda v: self.enc(t.body, self.bind(t.name, v, t.body, local)))
            return self.boxed(t, env, lam, t.body) if self.cbv else lam(env)
        if self.cbv:
            return b.app(b.der(self.enc(t.fun, env)), self.enc(t.arg, env))
        fun = self.enc(t.fun, env)
        if isinstance(t.arg, Var):
            arg = next(env[t.arg.name])
        else:
            arg = self.boxed(t.arg, env, lambda local: self.enc(t.arg, local), t.arg)
        return b.app(fun, arg)


def _encode(term: LambdaTerm, cbv: bool, name: str) -> ProofNet:
    b = Builder(name)
    enc = _Encoder(b, cbv)
    env: dict[str, Iterator[Port]] = {}
    for v in free_vars(term):
        env = enc.bind(v, b.premise(), term, env)
    return b.conclude(enc.enc(term, env))


def encode_cbn(term: LambdaTerm | str) -> ProofNet:
    """Call-by-name: arguments are boxed, variable occurrences derelicted.

    An argument that is itself a variable is passed on as it stands, since
    its modal value is already available.
    """
    if isinstance(term, str):
        term = parse_lambda(term)
    return _encode(term, False, "cbn")


def encode_cbv(term: LambdaTerm | str) -> ProofNet:
    """Call-by-value: abstractions are boxed, the function of an application derelicted."""
    if isinstance(term, str):
        term = parse_lambda(term)
    return _encode(term, True, "cbv")


# -- blockage ------------------------------------------------------------------------


@dataclass(frozen=True)
class Blockage:
    box: int
    reason: str
    at: int

    def __str__(self) -> str:
        return f"blocked box={self.box} reason={self.reason} at={self.at}"


def _obstacle(net: ProofNet, box: int) -> tuple[int, int] | None:
    """First port (in tree order) where the tree facing ``box`` fails, if any."""
    root = facing_node(net, box)
    if root is None or net.labels[root] not in STRUCTURAL:
        return None
    stack = [(root, 0)]
    while stack:
        v, before = stack.pop()
        lab = net.labels[v]
        c = before + NODE_COST[lab]
        if lab is Label.W or (lab is Label.D and c == -1):
            continue
        if c < 0:
            return v, 0
        kids = []
        for out in sorted(lab.outputs):
            u, port = net.links[(v, out)]
            if net.labels[u] not in STRUCTURAL or port != 0:
                return u, port
            kids.append(u)
        stack.extend((u, c) for u in reversed(kids))
    return None


def _reason(net: ProofNet, node: int, port: int) -> str:
    lab = net.labels[node]
    if lab is Label.BOXA:
        inner = net.boxes[net.door[node]].principal
        content = net.links[(inner, 0)][0]
        return "cbv-abs" if net.labels[content] is Label.RLIMP else "cbn-app"
    if lab is Label.LLIMP and port == 1:
        return "cbn-app"
    return "other"


def analyze_blockage(net: ProofNet) -> list[Blockage]:
    """Top-level boxes cut against a structural node that does not start a derelicting tree."""
    out = []
    for box in sorted(net.boxes):
        rec = net.boxes[box]
        if rec.parent is not None:
            continue
        hit = _obstacle(net, box)
        if hit is not None:
            out.append(Blockage(box, _reason(net, *hit), hit[0]))
    return out
