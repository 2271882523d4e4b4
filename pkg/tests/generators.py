"""Small-instance generators shared by the property and acceptance tests."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from superlazy.build import Builder
from superlazy.lam import Abs, App, LambdaTerm, Var, encode_cbn, encode_cbv
from superlazy.net import Label, Port, ProofNet, serialize
from superlazy.pr import numeral, successor


# -- lambda terms -------------------------------------------------------------------


def lambda_terms(size: int, scope: tuple[str, ...] = (), free: tuple[str, ...] = ("a",)) -> Iterator[LambdaTerm]:
    """All terms with exactly ``size`` constructors over bound ``scope`` and ``free`` names."""
    if size == 1:
        for v in scope + free:
            yield Var(v)
        return
    name = f"v{len(scope)}"
    yield from (Abs(name, b) for b in lambda_terms(size - 1, scope + (name,), free))
    for k in range(1, size - 1):
        for f in lambda_terms(k, scope, free):
            for a in lambda_terms(size - 1 - k, scope, free):
                yield App(f, a)


def postponement_family(max_nodes: int = 12, max_term: int = 6) -> list[ProofNet]:
    """Distinct valid nets from both encodings of small lambda terms."""
    seen: set[str] = set()
    out = []
    for size in range(1, max_term + 1):
        for t in lambda_terms(size):
            for enc in (encode_cbn, encode_cbv):
                net = enc(t)
                if len(net) > max_nodes:
                    continue
                key = serialize(net).split("\n", 1)[1]
                if key not in seen:
                    seen.add(key)
                    net.name = f"{enc.__name__}:{t}"
                    out.append(net)
    return out


# -- box facing a tree of structural nodes -------------------------------------------


@dataclass(frozen=True)
class Shape:
    """Tree shape: label plus children; ``None`` children are open wires."""
    label: Label
    kids: tuple["Shape | None", ...] = ()

    def size(self) -> int:
        return 1 + sum(k.size() for k in self.kids if k is not None)


def shapes(budget: int) -> Iterator[Shape]:
    """Every shape with at most ``budget`` nodes."""
    if budget < 1:
        return
    yield Shape(Label.W)
    subs = [None, *(s for s in _all_upto(budget - 1))]
    for lab in (Label.D, Label.N):
        for k in subs:
            if k is None or k.size() <= budget - 1:
                yield Shape(lab, (k,))
    for a, b in itertools.product(subs, repeat=2):
        if 1 + _sz(a) + _sz(b) <= budget:
            yield Shape(Label.X, (a, b))


def _sz(s: Shape | None) -> int:
    return 0 if s is None else s.size()


_CACHE: dict[int, list[Shape]] = {}


def _all_upto(budget: int) -> list[Shape]:
    if budget not in _CACHE:
        _CACHE[budget] = list(shapes(budget))
    return _CACHE[budget]


CONTENTS = ("id", "open", "nested")


def box_and_tree(shape: Shape, content: str) -> tuple[ProofNet, int]:
    """A top-level box of the given content facing ``shape``; open wires go to the conclusion."""
    b = Builder(f"{content}:{shape}")
    free = [b.premise()] if content == "open" else []

    def inner(*ports: Port) -> Port:
        if content == "open":
            return b.der(ports[0])
        if content == "nested":
            return b.boxed([], lambda: b.lam(lambda x: x))
        return b.lam(lambda x: x)

    principal = b.boxed(free, inner)
    box = b.net.door[principal[0]]
    loose: list[Port] = []

    def grow(s: Shape, value: Port) -> None:
        if s.label is Label.W:
            b.weaken(value)
            return
        if s.label is Label.X:
            outs = b.contract(value)
        elif s.label is Label.D:
            outs = (b.der(value),)
        else:
            outs = (b.dig(value),)
        for k, o in zip(s.kids, outs):
            if k is None:
                loose.append(o)
            else:
                grow(k, o)

    grow(shape, principal)
    if not loose:
        loose.append(b.lam(lambda x: x))
    return b.conclude(b.tensor_cluster(loose)), box


def box_tree_configurations(max_nodes: int = 15, max_tree: int = 5) -> list[tuple[ProofNet, int]]:
    out = []
    for shape in _all_upto(max_tree):
        for content in CONTENTS:
            net, box = box_and_tree(shape, content)
            if len(net) <= max_nodes:
                out.append((net, box))
    return out


# -- iterations of closed successor boxes --------------------------------------------


def iterated_successor(n: int, k: int) -> ProofNet:
    """n applied to a boxed successor and to k: reduces to n + k."""
    b = Builder(f"iter{n}+{k}")
    step = b.boxed([], lambda: b.lam(lambda v: successor(b, v)))
    return b.conclude(b.app(b.app(numeral(b, n), step), numeral(b, k)))


# -- boxes fed by boxes (merge redexes next to superlazy ones) --------------------------

FEEDERS = ("box", "boxbox", "premise", "openbox")
INNER_USES = ("der", "weak", "dup", "dig", "pass")
OUTER_USES = ("keep", "der", "weak", "dup")


def _feeder(b: Builder, kind: str) -> Port:
    if kind == "premise":
        return b.premise()
    if kind == "box":
        return b.boxed([], lambda: b.lam(lambda x: x))
    if kind == "boxbox":
        return b.boxed([], lambda: b.boxed([], lambda: b.lam(lambda x: x)))
    return b.boxed([b.premise()], lambda p: b.der(p))


def _use(b: Builder, kind: str, value: Port) -> Port:
    if kind == "der":
        return b.der(value)
    if kind == "dig":
        return b.der(b.dig(value))
    if kind == "dup":
        l, r = b.contract(value)
        return b.tensor(b.der(l), b.der(r))
    if kind == "weak":
        b.weaken(value)
        return b.lam(lambda x: x)
    return value


def merge_net(feeders: tuple[str, ...], inner: tuple[str, ...], outer: str) -> ProofNet:
    b = Builder(f"merge:{','.join(feeders)}/{','.join(inner)}/{outer}")
    outside = [_feeder(b, f) for f in feeders]
    box = b.boxed(outside, lambda *ps: b.tensor_cluster([_use(b, k, p) for k, p in zip(inner, ps)]))
    if outer == "keep":
        return b.conclude(box)
    return b.conclude(_use(b, outer, box))


def merge_family(max_nodes: int = 12) -> list[ProofNet]:
    out = []
    for k in (1, 2):
        for feeders in itertools.product(FEEDERS, repeat=k):
            for inner in itertools.product(INNER_USES, repeat=k):
                for outer in OUTER_USES:
                    net = merge_net(feeders, inner, outer)
                    if len(net) <= max_nodes:
                        out.append(net)
    return out
