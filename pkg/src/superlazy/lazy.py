"""Derelicting trees, the atomic superlazy step and the surface strategies."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .build import Builder
from .net import STRUCTURAL, Label, ProofNet, measure
from .rewrite import (ELEMENTARY, CutIndex, Redex, RewriteTrace, RuleTag, TraceStep,
                      cut_rule, fire)


class StrategyTag(enum.Enum):
    SURFACE = "surface"
    MPOSTPONED = "mpostponed"
    NSI = "nsi"
    FULL = "full"

    def __str__(self) -> str:
        return self.value


STRATEGIES = {s.value: s for s in StrategyTag}


class LeafKind(enum.Enum):
    DER = "DerLeaf"
    WEAK = "WeakLeaf"


NODE_COST = {Label.X: 0, Label.D: -1, Label.W: 0, Label.N: 1}


class BlockedReduction(ValueError):
    """The box does not face a derelicting tree."""


@dataclass
class DereliftingTree:
    root: int
    labels: dict[int, Label]
    children: dict[int, tuple[int, ...]]
    leaves: dict[int, LeafKind] = field(default_factory=dict)
    cost_by_prefix: dict[int, int] = field(default_factory=dict)

    @property
    def nodes(self) -> frozenset[int]:
        return frozenset(self.labels)

    def count(self, label: Label) -> int:
        return sum(1 for lab in self.labels.values() if lab is label)

    def der_leaves(self) -> list[int]:
        return sorted(n for n, k in self.leaves.items() if k is LeafKind.DER)

    @classmethod
    def from_shape(cls, root: int, labels: dict[int, Label],
                   children: dict[int, Sequence[int]]) -> "DereliftingTree":
        """Tree given abstractly (no net), with prefix costs and leaves filled in."""
        kids = {n: tuple(children.get(n, ())) for n in labels}
        tree = cls(root, dict(labels), kids)
        stack = [(root, 0)]
        while stack:
            v, before = stack.pop()
            c = before + NODE_COST[labels[v]]
            tree.cost_by_prefix[v] = c
            if not kids[v]:
                if labels[v] is Label.D:
                    tree.leaves[v] = LeafKind.DER
                elif labels[v] is Label.W:
                    tree.leaves[v] = LeafKind.WEAK
            stack.extend((u, c) for u in kids[v])
        return tree

    def satisfies_conditions(self) -> bool:
        for v, lab in self.labels.items():
            if lab not in STRUCTURAL:
                return False
            c = self.cost_by_prefix[v]
            if not self.children[v]:
                if lab is Label.D:
                    if c != -1:
                        return False
                elif lab is not Label.W:
                    return False
            elif c < 0:
                return False
        return True


def path_cost(tree: DereliftingTree, path: Sequence[int]) -> int:
    if not path or path[0] != tree.root:
        raise ValueError("path must start at the root of the tree")
    for a, b in zip(path, path[1:]):
        if b not in tree.children.get(a, ()):
            raise ValueError(f"{a} -> {b} is not an edge of the tree")
    return sum(NODE_COST[tree.labels[v]] for v in path)


def facing_node(net: ProofNet, box: int) -> int | None:
    """Node whose principal port is cut against the principal door of ``box``."""
    p = net.boxes[box].principal
    q = net.links.get((p, 1))
    if q is None or q[1] != net.labels[q[0]].principal:
        return None
    return q[0]


def match_derelicting_tree(net: ProofNet, box: int) -> DereliftingTree | None:
    """The derelicting tree hanging on the principal wire of ``box``, if there is one.

    Prefix costs decide the shape: a D reaching cost -1 ends its path, any
    other D, X or N must continue into further tree nodes on every output.
    A tree that leaves a structural output dangling into some other context
    would let a residual of the box escape, so it is rejected.
    """
    root = facing_node(net, box)
    if root is None or net.labels[root] not in STRUCTURAL:
        return None
    tree = DereliftingTree(root, {}, {})
    stack = [(root, 0)]
    while stack:
        v, before = stack.pop()
        if v in tree.labels:
            return None
        lab = net.labels[v]
        c = before + NODE_COST[lab]
        tree.labels[v] = lab
        tree.cost_by_prefix[v] = c
        if lab is Label.W:
            tree.children[v] = ()
            tree.leaves[v] = LeafKind.WEAK
            continue
        if lab is Label.D and c == -1:
            tree.children[v] = ()
            tree.leaves[v] = LeafKind.DER
            continue
        if c < 0:
            return None
        kids = []
        for out in sorted(lab.outputs):
            u, port = net.links[(v, out)]
            if net.labels[u] not in STRUCTURAL or port != 0:
                return None
            kids.append(u)
        tree.children[v] = tuple(kids)
        stack.extend((u, c) for u in reversed(kids))
    return tree


def bounded_spine(n: int) -> tuple[ProofNet, int, int]:
    """A closed box facing the n-bounded spine of a numeral.

    Returns ``(net, box, root)``: the unit box sits on the contraction comb
    of n X nodes whose first outputs end in D leaves feeding a chain of
    applications, closed off by a W on the last output (a lone W when n = 0).
    """
    b = Builder(f"spine{n}")
    x = b.premise()
    star = b.boxed([], lambda: b.lam(lambda v: v))
    box = b.net.door[star[0]]
    uses = b.uses(star, n + 1)
    b.weaken(uses[-1])
    acc = x
    for u in reversed(uses[:-1]):
        acc = b.app(b.der(u), acc)
    net = b.conclude(acc)
    return net, box, facing_node(net, box)


# -- the atomic step --------------------------------------------------------------


def confined_redexes(net: ProofNet, pending: set[int]) -> list[Redex]:
    """Box-principal cuts against nodes of ``pending`` (the unconsumed tree)."""
    out = []
    for t in pending:
        q = net.links.get((t, 0))
        if q is None or net.labels[q[0]] is not Label.BOXP or q[1] != 1:
            continue
        rule = cut_rule(net, (t, 0), q)
        if rule is None:
            continue
        anchor = (min((t, 0), q), max((t, 0), q))
        out.append(Redex(anchor, rule, net.depth(t)))
    out.sort()
    return out


SuperlazyHook = Callable[[ProofNet, int, DereliftingTree], None]


def fire_superlazy(net: ProofNet, box: int, tree: DereliftingTree | None = None,
                   hook: SuperlazyHook | None = None) -> None:
    """Consume the derelicting tree facing ``box`` in place."""
    found = match_derelicting_tree(net, box)
    if found is None:
        raise BlockedReduction(f"box {box} does not face a derelicting tree")
    if tree is not None and tree.nodes != found.nodes:
        raise BlockedReduction(f"box {box} faces a different tree than the one given")
    if hook is not None:
        hook(net, box, found)
    pending = set(found.nodes)
    while pending:
        choices = confined_redexes(net, pending)
        if not choices:
            raise RuntimeError(f"superlazy step on box {box} got stuck")
        redex = choices[0]
        (a, _), (b, _) = redex.anchor
        fire(net, redex)
        pending.discard(a if a in found.labels else b)


def superlazy_step(net: ProofNet, box: int, tree: DereliftingTree | None = None) -> ProofNet:
    out = net.copy()
    fire_superlazy(out, box, tree)
    return out


# -- strategies ------------------------------------------------------------------


def redex_box(net: ProofNet, redex: Redex) -> int:
    (a, _), (b, _) = redex.anchor
    return net.door[a] if net.labels[a] is Label.BOXP else net.door[b]


def nsi_allows(net: ProofNet, box: int) -> bool:
    """Closed box whose content has exactly one X at its top level."""
    if net.boxes[box].aux:
        return False
    return sum(1 for n in net.members[box] if net.labels[n] is Label.X) == 1


def _surface(net: ProofNet, index: CutIndex, nsi: bool) -> list[Redex]:
    out = []
    for r in index.redexes(surface_only=True):
        if r.rule in (RuleTag.LIMP, RuleTag.LTENS, RuleTag.MERGE):
            out.append(r)
            continue
        box = redex_box(net, r)
        if match_derelicting_tree(net, box) is None:
            continue
        if nsi:
            if nsi_allows(net, box):
                out.append(Redex(r.anchor, RuleTag.NSI_SUPERLAZY, 0))
        else:
            out.append(Redex(r.anchor, RuleTag.SUPERLAZY, 0))
    return out


def admissible_redexes(net: ProofNet, strategy: StrategyTag,
                       index: CutIndex | None = None) -> list[Redex]:
    """Every redex the strategy lets fire next, in anchor order."""
    own = index is None
    if own:
        index = CutIndex(net)
    try:
        if strategy is StrategyTag.FULL:
            return index.redexes()
        cands = _surface(net, index, strategy is StrategyTag.NSI)
    finally:
        if own:
            index.close()
    if strategy is StrategyTag.MPOSTPONED:
        other = [r for r in cands if r.rule is not RuleTag.MERGE]
        return other or cands
    return cands


def fire_step(net: ProofNet, redex: Redex, hook: SuperlazyHook | None = None) -> None:
    if redex.rule in ELEMENTARY:
        fire(net, redex)
    else:
        fire_superlazy(net, redex_box(net, redex), hook=hook)


def apply_step(net: ProofNet, redex: Redex) -> ProofNet:
    out = net.copy()
    fire_step(out, redex)
    return out


def step(net: ProofNet, strategy: StrategyTag) -> tuple[Redex, ProofNet] | None:
    cands = admissible_redexes(net, strategy)
    if not cands:
        return None
    return cands[0], apply_step(net, cands[0])


def normalize(net: ProofNet, strategy: StrategyTag = StrategyTag.SURFACE,
              fuel: int = 1_000_000, hook: SuperlazyHook | None = None,
              on_step: Callable[[int, TraceStep], None] | None = None) -> RewriteTrace:
    """Iterate the strategy's first admissible redex until normal or out of fuel."""
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    work = net.copy()
    trace = RewriteTrace(initial=net.copy(), strategy=strategy.value)
    index = CutIndex(work)
    try:
        while True:
            cands = admissible_redexes(work, strategy, index)
            if not cands:
                trace.normal = True
                break
            if len(trace.steps) >= fuel:
                break
            redex = cands[0]
            fire_step(work, redex, hook)
            index.refresh()
            entry = TraceStep(redex, measure(work))
            trace.steps.append(entry)
            if on_step is not None:
                on_step(len(trace.steps), entry)
    finally:
        index.close()
    trace.final = work
    return trace
