"""Independent reference implementations the tests compare against."""

from __future__ import annotations

import itertools
from typing import Iterator

from superlazy.lam import Abs, App, LambdaTerm, Var, free_vars
from superlazy.lazy import StrategyTag, admissible_redexes, apply_step, confined_redexes
from superlazy.net import Label, ProofNet
from superlazy.rewrite import apply_redex

COST = {Label.X: 0, Label.D: -1, Label.W: 0, Label.N: 1}
STRUCT = set(COST)


# -- derelicting trees by enumeration --------------------------------------------------


def _structural_children(net: ProofNet, v: int) -> list[int | None]:
    """Per output port: the structural node it enters, or None."""
    out = []
    for p in sorted(net.labels[v].outputs):
        u, q = net.links[(v, p)]
        out.append(u if net.labels[u] in STRUCT and q == 0 else None)
    return out


def _subtrees(net: ProofNet, v: int) -> Iterator[dict[int, tuple[int, ...]]]:
    """Every tree rooted at ``v`` using any subset of the structural children at each node."""
    kids = [u for u in _structural_children(net, v) if u is not None]
    for chosen in itertools.chain.from_iterable(
            itertools.combinations(kids, r) for r in range(len(kids) + 1)):
        partial = [list(_subtrees(net, u)) for u in chosen]
        for combo in itertools.product(*partial):
            tree = {v: tuple(chosen)}
            for sub in combo:
                tree.update(sub)
            yield tree


def _conditions_hold(net: ProofNet, root: int, tree: dict[int, tuple[int, ...]]) -> bool:
    prefix: dict[int, int] = {}
    stack = [(root, 0)]
    while stack:
        v, before = stack.pop()
        prefix[v] = before + COST[net.labels[v]]
        stack.extend((u, prefix[v]) for u in tree[v])
    for v, kids in tree.items():
        lab = net.labels[v]
        if not kids:
            if lab is Label.D:
                if prefix[v] != -1:
                    return False
            elif lab is not Label.W:
                return False
            continue
        if prefix[v] < 0:
            return False
        # every output of an inner node must stay inside the tree
        if any(u is None or u not in tree for u in _structural_children(net, v)):
            return False
    return True


def brute_force_trees(net: ProofNet, box: int) -> list[frozenset[int]]:
    """Node sets of every subtree facing ``box`` that satisfies the tree conditions."""
    p = net.boxes[box].principal
    root, port = net.links[(p, 1)]
    if net.labels[root] not in STRUCT or port != 0:
        return []
    return [frozenset(t) for t in _subtrees(net, root) if _conditions_hold(net, root, t)]


# -- superlazy step by every interleaving ----------------------------------------------


def all_interleavings(net: ProofNet, tree_nodes: frozenset[int]) -> list[ProofNet]:
    """Results of firing the confined elementary steps in every possible order."""
    results = []

    def go(cur: ProofNet, pending: frozenset[int]) -> None:
        if not pending:
            results.append(cur)
            return
        choices = confined_redexes(cur, set(pending))
        if not choices:
            raise AssertionError("confined steps got stuck before consuming the tree")
        for r in choices:
            (a, _), (b, _) = r.anchor
            consumed = a if a in pending else b
            go(apply_redex(cur, r), pending - {consumed})

    go(net, tree_nodes)
    return results


# -- exhaustive strategy exploration --------------------------------------------------


def explore(net: ProofNet, strategy: StrategyTag, limit: int = 200) -> tuple[int, int]:
    """Longest reduction sequence and largest reduct over all choices of the strategy."""
    best_len, best_size = 0, len(net)
    stack = [(net, 0)]
    while stack:
        cur, k = stack.pop()
        if k > limit:
            raise RuntimeError("reduction deeper than the exploration limit")
        best_len = max(best_len, k)
        best_size = max(best_size, len(cur))
        for r in admissible_redexes(cur, strategy):
            stack.append((apply_step(cur, r), k + 1))
    return best_len, best_size


# -- lambda calculus --------------------------------------------------------------------


def _fresh(name: str, avoid: set[str]) -> str:
    base = name.split(".")[0]
    for i in itertools.count(1):
        cand = f"{base}.r{i}"
        if cand not in avoid:
            return cand
    raise AssertionError


def substitute(t: LambdaTerm, name: str, value: LambdaTerm) -> LambdaTerm:
    if isinstance(t, Var):
        return value if t.name == name else t
    if isinstance(t, App):
        return App(substitute(t.fun, name, value), substitute(t.arg, name, value))
    if t.name == name:
        return t
    if t.name in free_vars(value):
        new = _fresh(t.name, set(free_vars(value)) | set(free_vars(t.body)))
        return Abs(new, substitute(substitute(t.body, t.name, Var(new)), name, value))
    return Abs(t.name, substitute(t.body, name, value))


def beta_normal(t: LambdaTerm, fuel: int = 1000) -> LambdaTerm:
    """Normal-order beta normal form."""
    for _ in range(fuel):
        nxt = _step(t)
        if nxt is None:
            return t
        t = nxt
    raise RuntimeError("no beta normal form within fuel")


def _step(t: LambdaTerm) -> LambdaTerm | None:
    if isinstance(t, App):
        if isinstance(t.fun, Abs):
            return substitute(t.fun.body, t.fun.name, t.arg)
        f = _step(t.fun)
        if f is not None:
            return App(f, t.arg)
        a = _step(t.arg)
        return None if a is None else App(t.fun, a)
    if isinstance(t, Abs):
        b = _step(t.body)
        return None if b is None else Abs(t.name, b)
    return None
