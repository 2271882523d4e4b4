"""Elementary cut-elimination rules and the contextual reduction driver."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .net import Label, NetMeasure, Port, ProofNet, measure


class RuleTag(enum.Enum):
    LIMP = "Limp"
    LTENS = "Ltens"
    DER = "Der"
    CON = "Con"
    WEAK = "Weak"
    DIG = "Dig"
    MERGE = "Merge"
    SUPERLAZY = "Superlazy"
    NSI_SUPERLAZY = "NsiSuperlazy"

    def __str__(self) -> str:
        return self.value


ELEMENTARY = frozenset({RuleTag.LIMP, RuleTag.LTENS, RuleTag.DER, RuleTag.CON,
                        RuleTag.WEAK, RuleTag.DIG, RuleTag.MERGE})

_BOX_RULES = {Label.D: RuleTag.DER, Label.X: RuleTag.CON, Label.W: RuleTag.WEAK,
              Label.N: RuleTag.DIG, Label.BOXA: RuleTag.MERGE}

Anchor = tuple[Port, Port]


class StaleRedex(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Redex:
    anchor: Anchor
    rule: RuleTag = field(compare=False)
    depth: int = field(compare=False, default=0)


def cut_rule(net: ProofNet, a: Port, b: Port) -> RuleTag | None:
    """Elementary rule matching the principal-principal edge ``a``-``b``."""
    la, lb = net.labels[a[0]], net.labels[b[0]]
    if a[1] != la.principal or b[1] != lb.principal:
        return None
    pair = {la, lb}
    if pair == {Label.RLIMP, Label.LLIMP}:
        return RuleTag.LIMP
    if pair == {Label.RTENS, Label.LTENS}:
        return RuleTag.LTENS
    if la is Label.BOXP and lb in _BOX_RULES:
        return _BOX_RULES[lb]
    if lb is Label.BOXP and la in _BOX_RULES:
        return _BOX_RULES[la]
    return None


def node_cut(net: ProofNet, node: int) -> tuple[Anchor, RuleTag] | None:
    if node not in net.labels:
        return None
    p = net.principal_port(node)
    q = net.links.get(p)
    if q is None:
        return None
    rule = cut_rule(net, p, q)
    if rule is None:
        return None
    return (min(p, q), max(p, q)), rule


def find_redexes(net: ProofNet, rules: Iterable[RuleTag] = ELEMENTARY,
                 surface_only: bool = False) -> list[Redex]:
    rules = set(rules)
    found = []
    for node in net.labels:
        hit = node_cut(net, node)
        if hit is None or hit[0][0][0] != node:
            continue
        anchor, rule = hit
        if rule not in rules:
            continue
        depth = net.depth(node)
        if surface_only and depth > 0:
            continue
        found.append(Redex(anchor, rule, depth))
    found.sort()
    return found


def _box_and_other(net: ProofNet, redex: Redex) -> tuple[int, int]:
    (a, _), (b, _) = redex.anchor
    if net.labels[a] is Label.BOXP:
        return net.door[a], b
    return net.door[b], a


def check_redex(net: ProofNet, redex: Redex) -> None:
    a, b = redex.anchor
    if a[0] not in net.labels or b[0] not in net.labels or net.links.get(a) != b:
        raise StaleRedex(f"stale redex at {a}-{b}")
    if cut_rule(net, a, b) is not redex.rule:
        raise StaleRedex(f"redex at {a}-{b} is not a {redex.rule} redex")


# -- rewiring ------------------------------------------------------------------------


def _rewire(net: ProofNet, doomed: set[int], through: list[tuple[Port, Port]]) -> None:
    """Delete ``doomed`` nodes, joining the wires of each pair of ports in ``through``.

    Chains of deleted pass-through ports are followed until a surviving
    port is reached on both ends.
    """
    partner: dict[Port, Port] = {}
    for x, y in through:
        partner[x] = y
        partner[y] = x
    starts = []
    saved: dict[Port, Port] = {}
    for n in doomed:
        for p in range(net.labels[n].arity):
            q = net.links.get((n, p))
            if q is None:
                continue
            saved[(n, p)] = q
            saved[q] = (n, p)
            if q[0] not in doomed:
                starts.append(q)
    for n in doomed:
        net.remove_node(n)
    done: set[Port] = set()
    for s in sorted(starts):
        if s in done:
            continue
        cur = saved[s]
        hops = 0
        while True:
            cur = partner.get(cur)
            if cur is None:
                break
            nxt = saved[cur]
            if nxt[0] not in doomed:
                if nxt not in done and nxt != s:
                    net.link(s, nxt)
                    done.add(nxt)
                done.add(s)
                break
            cur = nxt
            hops += 1
            if hops > 4 * len(saved):
                raise RuntimeError("rewiring did not terminate")


def _copy_box(net: ProofNet, box: int) -> tuple[int, dict[int, int]]:
    """Disjoint copy of ``box`` (doors, content, nested boxes) at the same level."""
    rec = net.boxes[box]
    nodes = net.content(box) | {rec.principal, *rec.aux}
    boxes = net.nested_boxes(box)
    bmap: dict[int, int] = {}
    for b in boxes:
        parent = net.boxes[b].parent
        bmap[b] = net.new_box(bmap.get(parent, parent) if b != box else parent)
    nmap: dict[int, int] = {}
    for n in sorted(nodes):
        if n in net.door:
            owner = net.door[n]
            new = net.add_node(net.labels[n], net.boxes[bmap[owner]].parent)
            net.door[new] = bmap[owner]
        else:
            new = net.add_node(net.labels[n], bmap[net.parent[n]])
        nmap[n] = new
    for b in boxes:
        nb = net.boxes[bmap[b]]
        nb.principal = nmap[net.boxes[b].principal]
        nb.aux = [nmap[a] for a in net.boxes[b].aux]
    for n in sorted(nodes):
        for p in range(net.labels[n].arity):
            q = net.links[(n, p)]
            if q[0] in nodes and (nmap[n], p) not in net.links:
                net.link((nmap[n], p), (nmap[q[0]], q[1]))
    return bmap[box], nmap


def _erase_box(net: ProofNet, box: int) -> None:
    rec = net.boxes[box]
    nodes = net.content(box) | {rec.principal, *rec.aux}
    inner = net.nested_boxes(box)
    for n in nodes:
        net.remove_node(n)
    for b in reversed(inner):
        net.drop_box(b)


# -- the rules (in place) -----------------------------------------------------------------


def fire(net: ProofNet, redex: Redex) -> None:
    """Apply ``redex`` to ``net`` in place."""
    check_redex(net, redex)
    _FIRE[redex.rule](net, redex)


def _fire_limp(net: ProofNet, redex: Redex) -> None:
    (a, _), (b, _) = redex.anchor
    lam, ap = (a, b) if net.labels[a] is Label.RLIMP else (b, a)
    _rewire(net, {lam, ap}, [((lam, 1), (ap, 2)), ((lam, 0), (ap, 1))])


def _fire_ltens(net: ProofNet, redex: Redex) -> None:
    (a, _), (b, _) = redex.anchor
    r, l = (a, b) if net.labels[a] is Label.RTENS else (b, a)
    _rewire(net, {r, l}, [((r, 0), (l, 1)), ((r, 1), (l, 2))])


def _fire_der(net: ProofNet, redex: Redex) -> None:
    box, d = _box_and_other(net, redex)
    rec = net.boxes[box]
    outer = rec.parent
    for n in list(net.members[box]):
        net.set_parent(n, outer)
    for b in list(net.subboxes[box]):
        net.set_box_parent(b, outer)
    through = [((d, 1), (rec.principal, 0))] + [((a, 0), (a, 1)) for a in rec.aux]
    _rewire(net, {d, rec.principal, *rec.aux}, through)
    net.drop_box(box)


def _fire_con(net: ProofNet, redex: Redex) -> None:
    box, x = _box_and_other(net, redex)
    rec = net.boxes[box]
    level = rec.parent
    copy, nmap = _copy_box(net, box)
    left = net.unlink((x, 1))
    right = net.unlink((x, 2))
    net.remove_node(x)
    net.link((rec.principal, 1), left)
    net.link((nmap[rec.principal], 1), right)
    for a in rec.aux:
        outside = net.unlink((a, 0))
        share = net.add_node(Label.X, level)
        net.link(outside, (share, 0))
        net.link((share, 1), (a, 0))
        net.link((share, 2), (nmap[a], 0))


def _fire_weak(net: ProofNet, redex: Redex) -> None:
    box, w = _box_and_other(net, redex)
    rec = net.boxes[box]
    level = rec.parent
    outside = [net.links[(a, 0)] for a in rec.aux]
    net.remove_node(w)
    _erase_box(net, box)
    for o in outside:
        k = net.add_node(Label.W, level)
        net.link(o, (k, 0))


def _fire_dig(net: ProofNet, redex: Redex) -> None:
    box, n = _box_and_other(net, redex)
    rec = net.boxes[box]
    level = rec.parent
    cont = net.unlink((n, 1))
    net.remove_node(n)
    outer = net.new_box(level)
    net.set_box_parent(box, outer)
    p = net.add_door(outer, Label.BOXP)
    net.link((rec.principal, 1), (p, 0))
    net.link((p, 1), cont)
    for a in rec.aux:
        outside = net.unlink((a, 0))
        oa = net.add_door(outer, Label.BOXA)
        net.link(outside, (oa, 0))
        net.link((oa, 1), (a, 0))


def _fire_merge(net: ProofNet, redex: Redex) -> None:
    (a, _), (b, _) = redex.anchor
    aux, prin = (a, b) if net.labels[a] is Label.BOXA else (b, a)
    host = net.door[aux]
    guest = net.door[prin]
    hrec, grec = net.boxes[host], net.boxes[guest]
    for n in list(net.members[guest]):
        net.set_parent(n, host)
    for sub in list(net.subboxes[guest]):
        net.set_box_parent(sub, host)
    idx = hrec.aux.index(aux)
    hrec.aux[idx:idx + 1] = grec.aux
    for g in grec.aux:
        net.door[g] = host
    _rewire(net, {aux, prin}, [((aux, 1), (prin, 0))])
    net.drop_box(guest)


_FIRE = {
    RuleTag.LIMP: _fire_limp, RuleTag.LTENS: _fire_ltens, RuleTag.DER: _fire_der,
    RuleTag.CON: _fire_con, RuleTag.WEAK: _fire_weak, RuleTag.DIG: _fire_dig,
    RuleTag.MERGE: _fire_merge,
}


def _apply(net: ProofNet, redex: Redex, rule: RuleTag) -> ProofNet:
    if redex.rule is not rule:
        raise StaleRedex(f"expected a {rule} redex, got {redex.rule}")
    out = net.copy()
    fire(out, redex)
    return out


def apply_limp(net: ProofNet, redex: Redex) -> ProofNet:
    return _apply(net, redex, RuleTag.LIMP)


def apply_ltens(net: ProofNet, redex: Redex) -> ProofNet:
    return _apply(net, redex, RuleTag.LTENS)


def apply_der(net: ProofNet, redex: Redex) -> ProofNet:
    return _apply(net, redex, RuleTag.DER)


def apply_con(net: ProofNet, redex: Redex) -> ProofNet:
    return _apply(net, redex, RuleTag.CON)


def apply_weak(net: ProofNet, redex: Redex) -> ProofNet:
    return _apply(net, redex, RuleTag.WEAK)


def apply_dig(net: ProofNet, redex: Redex) -> ProofNet:
    return _apply(net, redex, RuleTag.DIG)


def apply_merge(net: ProofNet, redex: Redex) -> ProofNet:
    return _apply(net, redex, RuleTag.MERGE)


def apply_redex(net: ProofNet, redex: Redex) -> ProofNet:
    out = net.copy()
    fire(out, redex)
    return out


# -- traces -------------------------------------------------------------------------------


@dataclass
class TraceStep:
    redex: Redex
    measure: NetMeasure


@dataclass
class RewriteTrace:
    initial: ProofNet
    steps: list[TraceStep] = field(default_factory=list)
    final: ProofNet | None = None
    normal: bool = False
    strategy: str = "full"

    @property
    def initial_measure(self) -> NetMeasure:
        return measure(self.initial)

    @property
    def max_size(self) -> int:
        return max([len(self.initial)] + [s.measure.size for s in self.steps])

    def count(self, *rules: RuleTag) -> int:
        return sum(1 for s in self.steps if s.redex.rule in rules)

    def lines(self) -> Iterator[str]:
        yield header_line(self.strategy, self.initial_measure)
        for i, s in enumerate(self.steps, start=1):
            yield step_line(i, s)
        yield final_line(self.normal, len(self.steps), self.max_size)

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"


def header_line(strategy: str, m: NetMeasure) -> str:
    return f"trace strategy={strategy} size={m.size} maxdepth={m.depth}"


def step_line(i: int, s: TraceStep) -> str:
    return (f"step {i} {s.redex.rule} depth={s.redex.depth} "
            f"size={s.measure.size} maxdepth={s.measure.depth}")


def final_line(normal: bool, steps: int, max_size: int) -> str:
    return f"final normal={str(normal).lower()} steps={steps} maxsize={max_size}"


def step_json(i: int, s: TraceStep) -> str:
    return json.dumps({"step": i, "rule": str(s.redex.rule), "depth": s.redex.depth,
                       "size": s.measure.size, "maxdepth": s.measure.depth})


@dataclass
class TraceSummary:
    """What a trace file records: enough to re-check the soundness bound."""
    strategy: str
    initial: NetMeasure
    steps: list[tuple[str, int, int, int]]
    normal: bool
    max_size: int

    @property
    def step_count(self) -> int:
        return len(self.steps)


class TraceFormatError(ValueError):
    pass


def _kv(tok: str, key: str, lineno: int) -> str:
    k, sep, v = tok.partition("=")
    if k != key or not sep:
        raise TraceFormatError(f"line {lineno}: expected {key}=..., got {tok!r}")
    return v


def _nat(text: str, lineno: int) -> int:
    if not text.isdigit():
        raise TraceFormatError(f"line {lineno}: expected a natural number, got {text!r}")
    return int(text)


def parse_trace(text: str) -> TraceSummary:
    header = None
    steps: list[tuple[str, int, int, int]] = []
    final = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = line.split()
        if not toks or toks[0].startswith("#"):
            continue
        if toks[0] == "trace" and len(toks) == 4:
            header = (_kv(toks[1], "strategy", lineno),
                      NetMeasure(_nat(_kv(toks[2], "size", lineno), lineno),
                                 _nat(_kv(toks[3], "maxdepth", lineno), lineno)))
        elif toks[0] == "step" and len(toks) == 6:
            if _nat(toks[1], lineno) != len(steps) + 1:
                raise TraceFormatError(f"line {lineno}: steps out of order")
            steps.append((toks[2], _nat(_kv(toks[3], "depth", lineno), lineno),
                          _nat(_kv(toks[4], "size", lineno), lineno),
                          _nat(_kv(toks[5], "maxdepth", lineno), lineno)))
        elif toks[0] == "final" and len(toks) == 4:
            normal = _kv(toks[1], "normal", lineno)
            if normal not in ("true", "false"):
                raise TraceFormatError(f"line {lineno}: normal must be true or false")
            final = (normal == "true", _nat(_kv(toks[2], "steps", lineno), lineno),
                     _nat(_kv(toks[3], "maxsize", lineno), lineno))
        else:
            raise TraceFormatError(f"line {lineno}: unrecognised trace line {line!r}")
    if header is None or final is None:
        raise TraceFormatError("trace needs a 'trace' header and a 'final' line")
    normal, count, max_size = final
    if count != len(steps):
        raise TraceFormatError(f"final line claims {count} steps, trace has {len(steps)}")
    return TraceSummary(header[0], header[1], steps, normal, max_size)


def summarize(trace: RewriteTrace) -> TraceSummary:
    return parse_trace(trace.text())


# -- contextual closure driver ---------------------------------------------------------------


class CutIndex:
    """Principal-principal edges of a net, kept current from the net's touched set."""

    def __init__(self, net: ProofNet):
        self.net = net
        self.by_node: dict[int, tuple[Anchor, RuleTag]] = {}
        net.touched = set(net.labels)
        self.refresh()

    def refresh(self) -> None:
        net = self.net
        touched, net.touched = net.touched, set()
        for n in touched:
            self.by_node.pop(n, None)
            hit = node_cut(net, n)
            if hit is not None:
                self.by_node[n] = hit

    def redexes(self, surface_only: bool = False) -> list[Redex]:
        net = self.net
        out = {}
        for anchor, rule in self.by_node.values():
            if anchor in out:
                continue
            node = anchor[0][0]
            if surface_only:
                if net.parent[node] is not None:
                    continue
                depth = 0
            else:
                depth = net.depth(node)
            out[anchor] = Redex(anchor, rule, depth)
        return sorted(out.values())

    def close(self) -> None:
        self.net.touched = None


def reduce_all(net: ProofNet, rules: Iterable[RuleTag] = ELEMENTARY,
               surface_only: bool = False, fuel: int = 1_000_000) -> RewriteTrace:
    """Fire the first redex in anchor order until none is left or fuel runs out."""
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    rules = set(rules)
    work = net.copy()
    trace = RewriteTrace(initial=net.copy(), strategy="full" if not surface_only else "contextual-surface")
    index = CutIndex(work)
    try:
        while True:
            candidates = [r for r in index.redexes(surface_only) if r.rule in rules]
            if not candidates:
                trace.normal = True
                break
            if len(trace.steps) >= fuel:
                break
            redex = candidates[0]
            fire(work, redex)
            index.refresh()
            trace.steps.append(TraceStep(redex, measure(work)))
    finally:
        index.close()
    trace.final = work
    return trace
