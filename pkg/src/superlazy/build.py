"""Compositional net construction.

Each helper takes output ports ("values") already present in the net,
wires them into fresh nodes and returns the new output port(s).  A
:class:`Builder` remembers which box new nodes go into, so nets come out
with their box forest already in place.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Callable, Iterator, Sequence

from .net import Label, Port, ProofNet


class Builder:
    def __init__(self, name: str = "net", net: ProofNet | None = None):
        self.net = net if net is not None else ProofNet(name)
        self.box: int | None = None

    def node(self, label: Label) -> int:
        return self.net.add_node(label, self.box)

    def wire(self, a: Port, b: Port) -> None:
        self.net.link(a, b)

    # -- interface ------------------------------------------------------------

    def premise(self) -> Port:
        return (self.node(Label.P), 0)

    def conclude(self, value: Port) -> ProofNet:
        c = self.node(Label.C)
        self.wire(value, (c, 0))
        return self.net

    # -- multiplicatives ---------------------------------------------------------

    def lam(self, body: Callable[[Port], Port]) -> Port:
        n = self.node(Label.RLIMP)
        self.wire(body((n, 0)), (n, 1))
        return (n, 2)

    def app(self, fun: Port, arg: Port) -> Port:
        n = self.node(Label.LLIMP)
        self.wire(fun, (n, 0))
        self.wire(arg, (n, 1))
        return (n, 2)

    def tensor(self, left: Port, right: Port) -> Port:
        n = self.node(Label.RTENS)
        self.wire(left, (n, 0))
        self.wire(right, (n, 1))
        return (n, 2)

    def split(self, pair: Port) -> tuple[Port, Port]:
        n = self.node(Label.LTENS)
        self.wire(pair, (n, 0))
        return (n, 1), (n, 2)

    def tensor_cluster(self, values: Sequence[Port]) -> Port:
        """Right-nested R* cluster; a single value is returned unchanged."""
        if not values:
            raise ValueError("empty cluster")
        acc = values[-1]
        for v in reversed(values[:-1]):
            acc = self.tensor(v, acc)
        return acc

    def split_cluster(self, value: Port, k: int) -> list[Port]:
        out = []
        for _ in range(k - 1):
            head, value = self.split(value)
            out.append(head)
        out.append(value)
        return out

    # -- exponentials ------------------------------------------------------------

    def der(self, value: Port) -> Port:
        n = self.node(Label.D)
        self.wire(value, (n, 0))
        return (n, 1)

    def dig(self, value: Port) -> Port:
        n = self.node(Label.N)
        self.wire(value, (n, 0))
        return (n, 1)

    def weaken(self, value: Port) -> None:
        n = self.node(Label.W)
        self.wire(value, (n, 0))

    def contract(self, value: Port) -> tuple[Port, Port]:
        n = self.node(Label.X)
        self.wire(value, (n, 0))
        return (n, 1), (n, 2)

    def uses(self, value: Port, k: int) -> list[Port]:
        """``k`` copies of a modal value as a right comb of X nodes (W when k = 0)."""
        if k == 0:
            self.weaken(value)
            return []
        out = []
        for _ in range(k - 1):
            first, value = self.contract(value)
            out.append(first)
        out.append(value)
        return out

    def boxed(self, free: Sequence[Port], body: Callable[..., Port]) -> Port:
        """Promotion: ``body`` receives one inside port per element of ``free``."""
        net = self.net
        b = net.new_box(self.box)
        inner = []
        for v in free:
            a = net.add_door(b, Label.BOXA)
            self.wire(v, (a, 0))
            inner.append((a, 1))
        p = net.add_door(b, Label.BOXP)
        with self.inside(b):
            self.wire(body(*inner), (p, 0))
        return (p, 1)

    @contextmanager
    def inside(self, box: int | None) -> Iterator[None]:
        saved, self.box = self.box, box
        try:
            yield
        finally:
            self.box = saved


def wire_net() -> ProofNet:
    """The bare wire: one premise plugged into the conclusion."""
    b = Builder("wire")
    return b.conclude(b.premise())


def plug(fun: ProofNet, arg: ProofNet, name: str | None = None) -> ProofNet:
    """Plug the conclusion of closed ``arg`` into the single premise of ``fun``."""
    if len(fun.premises) != 1:
        raise ValueError(f"function net must have exactly one premise, has {len(fun.premises)}")
    if arg.premises:
        raise ValueError("argument net must be closed")
    if arg.conclusion is None:
        raise ValueError("argument net has no conclusion")
    out = fun.copy()
    out.name = name or f"{fun.name}@{arg.name}"
    offset = out.next_node
    box_offset = out.next_box
    for b in sorted(arg.boxes, key=arg.depth_of_box):
        rec = arg.boxes[b]
        out.new_box(None if rec.parent is None else rec.parent + box_offset, b + box_offset)
    for n, lab in sorted(arg.labels.items()):
        box = arg.parent[n]
        new = out.add_node(lab, None if box is None else box + box_offset, n + offset)
        if n in arg.door:
            out.door[new] = arg.door[n] + box_offset
    for b, rec in arg.boxes.items():
        nb = out.boxes[b + box_offset]
        nb.principal = rec.principal + offset
        nb.aux = [x + offset for x in rec.aux]
    for (x, p), (y, q) in arg.edges():
        out.link((x + offset, p), (y + offset, q))
    prem = out.premises[0]
    concl = arg.conclusion + offset
    consumer = out.unlink((prem, 0))
    producer = out.unlink((concl, 0))
    out.remove_node(prem)
    out.remove_node(concl)
    out.conclusion = fun.conclusion
    out.link(producer, consumer)
    return out
