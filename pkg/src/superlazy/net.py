"""Pure proof nets: graph model, validity, measures, text format, isomorphism.

A net is a set of labelled nodes whose ports are joined pairwise by edges,
together with a nesting forest of boxes.  Every node has exactly one
principal port; an edge joining two principal ports is a *cut*.

Port conventions (``out`` ports produce a value, ``in`` ports consume one):

=========  =====  =========  ==========================================
label      arity  principal  ports
=========  =====  =========  ==========================================
P          1      0          0 out
C          1      0          0 in
W          1      0          0 in
D, N       2      0          0 in (faces the box), 1 out
X          3      0          0 in (faces the box), 1 out, 2 out
R-o        3      2          0 out (bound variable), 1 in (body), 2 out
L-o        3      0          0 in (function), 1 in (argument), 2 out
R*         3      2          0 in, 1 in, 2 out
L*         3      0          0 in, 1 out, 2 out
R!         2      1          0 in (inside), 1 out (outside)
L!         2      0          0 in (outside), 1 out (inside)
=========  =====  =========  ==========================================
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

Port = tuple[int, int]


class Label(enum.Enum):
    P = "P"
    C = "C"
    W = "W"
    X = "X"
    RLIMP = "R-o"
    LLIMP = "L-o"
    RTENS = "R*"
    LTENS = "L*"
    BOXP = "R!"
    BOXA = "L!"
    D = "D"
    N = "N"

    def __str__(self) -> str:
        return self.value

    @property
    def arity(self) -> int:
        return _ARITY[self]

    @property
    def principal(self) -> int:
        return _PRINCIPAL[self]

    @property
    def outputs(self) -> frozenset[int]:
        return _OUTPUTS[self]


_ARITY = {
    Label.P: 1, Label.C: 1, Label.W: 1, Label.D: 2, Label.N: 2, Label.X: 3,
    Label.RLIMP: 3, Label.LLIMP: 3, Label.RTENS: 3, Label.LTENS: 3,
    Label.BOXP: 2, Label.BOXA: 2,
}
_PRINCIPAL = {
    Label.P: 0, Label.C: 0, Label.W: 0, Label.D: 0, Label.N: 0, Label.X: 0,
    Label.RLIMP: 2, Label.LLIMP: 0, Label.RTENS: 2, Label.LTENS: 0,
    Label.BOXP: 1, Label.BOXA: 0,
}
_OUTPUTS = {
    Label.P: frozenset({0}), Label.C: frozenset(), Label.W: frozenset(),
    Label.D: frozenset({1}), Label.N: frozenset({1}), Label.X: frozenset({1, 2}),
    Label.RLIMP: frozenset({0, 2}), Label.LLIMP: frozenset({2}),
    Label.RTENS: frozenset({2}), Label.LTENS: frozenset({1, 2}),
    Label.BOXP: frozenset({1}), Label.BOXA: frozenset({1}),
}

LABELS_BY_NAME = {lab.value: lab for lab in Label}
STRUCTURAL = frozenset({Label.X, Label.D, Label.N, Label.W})


def flow(label: Label, port: int) -> tuple[int, ...]:
    """Output ports that depend on input ``port`` (the bound variable of R-o is a source)."""
    if label is Label.RLIMP:
        return (2,) if port == 1 else ()
    return tuple(sorted(label.outputs))


@dataclass
class Box:
    principal: int
    aux: list[int] = field(default_factory=list)
    parent: int | None = None


@dataclass(frozen=True)
class NetMeasure:
    size: int
    depth: int


class ProofNet:
    """Mutable port graph with a box forest.

    Rewrites in :mod:`superlazy.rewrite` work on private copies, so a net
    handed out by a public function can be treated as an immutable value.
    """

    def __init__(self, name: str = "net"):
        self.name = name
        self.labels: dict[int, Label] = {}
        self.links: dict[Port, Port] = {}
        self.parent: dict[int, int | None] = {}
        self.boxes: dict[int, Box] = {}
        self.door: dict[int, int] = {}
        self.members: dict[int, set[int]] = {}
        self.subboxes: dict[int, set[int]] = {}
        self.premises: list[int] = []
        self.conclusion: int | None = None
        self.next_node = 0
        self.next_box = 0
        self.touched: set[int] | None = None

    # -- construction primitives -------------------------------------------

    def add_node(self, label: Label, box: int | None = None, node: int | None = None) -> int:
        if node is None:
            node = self.next_node
        elif node in self.labels:
            raise ValueError(f"duplicate node id {node}")
        self.next_node = max(self.next_node, node + 1)
        self.labels[node] = label
        self.parent[node] = box
        if box is not None:
            self.members[box].add(node)
        if label is Label.P:
            self.premises.append(node)
        elif label is Label.C:
            self.conclusion = node
        self._touch(node)
        return node

    def remove_node(self, node: int) -> None:
        label = self.labels.pop(node)
        for p in range(label.arity):
            other = self.links.pop((node, p), None)
            if other is not None and self.links.get(other) == (node, p):
                del self.links[other]
                self._touch(other[0])
        box = self.parent.pop(node)
        if box is not None:
            self.members[box].discard(node)
        self.door.pop(node, None)
        if label is Label.P:
            self.premises.remove(node)
        elif label is Label.C and self.conclusion == node:
            self.conclusion = None
        self._touch(node)

    def link(self, a: Port, b: Port) -> None:
        if a in self.links or b in self.links:
            raise ValueError(f"port already linked: {a if a in self.links else b}")
        if a == b:
            raise ValueError(f"cannot link port {a} to itself")
        self.links[a] = b
        self.links[b] = a
        self._touch(a[0])
        self._touch(b[0])

    def unlink(self, a: Port) -> Port:
        b = self.links.pop(a)
        del self.links[b]
        self._touch(a[0])
        self._touch(b[0])
        return b

    def new_box(self, parent: int | None = None, box: int | None = None) -> int:
        if box is None:
            box = self.next_box
        self.next_box = max(self.next_box, box + 1)
        self.boxes[box] = Box(principal=-1, aux=[], parent=parent)
        self.members[box] = set()
        self.subboxes[box] = set()
        if parent is not None:
            self.subboxes[parent].add(box)
        return box

    def add_door(self, box: int, label: Label, node: int | None = None) -> int:
        rec = self.boxes[box]
        n = self.add_node(label, rec.parent, node)
        self.door[n] = box
        if label is Label.BOXP:
            rec.principal = n
        else:
            rec.aux.append(n)
        return n

    def set_parent(self, node: int, box: int | None) -> None:
        old = self.parent[node]
        if old is not None:
            self.members[old].discard(node)
        self.parent[node] = box
        if box is not None:
            self.members[box].add(node)
        self._touch(node)

    def set_box_parent(self, box: int, parent: int | None) -> None:
        rec = self.boxes[box]
        if rec.parent is not None:
            self.subboxes[rec.parent].discard(box)
        rec.parent = parent
        if parent is not None:
            self.subboxes[parent].add(box)
        for d in [rec.principal, *rec.aux]:
            if d in self.labels:
                self.set_parent(d, parent)

    def drop_box(self, box: int) -> None:
        rec = self.boxes.pop(box)
        if rec.parent is not None:
            self.subboxes[rec.parent].discard(box)
        del self.members[box]
        del self.subboxes[box]

    def _touch(self, node: int) -> None:
        if self.touched is not None:
            self.touched.add(node)

    # -- queries -------------------------------------------------------------

    def neighbor(self, port: Port) -> Port | None:
        return self.links.get(port)

    def principal_port(self, node: int) -> Port:
        return (node, self.labels[node].principal)

    def is_principal(self, port: Port) -> bool:
        return port[1] == self.labels[port[0]].principal

    def depth_of_box(self, box: int | None) -> int:
        d = 0
        while box is not None:
            d += 1
            box = self.boxes[box].parent
        return d

    def depth(self, node: int) -> int:
        return self.depth_of_box(self.parent[node])

    def port_level(self, port: Port) -> int | None:
        """Innermost box enclosing the wire attached at ``port``."""
        node, p = port
        lab = self.labels[node]
        if lab is Label.BOXP and p == 0 or lab is Label.BOXA and p == 1:
            return self.door[node]
        return self.parent[node]

    def content(self, box: int) -> set[int]:
        """All nodes strictly inside ``box``, nested boxes included."""
        out: set[int] = set()
        stack = [box]
        while stack:
            b = stack.pop()
            out |= self.members[b]
            stack.extend(self.subboxes[b])
        return out

    def nested_boxes(self, box: int) -> list[int]:
        out, stack = [], [box]
        while stack:
            b = stack.pop()
            out.append(b)
            stack.extend(sorted(self.subboxes[b]))
        return out

    def edges(self) -> Iterator[tuple[Port, Port]]:
        for a, b in self.links.items():
            if a < b:
                yield a, b

    def box_height(self) -> int:
        memo: dict[int, int] = {}
        best = 0
        for b in self.boxes:
            chain = []
            x: int | None = b
            while x is not None and x not in memo:
                chain.append(x)
                x = self.boxes[x].parent
            base = 0 if x is None else memo[x]
            for y in reversed(chain):
                base += 1
                memo[y] = base
            best = max(best, memo[b])
        return best

    def __len__(self) -> int:
        return len(self.labels)

    def copy(self) -> "ProofNet":
        n = ProofNet(self.name)
        n.labels = dict(self.labels)
        n.links = dict(self.links)
        n.parent = dict(self.parent)
        n.boxes = {k: Box(v.principal, list(v.aux), v.parent) for k, v in self.boxes.items()}
        n.door = dict(self.door)
        n.members = {k: set(v) for k, v in self.members.items()}
        n.subboxes = {k: set(v) for k, v in self.subboxes.items()}
        n.premises = list(self.premises)
        n.conclusion = self.conclusion
        n.next_node = self.next_node
        n.next_box = self.next_box
        return n

    def __repr__(self) -> str:
        return f"<ProofNet {self.name!r} size={len(self)} boxes={len(self.boxes)}>"


def measure(net: ProofNet) -> NetMeasure:
    return NetMeasure(size=len(net), depth=net.box_height())


# -- validity ---------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str
    nodes: tuple[int, ...]
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def validate(net: ProofNet) -> ValidationReport:
    """Check that ``net`` could have been built with the formation rules.

    Local checks (ports, polarity, box borders, interface) come first; the
    global ones (acyclicity and variable scope) only run on locally sound
    nets.
    """
    bad: list[Violation] = []

    def report(kind: str, nodes: Iterable[int], msg: str) -> None:
        bad.append(Violation(kind, tuple(nodes), msg))

    labels = net.labels
    if not labels:
        report("empty", (), "the empty graph has no conclusion")
        return ValidationReport(bad)

    for n, lab in sorted(labels.items()):
        for p in range(lab.arity):
            other = net.links.get((n, p))
            if other is None:
                report("dangling port", (n,), f"port {n}:{p} of {lab} is unconnected")
                continue
            m, q = other
            if m not in labels or q >= labels[m].arity:
                report("bad edge", (n,), f"port {n}:{p} linked to missing port {m}:{q}")
            elif net.links.get(other) != (n, p):
                report("bad edge", (n, m), f"asymmetric link {n}:{p} -> {m}:{q}")
    for (n, p) in net.links:
        if n not in labels or p >= labels[n].arity:
            report("bad edge", (n,), f"edge endpoint {n}:{p} does not exist")

    for a, b in net.edges():
        if a[0] not in labels or b[0] not in labels:
            continue
        oa = a[1] in labels[a[0]].outputs
        ob = b[1] in labels[b[0]].outputs
        if oa == ob:
            kind = "two outputs" if oa else "two inputs"
            report("polarity", (a[0], b[0]), f"edge {a[0]}:{a[1]} {b[0]}:{b[1]} joins {kind}")

    # box forest
    seen_doors: dict[int, int] = {}
    for bid, rec in sorted(net.boxes.items()):
        doors = [rec.principal, *rec.aux]
        if rec.principal not in labels or labels[rec.principal] is not Label.BOXP:
            report("box", (bid,), f"box {bid} has no principal door")
        for a in rec.aux:
            if a not in labels or labels[a] is not Label.BOXA:
                report("box", (a,), f"auxiliary door {a} of box {bid} is not an L! node")
        for d in doors:
            if d in seen_doors:
                report("box", (d,), f"door {d} belongs to boxes {seen_doors[d]} and {bid}")
            seen_doors[d] = bid
            if d in labels and net.parent.get(d) != rec.parent:
                report("box", (d,), f"door {d} is not at the level of box {bid}")
        x, hops = rec.parent, 0
        while x is not None and hops <= len(net.boxes):
            x, hops = net.boxes[x].parent if x in net.boxes else None, hops + 1
        if hops > len(net.boxes):
            report("box", (bid,), f"box {bid} is nested inside itself")
    for n, lab in labels.items():
        if lab in (Label.BOXP, Label.BOXA) and n not in seen_doors:
            report("box", (n,), f"door node {n} belongs to no box")
    if any(v.kind == "box" for v in bad) or any(v.kind in ("dangling port", "bad edge") for v in bad):
        return ValidationReport(bad)

    for a, b in net.edges():
        if net.port_level(a) != net.port_level(b):
            report("box border", (a[0], b[0]),
                   f"edge {a[0]}:{a[1]} {b[0]}:{b[1]} crosses a box border")

    concl = [n for n, lab in labels.items() if lab is Label.C]
    if len(concl) != 1:
        report("interface", concl, f"expected exactly one conclusion, found {len(concl)}")
    elif net.conclusion != concl[0]:
        report("interface", concl, "conclusion record does not match the C node")
    prem = sorted(n for n, lab in labels.items() if lab is Label.P)
    if sorted(net.premises) != prem or len(set(net.premises)) != len(net.premises):
        report("interface", prem, "premise list does not match the P nodes")
    for n in concl + prem:
        if net.parent.get(n) is not None:
            report("interface", (n,), f"{labels[n]} node {n} lies inside a box")

    if bad:
        return ValidationReport(bad)

    cycle = _find_cycle(net)
    if cycle:
        report("cycle", cycle, "directed cycle through nodes " + ",".join(map(str, cycle)))
        return ValidationReport(bad)
    for n, lab in sorted(labels.items()):
        if lab is Label.RLIMP and _escapes(net, n):
            report("scope", (n,), f"bound variable of R-o node {n} reaches the conclusion outside its body")
    return ValidationReport(bad)


def _successors(net: ProofNet, node: int) -> Iterator[int]:
    lab = net.labels[node]
    for p in lab.outputs:
        yield net.links[(node, p)][0]


def _find_cycle(net: ProofNet) -> list[int]:
    # node-level graph is enough: R-o is the only node whose outputs do not all
    # depend on all inputs, and its variable output has no inputs feeding it.
    succ: dict[int, list[int]] = {}
    for n, lab in net.labels.items():
        out = []
        for p in lab.outputs:
            if lab is Label.RLIMP and p == 0:
                continue
            out.append(net.links[(n, p)][0])
        succ[n] = out
    indeg = {n: 0 for n in net.labels}
    for n, out in succ.items():
        for m in out:
            indeg[m] += 1
    queue = deque(n for n, k in indeg.items() if k == 0)
    done = 0
    while queue:
        n = queue.popleft()
        done += 1
        for m in succ[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                queue.append(m)
    if done == len(net.labels):
        return []
    return sorted(n for n, k in indeg.items() if k > 0)


def _escapes(net: ProofNet, lam: int) -> bool:
    """True if the variable of ``lam`` reaches C without passing through its body port."""
    start = net.links[(lam, 0)]
    if start == (lam, 1):
        return False
    seen_ports = {start}
    queue = deque([start])
    while queue:
        node, p = queue.popleft()
        lab = net.labels[node]
        if lab is Label.C:
            return True
        if node == lam:
            if p == 1:
                continue
            return True  # reached the function port directly: variable used outside its body
        for q in flow(lab, p):
            nxt = net.links[(node, q)]
            if nxt not in seen_ports:
                seen_ports.add(nxt)
                queue.append(nxt)
    return False


# -- text format --------------------------------------------------------------


class NetFormatError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


def serialize(net: ProofNet) -> str:
    out = [f"net {net.name}"]
    for n in sorted(net.labels):
        out.append(f"node {n} {net.labels[n]}")
    for b in sorted(net.boxes):
        rec = net.boxes[b]
        aux = ",".join(map(str, rec.aux))
        content = ",".join(map(str, sorted(net.content(b))))
        out.append(f"box {b} principal={rec.principal} aux={aux} content={content}")
    for a, b in sorted(net.edges()):
        out.append(f"edge {a[0]}:{a[1]} {b[0]}:{b[1]}")
    for p in net.premises:
        out.append(f"premise {p}")
    if net.conclusion is not None:
        out.append(f"conclusion {net.conclusion}")
    return "\n".join(out) + "\n"


def _int(tok: str, line: int, col: int, what: str) -> int:
    if not tok.isdigit():
        raise NetFormatError(line, col, f"expected {what}, got {tok!r}")
    return int(tok)


def _port(tok: str, line: int, col: int) -> Port:
    node, sep, port = tok.partition(":")
    if not sep:
        raise NetFormatError(line, col, f"expected <node>:<port>, got {tok!r}")
    return _int(node, line, col, "node id"), _int(port, line, col + len(node) + 1, "port index")


def _id_list(text: str, line: int, col: int) -> list[int]:
    if not text:
        return []
    out, c = [], col
    for tok in text.split(","):
        out.append(_int(tok, line, c, "node id"))
        c += len(tok) + 1
    return out


def deserialize(text: str, check: bool = True) -> ProofNet:
    """Parse the line format produced by :func:`serialize`.

    With ``check`` the result must also pass :func:`validate`; the error then
    points at the line declaring the first offending node.
    """
    net = ProofNet()
    node_line: dict[int, int] = {}
    box_specs: list[tuple[int, int, int, list[int], list[int]]] = []
    edges: list[tuple[int, int, Port, Port]] = []
    premises: list[int] = []
    conclusion: int | None = None
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        toks, cols, pos = [], [], 0
        for tok in line.split():
            pos = line.index(tok, pos)
            toks.append(tok)
            cols.append(pos + 1)
            pos += len(tok)
        kw = toks[0]
        if kw == "net":
            if seen_header:
                raise NetFormatError(lineno, 1, "duplicate net header")
            seen_header = True
            net.name = " ".join(toks[1:]) or "net"
        elif kw == "node":
            if len(toks) != 3:
                raise NetFormatError(lineno, 1, "expected: node <id> <label>")
            n = _int(toks[1], lineno, cols[1], "node id")
            if toks[2] not in LABELS_BY_NAME:
                raise NetFormatError(lineno, cols[2], f"unknown label {toks[2]}")
            if n in net.labels:
                raise NetFormatError(lineno, cols[1], f"duplicate node id {n}")
            net.labels[n] = LABELS_BY_NAME[toks[2]]
            net.next_node = max(net.next_node, n + 1)
            node_line[n] = lineno
        elif kw == "box":
            if len(toks) != 5:
                raise NetFormatError(lineno, 1, "expected: box <id> principal=<n> aux=<list> content=<list>")
            b = _int(toks[1], lineno, cols[1], "box id")
            fields = {}
            for tok, col in zip(toks[2:], cols[2:]):
                key, sep, val = tok.partition("=")
                if not sep or key not in ("principal", "aux", "content"):
                    raise NetFormatError(lineno, col, f"unexpected box field {tok!r}")
                fields[key] = (val, col + len(key) + 1)
            if len(fields) != 3:
                raise NetFormatError(lineno, 1, "box needs principal=, aux= and content=")
            pv, pc = fields["principal"]
            box_specs.append((lineno, b, _int(pv, lineno, pc, "node id"),
                              _id_list(fields["aux"][0], lineno, fields["aux"][1]),
                              _id_list(fields["content"][0], lineno, fields["content"][1])))
        elif kw == "edge":
            if len(toks) != 3:
                raise NetFormatError(lineno, 1, "expected: edge <id>:<port> <id>:<port>")
            edges.append((lineno, cols[1], _port(toks[1], lineno, cols[1]), _port(toks[2], lineno, cols[2])))
        elif kw == "premise":
            if len(toks) != 2:
                raise NetFormatError(lineno, 1, "expected: premise <node>")
            premises.append(_int(toks[1], lineno, cols[1], "node id"))
        elif kw == "conclusion":
            if len(toks) != 2:
                raise NetFormatError(lineno, 1, "expected: conclusion <node>")
            if conclusion is not None:
                raise NetFormatError(lineno, 1, "duplicate conclusion")
            conclusion = _int(toks[1], lineno, cols[1], "node id")
        else:
            raise NetFormatError(lineno, 1, f"unknown keyword {kw!r}")

    for lineno, col, a, b in edges:
        for end in (a, b):
            if end[0] not in net.labels:
                raise NetFormatError(lineno, col, f"edge mentions unknown node {end[0]}")
            if end[1] >= net.labels[end[0]].arity:
                raise NetFormatError(lineno, col, f"node {end[0]} has no port {end[1]}")
            if end in net.links:
                raise NetFormatError(lineno, col, f"port {end[0]}:{end[1]} used twice")
        if a == b:
            raise NetFormatError(lineno, col, "edge joins a port to itself")
        net.links[a] = b
        net.links[b] = a

    contents: dict[int, set[int]] = {}
    for lineno, b, principal, aux, content in box_specs:
        if b in net.boxes:
            raise NetFormatError(lineno, 5, f"duplicate box id {b}")
        for d in [principal, *aux, *content]:
            if d not in net.labels:
                raise NetFormatError(lineno, 1, f"box {b} mentions unknown node {d}")
        net.boxes[b] = Box(principal, list(aux), None)
        net.next_box = max(net.next_box, b + 1)
        for d in [principal, *aux]:
            if d in net.door:
                raise NetFormatError(lineno, 1, f"node {d} is a door of two boxes")
            net.door[d] = b
        contents[b] = set(content)
    box_line = {b: ln for ln, b, *_ in box_specs}
    order = sorted(contents, key=lambda b: len(contents[b]))
    for i, b in enumerate(order):
        for c in order[i + 1:]:
            inter = contents[b] & contents[c]
            if inter and not contents[b] <= contents[c]:
                raise NetFormatError(box_line[c], 1, f"boxes {b} and {c} overlap without nesting")
    for b in order:
        doors = {net.boxes[b].principal, *net.boxes[b].aux}
        if doors & contents[b]:
            raise NetFormatError(box_line[b], 1, f"box {b} contains its own door")
        enclosing = [c for c in order if c != b and doors <= contents[c]]
        net.boxes[b].parent = enclosing[0] if enclosing else None
    for b in net.boxes:
        net.members[b] = set()
        net.subboxes[b] = set()
    for b, rec in net.boxes.items():
        if rec.parent is not None:
            net.subboxes[rec.parent].add(b)
    for n in net.labels:
        holders = [b for b in order if n in contents[b]]
        box = holders[0] if holders else None
        net.parent[n] = box
        if box is not None:
            net.members[box].add(n)
    net.premises = premises
    net.conclusion = conclusion

    if check:
        rep = validate(net)
        if not rep.ok:
            v = rep.violations[0]
            line = min((node_line[n] for n in v.nodes if n in node_line), default=1)
            raise NetFormatError(line, 1, str(v))
    return net


# -- isomorphism ----------------------------------------------------------------


def _propagate(a: ProofNet, b: ProofNet, mapping: dict[int, int], used: set[int],
               seeds: list[tuple[int, int]]) -> str | None:
    """Extend ``mapping`` along edges from ``seeds``; return a mismatch description or None."""
    queue = deque(seeds)
    for u, v in seeds:
        if mapping.get(u, v) != v or (u not in mapping and v in used):
            return f"node {u} cannot map to {v}"
        mapping[u] = v
        used.add(v)
    while queue:
        u, v = queue.popleft()
        if a.labels[u] is not b.labels[v]:
            return f"node {u} ({a.labels[u]}) vs node {v} ({b.labels[v]})"
        for p in range(a.labels[u].arity):
            x = a.links.get((u, p))
            y = b.links.get((v, p))
            if (x is None) != (y is None):
                return f"port {u}:{p} vs {v}:{p}: one side is dangling"
            if x is None:
                continue
            if x[1] != y[1]:
                return f"port {u}:{p} reaches port {x[1]} but {v}:{p} reaches port {y[1]}"
            if x[0] in mapping:
                if mapping[x[0]] != y[0]:
                    return f"node {x[0]} already mapped to {mapping[x[0]]}, not {y[0]}"
                continue
            if y[0] in used:
                return f"node {y[0]} is already the image of another node"
            mapping[x[0]] = y[0]
            used.add(y[0])
            queue.append((x[0], y[0]))
    return None


def _boxes_agree(a: ProofNet, b: ProofNet, mapping: dict[int, int]) -> str | None:
    box_map: dict[int, int] = {}
    for bid, rec in a.boxes.items():
        img = mapping[rec.principal]
        other = b.door.get(img)
        if other is None or b.boxes[other].principal != img:
            return f"principal door {rec.principal} maps to a non-principal node"
        if sorted(mapping[x] for x in rec.aux) != sorted(b.boxes[other].aux):
            return f"auxiliary doors of box {bid} do not correspond"
        box_map[bid] = other
    for n, box in a.parent.items():
        want = None if box is None else box_map[box]
        if b.parent[mapping[n]] != want:
            return f"node {n} sits in a different box than its image {mapping[n]}"
    return None


def find_isomorphism(a: ProofNet, b: ProofNet) -> tuple[dict[int, int] | None, str]:
    """Label/port/box/interface preserving bijection, or None with a reason."""
    if len(a) != len(b):
        return None, f"node counts differ ({len(a)} vs {len(b)})"
    if len(a.boxes) != len(b.boxes):
        return None, f"box counts differ ({len(a.boxes)} vs {len(b.boxes)})"
    if len(a.premises) != len(b.premises):
        return None, "premise counts differ"
    count_a: dict[Label, int] = {}
    count_b: dict[Label, int] = {}
    for lab in a.labels.values():
        count_a[lab] = count_a.get(lab, 0) + 1
    for lab in b.labels.values():
        count_b[lab] = count_b.get(lab, 0) + 1
    if count_a != count_b:
        diff = sorted(str(k) for k in set(count_a) | set(count_b) if count_a.get(k) != count_b.get(k))
        return None, "label counts differ for " + ",".join(diff)
    seeds = list(zip(a.premises, b.premises))
    if (a.conclusion is None) != (b.conclusion is None):
        return None, "only one net has a conclusion"
    if a.conclusion is not None:
        seeds.append((a.conclusion, b.conclusion))
    mapping: dict[int, int] = {}
    used: set[int] = set()
    why = _propagate(a, b, mapping, used, seeds)
    if why:
        return None, why
    result = _search(a, b, mapping, used)
    if result is None:
        return None, "no bijection extends the interface correspondence"
    why = _boxes_agree(a, b, result)
    if why:
        # port-preserving maps of connected parts are unique, so a box clash
        # is final unless free components allowed other choices
        alt = _search(a, b, mapping, used, reject=lambda m: _boxes_agree(a, b, m) is not None)
        if alt is None:
            return None, why
        result = alt
    return result, ""


def _search(a, b, mapping, used, reject=None):
    rest = sorted(n for n in a.labels if n not in mapping)
    if not rest:
        if reject is not None and reject(mapping):
            return None
        return dict(mapping)
    u = rest[0]
    for v in sorted(n for n in b.labels if n not in used and b.labels[n] is a.labels[u]):
        m2, used2 = dict(mapping), set(used)
        if _propagate(a, b, m2, used2, [(u, v)]) is None:
            got = _search(a, b, m2, used2, reject)
            if got is not None:
                return got
    return None


def isomorphic(a: ProofNet, b: ProofNet) -> bool:
    return find_isomorphism(a, b)[0] is not None


def renumber(net: ProofNet, mapping: dict[int, int] | None = None, start: int = 0) -> ProofNet:
    """Copy of ``net`` with node ids replaced (default: compacted in sorted order)."""
    if mapping is None:
        mapping = {n: start + i for i, n in enumerate(sorted(net.labels))}
    out = ProofNet(net.name)
    box_map = {b: i for i, b in enumerate(sorted(net.boxes))}
    for b in sorted(net.boxes, key=net.depth_of_box):
        rec = net.boxes[b]
        out.new_box(None if rec.parent is None else box_map[rec.parent], box_map[b])
    for n in sorted(net.labels, key=lambda n: mapping[n]):
        lab = net.labels[n]
        box = net.parent[n]
        new = out.add_node(lab, None if box is None else box_map[box], mapping[n])
        if n in net.door:
            out.door[new] = box_map[net.door[n]]
    for b, rec in net.boxes.items():
        nb = out.boxes[box_map[b]]
        nb.principal = mapping[rec.principal]
        nb.aux = [mapping[x] for x in rec.aux]
    for (x, p), (y, q) in net.edges():
        out.link((mapping[x], p), (mapping[y], q))
    out.premises = [mapping[p] for p in net.premises]
    out.conclusion = None if net.conclusion is None else mapping[net.conclusion]
    return out
