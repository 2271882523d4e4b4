"""Graphviz export: one cluster per box, nested like the boxes."""

from __future__ import annotations

from .net import ProofNet


def _node_line(net: ProofNet, n: int, indent: str) -> str:
    return f'{indent}n{n} [label="{net.labels[n]} {n}"];'


def to_dot(net: ProofNet) -> str:
    """Deterministic DOT text; doors are drawn inside the cluster of their box.

    Edge ends sitting on a principal port carry a ``*`` after the port index.
    """
    out = [f'graph "{net.name}" {{', "  node [shape=box, fontname=monospace];"]
    children: dict[int | None, list[int]] = {}
    for b in sorted(net.boxes):
        children.setdefault(net.boxes[b].parent, []).append(b)
    placed: dict[int | None, list[int]] = {}
    for n in sorted(net.labels):
        home = net.door[n] if n in net.door else net.parent[n]
        placed.setdefault(home, []).append(n)

    def emit(box: int | None, depth: int) -> None:
        indent = "  " * depth
        for n in placed.get(box, []):
            out.append(_node_line(net, n, indent))
        for sub in children.get(box, []):
            out.append(f"{indent}subgraph cluster_box{sub} {{")
            out.append(f'{indent}  label="box {sub}";')
            emit(sub, depth + 1)
            out.append(f"{indent}}}")

    emit(None, 1)
    for (a, p), (b, q) in sorted(net.edges()):
        tail = f"{p}*" if net.is_principal((a, p)) else str(p)
        head = f"{q}*" if net.is_principal((b, q)) else str(q)
        out.append(f'  n{a} -- n{b} [taillabel="{tail}", headlabel="{head}"];')
    out.append("}")
    return "\n".join(out) + "\n"
