"""DOT renderings of graphs and tracking forests.

Graphs follow the usual visual convention: nodes are circles, edges are
boxes (doubled border when replaceable), and the tentacle leading to an
edge's first node carries an arrowhead while the remaining tentacles are
plain lines labelled with their position.
"""
from __future__ import annotations

from typing import Collection

from .graphs import Graph
from .tracking import TrackedSystem


def _quote(s: str) -> str:
    return '"' + s.replace('"', r'\"') + '"'


def graph_dot(g: Graph, highlight: Collection[int] = (), marked: Collection[int] = ()) -> str:
    highlight = set(highlight)
    marked = set(marked)
    lines = ["graph design {", "  layout=neato;", "  overlap=false;"]
    for n in g.node_ids:
        lines.append(f"  n{n} [shape=circle, label={_quote(g.node_name(n))}];")
    for e in g.edge_ids:
        style = []
        if e in highlight:
            style.append("color=red")
        elif e in marked:
            style.append("color=orange")
        peripheries = 2 if g.theta(e) == 1 else 1
        label = f"{g.edge_name(e)}:{g.edge_type(e)}"
        attrs = ", ".join([f"shape=box, peripheries={peripheries}, label={_quote(label)}"] + style)
        lines.append(f"  e{e} [{attrs}];")
        for k, n in enumerate(g.attachment(e), start=1):
            if k == 1:
                lines.append(f"  e{e} -- n{n} [dir=forward, arrowhead=normal];")
            else:
                lines.append(f"  e{e} -- n{n} [label=\"{k}\"];")
    lines.append("}")
    return "\n".join(lines)


def forest_dot(s: TrackedSystem) -> str:
    lines = ["graph forest {", "  rankdir=TB;"]
    for v in s.forest.vertices():
        shape = "plaintext" if s.is_tombstone(v) else "box"
        lines.append(f"  v{v} [shape={shape}, label={_quote(s.vertex_label(v))}];")
    for v in s.forest.vertices():
        for c in s.forest.children(v):
            lines.append(f"  v{v} -- v{c};")
    lines.append("}")
    return "\n".join(lines)
