"""Evolution tracking: a forest of decorated derivation trees kept in
lockstep with the graph.

Every edge of the initial graph owns one tree.  Applying a production to an
edge turns the leaf recording that edge into an internal vertex (it keeps
the historical edge record and gains the production's name) and adds one
fresh leaf per created edge, in the production's fixed right-side order.  A
production with an empty right side leaves a single *tombstone* child so
the consumed edge still has a witness; tombstones never count as current
edges.

The core invariant, re-checked after every operation: the leaves carrying
an edge record are in bijection with the edges of the current graph, and
each record names exactly the edge's current attachment.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Optional

from .graphs import EdgeId, EdgeInfo, Graph, TypeGraph, validate_graph
from .ids import Allocator
from .productions import Match, Production, apply_production

VertexId = int


class ForestIntegrityError(Exception):
    """The forest and the graph disagree; the system is corrupt."""


@dataclass(frozen=True)
class EdgeRecord:
    """Historical snapshot of an edge: id, attachment, type and the display
    names current when it was recorded.  ``synthetic`` marks records
    invented during reconfiguration surgery for bookkeeping vertices that
    never existed as real edges."""

    edge: EdgeId
    nodes: tuple[int, ...]
    tau: str
    edge_name: str
    node_names: tuple[str, ...]
    synthetic: bool = False

    @staticmethod
    def of(g: Graph, e: EdgeId) -> "EdgeRecord":
        return EdgeRecord(e, g.attachment(e), g.edge_type(e), g.edge_name(e),
                          tuple(g.node_name(n) for n in g.attachment(e)))

    def label(self) -> str:
        inner = ",".join(self.node_names)
        star = "*" if self.synthetic else ""
        return f"{self.edge_name}({inner}){star}"


class Forest:
    """Rooted ordered trees over vertex ids; immutable."""

    def __init__(self, roots: tuple[VertexId, ...], children: Mapping[VertexId, tuple[VertexId, ...]]):
        self.roots = tuple(roots)
        self._children: dict[VertexId, tuple[VertexId, ...]] = dict(children)
        for r in self.roots:
            self._children.setdefault(r, ())
        for cs in list(self._children.values()):
            for c in cs:
                self._children.setdefault(c, ())
        self._parent: dict[VertexId, Optional[VertexId]] = {r: None for r in self.roots}
        for v, cs in self._children.items():
            for c in cs:
                self._parent[c] = v

    def has_vertex(self, v: VertexId) -> bool:
        return v in self._children

    def children(self, v: VertexId) -> tuple[VertexId, ...]:
        return self._children[v]

    def parent(self, v: VertexId) -> Optional[VertexId]:
        return self._parent[v]

    def is_leaf(self, v: VertexId) -> bool:
        return not self._children[v]

    def vertices(self) -> Iterator[VertexId]:
        """Preorder, trees in root order."""
        for r in self.roots:
            yield from self.subtree(r)

    def subtree(self, v: VertexId) -> Iterator[VertexId]:
        yield v
        for c in self._children[v]:
            yield from self.subtree(c)

    def leaves_under(self, v: VertexId) -> list[VertexId]:
        return [u for u in self.subtree(v) if self.is_leaf(u)]

    def root_of(self, v: VertexId) -> VertexId:
        while self._parent[v] is not None:
            v = self._parent[v]
        return v

    def with_children_added(self, v: VertexId, new: tuple[VertexId, ...]) -> "Forest":
        if any(self.has_vertex(c) for c in new):
            raise ForestIntegrityError("child vertex ids must be fresh")
        children = dict(self._children)
        children[v] = children[v] + tuple(new)
        for c in new:
            children[c] = ()
        return Forest(self.roots, children)

    def with_children_removed(self, v: VertexId) -> "Forest":
        removed = set()
        for c in self._children[v]:
            removed.update(self.subtree(c))
        children = {u: cs for u, cs in self._children.items() if u not in removed}
        children[v] = ()
        return Forest(self.roots, children)

    def with_subtree_replaced(self, at: VertexId, new_root: VertexId,
                              new_children: Mapping[VertexId, tuple[VertexId, ...]],
                              reused: set[VertexId]) -> "Forest":
        """Swap the subtree rooted at ``at`` for a freshly built one.

        ``new_children`` describes the fresh structure; it may reference
        roots of ``reused`` subtrees, which are kept wholesale.  The new
        root takes the old one's position (same parent, same slot).
        """
        doomed = set()

        def collect(v: VertexId):
            if v in reused:
                return
            doomed.add(v)
            for c in self._children[v]:
                collect(c)

        collect(at)
        children = {u: cs for u, cs in self._children.items() if u not in doomed}
        for v, cs in new_children.items():
            if v in children:
                raise ForestIntegrityError(f"replacement vertex {v} already in forest")
            children[v] = tuple(cs)
        parent = self._parent[at]
        if parent is None:
            roots = tuple(new_root if r == at else r for r in self.roots)
        else:
            roots = self.roots
            children[parent] = tuple(new_root if c == at else c for c in children[parent])
        return Forest(roots, children)


@dataclass(frozen=True)
class ProductionEvent:
    production: str
    edge: EdgeId


@dataclass(frozen=True)
class ReconfigEvent:
    rule: str
    root: VertexId
    new_root: VertexId


@dataclass(frozen=True)
class ParseEvent:
    parent: VertexId
    new_edge: EdgeId


Event = ProductionEvent | ReconfigEvent | ParseEvent


class TrackedSystem:
    """A graph plus its tracking forest, environment and event log.

    Instances are immutable snapshots; operations return new systems.  The
    allocator is cloned per operation, so an old snapshot replays into
    exactly the same ids.
    """

    def __init__(self, graph: Graph, forest: Forest,
                 env1: Mapping[VertexId, EdgeRecord], env2: Mapping[VertexId, str],
                 log: tuple[Event, ...], alloc: Allocator,
                 initial: Graph | None = None):
        self.graph = graph
        self.forest = forest
        self.env1: dict[VertexId, EdgeRecord] = dict(env1)
        self.env2: dict[VertexId, str] = dict(env2)
        self.log = log
        self.alloc = alloc
        self.initial = initial if initial is not None else graph

    # -- queries ---------------------------------------------------------

    def record(self, v: VertexId) -> Optional[EdgeRecord]:
        return self.env1.get(v)

    def production_at(self, v: VertexId) -> Optional[str]:
        return self.env2.get(v)

    def is_tombstone(self, v: VertexId) -> bool:
        return (self.forest.is_leaf(v) and v not in self.env1 and v not in self.env2)

    def sort_of(self, v: VertexId) -> Optional[str]:
        rec = self.env1.get(v)
        return rec.tau if rec else None

    def current_leaves(self) -> list[VertexId]:
        return [v for v in self.forest.vertices()
                if self.forest.is_leaf(v) and v in self.env1]

    def leaf_of_edge(self, e: EdgeId) -> VertexId:
        for v, rec in self.env1.items():
            if rec.edge == e and self.forest.is_leaf(v):
                return v
        raise ForestIntegrityError(f"no leaf records edge {e}")

    def vertex_label(self, v: VertexId) -> str:
        rec = self.env1.get(v)
        head = rec.label() if rec else "^"
        prod = self.env2.get(v, "^")
        return f"[{head}, {prod}]"

    def check_integrity(self) -> None:
        if len(self.forest.roots) != len(self.initial.edge_ids):
            raise ForestIntegrityError(
                f"{len(self.forest.roots)} trees for {len(self.initial.edge_ids)} initial edges")
        for v in self.forest.vertices():
            internal = not self.forest.is_leaf(v)
            if internal and v not in self.env2:
                raise ForestIntegrityError(f"internal vertex {v} lacks a production")
            if not internal and v in self.env2:
                raise ForestIntegrityError(f"leaf {v} carries a production")
        edges_seen = [rec.edge for rec in self.env1.values()]
        if len(set(edges_seen)) != len(edges_seen):
            raise ForestIntegrityError("edge records are not injective")
        current_graph(self)


# -- operations ---------------------------------------------------------------


def init_tracking(g0: Graph, type_graph: TypeGraph | None = None,
                  alloc: Allocator | None = None) -> TrackedSystem:
    """One single-vertex tree per initial edge, in the graph's edge order."""
    if type_graph is not None:
        report = validate_graph(g0, type_graph)
        if not report.ok:
            raise ValueError(f"initial graph is not well typed: {report!r}")
    if alloc is None:
        alloc = Allocator()
        for used in (*g0.node_ids, *g0.edge_ids):
            alloc.ids.observe(used)
        for n in g0.node_ids:
            alloc.names.observe(g0.node(n).name)
        for e in g0.edge_ids:
            alloc.names.observe(g0.edge(e).name)
    alloc = alloc.clone()
    roots, env1 = [], {}
    for e in g0.edge_ids:
        v = alloc.ids.fresh()
        roots.append(v)
        env1[v] = EdgeRecord.of(g0, e)
    return TrackedSystem(g0, Forest(tuple(roots), {}), env1, {}, (), alloc)


def record_production(s: TrackedSystem, p: Production, m: Match) -> TrackedSystem:
    """Apply the production and record it at the leaf owning the matched
    edge: the leaf keeps its historical record, gains the production name,
    and one fresh child per created edge (in right-side order)."""
    leaf = s.leaf_of_edge(m.edge)
    alloc = s.alloc.clone()
    g2, copy = apply_production(s.graph, p, m, alloc)

    env1 = dict(s.env1)
    env2 = dict(s.env2)
    env2[leaf] = p.name
    new_vertices = []
    if p.rhs_order:
        for re in p.rhs_order:
            v = alloc.ids.fresh()
            new_vertices.append(v)
            env1[v] = EdgeRecord.of(g2, copy.edge_map[re])
    else:
        new_vertices.append(alloc.ids.fresh())  # tombstone
    forest = s.forest.with_children_added(leaf, tuple(new_vertices))
    out = TrackedSystem(g2, forest, env1, env2,
                        s.log + (ProductionEvent(p.name, m.edge),), alloc, s.initial)
    out.check_integrity()
    return out


def current_graph(s: TrackedSystem) -> Graph:
    """Rebuild the graph from the forest's current leaves and verify it
    coincides with the stored snapshot (self-check of the core invariant)."""
    records = {s.env1[v].edge: s.env1[v] for v in s.current_leaves()}
    if set(records) != set(s.graph.edge_ids):
        missing = set(s.graph.edge_ids) - set(records)
        extra = set(records) - set(s.graph.edge_ids)
        raise ForestIntegrityError(
            f"leaf/edge bijection broken (missing={sorted(missing)}, stale={sorted(extra)})")
    edges = {}
    for e in s.graph.edge_ids:
        rec = records[e]
        if rec.nodes != s.graph.attachment(e) or rec.tau != s.graph.edge_type(e):
            raise ForestIntegrityError(f"record for edge {e} disagrees with the graph")
        edges[e] = EdgeInfo(rec.tau, rec.nodes, s.graph.theta(e), s.graph.edge(e).name)
    rebuilt = Graph({n: s.graph.node(n) for n in s.graph.node_ids}, edges)
    if rebuilt != s.graph:
        raise ForestIntegrityError("rebuilt graph differs from the stored snapshot")
    return rebuilt


def render_forest(s: TrackedSystem) -> str:
    """Indented text rendering, one vertex per line: ``[f1(u3,u2), ^]``."""
    lines: list[str] = []

    def walk(v: VertexId, depth: int):
        lines.append("  " * depth + s.vertex_label(v))
        for c in s.forest.children(v):
            walk(c, depth + 1)

    for r in s.forest.roots:
        walk(r, 0)
    return "\n".join(lines)
