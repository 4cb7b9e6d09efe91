"""Typed hypergraphs, replaceability marks, morphisms and isomorphism search.

A hypergraph is a finite set of nodes plus an ordered list of hyperedges;
every edge is attached to an ordered list of nodes through its tentacles.
Graphs here are always meant to be typed over a :class:`TypeGraph`, which
fixes the vocabulary: node kinds, edge kinds and the tentacle signature
(ordered node kinds) of every edge kind.  Each edge additionally carries a
replaceability bit ``theta``; only replaceable edges may be rewritten by
productions.

Graphs are immutable values: every update method returns a new snapshot, so
snapshots can be shared freely across threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Iterator, Mapping, Optional

from .ids import Allocator, session


class GraphError(Exception):
    """Malformed graph construction or use."""


class MorphismDomainError(GraphError):
    """A morphism's maps do not cover the source graph."""


NodeId = int
EdgeId = int


@dataclass(frozen=True)
class NodeInfo:
    tau: str
    name: str | None = None


@dataclass(frozen=True)
class EdgeInfo:
    tau: str
    nodes: tuple[NodeId, ...]
    theta: int = 1
    name: str | None = None


class TypeGraph:
    """The architectural vocabulary: node kinds and edge signatures."""

    def __init__(self, node_types: Iterable[str], edge_types: Mapping[str, Iterable[str]]):
        self.node_types: tuple[str, ...] = tuple(dict.fromkeys(node_types))
        if len(set(self.node_types)) != len(self.node_types):
            raise GraphError("duplicate node type label")
        sigs: dict[str, tuple[str, ...]] = {}
        for label, sig in edge_types.items():
            sig = tuple(sig)
            if label in sigs:
                raise GraphError(f"duplicate edge type label {label!r}")
            for nt in sig:
                if nt not in self.node_types:
                    raise GraphError(f"edge type {label!r} uses undeclared node type {nt!r}")
            sigs[label] = sig
        self.edge_types: dict[str, tuple[str, ...]] = sigs

    def arity(self, edge_type: str) -> int:
        return len(self.edge_types[edge_type])

    def signature(self, edge_type: str) -> tuple[str, ...]:
        return self.edge_types[edge_type]

    def __contains__(self, edge_type: str) -> bool:
        return edge_type in self.edge_types

    def as_graph(self) -> tuple["Graph", dict[str, NodeId], dict[str, EdgeId]]:
        """Render the vocabulary itself as a graph (one node per node type,
        one edge per edge type), together with label->id lookup tables."""
        b = GraphBuilder()
        node_of = {nt: b.add_node(nt, name=nt) for nt in self.node_types}
        edge_of = {
            et: b.add_edge(et, [node_of[nt] for nt in sig], theta=0, name=et)
            for et, sig in self.edge_types.items()
        }
        return b.graph(), node_of, edge_of

    def __repr__(self) -> str:
        return f"TypeGraph(nodes={list(self.node_types)}, edges={self.edge_types})"


class Graph:
    """Immutable typed hypergraph snapshot.

    The constructor is deliberately permissive: it stores whatever structure
    it is given so that defective graphs can be represented and then
    *reported on* by :func:`validate_graph`.  Operations elsewhere assume
    their inputs validate cleanly.
    """

    __slots__ = ("_nodes", "_edges")

    def __init__(self, nodes: Mapping[NodeId, NodeInfo], edges: Mapping[EdgeId, EdgeInfo]):
        self._nodes: dict[NodeId, NodeInfo] = dict(nodes)
        self._edges: dict[EdgeId, EdgeInfo] = dict(edges)

    # -- access ---------------------------------------------------------

    @property
    def node_ids(self) -> tuple[NodeId, ...]:
        return tuple(self._nodes)

    @property
    def edge_ids(self) -> tuple[EdgeId, ...]:
        """Edge ids in their stable (insertion) order."""
        return tuple(self._edges)

    def has_node(self, n: NodeId) -> bool:
        return n in self._nodes

    def has_edge(self, e: EdgeId) -> bool:
        return e in self._edges

    def node(self, n: NodeId) -> NodeInfo:
        return self._nodes[n]

    def edge(self, e: EdgeId) -> EdgeInfo:
        return self._edges[e]

    def node_type(self, n: NodeId) -> str:
        return self._nodes[n].tau

    def edge_type(self, e: EdgeId) -> str:
        return self._edges[e].tau

    def attachment(self, e: EdgeId) -> tuple[NodeId, ...]:
        """The ordered nodes the edge's tentacles touch."""
        return self._edges[e].nodes

    def theta(self, e: EdgeId) -> int:
        return self._edges[e].theta

    def node_name(self, n: NodeId) -> str:
        info = self._nodes[n]
        return info.name if info.name else f"n{n}"

    def edge_name(self, e: EdgeId) -> str:
        info = self._edges[e]
        return info.name if info.name else f"e{e}"

    def edges_of_type(self, tau: str) -> tuple[EdgeId, ...]:
        return tuple(e for e, info in self._edges.items() if info.tau == tau)

    def incident_edges(self, n: NodeId) -> tuple[EdgeId, ...]:
        return tuple(e for e, info in self._edges.items() if n in info.nodes)

    def __iter__(self) -> Iterator[EdgeId]:
        return iter(self._edges)

    def __len__(self) -> int:
        return len(self._edges)

    # -- functional updates ----------------------------------------------

    def add_node(self, n: NodeId, info: NodeInfo) -> "Graph":
        if n in self._nodes:
            raise GraphError(f"node id {n} already present")
        nodes = dict(self._nodes)
        nodes[n] = info
        return Graph(nodes, self._edges)

    def add_edge(self, e: EdgeId, info: EdgeInfo) -> "Graph":
        """Append an edge; edge order is insertion order and is preserved."""
        if e in self._edges:
            raise GraphError(f"edge id {e} already present")
        edges = dict(self._edges)
        edges[e] = info
        return Graph(self._nodes, edges)

    def without_edges(self, remove: Iterable[EdgeId]) -> "Graph":
        remove = set(remove)
        return Graph(self._nodes, {e: i for e, i in self._edges.items() if e not in remove})

    def without_nodes(self, remove: Iterable[NodeId]) -> "Graph":
        remove = set(remove)
        for e, info in self._edges.items():
            if any(n in remove for n in info.nodes):
                raise GraphError(f"cannot drop node still attached to edge {e}")
        return Graph({n: i for n, i in self._nodes.items() if n not in remove}, self._edges)

    def with_theta(self, e: EdgeId, theta: int) -> "Graph":
        edges = dict(self._edges)
        info = edges[e]
        edges[e] = EdgeInfo(info.tau, info.nodes, theta, info.name)
        return Graph(self._nodes, edges)

    def rename_nodes(self, mapping: Mapping[NodeId, NodeId]) -> "Graph":
        """Substitute node ids throughout; distinct sources may merge."""
        nodes: dict[NodeId, NodeInfo] = {}
        for n, info in self._nodes.items():
            m = mapping.get(n, n)
            if m in nodes and nodes[m].tau != info.tau:
                raise GraphError(f"node merge of {n}->{m} clashes on type")
            nodes.setdefault(m, info)
        edges = {
            e: EdgeInfo(i.tau, tuple(mapping.get(n, n) for n in i.nodes), i.theta, i.name)
            for e, i in self._edges.items()
        }
        return Graph(nodes, edges)

    def restricted_to_edges(self, keep: Iterable[EdgeId]) -> "Graph":
        """Sub-graph induced by the given edges (their nodes only)."""
        keep = set(keep)
        edges = {e: i for e, i in self._edges.items() if e in keep}
        used = {n for i in edges.values() for n in i.nodes}
        return Graph({n: i for n, i in self._nodes.items() if n in used}, edges)

    # -- comparison -------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._nodes == other._nodes
            and tuple(self._edges.items()) == tuple(other._edges.items())
        )

    def __hash__(self):  # pragma: no cover - identity-level usage only
        raise TypeError("graphs are not hashable; compare with == or isomorphism")

    def __repr__(self) -> str:
        es = ", ".join(
            f"{self.edge_name(e)}:{i.tau}({','.join(self.node_name(n) for n in i.nodes)})"
            for e, i in self._edges.items()
        )
        return f"Graph[{es or 'empty'}]"


class GraphBuilder:
    """Convenience builder allocating fresh ids from a shared source."""

    def __init__(self, alloc: Allocator | None = None):
        self._alloc = alloc if alloc is not None else session
        self._nodes: dict[NodeId, NodeInfo] = {}
        self._edges: dict[EdgeId, EdgeInfo] = {}

    def add_node(self, tau: str, name: str | None = None) -> NodeId:
        n = self._alloc.ids.fresh()
        self._alloc.names.observe(name)
        self._nodes[n] = NodeInfo(tau, name)
        return n

    def add_edge(self, tau: str, nodes: Iterable[NodeId], theta: int = 1,
                 name: str | None = None) -> EdgeId:
        e = self._alloc.ids.fresh()
        self._alloc.names.observe(name)
        self._edges[e] = EdgeInfo(tau, tuple(nodes), theta, name)
        return e

    def graph(self) -> Graph:
        return Graph(self._nodes, self._edges)


# -- validation -----------------------------------------------------------


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __repr__(self) -> str:
        return "ok" if self.ok else "violations:\n  " + "\n  ".join(self.violations)


def validate_graph(g: Graph, tg: TypeGraph) -> ValidationReport:
    """Report every way ``g`` fails to be a well-typed graph over ``tg``.

    The per-edge conditions (declared type, tentacle count equal to the
    type's arity, attached node types matching the signature) are exactly
    the requirements for the typing map to be a morphism into the
    vocabulary graph.
    """
    report = ValidationReport()
    for n in g.node_ids:
        if g.node_type(n) not in tg.node_types:
            report.violations.append(f"node {g.node_name(n)}: undeclared node type {g.node_type(n)!r}")
    for e in g.edge_ids:
        info = g.edge(e)
        label = g.edge_name(e)
        if info.tau not in tg.edge_types:
            report.violations.append(f"edge {label}: undeclared edge type {info.tau!r}")
            continue
        if info.theta not in (0, 1):
            report.violations.append(f"edge {label}: replaceability mark must be 0 or 1, got {info.theta!r}")
        sig = tg.signature(info.tau)
        if len(info.nodes) != len(sig):
            report.violations.append(
                f"edge {label}: {len(info.nodes)} tentacles but type {info.tau} has arity {len(sig)}")
            continue
        for k, (n, want) in enumerate(zip(info.nodes, sig), start=1):
            if not g.has_node(n):
                report.violations.append(f"edge {label}: tentacle {k} dangles (node {n} not in graph)")
            elif g.node_type(n) != want:
                report.violations.append(
                    f"edge {label}: tentacle {k} touches a {g.node_type(n)!r} node, signature wants {want!r}")
    return report


# -- morphisms --------------------------------------------------------------


@dataclass(frozen=True)
class GraphMorphism:
    """A pair of node/edge maps between two graphs."""

    node_map: Mapping[NodeId, NodeId]
    edge_map: Mapping[EdgeId, EdgeId]

    def then(self, other: "GraphMorphism") -> "GraphMorphism":
        return GraphMorphism(
            {n: other.node_map[m] for n, m in self.node_map.items()},
            {e: other.edge_map[f] for e, f in self.edge_map.items()},
        )

    def inverse(self) -> "GraphMorphism":
        nm = {v: k for k, v in self.node_map.items()}
        em = {v: k for k, v in self.edge_map.items()}
        if len(nm) != len(self.node_map) or len(em) != len(self.edge_map):
            raise GraphError("morphism is not injective; no inverse")
        return GraphMorphism(nm, em)

    @staticmethod
    def identity(g: Graph) -> "GraphMorphism":
        return GraphMorphism({n: n for n in g.node_ids}, {e: e for e in g.edge_ids})


def check_morphism(f: GraphMorphism, g: Graph, h: Graph) -> bool:
    """True iff ``f`` preserves tentacles and typing from ``g`` into ``h``.

    Replaceability marks are deliberately not compared.  Maps that are not
    total on ``g`` raise :class:`MorphismDomainError` rather than returning
    False: an undefined map is a different defect from a wrong one.
    """
    for n in g.node_ids:
        if n not in f.node_map:
            raise MorphismDomainError(f"node map undefined on node {n}")
    for e in g.edge_ids:
        if e not in f.edge_map:
            raise MorphismDomainError(f"edge map undefined on edge {e}")
    for n in g.node_ids:
        m = f.node_map[n]
        if not h.has_node(m) or h.node_type(m) != g.node_type(n):
            return False
    for e in g.edge_ids:
        img = f.edge_map[e]
        if not h.has_edge(img):
            return False
        if h.edge_type(img) != g.edge_type(e):
            return False
        if tuple(f.node_map[n] for n in g.attachment(e)) != h.attachment(img):
            return False
    return True


def find_isomorphism(g: Graph, h: Graph, respect_theta: bool = True) -> Optional[GraphMorphism]:
    """Backtracking search for a type-preserving bijection between graphs.

    Returns a morphism whose inverse is again a morphism, additionally
    matching replaceability marks when ``respect_theta`` is set; ``None``
    when the graphs are not isomorphic.  Intended for desk-scale graphs.
    """
    if len(g) != len(h) or len(g.node_ids) != len(h.node_ids):
        return None

    def edge_key(gr: Graph, e: EdgeId):
        info = gr.edge(e)
        return (info.tau, info.theta if respect_theta else None, len(info.nodes))

    from collections import Counter

    if Counter(edge_key(g, e) for e in g.edge_ids) != Counter(edge_key(h, e) for e in h.edge_ids):
        return None
    if Counter(g.node_type(n) for n in g.node_ids) != Counter(h.node_type(n) for n in h.node_ids):
        return None

    g_edges = sorted(g.edge_ids, key=lambda e: (edge_key(g, e), e))
    candidates = {k: [e for e in h.edge_ids if edge_key(h, e) == k]
                  for k in {edge_key(g, e) for e in g_edges}}

    node_map: dict[NodeId, NodeId] = {}
    node_used: set[NodeId] = set()
    edge_map: dict[EdgeId, EdgeId] = {}
    edge_used: set[EdgeId] = set()

    def try_nodes(pairs: list[tuple[NodeId, NodeId]]) -> list[tuple[NodeId, NodeId]] | None:
        added: list[tuple[NodeId, NodeId]] = []
        for a, b in pairs:
            if a in node_map:
                if node_map[a] != b:
                    for x, _ in added:
                        node_used.discard(node_map.pop(x))
                    return None
            elif b in node_used or g.node_type(a) != h.node_type(b):
                for x, _ in added:
                    node_used.discard(node_map.pop(x))
                return None
            else:
                node_map[a] = b
                node_used.add(b)
                added.append((a, b))
        return added

    def assign(i: int) -> bool:
        if i == len(g_edges):
            return True
        e = g_edges[i]
        for f in candidates[edge_key(g, e)]:
            if f in edge_used:
                continue
            added = try_nodes(list(zip(g.attachment(e), h.attachment(f))))
            if added is None:
                continue
            edge_map[e] = f
            edge_used.add(f)
            if assign(i + 1):
                return True
            edge_used.discard(f)
            del edge_map[e]
            for x, _ in added:
                node_used.discard(node_map.pop(x))
        return False

    if not assign(0):
        return None

    # Pair up nodes not touched by any edge, type by type.
    rest_g = [n for n in g.node_ids if n not in node_map]
    rest_h = [n for n in h.node_ids if n not in node_used]
    by_type: dict[str, list[NodeId]] = {}
    for n in rest_h:
        by_type.setdefault(h.node_type(n), []).append(n)
    for n in rest_g:
        pool = by_type.get(g.node_type(n))
        if not pool:
            return None
        node_map[n] = pool.pop()
    return GraphMorphism(node_map, edge_map)


def isomorphic(g: Graph, h: Graph, respect_theta: bool = True) -> bool:
    return find_isomorphism(g, h, respect_theta) is not None


def canonical_key(g: Graph, respect_theta: bool = True) -> tuple:
    """A renaming-invariant key for small graphs (used to deduplicate
    enumerated models).  Minimises the edge table over all type-preserving
    node relabellings; exponential, fine below ~7 nodes."""
    nodes = list(g.node_ids)
    best: tuple | None = None
    by_type: dict[str, list[NodeId]] = {}
    for n in nodes:
        by_type.setdefault(g.node_type(n), []).append(n)
    groups = sorted(by_type.items())
    perms_per_group = [list(permutations(ns)) for _, ns in groups]

    def tables(idx: int, current: dict[NodeId, int], offset: int):
        if idx == len(groups):
            yield dict(current)
            return
        for perm in perms_per_group[idx]:
            nxt = dict(current)
            for k, n in enumerate(perm):
                nxt[n] = offset + k
            yield from tables(idx + 1, nxt, offset + len(perm))

    node_type_sig = tuple(sorted((t, len(ns)) for t, ns in groups))
    for relab in tables(0, {}, 0):
        table = tuple(sorted(
            (g.edge_type(e), g.theta(e) if respect_theta else 0,
             tuple(relab[n] for n in g.attachment(e)))
            for e in g.edge_ids))
        if best is None or table < best:
            best = table
    return (node_type_sig, best)
