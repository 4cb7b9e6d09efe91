"""Design productions: single-edge left-hand sides rewritten to fresh copies
of a right-hand side, glued over interface nodes.

A production ``p = <L, R, i>`` replaces one *replaceable* edge whose type
matches L's edge with a disjoint fresh copy of R; the interface map ``i``
says which R-nodes are identified with the nodes the matched edge was
attached to.  Everything else in the host graph is left untouched.

Asserted productions add a precondition/postcondition pair whose free
variables name nodes of L and R respectively; application is refused (with
a witness) when the host graph violates the precondition under the match.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from . import logic
from .graphs import (EdgeId, EdgeInfo, Graph, GraphMorphism, NodeId, NodeInfo)
from .ids import Allocator, session


class ProductionError(Exception):
    """Ill-formed production."""


class MatchError(Exception):
    """A match is stale or does not belong to the given graph."""


class Production:
    """L -> R rewrite rule with interface map and a fixed order on R's edges.

    The order ``rhs_order`` is arbitrary but fixed at definition time; it is
    what makes the production usable as an operation of the term algebra
    (children of a tracking vertex follow it).
    """

    def __init__(self, name: str, lhs: Graph, rhs: Graph,
                 interface: Mapping[NodeId, NodeId],
                 rhs_order: tuple[EdgeId, ...] | None = None):
        if len(lhs) != 1:
            raise ProductionError(f"{name}: left side must consist of a single edge")
        edge = lhs.edge_ids[0]
        if lhs.theta(edge) != 1:
            raise ProductionError(f"{name}: the left-side edge must be replaceable")
        attached = lhs.attachment(edge)
        if len(set(attached)) != len(attached):
            raise ProductionError(f"{name}: left-side edge must attach to pairwise distinct nodes")
        if set(attached) != set(lhs.node_ids):
            raise ProductionError(f"{name}: every left-side node must lie on its edge")
        if set(interface) != set(lhs.node_ids):
            raise ProductionError(f"{name}: interface map must be total on left-side nodes")
        if len(set(interface.values())) != len(interface):
            raise ProductionError(f"{name}: interface map must be injective")
        for l, r in interface.items():
            if not rhs.has_node(r):
                raise ProductionError(f"{name}: interface image {r} is not a node of the right side")
            if rhs.node_type(r) != lhs.node_type(l):
                raise ProductionError(f"{name}: interface map changes the type of node {l}")
        order = tuple(rhs_order) if rhs_order is not None else rhs.edge_ids
        if sorted(order) != sorted(rhs.edge_ids):
            raise ProductionError(f"{name}: rhs_order must be a permutation of the right side's edges")

        self.name = name
        self.lhs = lhs
        self.rhs = rhs
        self.interface: dict[NodeId, NodeId] = dict(interface)
        self.rhs_order = order

    @property
    def lhs_edge(self) -> EdgeId:
        return self.lhs.edge_ids[0]

    @property
    def lhs_type(self) -> str:
        return self.lhs.edge_type(self.lhs_edge)

    @property
    def lhs_nodes(self) -> tuple[NodeId, ...]:
        """L's nodes in tentacle order."""
        return self.lhs.attachment(self.lhs_edge)

    @property
    def arity(self) -> int:
        return len(self.rhs_order)

    @property
    def child_types(self) -> tuple[str, ...]:
        """Types of R's edges in rhs_order: the operation's input sorts."""
        return tuple(self.rhs.edge_type(e) for e in self.rhs_order)

    def interface_inverse(self) -> dict[NodeId, NodeId]:
        return {r: l for l, r in self.interface.items()}

    def __repr__(self) -> str:
        ins = " x ".join(self.child_types) if self.child_types else "()"
        return f"Production({self.name}: {ins} -> {self.lhs_type})"


@dataclass(frozen=True)
class Match:
    """A replaceable host edge together with the node correspondence induced
    by aligning L's tentacles with the edge's tentacles."""

    edge: EdgeId
    node_map: Mapping[NodeId, NodeId]  # L-node -> host node


def find_matches(g: Graph, p: Production) -> list[Match]:
    """All ways to apply ``p`` to ``g``, in the graph's stable edge order."""
    out = []
    for e in g.edge_ids:
        if g.edge_type(e) == p.lhs_type and g.theta(e) == 1:
            out.append(Match(e, dict(zip(p.lhs_nodes, g.attachment(e)))))
    return out


def _check_match(g: Graph, p: Production, m: Match) -> None:
    if not g.has_edge(m.edge):
        raise MatchError(f"matched edge {m.edge} is no longer in the graph")
    if g.edge_type(m.edge) != p.lhs_type:
        raise MatchError(f"matched edge {m.edge} has type {g.edge_type(m.edge)}, production wants {p.lhs_type}")
    if g.theta(m.edge) != 1:
        raise MatchError(f"matched edge {m.edge} is not replaceable")


def apply_production(g: Graph, p: Production, m: Match,
                     alloc: Allocator | None = None) -> tuple[Graph, GraphMorphism]:
    """Replace the matched edge with a fresh copy of R.

    Returns the rewritten graph and the copy morphism embedding R into it
    (interface nodes land on the matched edge's nodes, everything else is
    fresh).  Fresh edges are appended in ``rhs_order``.
    """
    _check_match(g, p, m)
    alloc = alloc if alloc is not None else session
    matched_nodes = dict(zip(p.lhs_nodes, g.attachment(m.edge)))

    inv = p.interface_inverse()
    node_map: dict[NodeId, NodeId] = {}
    out = g.without_edges([m.edge])
    for rn in p.rhs.node_ids:
        if rn in inv:
            node_map[rn] = matched_nodes[inv[rn]]
        else:
            fresh = alloc.ids.fresh()
            node_map[rn] = fresh
            name = alloc.names.fresh(p.rhs.node(rn).name or "n")
            out = out.add_node(fresh, NodeInfo(p.rhs.node_type(rn), name))
    edge_map: dict[EdgeId, EdgeId] = {}
    for re in p.rhs_order:
        info = p.rhs.edge(re)
        fresh = alloc.ids.fresh()
        edge_map[re] = fresh
        name = alloc.names.fresh(info.name or "e")
        out = out.add_edge(fresh, EdgeInfo(info.tau, tuple(node_map[n] for n in info.nodes),
                                           info.theta, name))
    return out, GraphMorphism(node_map, edge_map)


@dataclass(frozen=True)
class AssertedProduction:
    """A production with contracts: ``<pre, h> p <post, h'>``.

    ``pre_assign`` sends the precondition's free variables to nodes of L,
    ``post_assign`` sends the postcondition's to nodes of R.
    """

    production: Production
    pre: logic.Formula = logic.TOP
    pre_assign: Mapping[str, NodeId] = field(default_factory=dict)
    post: logic.Formula = logic.TOP
    post_assign: Mapping[str, NodeId] = field(default_factory=dict)

    def __post_init__(self):
        for v in logic.free_vars(self.pre):
            if v not in self.pre_assign or not self.production.lhs.has_node(self.pre_assign[v]):
                raise ProductionError(
                    f"{self.production.name}: precondition variable {v!r} must name a left-side node")
        for v in logic.free_vars(self.post):
            if v not in self.post_assign or not self.production.rhs.has_node(self.post_assign[v]):
                raise ProductionError(
                    f"{self.production.name}: postcondition variable {v!r} must name a right-side node")


@dataclass(frozen=True)
class Violation:
    """A refused application: the precondition failed under the match."""

    message: str
    assignment: dict[str, NodeId]
    formula: logic.Formula


@dataclass(frozen=True)
class AssertedOutcome:
    graph: Optional[Graph] = None
    copy: Optional[GraphMorphism] = None
    violation: Optional[Violation] = None

    @property
    def ok(self) -> bool:
        return self.violation is None


def induced_pre_assignment(ap: AssertedProduction, m: Match) -> dict[str, NodeId]:
    """Compose the contract's assignment with the match: variables land on
    the host nodes the matched edge is attached to."""
    return {v: m.node_map[ap.pre_assign[v]]
            for v in logic.free_vars(ap.pre)}


def apply_asserted(g: Graph, ap: AssertedProduction, m: Match,
                   alloc: Allocator | None = None) -> AssertedOutcome:
    """Apply when the host graph satisfies the precondition under the match;
    otherwise report a violation carrying the failing assignment."""
    _check_match(g, ap.production, m)
    h = induced_pre_assignment(ap, m)
    witness = logic.violation_witness(g, ap.pre, h)
    if witness is not None:
        binding = ", ".join(
            f"{v} -> {g.node_name(n)}" for v, n in sorted(witness.assignment.items()))
        return AssertedOutcome(violation=Violation(
            f"precondition {logic.format_formula(ap.pre)} fails under [{binding}]",
            witness.assignment, ap.pre))
    graph, copy = apply_production(g, ap.production, m, alloc)
    return AssertedOutcome(graph=graph, copy=copy)
