"""Weakest preconditions of productions, and brute-force validity checking.

``weakest_precondition(p, post)`` transforms a postcondition into a
precondition by structural recursion: a quantifier over type D splits into
(a) the same quantifier, covering host edges that survive the application,
and (b) one instantiated copy of the body per D-typed edge of p's right
side.  Inside an instantiated copy, node positions are symbolic: a fresh
internal R-node can equal nothing that existed before the application
(those equalities collapse to bottom), while interface R-nodes translate
into free variables naming L's nodes, to be bound by the match.

The transformation is exact when the precondition is evaluated on the host
graph *minus the matched edge* (the residual graph used by the recovery
loop).  Evaluated on the full host graph the (a)-quantifiers also range
over the matched edge itself, which can strengthen the result; the
brute-force oracle below checks the published soundness contract for the
production/postcondition pairs that ship with the package.

Validity of an asserted production is checked by enumerating every small
graph over the vocabulary (up to isomorphism), every match and the induced
assignments, applying the production and model-checking the postcondition.
Replaceability marks are fixed to 1 during enumeration: marks influence
only which edges are matchable, so any counterexample with non-replaceable
edges remains one after marking everything replaceable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Mapping, Optional

from . import logic
from .graphs import (EdgeInfo, Graph, NodeId, NodeInfo, TypeGraph,
                     canonical_key)
from .ids import Allocator
from .logic import And, ForallEdge, Formula, NodeEq, Not, Top
from .productions import AssertedProduction, Match, Production, apply_production, find_matches


class BoundExceededError(Exception):
    """An enumeration bound above the configured desk-scale cap."""


#: Hard cap for oracle enumeration (edges); override via the cap argument.
DEFAULT_EDGE_CAP = 4
DEFAULT_NODE_CAP = 6


# -- the transformer ---------------------------------------------------------


@dataclass(frozen=True)
class WpResult:
    """A computed precondition with its free-variable binding into L."""

    formula: Formula
    production: str
    post: Formula
    assignment: dict[str, NodeId]   # free variable -> L-node
    notes: tuple[str, ...] = ()

    def induced_assignment(self, m: Match) -> dict[str, NodeId]:
        """Bind the precondition's variables through a concrete match."""
        return {v: m.node_map[l] for v, l in self.assignment.items()}


def _simplify(phi: Formula) -> Formula:
    if isinstance(phi, And):
        left, right = _simplify(phi.left), _simplify(phi.right)
        if left == logic.TOP:
            return right
        if right == logic.TOP:
            return left
        if left == logic.BOT or right == logic.BOT:
            return logic.BOT
        return And(left, right)
    if isinstance(phi, Not):
        return Not(_simplify(phi.body))
    if isinstance(phi, ForallEdge):
        body = _simplify(phi.body)
        if body == logic.TOP:
            return logic.TOP
        return ForallEdge(phi.etype, phi.bound, body)
    return phi


def weakest_precondition(p: Production, post: Formula,
                         post_assign: Mapping[str, NodeId] | None = None) -> WpResult:
    """Transform ``post`` (over the rewritten graph) into a precondition
    over the host graph.

    ``post_assign`` sends free variables of ``post`` to nodes of p's right
    side; free variables without an assignment are read as naming host
    nodes that survive the rewrite and stay symbolic (that is how chained
    preconditions from the recovery loop are threaded through).  The
    result's own free variables name nodes of L (see
    ``WpResult.assignment``); a match binds them to host nodes.
    """
    post_assign = dict(post_assign or {})
    for v, rn in post_assign.items():
        if not p.rhs.has_node(rn):
            raise ValueError(f"assignment sends {v!r} to {rn}, not a right-side node")

    inv = p.interface_inverse()
    taken = _all_vars(post)
    lvar_of: dict[NodeId, str] = {}
    used_assignment: dict[str, NodeId] = {}

    def lvar(lnode: NodeId) -> str:
        if lnode not in lvar_of:
            base = p.lhs.node(lnode).name or f"l{lnode}"
            name = base
            k = 0
            while name in taken or name in used_assignment:
                k += 1
                name = f"{base}_{k}"
            lvar_of[lnode] = name
            used_assignment[name] = lnode
        return lvar_of[lnode]

    notes: list[str] = []

    def eq_term(var: str, env: Mapping[str, NodeId]) -> tuple[str, Optional[NodeId]]:
        return var, env.get(var)

    def node_eq(x: str, y: str, env: Mapping[str, NodeId]) -> Formula:
        _, rx = eq_term(x, env)
        _, ry = eq_term(y, env)
        if rx is None and ry is None:
            return NodeEq(x, y)
        if rx is not None and ry is not None:
            if rx == ry:
                return logic.TOP
            if rx in inv and ry in inv:
                return NodeEq(lvar(inv[rx]), lvar(inv[ry]))
            return logic.BOT  # a fresh internal node equals nothing else
        survivor, rnode = (x, ry) if rx is None else (y, rx)
        if rnode in inv:
            return NodeEq(survivor, lvar(inv[rnode]))
        return logic.BOT  # fresh internal node vs a pre-existing node

    def walk(phi: Formula, env: dict[str, NodeId], where: str) -> Formula:
        if isinstance(phi, Top):
            return phi
        if isinstance(phi, NodeEq):
            return node_eq(phi.x, phi.y, env)
        if isinstance(phi, Not):
            return Not(walk(phi.body, env, where))
        if isinstance(phi, And):
            return And(walk(phi.left, env, where), walk(phi.right, env, where))
        if isinstance(phi, ForallEdge):
            shadowed = {v: n for v, n in env.items() if v not in phi.bound}
            parts = [walk(phi.body, shadowed, where)]
            surviving = ForallEdge(phi.etype, phi.bound, parts[0])
            out = [surviving]
            notes.append(f"{where}: forall {phi.etype} kept for edges surviving the rewrite")
            for re in p.rhs_order:
                if p.rhs.edge_type(re) != phi.etype:
                    continue
                inst = dict(shadowed)
                inst.update(zip(phi.bound, p.rhs.attachment(re)))
                out.append(walk(phi.body, inst, f"{where}/{p.rhs.edge_name(re)}"))
                notes.append(
                    f"{where}: forall {phi.etype} instantiated with created edge "
                    f"{p.rhs.edge_name(re)}")
            return logic.conj(out)
        raise logic.FormulaError(f"not a formula: {phi!r}")

    raw = walk(post, dict(post_assign), "post")
    formula = _simplify(raw)
    assignment = {v: n for v, n in used_assignment.items() if v in logic.free_vars(formula)}
    return WpResult(formula, p.name, post, assignment, tuple(notes))


def _all_vars(phi: Formula) -> set[str]:
    if isinstance(phi, Top):
        return set()
    if isinstance(phi, NodeEq):
        return {phi.x, phi.y}
    if isinstance(phi, Not):
        return _all_vars(phi.body)
    if isinstance(phi, And):
        return _all_vars(phi.left) | _all_vars(phi.right)
    return set(phi.bound) | _all_vars(phi.body)


# -- bounded model enumeration ------------------------------------------------


def enumerate_graphs(tg: TypeGraph, max_edges: int, max_nodes: int = DEFAULT_NODE_CAP,
                     types: Iterable[str] | None = None) -> Iterator[Graph]:
    """Every graph over the vocabulary with at most ``max_edges`` edges and
    ``max_nodes`` nodes, up to isomorphism, every edge replaceable, no
    isolated nodes (they are invisible to the logic and to matching).

    Restricting ``types`` restricts the edge vocabulary; graphs containing
    other edge types behave identically with respect to formulas and
    matches that never mention them.
    """
    labels = sorted(types) if types is not None else sorted(tg.edge_types)
    for label in labels:
        if label not in tg:
            raise ValueError(f"unknown edge type {label!r}")
    sigs = [tg.signature(l) for l in labels]
    seen: set = set()

    def graph_of(edges: list[tuple[int, tuple[int, ...]]]) -> Graph:
        node_types: dict[int, str] = {}
        for li, nodes in edges:
            for pos, n in enumerate(nodes):
                node_types[n] = sigs[li][pos]
        nodes = {n: NodeInfo(t, f"n{n}") for n, t in sorted(node_types.items())}
        einfos = {k: EdgeInfo(labels[li], nodes_t, 1, f"e{k}")
                  for k, (li, nodes_t) in enumerate(edges)}
        return Graph(nodes, einfos)

    def tuples_for(li: int, node_count: int) -> Iterator[tuple[int, ...]]:
        sig = sigs[li]
        # nodes are 0..node_count-1 plus fresh ones appended in order
        def rec(pos: int, chosen: tuple[int, ...], top: int) -> Iterator[tuple[int, ...]]:
            if pos == len(sig):
                yield chosen
                return
            for n in range(top + 1):
                if n > max_nodes - 1:
                    continue
                yield from rec(pos + 1, chosen + (n,), max(top, n + 1))
        yield from rec(0, (), node_count)

    def node_count(edges) -> int:
        return max((n for _, t in edges for n in t), default=-1) + 1

    def consistent(edges) -> bool:
        types_seen: dict[int, str] = {}
        for li, nodes in edges:
            for pos, n in enumerate(nodes):
                want = sigs[li][pos]
                if types_seen.setdefault(n, want) != want:
                    return False
        return True

    def rec(edges: list[tuple[int, tuple[int, ...]]], min_label: int) -> Iterator[Graph]:
        g = graph_of(edges)
        key = canonical_key(g, respect_theta=False)
        if key not in seen:
            seen.add(key)
            yield g
        if len(edges) == max_edges:
            return
        for li in range(min_label, len(labels)):
            for t in tuples_for(li, node_count(edges)):
                nxt = edges + [(li, t)]
                if not consistent(nxt):
                    continue
                if edges and edges[-1][0] == li and t < edges[-1][1]:
                    continue  # same-type edges in nondecreasing tuple order
                yield from rec(nxt, li)

    yield from rec([], 0)


def _assignments(g: Graph, variables: Iterable[str]) -> Iterator[dict[str, NodeId]]:
    variables = sorted(variables)
    if not variables:
        yield {}
        return
    nodes = list(g.node_ids)
    if not nodes:
        return
    for combo in product(nodes, repeat=len(variables)):
        yield dict(zip(variables, combo))


def semantically_equivalent(f1: Formula, f2: Formula, tg: TypeGraph,
                            max_edges: int = DEFAULT_EDGE_CAP,
                            max_nodes: int = DEFAULT_NODE_CAP) -> bool:
    """Equivalence over every graph (and assignment) within the bounds."""
    types = logic.edge_types_in(f1) | logic.edge_types_in(f2)
    fv = logic.free_vars(f1) | logic.free_vars(f2)
    for g in enumerate_graphs(tg, max_edges, max_nodes, types or None):
        for h in _assignments(g, fv):
            if logic.satisfies(g, f1, h) != logic.satisfies(g, f2, h):
                return False
    return True


# -- brute-force validity ------------------------------------------------------


@dataclass
class Counterexample:
    graph: Graph
    match: Match
    assignment: dict[str, NodeId]

    def __repr__(self) -> str:
        return f"Counterexample(at edge {self.graph.edge_name(self.match.edge)} of {self.graph!r})"


@dataclass
class OracleReport:
    counterexamples: list[Counterexample] = field(default_factory=list)
    graphs_checked: int = 0
    applications_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def __repr__(self) -> str:
        verdict = "valid" if self.ok else f"{len(self.counterexamples)} counterexample(s)"
        return (f"OracleReport({verdict} over {self.graphs_checked} graphs, "
                f"{self.applications_checked} applications)")


def check_validity_oracle(ap: AssertedProduction, tg: TypeGraph,
                          bound: int = DEFAULT_EDGE_CAP,
                          max_nodes: int = DEFAULT_NODE_CAP,
                          cap: int = DEFAULT_EDGE_CAP,
                          stop_at: int | None = 5) -> OracleReport:
    """Search all graphs within the bound for a violation of the contract:
    a precondition-satisfying application whose result breaks the
    postcondition."""
    if bound > cap:
        raise BoundExceededError(f"bound {bound} exceeds the configured cap {cap}")
    p = ap.production
    types = (logic.edge_types_in(ap.pre) | logic.edge_types_in(ap.post)
             | {p.lhs_type} | set(p.child_types))
    report = OracleReport()
    post_fv = logic.free_vars(ap.post)
    for g in enumerate_graphs(tg, bound, max_nodes, types):
        report.graphs_checked += 1
        for m in find_matches(g, p):
            h = {v: m.node_map[ap.pre_assign[v]] for v in logic.free_vars(ap.pre)}
            if not logic.satisfies(g, ap.pre, h):
                continue
            alloc = Allocator()
            for used in (*g.node_ids, *g.edge_ids):
                alloc.ids.observe(used)
            g2, copy = apply_production(g, p, m, alloc)
            h2 = {v: copy.node_map[ap.post_assign[v]] for v in post_fv}
            report.applications_checked += 1
            if not logic.satisfies(g2, ap.post, h2):
                report.counterexamples.append(Counterexample(g, m, h))
                if stop_at is not None and len(report.counterexamples) >= stop_at:
                    return report
    return report


def weakness_probe(ap: AssertedProduction, tg: TypeGraph,
                   bound: int = 3, max_nodes: int = DEFAULT_NODE_CAP,
                   stop_at: int = 5) -> list[Graph]:
    """Best-effort hunt for graphs the precondition rejects even though every
    application would satisfy the postcondition: evidence the precondition
    is stronger than necessary.  Reported, never asserted."""
    p = ap.production
    types = (logic.edge_types_in(ap.pre) | logic.edge_types_in(ap.post)
             | {p.lhs_type} | set(p.child_types))
    findings: list[Graph] = []
    for g in enumerate_graphs(tg, bound, max_nodes, types):
        matches = find_matches(g, p)
        if not matches:
            continue
        rejected = False
        all_fine = True
        for m in matches:
            h = {v: m.node_map[ap.pre_assign[v]] for v in logic.free_vars(ap.pre)}
            if logic.satisfies(g, ap.pre, h):
                continue
            rejected = True
            alloc = Allocator()
            for used in (*g.node_ids, *g.edge_ids):
                alloc.ids.observe(used)
            g2, copy = apply_production(g, p, m, alloc)
            h2 = {v: copy.node_map[ap.post_assign[v]] for v in logic.free_vars(ap.post)}
            if not logic.satisfies(g2, ap.post, h2):
                all_fine = False
                break
        if rejected and all_fine:
            findings.append(g)
            if len(findings) >= stop_at:
                break
    return findings
