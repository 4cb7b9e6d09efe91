"""Inverse-derivation parsing and the interactive style-recovery loop.

Parsing folds one derivation step back: a forest vertex whose children are
all current leaves names a production application; the edges matching the
production's right side are removed (together with the images of its
internal nodes) and a fresh replaceable left-side edge takes their place.

A recovery session drives the designer-facing methodology: compute the
current architecture, check the style invariant, and while it is violated
offer productions whose computed precondition holds on the residual graph.
The designer may accept one (it is applied to the session's working
system), iterate the precondition computation one production deeper, fold
part of the history via parsing, or abandon.  Accepting re-checks the
invariant for real; a session only reports success from a model check.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

from . import logic, wp as wp_mod
from .graphs import EdgeId, EdgeInfo, Graph, NodeId, TypeGraph
from .ids import Allocator
from .logic import Formula
from .productions import Match, Production, find_matches
from .tracking import (EdgeRecord, ForestIntegrityError, ParseEvent,
                       ReconfigEvent, TrackedSystem, VertexId, current_graph)


class ParseError(Exception):
    """A two-tier subtree cannot be folded."""


class SessionError(Exception):
    """A decision that does not fit the session's current state."""


# -- parsing -------------------------------------------------------------------


@dataclass(frozen=True)
class TwoTierSubtree:
    """A parent vertex all of whose children are current leaves."""

    parent: VertexId


def list_parse_candidates(s: TrackedSystem, within: VertexId | None = None) -> list[TwoTierSubtree]:
    """Foldable two-tier subtrees, in preorder; ``within`` restricts the
    search to one subtree (typically the recently reconfigured one)."""
    scope = s.forest.subtree(within) if within is not None else s.forest.vertices()
    out = []
    for v in scope:
        children = s.forest.children(v)
        if not children or v not in s.env2:
            continue
        if all(s.forest.is_leaf(c) and s.record(c) is not None
               and s.graph.has_edge(s.record(c).edge)
               and s.graph.theta(s.record(c).edge) == 1
               for c in children):
            out.append(TwoTierSubtree(v))
    return out


def parse_step(g: Graph, sub: TwoTierSubtree, s: TrackedSystem,
               productions: Mapping[str, Production],
               strict_global: bool = False,
               alloc: Allocator | None = None) -> tuple[Graph, EdgeId]:
    """Fold the production recorded at the subtree's parent.

    The children's edges are matched against the production's right side in
    the recorded order; they and the images of the right side's internal
    nodes are removed, and a fresh replaceable left-side edge is added on
    the image of the interface.  Refused if a folded edge is not
    replaceable (``strict_global`` extends that condition to every edge of
    the graph, the literal reading)."""
    parent = sub.parent
    name = s.production_at(parent)
    if name is None:
        raise ParseError(f"vertex {parent} does not record a production")
    if name not in productions:
        raise ParseError(f"production {name!r} is not registered")
    p = productions[name]
    children = s.forest.children(parent)
    if any(not s.forest.is_leaf(c) for c in children):
        raise ParseError("subtree is not two-tier: some child is not a leaf")
    if any(s.record(c) is None for c in children):
        raise ParseError("cannot fold an application with an empty right side")
    if len(children) != len(p.rhs_order):
        raise ForestIntegrityError(
            f"vertex {parent} has {len(children)} children, {name} creates {len(p.rhs_order)} edges")

    child_edges = [s.record(c).edge for c in children]
    for e in child_edges:
        if not g.has_edge(e):
            raise ParseError(f"edge {e} recorded in the forest is not in the graph")

    if strict_global:
        bad = [e for e in g.edge_ids if g.theta(e) != 1]
    else:
        bad = [e for e in child_edges if g.theta(e) != 1]
    if bad:
        raise ParseError(
            "refusing to fold: non-replaceable edge(s) " +
            ", ".join(g.edge_name(e) for e in bad))

    sigma: dict[NodeId, NodeId] = {}
    for re, ce in zip(p.rhs_order, child_edges):
        if p.rhs.edge_type(re) != g.edge_type(ce):
            raise ParseError(
                f"edge {g.edge_name(ce)} has type {g.edge_type(ce)}, "
                f"{name} expects {p.rhs.edge_type(re)} at this position")
        for rn, gn in zip(p.rhs.attachment(re), g.attachment(ce)):
            if sigma.setdefault(rn, gn) != gn:
                raise ParseError(
                    f"children of vertex {parent} do not assemble an instance of {name}'s right side")

    try:
        interface_targets = {l: sigma[p.interface[l]] for l in p.lhs_nodes}
    except KeyError:
        raise ParseError(
            f"{name}: an interface node of the right side touches no folded edge; "
            "its image cannot be located") from None

    internal_images = {sigma[rn] for rn in p.rhs.node_ids
                       if rn in sigma and rn not in p.interface_inverse()}
    internal_images -= set(interface_targets.values())
    g2 = g.without_edges(child_edges)
    for n in internal_images:
        for e in g2.edge_ids:
            if n in g2.attachment(e):
                raise ParseError(
                    f"internal node {g.node_name(n)} is still attached to {g2.edge_name(e)}; "
                    "folding would dangle it")
    g2 = g2.without_nodes(internal_images)

    alloc = alloc if alloc is not None else Allocator()
    new_edge = alloc.ids.fresh()
    lhs_info = p.lhs.edge(p.lhs_edge)
    g2 = g2.add_edge(new_edge, EdgeInfo(
        p.lhs_type, tuple(interface_targets[l] for l in p.lhs_nodes), 1,
        alloc.names.fresh(lhs_info.name or "e")))
    return g2, new_edge


def parse_system(s: TrackedSystem, sub: TwoTierSubtree,
                 productions: Mapping[str, Production],
                 strict_global: bool = False) -> TrackedSystem:
    """Apply one parse step to a tracked system: the parent becomes a leaf
    recording the fresh left-side edge."""
    alloc = s.alloc.clone()
    g2, new_edge = parse_step(s.graph, sub, s, productions, strict_global, alloc)
    env1 = dict(s.env1)
    env2 = dict(s.env2)
    for c in s.forest.children(sub.parent):
        env1.pop(c, None)
        env2.pop(c, None)
    env1[sub.parent] = EdgeRecord.of(g2, new_edge)
    env2.pop(sub.parent, None)
    forest = s.forest.with_children_removed(sub.parent)
    out = TrackedSystem(g2, forest, env1, env2,
                        s.log + (ParseEvent(sub.parent, new_edge),), alloc, s.initial)
    out.check_integrity()
    return out


# -- recovery sessions ----------------------------------------------------------


class SessionState(str, enum.Enum):
    IDLE = "idle"
    VIOLATED = "violated"
    AWAITING_PRODUCTION_CHOICE = "awaiting-production-choice"
    AWAITING_ITERATE_OR_PARSE = "awaiting-iterate-or-parse"
    AWAITING_SUBTREE_CHOICE = "awaiting-subtree-choice"
    RECOVERED = "recovered"
    ABANDONED = "abandoned"


@dataclass(frozen=True)
class Candidate:
    """A production whose computed precondition holds on the residual graph
    (the working graph minus the edge the production would replace)."""

    production: str
    match: Match
    psi: Formula
    assignment: dict[str, NodeId]


@dataclass(frozen=True)
class AcceptProduction:
    production: str
    edge: EdgeId


@dataclass(frozen=True)
class Iterate:
    production: str
    edge: EdgeId


@dataclass(frozen=True)
class Parse:
    parent: Optional[VertexId] = None


@dataclass(frozen=True)
class Abandon:
    pass


Decision = AcceptProduction | Iterate | Parse | Abandon

_DECIDABLE = (SessionState.AWAITING_PRODUCTION_CHOICE,
              SessionState.AWAITING_ITERATE_OR_PARSE,
              SessionState.AWAITING_SUBTREE_CHOICE)


@dataclass(frozen=True)
class RecoverySession:
    """Resumable state of one recovery: the working system (a private
    snapshot the designer's accepted productions and parses mutate), the
    current working graph/condition of the precondition hunt, and the
    decision log for replay."""

    system: TrackedSystem
    type_graph: TypeGraph
    productions: Mapping[str, Production]
    invariant: Formula
    working_graph: Graph
    condition: Formula
    condition_assignment: dict[str, NodeId]
    marked_root: Optional[VertexId]
    state: SessionState
    candidates: tuple[Candidate, ...] = ()
    decision_log: tuple[Decision, ...] = ()
    witness: Optional[logic.Witness] = None
    wp_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def parse_candidates(self) -> list[TwoTierSubtree]:
        return list_parse_candidates(self.system, self.marked_root)

    def marked_edges(self) -> list[EdgeId]:
        """Current edges under the marked subtree (the whole forest when no
        reconfiguration was recorded): what the console highlights."""
        roots = [self.marked_root] if self.marked_root is not None else list(self.system.forest.roots)
        out = []
        for r in roots:
            if not self.system.forest.has_vertex(r):
                continue
            for leaf in self.system.forest.leaves_under(r):
                rec = self.system.record(leaf)
                if rec is not None:
                    out.append(rec.edge)
        return out


def _cached_wp(session: RecoverySession, p: Production) -> wp_mod.WpResult:
    key = (p.name, session.condition)
    if key not in session.wp_cache:
        session.wp_cache[key] = wp_mod.weakest_precondition(p, session.condition)
    return session.wp_cache[key]


def start_recovery(system: TrackedSystem, invariant: Formula, type_graph: TypeGraph,
                   productions: Mapping[str, Production]) -> RecoverySession:
    """Steps one to three: compute the architecture, mark the recently
    reconfigured subtree, check the invariant."""
    problems = logic.check_formula(invariant, type_graph)
    if problems or logic.free_vars(invariant):
        raise logic.FormulaError("invariant must be closed and well typed: "
                                 + "; ".join(problems or ["it has free variables"]))
    g = current_graph(system)
    marked = None
    if system.log and isinstance(system.log[-1], ReconfigEvent):
        marked = system.log[-1].new_root
    wit = logic.violation_witness(g, invariant, {})
    state = SessionState.RECOVERED if wit is None else SessionState.VIOLATED
    return RecoverySession(system=system, type_graph=type_graph, productions=productions,
                           invariant=invariant, working_graph=g, condition=invariant,
                           condition_assignment={}, marked_root=marked, state=state,
                           witness=wit)


def propose_productions(session: RecoverySession) -> RecoverySession:
    """Step four (a): list every production/match whose computed
    precondition holds on the working graph minus the matched edge."""
    if session.state not in (SessionState.VIOLATED, *_DECIDABLE):
        raise SessionError(f"cannot propose candidates in state {session.state.value}")
    found: list[Candidate] = []
    for name in session.productions:
        p = session.productions[name]
        result = _cached_wp(session, p)
        for m in find_matches(session.working_graph, p):
            residual = session.working_graph.without_edges([m.edge])
            h = dict(session.condition_assignment)
            h.update(result.induced_assignment(m))
            try:
                ok = logic.satisfies(residual, result.formula, h)
            except logic.UnboundVariableError:
                ok = False
            if ok:
                found.append(Candidate(name, m, result.formula,
                                       {v: h[v] for v in logic.free_vars(result.formula)}))
    state = (SessionState.AWAITING_PRODUCTION_CHOICE if found
             else SessionState.AWAITING_ITERATE_OR_PARSE)
    return replace(session, candidates=tuple(found), state=state)


def _recheck(session: RecoverySession, system: TrackedSystem,
             decision: Decision) -> RecoverySession:
    g = current_graph(system)
    wit = logic.violation_witness(g, session.invariant, {})
    state = SessionState.RECOVERED if wit is None else SessionState.VIOLATED
    return replace(session, system=system, working_graph=g, condition=session.invariant,
                   condition_assignment={}, candidates=(), witness=wit, state=state,
                   decision_log=session.decision_log + (decision,))


def decide(session: RecoverySession, decision: Decision) -> RecoverySession:
    """Apply one designer decision; returns the advanced session."""
    if isinstance(decision, Abandon):
        if session.state not in (*_DECIDABLE, SessionState.VIOLATED):
            raise SessionError(f"cannot abandon in state {session.state.value}")
        return replace(session, state=SessionState.ABANDONED, candidates=(),
                       decision_log=session.decision_log + (decision,))

    if isinstance(decision, AcceptProduction):
        if session.state is not SessionState.AWAITING_PRODUCTION_CHOICE:
            raise SessionError("no production choice is pending")
        chosen = next((c for c in session.candidates
                       if c.production == decision.production and c.match.edge == decision.edge),
                      None)
        if chosen is None:
            raise SessionError("stale decision: that candidate is no longer offered")
        from .tracking import record_production
        system = record_production(session.system, session.productions[chosen.production],
                                   chosen.match)
        return _recheck(session, system, decision)

    if isinstance(decision, Iterate):
        if session.state not in (SessionState.AWAITING_PRODUCTION_CHOICE,
                                 SessionState.AWAITING_ITERATE_OR_PARSE):
            raise SessionError("nothing to iterate from here")
        p = session.productions.get(decision.production)
        if p is None:
            raise SessionError(f"unknown production {decision.production!r}")
        m = next((m for m in find_matches(session.working_graph, p)
                  if m.edge == decision.edge), None)
        if m is None:
            raise SessionError("stale decision: that edge is not matchable any more")
        result = _cached_wp(session, p)
        h = dict(session.condition_assignment)
        h.update(result.induced_assignment(m))
        nxt = replace(session,
                      working_graph=session.working_graph.without_edges([m.edge]),
                      condition=result.formula,
                      condition_assignment={v: h[v] for v in logic.free_vars(result.formula)},
                      candidates=(),
                      decision_log=session.decision_log + (decision,))
        return propose_productions(nxt)

    if isinstance(decision, Parse):
        if session.state not in _DECIDABLE:
            raise SessionError(f"cannot parse in state {session.state.value}")
        if decision.parent is None:
            return replace(session, state=SessionState.AWAITING_SUBTREE_CHOICE,
                           decision_log=session.decision_log + (decision,))
        sub = next((c for c in session.parse_candidates() if c.parent == decision.parent), None)
        if sub is None:
            raise SessionError(f"vertex {decision.parent} is not a foldable two-tier subtree")
        system = parse_system(session.system, sub, session.productions)
        # back to step four against the folded architecture, invariant restored
        nxt = _recheck(session, system, decision)
        if nxt.state is SessionState.RECOVERED:
            return nxt
        return propose_productions(nxt)

    raise SessionError(f"unknown decision {decision!r}")


def run_auto(session: RecoverySession, max_rounds: int = 24) -> RecoverySession:
    """Non-interactive policy: propose and accept the first candidate until
    the invariant holds; abandon when nothing is offered."""
    for _ in range(max_rounds):
        if session.state in (SessionState.RECOVERED, SessionState.ABANDONED):
            return session
        if session.state is SessionState.VIOLATED:
            session = propose_productions(session)
            continue
        if session.state is SessionState.AWAITING_PRODUCTION_CHOICE:
            first = session.candidates[0]
            session = decide(session, AcceptProduction(first.production, first.match.edge))
            continue
        return decide(session, Abandon())
    return decide(session, Abandon())


def replay_decisions(system: TrackedSystem, invariant: Formula, type_graph: TypeGraph,
                     productions: Mapping[str, Production],
                     decisions: tuple[Decision, ...]) -> RecoverySession:
    """Rebuild a session by replaying its decision log from scratch."""
    session = start_recovery(system, invariant, type_graph, productions)
    for d in decisions:
        if session.state is SessionState.VIOLATED:
            session = propose_productions(session)
        session = decide(session, d)
    return session


def session_payload(session: RecoverySession) -> dict:
    """Wire-format view of a session (the console renders exactly this)."""
    return {
        "state": session.state.value,
        "invariant": logic.format_formula(session.invariant),
        "condition": logic.format_formula(session.condition),
        "condition_assignment": {v: n for v, n in sorted(session.condition_assignment.items())},
        "candidates": [
            {"production": c.production, "edge": c.match.edge,
             "psi": logic.format_formula(c.psi),
             "assignment": {v: n for v, n in sorted(c.assignment.items())}}
            for c in session.candidates],
        "parse_candidates": [sub.parent for sub in session.parse_candidates()],
        "marked_root": session.marked_root,
        "marked_edges": session.marked_edges(),
        "violation": None if session.witness is None else {
            "assignment": {v: n for v, n in sorted(session.witness.assignment.items())},
            "edges": list(session.witness.edges)},
        "decisions": len(session.decision_log),
    }
