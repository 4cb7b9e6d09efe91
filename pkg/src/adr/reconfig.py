"""Term-level reconfiguration.

A set of productions induces a multi-sorted signature: sorts are the edge
types, and a production whose right side lists edges of types E1..En and
whose left edge has type L becomes an operation E1 x ... x En -> L.  Terms
over this signature (with sorted variables) are exactly derivation recipes,
and the tracking forest of a system is the run-time image of such terms.

A reconfiguration rule ``t -> t'`` (both linear, vars(t') within vars(t))
matches a subtree of the forest via the bow-tie relation -- the subtree
must replay t's operations, with variables absorbing arbitrary subtrees.
Applying the rule rebuilds the matched region: the graph denoted by t' is
constructed with one placeholder edge per variable, each placeholder is
replaced by the variable's current subgraph (glued positionally on its
recorded boundary nodes, preserving every edge id), and the forest gets a
fresh subtree shaped like t' in which the variables' subtrees are reused
unchanged.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping, Optional

from .graphs import EdgeId, EdgeInfo, Graph, NodeId, NodeInfo, TypeGraph
from .ids import Allocator
from .productions import Production
from .tracking import (EdgeRecord, Forest, ForestIntegrityError, ReconfigEvent,
                       TrackedSystem, VertexId)


class RuleError(Exception):
    """Ill-formed term or reconfiguration rule."""


class ReconfigError(Exception):
    """A reconfiguration cannot be applied where requested."""


# -- signature and terms -------------------------------------------------------


class Signature:
    """Sorts = edge types; operations = productions with their slot typing."""

    def __init__(self, tg: TypeGraph, productions: Mapping[str, Production]):
        self.sorts = tuple(sorted(tg.edge_types))
        self.operations: dict[str, tuple[tuple[str, ...], str]] = {}
        for name, p in productions.items():
            for t in (*p.child_types, p.lhs_type):
                if t not in tg.edge_types:
                    raise RuleError(f"operation {name} uses sort {t!r} outside the vocabulary")
            self.operations[name] = (p.child_types, p.lhs_type)

    def is_operation(self, name: str) -> bool:
        return name in self.operations

    def inputs(self, name: str) -> tuple[str, ...]:
        return self.operations[name][0]

    def output(self, name: str) -> str:
        return self.operations[name][1]


@dataclass(frozen=True)
class Var:
    name: str
    sort: str


@dataclass(frozen=True)
class App:
    op: str
    args: tuple["Term", ...]
    sort: str


Term = Var | App


def make_app(sig: Signature, op: str, args: tuple[Term, ...]) -> App:
    if not sig.is_operation(op):
        raise RuleError(f"unknown operation {op!r}")
    inputs = sig.inputs(op)
    if len(args) != len(inputs):
        raise RuleError(f"{op} takes {len(inputs)} arguments, got {len(args)}")
    for k, (arg, want) in enumerate(zip(args, inputs), start=1):
        if arg.sort != want:
            raise RuleError(f"{op}: argument {k} has sort {arg.sort}, expected {want}")
    return App(op, args, sig.output(op))


def term_vars(t: Term) -> list[Var]:
    """Variables in left-to-right order, duplicates included."""
    if isinstance(t, Var):
        return [t]
    out: list[Var] = []
    for a in t.args:
        out.extend(term_vars(a))
    return out


def is_linear(t: Term) -> bool:
    names = [v.name for v in term_vars(t)]
    return len(names) == len(set(names))


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    return f"{t.op}({', '.join(format_term(a) for a in t.args)})"


# -- rules ----------------------------------------------------------------------


@dataclass
class ReconfigRule:
    """A linear term rewrite; ``same_sort`` is stamped by validation."""

    name: str
    lhs: Term
    rhs: Term
    same_sort: bool | None = None

    def variables(self) -> dict[str, str]:
        return {v.name: v.sort for v in term_vars(self.lhs)}


@dataclass
class RuleReport:
    violations: list[str] = field(default_factory=list)
    same_sort: bool = True

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_rule(rule: ReconfigRule, sig: Signature) -> RuleReport:
    """Check linearity, variable inclusion and sorting; flag sort changes.

    Rules whose two sides have different sorts are accepted but flagged:
    only same-sort rules are guaranteed to keep the system derivable by the
    grammar.
    """
    report = RuleReport()

    def well_sorted(t: Term, side: str) -> None:
        if isinstance(t, Var):
            if t.sort not in sig.sorts:
                report.violations.append(f"{side}: variable {t.name} has unknown sort {t.sort!r}")
            return
        if not sig.is_operation(t.op):
            report.violations.append(f"{side}: unknown operation {t.op!r}")
            return
        inputs = sig.inputs(t.op)
        if len(inputs) != len(t.args):
            report.violations.append(f"{side}: {t.op} expects {len(inputs)} arguments, has {len(t.args)}")
            return
        for k, (arg, want) in enumerate(zip(t.args, inputs), start=1):
            if arg.sort != want:
                report.violations.append(
                    f"{side}: argument {k} of {t.op} has sort {arg.sort}, expected {want}")
            well_sorted(arg, side)

    well_sorted(rule.lhs, "left side")
    well_sorted(rule.rhs, "right side")
    for side, t in (("left side", rule.lhs), ("right side", rule.rhs)):
        if not is_linear(t):
            report.violations.append(f"{side}: a variable occurs more than once")
    lhs_names = {v.name: v.sort for v in term_vars(rule.lhs)}
    for v in term_vars(rule.rhs):
        if v.name not in lhs_names:
            report.violations.append(f"right side uses {v.name}, which the left side does not bind")
        elif lhs_names[v.name] != v.sort:
            report.violations.append(f"variable {v.name} changes sort between the two sides")
    report.same_sort = rule.lhs.sort == rule.rhs.sort
    rule.same_sort = report.same_sort
    return report


# -- term and rule text --------------------------------------------------------

_TERM_TOKEN = re.compile(r"\s*(->|[(),:]|[A-Za-z_][A-Za-z0-9_']*)")


def _tokenize(text: str) -> list[str]:
    out, pos = [], 0
    while pos < len(text):
        m = _TERM_TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise RuleError(f"cannot tokenize near {text[pos:pos + 12]!r}")
            break
        out.append(m.group(1))
        pos = m.end()
    return out


class _TermParser:
    def __init__(self, tokens: list[str], sig: Signature, sorts: dict[str, str]):
        self.toks = tokens
        self.pos = 0
        self.sig = sig
        self.sorts = sorts  # variable name -> sort, grows by inference

    def peek(self) -> Optional[str]:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self, expected: Optional[str] = None) -> str:
        tok = self.peek()
        if tok is None:
            raise RuleError("unexpected end of term")
        if expected is not None and tok != expected:
            raise RuleError(f"expected {expected!r}, found {tok!r}")
        self.pos += 1
        return tok

    def term(self, want_sort: Optional[str]) -> Term:
        name = self.take()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name):
            raise RuleError(f"expected a name, found {name!r}")
        if self.peek() == "(":
            if not self.sig.is_operation(name):
                raise RuleError(f"unknown operation {name!r}")
            self.take("(")
            args: list[Term] = []
            inputs = self.sig.inputs(name)
            if self.peek() != ")":
                while True:
                    slot = len(args)
                    want = inputs[slot] if slot < len(inputs) else None
                    args.append(self.term(want))
                    if self.peek() != ",":
                        break
                    self.take(",")
            self.take(")")
            app = make_app(self.sig, name, tuple(args))
            if want_sort is not None and app.sort != want_sort:
                raise RuleError(f"{name} produces sort {app.sort}, expected {want_sort}")
            return app
        if self.sig.is_operation(name):
            raise RuleError(f"operation {name!r} needs an argument list (use {name}())")
        declared = self.sorts.get(name)
        sort = declared or want_sort
        if sort is None:
            raise RuleError(f"cannot infer the sort of variable {name!r}; annotate it")
        if declared is None:
            self.sorts[name] = sort
        elif want_sort is not None and declared != want_sort:
            raise RuleError(f"variable {name!r} is {declared} but sits in a {want_sort} slot")
        return Var(name, sort)


def parse_term(text: str, sig: Signature, sorts: Mapping[str, str] | None = None) -> Term:
    parser = _TermParser(_tokenize(text), sig, dict(sorts or {}))
    t = parser.term(None)
    if parser.peek() is not None:
        raise RuleError(f"trailing input at {parser.peek()!r}")
    return t


def parse_rule(text: str, sig: Signature) -> ReconfigRule:
    """``rule NAME : TERM -> TERM [where x:Sort, ...]``; variable sorts are
    inferred from operation slots where possible."""
    m = re.fullmatch(
        r"\s*rule\s+([A-Za-z_][A-Za-z0-9_']*)\s*:\s*(.+?)\s*->\s*(.+?)\s*(?:where\s+(.+?)\s*)?",
        text, flags=re.DOTALL)
    if not m:
        raise RuleError("expected: rule NAME : TERM -> TERM [where x:Sort, ...]")
    name, lhs_text, rhs_text, where = m.groups()
    sorts: dict[str, str] = {}
    if where:
        for item in where.split(","):
            var, _, sort = item.partition(":")
            if not sort:
                raise RuleError(f"bad sort annotation {item.strip()!r}")
            sorts[var.strip()] = sort.strip()
    lhs_parser = _TermParser(_tokenize(lhs_text), sig, sorts)
    lhs = lhs_parser.term(None)
    if lhs_parser.peek() is not None:
        raise RuleError(f"trailing input in left term at {lhs_parser.peek()!r}")
    rhs_parser = _TermParser(_tokenize(rhs_text), sig, lhs_parser.sorts)
    rhs = rhs_parser.term(None)
    if rhs_parser.peek() is not None:
        raise RuleError(f"trailing input in right term at {rhs_parser.peek()!r}")
    return ReconfigRule(name, lhs, rhs)


def format_rule(rule: ReconfigRule) -> str:
    sorts = {v.name: v.sort for v in term_vars(rule.lhs)}
    where = ", ".join(f"{n}:{s}" for n, s in sorts.items())
    text = f"rule {rule.name} : {format_term(rule.lhs)} -> {format_term(rule.rhs)}"
    return f"{text} where {where}" if where else text


# -- bow-tie matching ------------------------------------------------------------


def bow_tie(s: TrackedSystem, t: Term, v: VertexId) -> bool:
    """True iff the subtree at ``v`` replays ``t``: variables absorb any
    subtree, operations must be recorded at the vertex with matching child
    count, pairwise in order.  A vertex whose children are all tombstones
    counts as an applied zero-arity operation."""
    if isinstance(t, Var):
        return True
    if s.production_at(v) != t.op:
        return False
    children = s.forest.children(v)
    if not t.args:
        return bool(children) and all(s.is_tombstone(c) for c in children)
    if len(children) != len(t.args):
        return False
    return all(bow_tie(s, arg, c) for arg, c in zip(t.args, children))


def find_rule_matches(s: TrackedSystem, rule: ReconfigRule) -> list[VertexId]:
    """Subtree roots matching the rule's left side, in preorder.  The
    subtree's sort (the type of its recorded edge) must equal the term's."""
    out = []
    for v in s.forest.vertices():
        rec = s.record(v)
        if rec is None or rec.tau != rule.lhs.sort:
            continue
        if bow_tie(s, rule.lhs, v):
            out.append(v)
    return out


def get_var_tree(s: TrackedSystem, t: Term, v: VertexId, x: str) -> VertexId:
    """Root of the subtree matched by variable ``x`` (bow-tie assumed)."""
    if isinstance(t, Var):
        if t.name != x:
            raise RuleError(f"variable {x!r} does not occur in the term")
        return v
    for arg, c in zip(t.args, s.forest.children(v)):
        if any(w.name == x for w in term_vars(arg)):
            return get_var_tree(s, arg, c, x)
    raise RuleError(f"variable {x!r} does not occur in the term")


# -- term-to-graph construction ---------------------------------------------------


@dataclass
class _VarLeaf:
    var: str
    sort: str
    placeholder: EdgeId


@dataclass
class _OpNode:
    op: str
    sort: str
    slot_nodes: list[tuple[NodeId, ...]]
    children: list["_Build"]
    delta: tuple[NodeId, ...]


_Build = _VarLeaf | _OpNode


@dataclass
class _Design:
    nodes: dict[NodeId, NodeInfo]
    edges: dict[EdgeId, EdgeInfo]
    delta: tuple[NodeId, ...]
    eta: dict[str, EdgeId]
    build: _Build

    def rename(self, mapping: Mapping[NodeId, NodeId]) -> None:
        self.nodes = {mapping.get(n, n): info for n, info in self.nodes.items()}
        self.edges = {e: EdgeInfo(i.tau, tuple(mapping.get(n, n) for n in i.nodes), i.theta, i.name)
                      for e, i in self.edges.items()}
        self.delta = tuple(mapping.get(n, n) for n in self.delta)
        _rename_build(self.build, mapping)


def _rename_build(b: _Build, mapping: Mapping[NodeId, NodeId]) -> None:
    if isinstance(b, _OpNode):
        b.slot_nodes = [tuple(mapping.get(n, n) for n in t) for t in b.slot_nodes]
        b.delta = tuple(mapping.get(n, n) for n in b.delta)
        for c in b.children:
            _rename_build(c, mapping)


def _design(t: Term, tg: TypeGraph, productions: Mapping[str, Production],
            alloc: Allocator) -> _Design:
    if isinstance(t, Var):
        sig = tg.signature(t.sort)
        nodes = {}
        attach = []
        for nt in sig:
            n = alloc.ids.fresh()
            nodes[n] = NodeInfo(nt, alloc.names.fresh("n"))
            attach.append(n)
        e = alloc.ids.fresh()
        edges = {e: EdgeInfo(t.sort, tuple(attach), 1, alloc.names.fresh("e"))}
        return _Design(nodes, edges, tuple(attach), {t.name: e}, _VarLeaf(t.name, t.sort, e))

    p = productions[t.op]
    copy: dict[NodeId, NodeId] = {}
    nodes: dict[NodeId, NodeInfo] = {}
    for rn in p.rhs.node_ids:
        fresh = alloc.ids.fresh()
        copy[rn] = fresh
        nodes[fresh] = NodeInfo(p.rhs.node_type(rn), alloc.names.fresh(p.rhs.node(rn).name or "n"))
    slot_nodes = [tuple(copy[n] for n in p.rhs.attachment(re)) for re in p.rhs_order]

    edges: dict[EdgeId, EdgeInfo] = {}
    eta: dict[str, EdgeId] = {}
    children: list[_Build] = []
    for j, arg in enumerate(t.args):
        child = _design(arg, tg, productions, alloc)
        if len(child.delta) != len(slot_nodes[j]):
            raise ReconfigError(
                f"{t.op}: slot {j + 1} has {len(slot_nodes[j])} attachment points, "
                f"sub-design exposes {len(child.delta)}")
        child.rename(dict(zip(child.delta, slot_nodes[j])))
        for n, info in child.nodes.items():
            nodes.setdefault(n, info)
        edges.update(child.edges)
        eta.update(child.eta)
        children.append(child.build)
    delta = tuple(copy[p.interface[l]] for l in p.lhs_nodes)
    build = _OpNode(t.op, t.sort, slot_nodes, children, delta)
    return _Design(nodes, edges, delta, eta, build)


def term_to_graph(t: Term, tg: TypeGraph, productions: Mapping[str, Production],
                  alloc: Allocator | None = None) -> tuple[Graph, tuple[NodeId, ...], dict[str, EdgeId]]:
    """Build the design a term denotes: a graph with one placeholder edge
    per variable, the ordered interface nodes, and the variable->placeholder
    map."""
    alloc = alloc if alloc is not None else Allocator()
    d = _design(t, tg, productions, alloc)
    # drop nodes that no edge references and that are not interface nodes
    used = {n for i in d.edges.values() for n in i.nodes} | set(d.delta)
    return (Graph({n: info for n, info in d.nodes.items() if n in used}, d.edges),
            d.delta, dict(d.eta))


# -- application -------------------------------------------------------------------


def _occurrence_map(boundary: tuple[NodeId, ...], targets: tuple[NodeId, ...],
                    what: str) -> dict[NodeId, NodeId]:
    if len(boundary) != len(targets):
        raise ReconfigError(f"{what}: boundary has {len(boundary)} nodes, "
                            f"placeholder expects {len(targets)}")
    mapping: dict[NodeId, NodeId] = {}
    for b, t in zip(boundary, targets):
        if mapping.get(b, t) != t:
            raise ReconfigError(f"{what}: boundary node appears at positions mapping "
                                "to different attachment points")
        mapping[b] = t
    return mapping


def apply_reconfiguration(s: TrackedSystem, rule: ReconfigRule, root: VertexId,
                          tg: TypeGraph, productions: Mapping[str, Production]) -> TrackedSystem:
    """Rewrite the region recorded by the matched subtree.

    The variables' subgraphs keep every edge id; they are re-glued onto the
    shape demanded by the rule's right side.  The matched subtree is
    replaced by a fresh one mirroring the right side, reusing the variable
    subtrees unchanged; fresh internal vertices receive synthetic records.
    """
    if not s.forest.has_vertex(root):
        raise ReconfigError(f"vertex {root} is not in the forest")
    root_rec = s.record(root)
    if root_rec is None or root_rec.tau != rule.lhs.sort:
        raise ReconfigError("subtree sort does not match the rule")
    if not bow_tie(s, rule.lhs, root):
        raise ReconfigError("rule does not match at this vertex (stale match?)")
    if not all(s.graph.has_node(n) for n in root_rec.nodes):
        raise ReconfigError("the matched subtree's boundary nodes are no longer in the graph")

    lhs_vars = {v.name: v for v in term_vars(rule.lhs)}
    var_root: dict[str, VertexId] = {
        x: get_var_tree(s, rule.lhs, root, x) for x in lhs_vars}
    var_edges: dict[str, list[EdgeId]] = {}
    for x, vr in var_root.items():
        edges = []
        for leaf in s.forest.leaves_under(vr):
            rec = s.record(leaf)
            if rec is None:
                if s.is_tombstone(leaf):
                    continue
                raise ForestIntegrityError(f"leaf {leaf} lacks an edge record")
            edges.append(rec.edge)
        var_edges[x] = edges

    matched_edges = {e for edges in var_edges.values() for e in edges}
    for leaf in s.forest.leaves_under(root):
        rec = s.record(leaf)
        if rec is None and not s.is_tombstone(leaf):
            raise ForestIntegrityError(f"leaf {leaf} lacks an edge record")
        if rec is not None:
            matched_edges.add(rec.edge)

    rhs_vars = [v.name for v in term_vars(rule.rhs)]
    for x in rhs_vars:
        if not var_edges[x]:
            raise ReconfigError(
                f"variable {x} matched an empty design; nothing to glue into its place")

    alloc = s.alloc.clone()
    design = _design(rule.rhs, tg, productions, alloc)

    # Per-variable positional gluing onto the placeholder's attachment, then
    # the whole construction is glued onto the matched root's boundary.
    outer = _occurrence_map(design.delta, root_rec.nodes, "interface")
    var_map: dict[str, dict[NodeId, NodeId]] = {}
    for x in rhs_vars:
        boundary = s.record(var_root[x]).nodes
        targets = design.edges[design.eta[x]].nodes
        m = _occurrence_map(boundary, targets, f"variable {x}")
        var_map[x] = {b: outer.get(t, t) for b, t in m.items()}

    # -- rewire the graph --------------------------------------------------

    survivors = [e for e in s.graph.edge_ids if e not in matched_edges]
    final_edges: dict[EdgeId, EdgeInfo] = {e: s.graph.edge(e) for e in survivors}
    for x in rhs_vars:
        m = var_map[x]
        for e in var_edges[x]:
            info = s.graph.edge(e)
            final_edges[e] = EdgeInfo(info.tau, tuple(m.get(n, n) for n in info.nodes),
                                      info.theta, info.name)

    reused = {var_root[x] for x in rhs_vars}
    doomed = set(s.forest.subtree(root))
    for r in reused:
        doomed -= set(s.forest.subtree(r))

    # records inside reused subtrees follow their subgraph's rewiring
    planned_records: dict[VertexId, tuple[NodeId, ...]] = {}
    for x in rhs_vars:
        m = var_map[x]
        for v in s.forest.subtree(var_root[x]):
            rec = s.env1.get(v)
            if rec is not None:
                planned_records[v] = tuple(m.get(n, n) for n in rec.nodes)

    # garbage-collect nodes of the replaced region that nothing references:
    # kept are nodes untouched by it, the region's interface, every node a
    # final edge uses, and nodes still named by surviving history records
    referenced = {n for info in final_edges.values() for n in info.nodes}
    touched_by_matched = {n for e in matched_edges for n in s.graph.attachment(e)}
    keep = (set(s.graph.node_ids) - touched_by_matched) | set(root_rec.nodes) | referenced
    for v, rec in s.env1.items():
        if v in doomed:
            continue
        keep.update(planned_records.get(v, rec.nodes))
    final_nodes: dict[NodeId, NodeInfo] = {
        n: s.graph.node(n) for n in s.graph.node_ids if n in keep}
    for n, info in design.nodes.items():
        if n in referenced and n not in final_nodes:
            final_nodes[n] = info
    graph2 = Graph(final_nodes, final_edges)

    # -- forest surgery ----------------------------------------------------

    env1 = {v: rec for v, rec in s.env1.items() if v not in doomed}
    env2 = {v: p for v, p in s.env2.items() if v not in doomed}

    def node_name(n: NodeId) -> str:
        if graph2.has_node(n):
            return graph2.node_name(n)
        if s.graph.has_node(n):
            return s.graph.node_name(n)
        info = design.nodes.get(n)
        return (info.name if info and info.name else f"n{n}")

    for v, nodes in planned_records.items():
        env1[v] = replace(env1[v], nodes=nodes,
                          node_names=tuple(node_name(n) for n in nodes))

    new_children: dict[VertexId, tuple[VertexId, ...]] = {}

    def build_vertices(b: _Build, record_nodes: tuple[NodeId, ...]) -> VertexId:
        if isinstance(b, _VarLeaf):
            return var_root[b.var]
        v = alloc.ids.fresh()
        env2[v] = b.op
        nodes = tuple(outer.get(n, n) for n in record_nodes)
        env1[v] = EdgeRecord(alloc.ids.fresh(), nodes, b.sort, alloc.names.fresh("e"),
                             tuple(node_name(n) for n in nodes), synthetic=True)
        if b.children:
            kids = tuple(build_vertices(child, slot)
                         for child, slot in zip(b.children, b.slot_nodes))
        else:
            kids = (alloc.ids.fresh(),)  # tombstone slot of a zero-arity operation
        new_children[v] = kids
        return v

    if isinstance(design.build, _VarLeaf):
        new_root = var_root[design.build.var]
    else:
        new_root = build_vertices(design.build, root_rec.nodes)

    forest2 = s.forest.with_subtree_replaced(root, new_root, new_children, reused)

    out = TrackedSystem(graph2, forest2, env1, env2,
                        s.log + (ReconfigEvent(rule.name, root, new_root),), alloc, s.initial)
    out.check_integrity()
    return out
