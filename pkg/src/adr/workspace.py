"""Workspace files: one JSON document holding the vocabulary, productions
(with optional contracts), reconfiguration rules, the style invariant and
any number of tracked systems.

A tracked system is persisted as its initial graph plus the event log; the
current graph is stored alongside purely as a checksum.  Loading replays
the log, which both reconstructs the forest/environment exactly (fresh ids
are allocated deterministically) and verifies the file's consistency.

Serialisation is canonical: dictionaries are emitted in a fixed key order,
so ``save(load(x))`` is a normal form.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from . import logic
from .graphs import EdgeInfo, Graph, NodeInfo, TypeGraph
from .productions import AssertedProduction, Match, Production, find_matches
from .recovery import TwoTierSubtree, parse_system
from .reconfig import (ReconfigRule, Signature, apply_reconfiguration, format_rule,
                       parse_rule, validate_rule)
from .tracking import (ParseEvent, ProductionEvent, ReconfigEvent, TrackedSystem,
                       init_tracking, record_production)

FORMAT_NAME = "adr-workspace"
FORMAT_VERSION = 1


class WorkspaceFormatError(Exception):
    """A workspace file that does not parse, with a field path diagnosis."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def _need(obj: Mapping, key: str, where: str) -> Any:
    if key not in obj:
        raise WorkspaceFormatError(where, f"missing field {key!r}")
    return obj[key]


@dataclass
class Workspace:
    type_graph: TypeGraph
    asserted: dict[str, AssertedProduction] = field(default_factory=dict)
    rules: dict[str, ReconfigRule] = field(default_factory=dict)
    invariant: logic.Formula | None = None
    systems: dict[str, TrackedSystem] = field(default_factory=dict)

    @property
    def productions(self) -> dict[str, Production]:
        return {name: ap.production for name, ap in self.asserted.items()}

    def signature(self) -> Signature:
        return Signature(self.type_graph, self.productions)


# -- graph <-> json -----------------------------------------------------------


def graph_to_json(g: Graph) -> dict:
    return {
        "nodes": [{"id": n, "tau": g.node_type(n), "name": g.node(n).name}
                  for n in g.node_ids],
        "edges": [{"id": e, "tau": g.edge_type(e), "nodes": list(g.attachment(e)),
                   "theta": g.theta(e), "name": g.edge(e).name}
                  for e in g.edge_ids],
    }


def graph_from_json(d: Mapping, where: str) -> Graph:
    nodes: dict[int, NodeInfo] = {}
    for i, nd in enumerate(_need(d, "nodes", where)):
        w = f"{where}.nodes[{i}]"
        nid = _need(nd, "id", w)
        if nid in nodes:
            raise WorkspaceFormatError(w, f"duplicate node id {nid}")
        nodes[nid] = NodeInfo(_need(nd, "tau", w), nd.get("name"))
    edges: dict[int, EdgeInfo] = {}
    for i, ed in enumerate(_need(d, "edges", where)):
        w = f"{where}.edges[{i}]"
        eid = _need(ed, "id", w)
        if eid in edges:
            raise WorkspaceFormatError(w, f"duplicate edge id {eid}")
        theta = _need(ed, "theta", w)
        if theta not in (0, 1):
            raise WorkspaceFormatError(w, f"theta must be 0 or 1, got {theta!r}")
        edges[eid] = EdgeInfo(_need(ed, "tau", w), tuple(_need(ed, "nodes", w)),
                              theta, ed.get("name"))
    return Graph(nodes, edges)


# -- workspace <-> json ---------------------------------------------------------


def _production_to_json(ap: AssertedProduction) -> dict:
    p = ap.production
    out = {
        "name": p.name,
        "lhs": graph_to_json(p.lhs),
        "rhs": graph_to_json(p.rhs),
        "interface": {str(l): r for l, r in p.interface.items()},
        "rhs_order": list(p.rhs_order),
    }
    if ap.pre != logic.TOP or ap.pre_assign:
        out["pre"] = logic.format_formula(ap.pre)
        out["pre_assign"] = {v: n for v, n in sorted(ap.pre_assign.items())}
    if ap.post != logic.TOP or ap.post_assign:
        out["post"] = logic.format_formula(ap.post)
        out["post_assign"] = {v: n for v, n in sorted(ap.post_assign.items())}
    return out


def _production_from_json(d: Mapping, tg: TypeGraph, where: str) -> AssertedProduction:
    from .graphs import validate_graph
    from .productions import ProductionError

    name = _need(d, "name", where)
    lhs = graph_from_json(_need(d, "lhs", where), f"{where}.lhs")
    rhs = graph_from_json(_need(d, "rhs", where), f"{where}.rhs")
    for part, g in (("lhs", lhs), ("rhs", rhs)):
        report = validate_graph(g, tg)
        if not report.ok:
            raise WorkspaceFormatError(f"{where}.{part}", "; ".join(report.violations))
    interface = {int(l): r for l, r in _need(d, "interface", where).items()}
    try:
        p = Production(name, lhs, rhs, interface, tuple(_need(d, "rhs_order", where)))
        return AssertedProduction(
            p,
            pre=logic.parse_formula(d["pre"], tg) if "pre" in d else logic.TOP,
            pre_assign=d.get("pre_assign", {}),
            post=logic.parse_formula(d["post"], tg) if "post" in d else logic.TOP,
            post_assign=d.get("post_assign", {}),
        )
    except (ProductionError, logic.FormulaError) as exc:
        raise WorkspaceFormatError(where, str(exc)) from exc


def _event_to_json(ev) -> dict:
    if isinstance(ev, ProductionEvent):
        return {"kind": "production", "production": ev.production, "edge": ev.edge}
    if isinstance(ev, ReconfigEvent):
        return {"kind": "reconfig", "rule": ev.rule, "root": ev.root, "new_root": ev.new_root}
    if isinstance(ev, ParseEvent):
        return {"kind": "parse", "parent": ev.parent, "new_edge": ev.new_edge}
    raise WorkspaceFormatError("event", f"unknown event {ev!r}")


def workspace_to_json(ws: Workspace) -> dict:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "type_graph": {
            "node_types": list(ws.type_graph.node_types),
            "edge_types": {k: list(v) for k, v in ws.type_graph.edge_types.items()},
        },
        "productions": [_production_to_json(ws.asserted[n]) for n in ws.asserted],
        "rules": [format_rule(ws.rules[n]) for n in ws.rules],
        "invariant": logic.format_formula(ws.invariant) if ws.invariant is not None else None,
        "systems": {name: system_to_json(s) for name, s in ws.systems.items()},
    }


def system_to_json(s: TrackedSystem) -> dict:
    return {
        "initial": graph_to_json(s.initial),
        "events": [_event_to_json(ev) for ev in s.log],
        "current": graph_to_json(s.graph),
    }


def replay_events(initial: Graph, events: list[Mapping], ws: Workspace,
                  where: str) -> TrackedSystem:
    """Re-run an event log from the initial graph; ids are re-allocated
    deterministically, so the result is exactly the recorded system."""
    s = init_tracking(initial, ws.type_graph)
    for i, ev in enumerate(events):
        w = f"{where}.events[{i}]"
        kind = _need(ev, "kind", w)
        try:
            if kind == "production":
                name = _need(ev, "production", w)
                if name not in ws.asserted:
                    raise WorkspaceFormatError(w, f"unknown production {name!r}")
                p = ws.asserted[name].production
                edge = _need(ev, "edge", w)
                m = next((m for m in find_matches(s.graph, p) if m.edge == edge), None)
                if m is None:
                    raise WorkspaceFormatError(w, f"production {name!r} does not match edge {edge}")
                s = record_production(s, p, m)
            elif kind == "reconfig":
                name = _need(ev, "rule", w)
                if name not in ws.rules:
                    raise WorkspaceFormatError(w, f"unknown rule {name!r}")
                s = apply_reconfiguration(s, ws.rules[name], _need(ev, "root", w),
                                          ws.type_graph, ws.productions)
            elif kind == "parse":
                s = parse_system(s, TwoTierSubtree(_need(ev, "parent", w)), ws.productions)
            else:
                raise WorkspaceFormatError(w, f"unknown event kind {kind!r}")
        except WorkspaceFormatError:
            raise
        except Exception as exc:
            raise WorkspaceFormatError(w, f"replay failed: {exc}") from exc
    return s


def workspace_from_json(doc: Mapping) -> Workspace:
    if _need(doc, "format", "$") != FORMAT_NAME:
        raise WorkspaceFormatError("$.format", f"not a {FORMAT_NAME} file")
    tg_doc = _need(doc, "type_graph", "$")
    try:
        tg = TypeGraph(_need(tg_doc, "node_types", "$.type_graph"),
                       _need(tg_doc, "edge_types", "$.type_graph"))
    except Exception as exc:
        raise WorkspaceFormatError("$.type_graph", str(exc)) from exc
    ws = Workspace(tg)
    for i, pd in enumerate(_need(doc, "productions", "$")):
        ap = _production_from_json(pd, tg, f"$.productions[{i}]")
        if ap.production.name in ws.asserted:
            raise WorkspaceFormatError(f"$.productions[{i}]",
                                       f"duplicate production {ap.production.name!r}")
        ws.asserted[ap.production.name] = ap
    sig = ws.signature()
    for i, rtext in enumerate(_need(doc, "rules", "$")):
        w = f"$.rules[{i}]"
        try:
            rule = parse_rule(rtext, sig)
        except Exception as exc:
            raise WorkspaceFormatError(w, str(exc)) from exc
        report = validate_rule(rule, sig)
        if not report.ok:
            raise WorkspaceFormatError(w, "; ".join(report.violations))
        ws.rules[rule.name] = rule
    inv = doc.get("invariant")
    if inv is not None:
        try:
            ws.invariant = logic.parse_formula(inv, tg)
        except logic.FormulaError as exc:
            raise WorkspaceFormatError("$.invariant", str(exc)) from exc
    for name, sd in _need(doc, "systems", "$").items():
        w = f"$.systems.{name}"
        initial = graph_from_json(_need(sd, "initial", w), f"{w}.initial")
        s = replay_events(initial, _need(sd, "events", w), ws, w)
        current = graph_from_json(_need(sd, "current", w), f"{w}.current")
        if s.graph != current:
            raise WorkspaceFormatError(
                f"{w}.current", "replaying the event log does not reproduce the stored graph")
        ws.systems[name] = s
    return ws


def save_workspace(ws: Workspace, path: str | Path) -> None:
    Path(path).write_text(json.dumps(workspace_to_json(ws), indent=2) + "\n")


def load_workspace(path: str | Path) -> Workspace:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise WorkspaceFormatError("$", f"not valid JSON: {exc}") from exc
    return workspace_from_json(doc)
