"""Command-line front end over workspace files.

All commands operate on the workspace named by --workspace (or the
ADR_WORKSPACE environment variable); mutating commands write the file back.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import dot, logic, recovery, scenarios, wp as wp_mod
from .productions import AssertedProduction, apply_asserted, find_matches
from .recovery import AcceptProduction, Parse, SessionState
from .reconfig import ReconfigError, apply_reconfiguration, find_rule_matches
from .tracking import record_production, render_forest
from .workspace import (Workspace, WorkspaceFormatError, load_workspace,
                        save_workspace)


def _env_default(var: str, fallback):
    return os.environ.get(var, fallback)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="adr",
        description="Typed-hypergraph design rewriting: apply productions, "
                    "compute weakest preconditions, reconfigure, recover, serve.")
    top.add_argument("--workspace", default=_env_default("ADR_WORKSPACE", "workspace.json"),
                     help="workspace file (env ADR_WORKSPACE)")
    top.add_argument("--iso-bound", type=int,
                     default=int(_env_default("ADR_ISO_BOUND", "4")),
                     help="edge bound for brute-force checks (env ADR_ISO_BOUND)")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="load the workspace and report integrity")

    p = sub.add_parser("apply", help="apply a production to a system edge")
    p.add_argument("production")
    p.add_argument("edge", type=int)
    p.add_argument("--system", default=None)

    p = sub.add_parser("wp", help="compute the weakest precondition of a production")
    p.add_argument("production")
    p.add_argument("formula", help="postcondition text, or @file")
    p.add_argument("--check", action="store_true",
                   help="also run the brute-force validity check")

    p = sub.add_parser("reconfigure", help="apply a reconfiguration rule")
    p.add_argument("rule")
    p.add_argument("--at", type=int, default=None, help="forest vertex to rewrite at")
    p.add_argument("--list", action="store_true", help="only list the matches")
    p.add_argument("--system", default=None)

    p = sub.add_parser("recover", help="run a style-recovery session")
    p.add_argument("--invariant", default=None,
                   help="invariant text or @file (default: the workspace invariant)")
    p.add_argument("--auto", action="store_true", help="accept the first candidate each round")
    p.add_argument("--system", default=None)

    p = sub.add_parser("serve", help="serve the HTTP session API")
    p.add_argument("--port", type=int, default=int(_env_default("ADR_PORT", "8722")))
    p.add_argument("--host", default="127.0.0.1")

    p = sub.add_parser("show", help="print a system's graph, forest or DOT export")
    p.add_argument("what", choices=("graph", "forest", "graph.dot", "forest.dot"))
    p.add_argument("--system", default=None)

    p = sub.add_parser("demo-workspace", help="write a ready-made example workspace")
    p.add_argument("path")
    p.add_argument("--kind", choices=("travel", "failover"), default="failover")

    return top


def _load(args) -> Workspace:
    try:
        return load_workspace(args.workspace)
    except FileNotFoundError:
        sys.exit(f"workspace file not found: {args.workspace}")
    except WorkspaceFormatError as exc:
        sys.exit(f"cannot load workspace: {exc}")


def _pick_system(ws: Workspace, name):
    if name is None:
        if len(ws.systems) != 1:
            sys.exit("several systems in the workspace; pick one with --system "
                     f"({', '.join(sorted(ws.systems))})")
        return next(iter(ws.systems))
    if name not in ws.systems:
        sys.exit(f"unknown system {name!r}")
    return name


def _formula_arg(text: str, ws: Workspace):
    if text.startswith("@"):
        text = Path(text[1:]).read_text().strip()
    elif Path(text).is_file():
        text = Path(text).read_text().strip()
    return logic.parse_formula(text, ws.type_graph)


def cmd_validate(args) -> int:
    ws = _load(args)
    for name, s in ws.systems.items():
        s.check_integrity()
        print(f"system {name}: {len(s.graph)} edges, {len(s.log)} events, integrity ok")
    print(f"{len(ws.asserted)} productions, {len(ws.rules)} rules: workspace ok")
    return 0


def cmd_apply(args) -> int:
    ws = _load(args)
    sid = _pick_system(ws, args.system)
    s = ws.systems[sid]
    if args.production not in ws.asserted:
        sys.exit(f"unknown production {args.production!r}")
    ap = ws.asserted[args.production]
    m = next((m for m in find_matches(s.graph, ap.production) if m.edge == args.edge), None)
    if m is None:
        matches = find_matches(s.graph, ap.production)
        where = ", ".join(f"{m.edge} ({s.graph.edge_name(m.edge)})" for m in matches) or "none"
        sys.exit(f"{args.production} does not match edge {args.edge}; matchable edges: {where}")
    outcome = apply_asserted(s.graph, ap, m, s.alloc.clone())
    if not outcome.ok:
        sys.exit(f"refused: {outcome.violation.message}")
    ws.systems[sid] = record_production(s, ap.production, m)
    save_workspace(ws, args.workspace)
    print(f"applied {args.production} at edge {args.edge}; "
          f"system {sid} now has {len(ws.systems[sid].graph)} edges")
    return 0


def cmd_wp(args) -> int:
    ws = _load(args)
    if args.production not in ws.asserted:
        sys.exit(f"unknown production {args.production!r}")
    p = ws.asserted[args.production].production
    post = _formula_arg(args.formula, ws)
    result = wp_mod.weakest_precondition(p, post)
    print(logic.format_formula(result.formula))
    if result.assignment:
        binding = ", ".join(f"{v} -> node {n} of the left side"
                            for v, n in sorted(result.assignment.items()))
        print(f"free variables bound by the match: {binding}")
    for note in result.notes:
        print(f"  # {note}")
    if args.check:
        pi = AssertedProduction(p, pre=result.formula, pre_assign=result.assignment, post=post)
        report = wp_mod.check_validity_oracle(pi, ws.type_graph, bound=args.iso_bound,
                                              cap=max(args.iso_bound, 4))
        print(f"validity check: {report!r}")
        return 0 if report.ok else 1
    return 0


def cmd_reconfigure(args) -> int:
    ws = _load(args)
    sid = _pick_system(ws, args.system)
    s = ws.systems[sid]
    if args.rule not in ws.rules:
        sys.exit(f"unknown rule {args.rule!r}")
    rule = ws.rules[args.rule]
    matches = find_rule_matches(s, rule)
    if args.list:
        for v in matches:
            print(f"vertex {v}: {s.vertex_label(v)}")
        if not matches:
            print("no matches")
        return 0
    target = args.at if args.at is not None else (matches[0] if matches else None)
    if target is None:
        sys.exit(f"rule {args.rule} matches nowhere in system {sid}")
    try:
        ws.systems[sid] = apply_reconfiguration(s, rule, target, ws.type_graph, ws.productions)
    except ReconfigError as exc:
        sys.exit(f"refused: {exc}")
    save_workspace(ws, args.workspace)
    print(f"applied rule {args.rule} at vertex {target}")
    return 0


def cmd_recover(args) -> int:
    ws = _load(args)
    sid = _pick_system(ws, args.system)
    inv = (_formula_arg(args.invariant, ws) if args.invariant is not None else ws.invariant)
    if inv is None:
        sys.exit("no invariant given and none stored in the workspace")
    session = recovery.start_recovery(ws.systems[sid], inv, ws.type_graph, ws.productions)
    if session.state is SessionState.RECOVERED:
        print("style invariant already holds; nothing to recover")
        return 0
    if args.auto:
        session = recovery.run_auto(session)
    else:
        session = _interactive_loop(session)
    print(f"session finished: {session.state.value}")
    if session.state is SessionState.RECOVERED:
        ws.systems[sid] = session.system
        save_workspace(ws, args.workspace)
        print(f"system {sid} updated ({len(session.decision_log)} decisions)")
        return 0
    return 1


def _interactive_loop(session):
    while session.state not in (SessionState.RECOVERED, SessionState.ABANDONED):
        if session.state is SessionState.VIOLATED:
            session = recovery.propose_productions(session)
            continue
        print(f"\nworking condition: {logic.format_formula(session.condition)}")
        for i, c in enumerate(session.candidates):
            g = session.working_graph
            print(f"  [{i}] apply {c.production} at edge {c.match.edge} ({g.edge_name(c.match.edge)})")
        subs = session.parse_candidates()
        for sub in subs:
            print(f"  [p{sub.parent}] fold vertex {sub.parent} "
                  f"({session.system.vertex_label(sub.parent)})")
        print("  [i<N>] iterate on candidate N      [q] abandon")
        answer = input("> ").strip()
        try:
            if answer == "q":
                session = recovery.decide(session, recovery.Abandon())
            elif answer.startswith("p"):
                session = recovery.decide(session, Parse(int(answer[1:])))
            elif answer.startswith("i"):
                c = session.candidates[int(answer[1:])]
                session = recovery.decide(session, recovery.Iterate(c.production, c.match.edge))
            else:
                c = session.candidates[int(answer)]
                session = recovery.decide(session, AcceptProduction(c.production, c.match.edge))
        except (ValueError, IndexError, recovery.SessionError) as exc:
            print(f"cannot do that: {exc}")
    return session


def cmd_serve(args) -> int:
    from .server import serve

    ws = _load(args)
    print(f"serving {args.workspace} on http://{args.host}:{args.port}")
    serve(ws, args.port, args.workspace, args.host)
    return 0


def cmd_show(args) -> int:
    ws = _load(args)
    sid = _pick_system(ws, args.system)
    s = ws.systems[sid]
    if args.what == "graph":
        print(s.graph)
    elif args.what == "forest":
        print(render_forest(s))
    elif args.what == "graph.dot":
        print(dot.graph_dot(s.graph))
    else:
        print(dot.forest_dot(s))
    return 0


def cmd_demo_workspace(args) -> int:
    ws = (scenarios.build_travel_workspace() if args.kind == "travel"
          else scenarios.build_failover_workspace())
    save_workspace(ws, args.path)
    print(f"wrote {args.kind} workspace to {args.path}")
    return 0


_COMMANDS = {
    "validate": cmd_validate,
    "apply": cmd_apply,
    "wp": cmd_wp,
    "reconfigure": cmd_reconfigure,
    "recover": cmd_recover,
    "serve": cmd_serve,
    "show": cmd_show,
    "demo-workspace": cmd_demo_workspace,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except logic.FormulaError as exc:
        sys.exit(f"bad formula: {exc}")


if __name__ == "__main__":
    sys.exit(main())
