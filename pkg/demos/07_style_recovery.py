"""The recovery loop end to end: a server fails, the invariant breaks, the
engine proposes the repair whose weakest precondition holds, the designer
accepts, and the invariant is model-checked again before declaring victory.
"""
from adr import (current_graph, find_matches, init_tracking, parse_formula,
                 record_production, satisfies, start_recovery)
from adr.ids import Allocator
from adr.logic import format_formula
from adr.recovery import (AcceptProduction, decide, propose_productions,
                          run_auto, session_payload)
from adr.scenarios import (FAILOVER_INVARIANT, failover_graph,
                           failover_productions, failover_vocabulary)

alloc = Allocator()
tg = failover_vocabulary()
prods = failover_productions(alloc)
invariant = parse_formula(FAILOVER_INVARIANT, tg)

s = init_tracking(failover_graph(alloc), tg)
print("healthy cluster:", s.graph)
print("invariant:", format_formula(invariant), "->", satisfies(s.graph, invariant, {}))

bad = prods["badServer"]
s = record_production(s, bad, find_matches(s.graph, bad)[0])
print("\nafter the failure:", s.graph)

session = start_recovery(s, invariant, tg, prods)
print("session state:", session.state.value)
print("violation witness:",
      {v: s.graph.node_name(n) for v, n in session.witness.assignment.items()})

session = propose_productions(session)
print("\ncandidates (production, matched edge, computed precondition):")
for c in session.candidates:
    print(f"  {c.production} @ {session.working_graph.edge_name(c.match.edge)}: "
          f"{format_formula(c.psi)}")

chosen = session.candidates[0]
session = decide(session, AcceptProduction(chosen.production, chosen.match.edge))
print("\naccepted", chosen.production, "->", session.state.value)
print("recovered graph:", current_graph(session.system))
print("invariant re-checked:", satisfies(current_graph(session.system), invariant, {}))

print("\nthe same run, fully automatic:")
auto = run_auto(start_recovery(s, invariant, tg, prods))
print("  auto finished:", auto.state.value,
      "after decisions:", [type(d).__name__ for d in auto.decision_log])
print("\nsession payload as the console sees it:")
for key, value in session_payload(auto).items():
    print(f"  {key}: {value}")
