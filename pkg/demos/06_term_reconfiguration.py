"""Term-level reconfiguration: rules match derivation trees, not raw graphs.

The client-move rule brF(x, bookF(y, z)) -> brF(bookF(x, z), y) swaps which
flight alternative carries the booked client.  The client subgraph (here: a
doubled client) keeps every edge id; it is re-glued, not rebuilt.
"""
from adr import (apply_reconfiguration, find_rule_matches, render_forest,
                 term_to_graph)
from adr.ids import Allocator
from adr.reconfig import format_rule, term_vars, validate_rule, Signature
from adr.scenarios import (CLIENT_MOVE_RULE_TEXT, client_move_scenario,
                           travel_vocabulary)

alloc = Allocator()
s, prods, rule, bystander = client_move_scenario(alloc)
tg = travel_vocabulary()

print("rule:", format_rule(rule))
report = validate_rule(rule, Signature(tg, prods))
print("valid?", report.ok, "| same sort (style preserving)?", report.same_sort)

print("\nthe design a term denotes, with placeholder edges at the variables:")
g_t, delta, eta = term_to_graph(rule.rhs, tg, prods, alloc)
print("  gamma(rhs) =", g_t)
print("  interface:", [g_t.node_name(n) for n in delta])
print("  placeholders:", {x: g_t.edge_name(e) for x, e in eta.items()})

print("\ntracked system before:")
print(render_forest(s))
print("graph:", s.graph)

(root,) = find_rule_matches(s, rule)
print(f"\nthe rule matches one subtree, rooted at vertex {root} "
      f"{s.vertex_label(root)}; variables absorb: "
      f"{[v.name for v in term_vars(rule.lhs)]}")

s2 = apply_reconfiguration(s, rule, root, tg, prods)
print("\nafter the move:")
print("graph:", s2.graph)
print("(compare edge names: f1/f3 and both clients kept their identities,",
      "the bystander fz is untouched)")
print("\nforest after surgery (fresh vertices carry synthetic records, *):")
print(render_forest(s2))
