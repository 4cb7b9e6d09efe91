"""Tracking forests: every production application is recorded at the leaf
owning the consumed edge, so current edges always biject with the leaves.

Two browsing steps on a single flight edge give the classic two-level
derivation tree; the rendered labels show edge, attachment and production.
"""
from adr import current_graph, find_matches, record_production, render_forest
from adr.dot import forest_dot
from adr.ids import Allocator
from adr.scenarios import browse_flights_production, single_flight_system

alloc = Allocator()
brf = browse_flights_production(alloc)
s = single_flight_system(alloc)
print("seed graph:", s.graph)
print("forest:\n" + render_forest(s))

s = record_production(s, brf, find_matches(s.graph, brf)[0])
print("\nafter browsing the seed edge:")
print(render_forest(s))

f2 = next(e for e in s.graph.edge_ids if s.graph.edge_name(e) == "f2")
s = record_production(s, brf, next(m for m in find_matches(s.graph, brf) if m.edge == f2))
print("\nafter browsing the second alternative:")
print(render_forest(s))
print("\ncurrent graph (rebuilt from the leaves and self-checked):")
print(current_graph(s))

print("\nevent log:", [f"{ev.production}@{ev.edge}" for ev in s.log])
print("\nDOT rendering of the forest:\n")
print(forest_dot(s))
