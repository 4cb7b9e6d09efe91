"""Typed hypergraphs in five minutes.

Build the travel vocabulary, type a small configuration over it, break the
typing in a few ways, and hunt for isomorphic copies.
"""
from adr import GraphBuilder, find_isomorphism, validate_graph
from adr.dot import graph_dot
from adr.ids import Allocator
from adr.scenarios import flight_board, travel_vocabulary

alloc = Allocator()
tg = travel_vocabulary()
print("vocabulary:", ", ".join(f"{et}({', '.join(sig)})" for et, sig in tg.edge_types.items()))

g = flight_board(alloc)
print("\nconfiguration:", g)
print("well-typed?", validate_graph(g, tg).ok)

print("\nbreaking the typing: an Fls edge with only one tentacle ->")
b = GraphBuilder(alloc)
u = b.add_node("b", "u")
b.add_edge("Fls", (u,), name="stub")
print(" ", validate_graph(b.graph(), tg))

print("\nisomorphism search is display-name-blind:")
b2 = GraphBuilder(alloc)
w1 = b2.add_node("b", "a1")
w2 = b2.add_node("b", "a2")
w3 = b2.add_node("b", "a3")
w4 = b2.add_node("b", "a4")
b2.add_edge("FF", (w2, w1), theta=0, name="finder")
b2.add_edge("Fls", (w3, w2), theta=1, name="listA")
b2.add_edge("Fls", (w4, w2), theta=1, name="listB")
iso = find_isomorphism(g, b2.graph())
print("  found a renaming:", iso is not None)

print("\nDOT export (render with `dot -Tpng`):\n")
print(graph_dot(g))
