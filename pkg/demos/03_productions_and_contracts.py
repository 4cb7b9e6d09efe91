"""Design productions: replace one replaceable edge by a fresh right side.

The booking production turns a flight-list edge into a payment/flight
chain.  A contract on it (the two attachment points must differ) refuses
the self-looped configuration and reports exactly which nodes clashed.
"""
from adr import apply_asserted, apply_production, find_matches
from adr.ids import Allocator
from adr.logic import parse_formula
from adr.productions import AssertedProduction
from adr.scenarios import (book_flight_production, booking_chain_graph,
                           spread_chain_graph)

alloc = Allocator()
book = book_flight_production(alloc)
print("production:", book)
print("  left side :", book.lhs)
print("  right side:", book.rhs)

g = spread_chain_graph(alloc)
print("\nhost graph:", g)
m = find_matches(g, book)[0]
print("match: edge", g.edge_name(m.edge))
g2, copy = apply_production(g, book, m, alloc)
print("after applying bookFlight:", g2)
print("interface points u1/u3 preserved, internal point fresh")

print("\nnow with a contract: forall Fls(x, y). x != y")
pi = AssertedProduction(book, pre=parse_formula("forall Fls(x, y). x != y"))

loop = booking_chain_graph(alloc)
print("self-looped host:", loop)
outcome = apply_asserted(loop, pi, find_matches(loop, book)[0], alloc)
print("refused?", not outcome.ok)
print("reason:", outcome.violation.message)

ok = apply_asserted(g, pi, find_matches(g, book)[0], alloc)
print("\nspread host accepted?", ok.ok)
print("result:", ok.graph)
