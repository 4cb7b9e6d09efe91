"""The node-equality logic and its model checker.

The coverage formula says: the first attachment point of every D-edge also
carries a Dp-edge.  One of the two example graphs satisfies it, the other
leaves a D-edge uncovered -- and the checker names the culprit.
"""
from adr import parse_formula, satisfies
from adr.ids import Allocator
from adr.logic import format_formula, violation_witness
from adr.scenarios import ADJACENCY_FORMULA, adjacency_examples

alloc = Allocator()
good, bad = adjacency_examples(alloc)
phi = parse_formula(ADJACENCY_FORMULA)

print("formula:   ", format_formula(phi))
print("good graph:", good)
print("bad graph: ", bad)

print("\ngood graph satisfies it:", satisfies(good, phi, {}))
print("bad graph satisfies it: ", satisfies(bad, phi, {}))

witness = violation_witness(bad, phi, {})
print("\nwhy the bad graph fails:")
print("  failing edge trail:", [bad.edge_name(e) for e in witness.edges])
print("  assignment at failure:",
      {v: bad.node_name(n) for v, n in sorted(witness.assignment.items())})

print("\nderived forms parse too:")
for text in ("no Dp", "x = y -> y = x", "exists D(p, q). p = q"):
    from adr.scenarios import adjacency_vocabulary
    parsed = parse_formula(text, adjacency_vocabulary())
    print(f"  {text!r:34} =>  {format_formula(parsed)}")
