"""Weakest preconditions: push a postcondition backwards through a
production, then let the brute-force oracle confirm the contract is valid.

The payment production creates a bank edge on a fresh internal point.  If
afterwards every bank edge must share its second point with every cashier
edge, then beforehand there must be no cashier edge at all -- the fresh
point cannot coincide with anything pre-existing.
"""
from adr import weakest_precondition
from adr.ids import Allocator
from adr.logic import format_formula, parse_formula
from adr.productions import AssertedProduction
from adr.scenarios import pay_production, travel_vocabulary
from adr.wp import check_validity_oracle, semantically_equivalent, weakness_probe

alloc = Allocator()
tg = travel_vocabulary()
pay = pay_production(alloc)
post = parse_formula("forall B(x, y). forall C(z). y = z")

result = weakest_precondition(pay, post)
print("postcondition :", format_formula(post))
print("precondition  :", format_formula(result.formula))
print("\nhow each conjunct arose:")
for note in result.notes:
    print("  -", note)

short = parse_formula("no C", tg)
print("\nequivalent to plain 'no C' over all graphs up to 4 edges?",
      semantically_equivalent(result.formula, short, tg, max_edges=4))

pi = AssertedProduction(pay, pre=result.formula, pre_assign=result.assignment, post=post)
report = check_validity_oracle(pi, tg, bound=3)
print("\nbrute-force validity check:", report)

too_strong = AssertedProduction(pay, pre=parse_formula("bot"), post=post)
evidence = weakness_probe(too_strong, tg, bound=2)
print("\na 'bot' precondition is sound but needlessly strong;")
print(f"the probe found {len(evidence)} graph(s) it rejects although every "
      "application would satisfy the postcondition")
