from __future__ import annotations

from itertools import combinations_with_replacement, product

import pytest

from adr import scenarios
from adr.graphs import (EdgeInfo, Graph, NodeInfo, TypeGraph, canonical_key,
                        validate_graph)
from adr.logic import (BOT, TOP, And, format_formula, free_vars, parse_formula,
                       satisfies)
from adr.productions import AssertedProduction, find_matches
from adr.wp import (BoundExceededError, check_validity_oracle, enumerate_graphs,
                    semantically_equivalent, weakest_precondition, weakness_probe)

PAYMENT_POST = "forall B(x, y). forall C(z). y = z"
PAYMENT_PRE_DOCUMENTED = ("no C"
                          " & (forall B(x, y). forall C(z). no C)"
                          " & (forall B(x, y). forall C(z). y = z)")


@pytest.fixture
def pay(alloc):
    return scenarios.pay_production(alloc)


@pytest.fixture
def browse(alloc):
    return scenarios.browse_flights_production(alloc)


class TestEnumeration:
    def test_tiny_counts(self):
        tg = TypeGraph(("b",), {"Dp": ("b",)})
        gs = list(enumerate_graphs(tg, 2, max_nodes=4))
        # empty, one loop-free unary edge, two parallel, two separate
        assert len(gs) == 4

    def test_single_binary_type(self):
        tg = TypeGraph(("b",), {"D": ("b", "b")})
        gs = list(enumerate_graphs(tg, 1, max_nodes=4))
        assert len(gs) == 3  # empty, self-loop, plain edge

    def test_all_enumerated_graphs_validate(self, travel_tg):
        for g in enumerate_graphs(travel_tg, 2, max_nodes=4, types=("B", "C")):
            assert validate_graph(g, travel_tg).ok
            assert not [n for n in g.node_ids if not g.incident_edges(n)]

    def test_matches_naive_reference(self):
        tg = TypeGraph(("b",), {"D": ("b", "b"), "Dp": ("b",)})
        max_edges, max_nodes = 3, 4
        fast = {canonical_key(g, respect_theta=False)
                for g in enumerate_graphs(tg, max_edges, max_nodes)}

        combos = [("D", t) for t in product(range(max_nodes), repeat=2)]
        combos += [("Dp", (n,)) for n in range(max_nodes)]
        reference = set()
        for m in range(max_edges + 1):
            for choice in combinations_with_replacement(combos, m):
                used = {n for _, t in choice for n in t}
                if used and used != set(range(max(used) + 1)):
                    continue  # same class reachable with packed node indices
                nodes = {n: NodeInfo("b", f"n{n}") for n in sorted(used)}
                edges = {i: EdgeInfo(tau, t, 1, f"e{i}") for i, (tau, t) in enumerate(choice)}
                reference.add(canonical_key(Graph(nodes, edges), respect_theta=False))
        assert fast == reference


class TestSemanticEquivalence:
    def test_distinguishes(self, travel_tg):
        f1 = parse_formula("no C", travel_tg)
        assert not semantically_equivalent(f1, BOT, travel_tg, max_edges=2)

    def test_documented_redundancy_collapses(self, travel_tg):
        long = parse_formula(PAYMENT_PRE_DOCUMENTED, travel_tg)
        short = parse_formula("no C", travel_tg)
        assert semantically_equivalent(long, short, travel_tg, max_edges=3)

    def test_open_formulas_compare_under_assignments(self, travel_tg):
        f1 = parse_formula("x = y")
        f2 = parse_formula("y = x")
        assert semantically_equivalent(f1, f2, travel_tg, max_edges=2)
        assert not semantically_equivalent(f1, TOP, travel_tg, max_edges=2)


class TestWeakestPrecondition:
    def test_payment_example(self, travel_tg, pay):
        post = parse_formula(PAYMENT_POST)
        result = weakest_precondition(pay, post)
        documented = parse_formula(PAYMENT_PRE_DOCUMENTED, travel_tg)
        assert free_vars(result.formula) == frozenset()
        assert semantically_equivalent(result.formula, documented, travel_tg, max_edges=4)

    def test_notes_carry_provenance(self, pay):
        result = weakest_precondition(pay, parse_formula(PAYMENT_POST))
        assert any("surviving" in n for n in result.notes)
        assert any("instantiated" in n for n in result.notes)

    def test_top_postcondition(self, travel_tg, pay, browse):
        for p in (pay, browse):
            result = weakest_precondition(p, TOP)
            assert semantically_equivalent(result.formula, TOP, travel_tg, max_edges=2)

    def test_unavoidable_postcondition_is_unsatisfiable(self, travel_tg, browse):
        # the rewrite unconditionally creates flight edges, so no
        # precondition can make "no Fl" hold afterwards
        post = parse_formula("no Fl", travel_tg)
        result = weakest_precondition(browse, post)
        assert semantically_equivalent(result.formula, BOT, travel_tg, max_edges=3)

    def test_interface_nodes_become_match_variables(self, alloc):
        good_server = scenarios.good_server_production(alloc)
        tg = scenarios.failover_vocabulary()
        post = parse_formula(scenarios.FAILOVER_INVARIANT, tg)
        result = weakest_precondition(good_server, post)
        # the created server edge satisfies clients sitting on L's second node
        assert result.assignment
        for lnode in result.assignment.values():
            assert good_server.lhs.has_node(lnode)

    def test_distributes_over_conjunction(self, travel_tg, pay):
        f1 = parse_formula(PAYMENT_POST)
        f2 = parse_formula("no C", travel_tg)
        joint = weakest_precondition(pay, And(f1, f2)).formula
        split = And(weakest_precondition(pay, f1).formula,
                    weakest_precondition(pay, f2).formula)
        assert semantically_equivalent(joint, split, travel_tg, max_edges=3)

    def test_bad_assignment_target_rejected(self, pay):
        with pytest.raises(ValueError):
            weakest_precondition(pay, parse_formula("x = y"), {"x": 987654, "y": 987654})

    def test_unassigned_free_variables_survive_symbolically(self, travel_tg, pay):
        # free variables without a right-side binding denote surviving host
        # nodes: the transformation leaves them alone
        result = weakest_precondition(pay, parse_formula("x = y"))
        assert result.formula == parse_formula("x = y")
        assert result.assignment == {}


class TestValidityOracle:
    def test_payment_contract_has_no_counterexample(self, travel_tg, pay):
        post = parse_formula(PAYMENT_POST)
        result = weakest_precondition(pay, post)
        pi = AssertedProduction(pay, pre=result.formula, pre_assign=result.assignment,
                                post=post)
        report = check_validity_oracle(pi, travel_tg, bound=3)
        assert report.ok
        assert report.graphs_checked > 10
        assert report.applications_checked > 0

    def test_bottom_postcondition_fails_immediately(self, travel_tg, pay):
        pi = AssertedProduction(pay, post=BOT)
        report = check_validity_oracle(pi, travel_tg, bound=1)
        assert not report.ok
        cx = report.counterexamples[0]
        assert cx.graph.edge_type(cx.match.edge) == "P"

    def test_trivial_contract_is_valid(self, travel_tg, pay):
        report = check_validity_oracle(AssertedProduction(pay), travel_tg, bound=2)
        assert report.ok

    def test_cap_is_enforced(self, travel_tg, pay):
        with pytest.raises(BoundExceededError):
            check_validity_oracle(AssertedProduction(pay), travel_tg, bound=9)

    def test_weakness_probe_runs(self, travel_tg, pay):
        # strictly-too-strong precondition: reports evidence of non-weakness
        pi = AssertedProduction(pay, pre=BOT, post=TOP)
        findings = weakness_probe(pi, travel_tg, bound=1)
        assert findings  # every rejected graph would in fact satisfy top


class TestResidualExactness:
    def test_random_formulas_are_transformed_exactly(self):
        """On the residual graph (host minus the matched edge) the computed
        precondition agrees with the postcondition on the rewritten graph
        for arbitrary formulas, negations over the consumed type included."""
        import random

        from adr import scenarios
        from adr.ids import Allocator
        from adr.logic import And, ForallEdge, Not, NodeEq, TOP, BOT, exists, satisfies
        from adr.productions import apply_production

        rng = random.Random(0xE1)
        tg = scenarios.failover_vocabulary()
        alloc = Allocator()
        productions = [scenarios.good_server_production(alloc),
                       scenarios.bad_server_production(alloc)]
        arities = {"S": 2, "F": 2, "C": 1}
        pool = ["x", "y", "z", "v"]

        def formula(depth=0):
            roll = rng.random()
            if depth >= 3 or roll < 0.2:
                if rng.random() < 0.25:
                    return rng.choice((TOP, BOT))
                return NodeEq(rng.choice(pool), rng.choice(pool))
            if roll < 0.4:
                return Not(formula(depth + 1))
            if roll < 0.6:
                return And(formula(depth + 1), formula(depth + 1))
            et = rng.choice(list(arities))
            xs = tuple(rng.sample(pool, arities[et]))
            body = formula(depth + 1)
            return ForallEdge(et, xs, body) if rng.random() < 0.5 else exists(et, xs, body)

        graphs = list(enumerate_graphs(tg, 3, max_nodes=5))
        checked = 0
        for _ in range(800):
            phi = formula()
            if free_vars(phi):
                continue
            p = rng.choice(productions)
            g = rng.choice(graphs)
            matches = find_matches(g, p)
            if not matches:
                continue
            m = rng.choice(matches)
            result = weakest_precondition(p, phi)
            probe = Allocator()
            for used in (*g.node_ids, *g.edge_ids):
                probe.ids.observe(used)
            g2, _ = apply_production(g, p, m, probe)
            residual = g.without_edges([m.edge])
            h = result.induced_assignment(m)
            assert satisfies(residual, result.formula, h) == satisfies(g2, phi, {}), \
                f"{p.name} with {format_formula(phi)} on {g!r}"
            checked += 1
        assert checked > 100

    def test_residual_evaluation_predicts_outcome(self, travel_tg, pay):
        """On the host graph minus the matched edge the transformed formula
        agrees exactly with the postcondition on the rewritten graph."""
        from adr.ids import Allocator
        from adr.productions import apply_production

        post = parse_formula(PAYMENT_POST)
        result = weakest_precondition(pay, post)
        checked = 0
        for g in enumerate_graphs(travel_tg, 3, types=("B", "C", "P")):
            for m in find_matches(g, pay):
                alloc = Allocator()
                for used in (*g.node_ids, *g.edge_ids):
                    alloc.ids.observe(used)
                g2, copy = apply_production(g, pay, m, alloc)
                residual = g.without_edges([m.edge])
                h = result.induced_assignment(m)
                assert satisfies(residual, result.formula, h) == satisfies(g2, post, {})
                checked += 1
        assert checked > 20
