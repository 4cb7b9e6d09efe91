from __future__ import annotations

import pytest

from adr import scenarios
from adr.graphs import GraphBuilder, isomorphic, validate_graph
from adr.ids import Allocator
from adr.logic import TOP, ForallEdge, NodeEq, Not, parse_formula
from adr.productions import (AssertedProduction, Match, MatchError, Production,
                             ProductionError, apply_asserted, apply_production,
                             find_matches)


@pytest.fixture
def book_flight(alloc):
    return scenarios.book_flight_production(alloc)


@pytest.fixture
def browse(alloc):
    return scenarios.browse_flights_production(alloc)


class TestProductionShape:
    def test_operation_view(self, book_flight):
        assert book_flight.lhs_type == "Fls"
        assert book_flight.child_types == ("Fl", "P")

    def test_two_edge_lhs_rejected(self, alloc):
        b = GraphBuilder(alloc)
        u = b.add_node("b")
        v = b.add_node("b")
        b.add_edge("Fl", (u, v))
        b.add_edge("Fl", (u, v))
        lhs = b.graph()
        with pytest.raises(ProductionError, match="single edge"):
            Production("bad", lhs, lhs, {u: u, v: v})

    def test_non_replaceable_lhs_rejected(self, alloc):
        b = GraphBuilder(alloc)
        u = b.add_node("b")
        v = b.add_node("b")
        b.add_edge("Fl", (u, v), theta=0)
        lhs = b.graph()
        with pytest.raises(ProductionError, match="replaceable"):
            Production("bad", lhs, lhs, {u: u, v: v})

    def test_repeated_lhs_nodes_rejected(self, alloc):
        b = GraphBuilder(alloc)
        u = b.add_node("b")
        b.add_edge("Fl", (u, u))
        lhs = b.graph()
        with pytest.raises(ProductionError, match="distinct"):
            Production("bad", lhs, lhs, {u: u})


class TestFindMatches:
    def test_unique_replaceable_edge(self, alloc, book_flight):
        g = scenarios.booking_chain_graph(alloc)
        ms = find_matches(g, book_flight)
        assert len(ms) == 1
        assert g.edge_name(ms[0].edge) == "fls"

    def test_replaceability_gates_matching(self, alloc, book_flight):
        g = scenarios.booking_chain_graph(alloc)
        fls = next(e for e in g.edge_ids if g.edge_name(e) == "fls")
        assert find_matches(g.with_theta(fls, 0), book_flight) == []

    def test_matches_follow_edge_order(self, alloc, browse):
        # grow a three-alternative board by applying browse twice
        b = GraphBuilder(alloc)
        u1 = b.add_node("b", "u1")
        u2 = b.add_node("b", "u2")
        b.add_edge("Fl", (u1, u2), theta=1, name="f")
        g = b.graph()
        g, _ = apply_production(g, browse, find_matches(g, browse)[0], alloc)
        g, _ = apply_production(g, browse, find_matches(g, browse)[1], alloc)
        ms = find_matches(g, browse)
        assert len(ms) == 3
        assert [g.edge_name(m.edge) for m in ms] == [g.edge_name(e) for e in g.edge_ids]


class TestApplyProduction:
    def test_booking_chain_rewrite(self, alloc, travel_tg, book_flight):
        g = scenarios.booking_chain_graph(alloc)
        m = find_matches(g, book_flight)[0]
        g2, copy = apply_production(g, book_flight, m, alloc)
        # documented result: finder untouched, fresh point u2, chain P . Fl
        expect = GraphBuilder(alloc)
        u1 = expect.add_node("b", "u1")
        u = expect.add_node("b", "u")
        w = expect.add_node("b", "u2")
        expect.add_edge("FF", (u1, u), theta=0, name="ff")
        expect.add_edge("Fl", (w, u1), theta=1)
        expect.add_edge("P", (u1, w), theta=1)
        assert isomorphic(g2, expect.graph())
        assert validate_graph(g2, travel_tg).ok
        # copy morphism lands inside the result
        assert all(g2.has_edge(e) for e in copy.edge_map.values())

    def test_interface_nodes_preserved(self, alloc, book_flight):
        g = scenarios.spread_chain_graph(alloc)
        u1 = next(n for n in g.node_ids if g.node_name(n) == "u1")
        u3 = next(n for n in g.node_ids if g.node_name(n) == "u3")
        m = find_matches(g, book_flight)[0]
        g2, copy = apply_production(g, book_flight, m, alloc)
        assert g2.has_node(u1) and g2.has_node(u3)
        # fresh flight edge touches the old interface point u1
        fl = copy.edge_map[book_flight.rhs_order[0]]
        assert g2.attachment(fl)[1] == u1
        pay = copy.edge_map[book_flight.rhs_order[1]]
        assert g2.attachment(pay)[0] == u3

    def test_renaming_only_production(self, alloc, travel_tg):
        b = GraphBuilder(alloc)
        a = b.add_node("b", "a")
        c = b.add_node("b", "c")
        b.add_edge("Fl", (a, c), theta=1, name="lf")
        lhs = b.graph()
        p = Production("same", lhs, lhs, {a: a, c: c})
        g = scenarios.spread_chain_graph(alloc)
        g = g.add_edge(alloc.ids.fresh(),
                       g.edge(g.edge_ids[0]).__class__("Fl", (g.node_ids[0], g.node_ids[2]), 1, "fx"))
        m = find_matches(g, p)[0]
        g2, _ = apply_production(g, p, m, alloc)
        assert isomorphic(g, g2)

    def test_stale_match_rejected(self, alloc, book_flight):
        g = scenarios.booking_chain_graph(alloc)
        m = find_matches(g, book_flight)[0]
        g2, _ = apply_production(g, book_flight, m, alloc)
        with pytest.raises(MatchError):
            apply_production(g2, book_flight, m, alloc)


class TestApplyProperties:
    def test_bookkeeping(self, alloc, travel_tg, browse):
        g = scenarios.spread_chain_graph(alloc)
        g = g.add_edge(alloc.ids.fresh(),
                       g.edge(g.edge_ids[0]).__class__("Fl", (g.node_ids[0], g.node_ids[1]), 1, "f9"))
        issued_before = alloc.ids.state
        m = find_matches(g, browse)[0]
        g2, copy = apply_production(g, browse, m, alloc)
        # nodes are preserved, edge counts balance, new ids are fresh
        assert set(g.node_ids) <= set(g2.node_ids)
        assert len(g2) == len(g) - 1 + len(browse.rhs)
        assert all(e >= issued_before for e in copy.edge_map.values())
        assert validate_graph(g2, travel_tg).ok
        # locality: untouched edges identical, not merely isomorphic
        for e in g.edge_ids:
            if e != m.edge:
                assert g2.edge(e) == g.edge(e)


class TestAssertedProductions:
    def test_precondition_violation_reports_shared_node(self, alloc, book_flight):
        g = scenarios.booking_chain_graph(alloc)
        pi = AssertedProduction(book_flight,
                                pre=parse_formula("forall Fls(x,y). x != y"))
        m = find_matches(g, book_flight)[0]
        out = apply_asserted(g, pi, m, alloc)
        assert not out.ok
        # witness: both bound variables sit on the same shared node
        w = out.violation.assignment
        assert w["x"] == w["y"]
        assert g.node_name(w["x"]) == "u1"

    def test_trivial_contract_behaves_like_plain_application(self, alloc, book_flight):
        g = scenarios.booking_chain_graph(alloc)
        m = find_matches(g, book_flight)[0]
        some = Allocator(); some.ids._next = alloc.ids.state  # mirror allocation
        plain, _ = apply_production(g, book_flight, m, some)
        out = apply_asserted(g, AssertedProduction(book_flight), m, alloc)
        assert out.ok
        assert isomorphic(out.graph, plain)

    def test_satisfied_precondition_applies(self, alloc, book_flight):
        g = scenarios.spread_chain_graph(alloc)
        pi = AssertedProduction(book_flight, pre=parse_formula("forall Fls(x,y). x != y"))
        out = apply_asserted(g, pi, find_matches(g, book_flight)[0], alloc)
        assert out.ok and out.graph is not None

    def test_contract_variables_must_name_lhs_nodes(self, alloc, book_flight):
        with pytest.raises(ProductionError):
            AssertedProduction(book_flight, pre=NodeEq("q", "q"))

    def test_precondition_on_lhs_nodes(self, alloc, book_flight):
        # pre with a free variable bound to L's first node: a = a holds
        g = scenarios.spread_chain_graph(alloc)
        a_node = book_flight.lhs_nodes[0]
        pi = AssertedProduction(book_flight, pre=NodeEq("a", "a"), pre_assign={"a": a_node})
        out = apply_asserted(g, pi, find_matches(g, book_flight)[0], alloc)
        assert out.ok
