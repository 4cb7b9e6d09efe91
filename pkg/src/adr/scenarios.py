"""Ready-made vocabularies, graphs and rule sets used by the demos and the
test suite: a travel-booking design grammar and a small server-failover
setup.

Node types are ``b`` (solid interface points) and ``w`` (open ones).  All
builders take an allocator so callers control the id space.
"""
from __future__ import annotations

from .graphs import Graph, GraphBuilder, TypeGraph
from .ids import Allocator
from .productions import AssertedProduction, Production


# -- travel booking ---------------------------------------------------------


def travel_vocabulary() -> TypeGraph:
    """Booking-flow vocabulary: clients, banks, flight search and payment."""
    return TypeGraph(
        node_types=("b", "w"),
        edge_types={
            "C": ("b",),
            "B": ("b", "w"),
            "FF": ("b", "b"),
            "Fls": ("b", "b"),
            "Fl": ("b", "b"),
            "BF": ("b", "b"),
            "P": ("b", "b"),
            "PF": ("b", "b"),
            "Client": ("b", "b"),
        },
    )


def flight_board(alloc: Allocator) -> Graph:
    """A finder edge feeding two flight-list edges over four shared points."""
    b = GraphBuilder(alloc)
    u1 = b.add_node("b", "u1")
    u2 = b.add_node("b", "u2")
    u3 = b.add_node("b", "u3")
    u4 = b.add_node("b", "u4")
    b.add_edge("FF", (u2, u1), theta=0, name="ff")
    b.add_edge("Fls", (u3, u2), theta=1, name="fl1")
    b.add_edge("Fls", (u4, u2), theta=1, name="fl2")
    return b.graph()


def booking_chain_graph(alloc: Allocator) -> Graph:
    """Finder plus a flight-list edge whose both tentacles share one node."""
    b = GraphBuilder(alloc)
    u1 = b.add_node("b", "u1")
    u = b.add_node("b", "u")
    b.add_edge("FF", (u1, u), theta=0, name="ff")
    b.add_edge("Fls", (u1, u1), theta=1, name="fls")
    return b.graph()


def spread_chain_graph(alloc: Allocator) -> Graph:
    """Finder plus a flight-list edge over two distinct end points."""
    b = GraphBuilder(alloc)
    u1 = b.add_node("b", "u1")
    u = b.add_node("b", "u")
    u3 = b.add_node("b", "u3")
    b.add_edge("FF", (u1, u), theta=0, name="ff")
    b.add_edge("Fls", (u3, u1), theta=1, name="fls")
    return b.graph()


def book_flight_production(alloc: Allocator) -> Production:
    """Fls(a,b)  ->  a chain  P(u1,u) . Fl(u,u2)  glued at u1/u2."""
    lb = GraphBuilder(alloc)
    a = lb.add_node("b", "a")
    bb = lb.add_node("b", "b")
    lb.add_edge("Fls", (a, bb), theta=1, name="fs")
    rb = GraphBuilder(alloc)
    u1 = rb.add_node("b", "u1")
    u2 = rb.add_node("b", "u2")
    u = rb.add_node("b", "u0")
    e_fls = rb.add_edge("Fl", (u, u2), theta=1, name="f0")
    e_pa = rb.add_edge("P", (u1, u), theta=1, name="p0")
    return Production("bookFlight", lb.graph(), rb.graph(),
                      {a: u1, bb: u2}, rhs_order=(e_fls, e_pa))


def pay_production(alloc: Allocator) -> Production:
    """P(a1,a2)  ->  a bank edge B on a fresh open node."""
    lb = GraphBuilder(alloc)
    a1 = lb.add_node("b", "a1")
    a2 = lb.add_node("b", "a2")
    lb.add_edge("P", (a1, a2), theta=1, name="pe")
    rb = GraphBuilder(alloc)
    u1 = rb.add_node("b", "u1")
    u2 = rb.add_node("b", "u2")
    u = rb.add_node("w", "w0")
    rb.add_edge("B", (u1, u), theta=0, name="b0")
    return Production("pay", lb.graph(), rb.graph(), {a1: u1, a2: u2})


def browse_flights_production(alloc: Allocator) -> Production:
    """Fl(a,b)  ->  two Fl alternatives sharing the b-side point."""
    lb = GraphBuilder(alloc)
    a = lb.add_node("b", "a")
    bb = lb.add_node("b", "b")
    lb.add_edge("Fl", (a, bb), theta=1, name="lf")
    rb = GraphBuilder(alloc)
    x1 = rb.add_node("b", "x1")
    x2 = rb.add_node("b", "x2")
    x3 = rb.add_node("b", "u0")
    e1 = rb.add_edge("Fl", (x3, x2), theta=1, name="f0")
    e2 = rb.add_edge("Fl", (x1, x2), theta=1, name="f0")
    return Production("brF", lb.graph(), rb.graph(), {a: x1, bb: x2}, rhs_order=(e1, e2))


def book_with_client_production(alloc: Allocator) -> Production:
    """Fl(a,b)  ->  Fl(u,b) . Client(a,u): a booked leg with its client."""
    lb = GraphBuilder(alloc)
    a = lb.add_node("b", "a")
    bb = lb.add_node("b", "b")
    lb.add_edge("Fl", (a, bb), theta=1, name="lf")
    rb = GraphBuilder(alloc)
    x1 = rb.add_node("b", "x1")
    x2 = rb.add_node("b", "x2")
    x = rb.add_node("b", "u0")
    e_f = rb.add_edge("Fl", (x, x2), theta=1, name="f0")
    e_c = rb.add_edge("Client", (x1, x), theta=1, name="c0")
    return Production("bookF", lb.graph(), rb.graph(), {a: x1, bb: x2}, rhs_order=(e_f, e_c))


def add_client_production(alloc: Allocator) -> Production:
    """Client(a,b)  ->  two parallel Client edges on the same points."""
    lb = GraphBuilder(alloc)
    a = lb.add_node("b", "a")
    bb = lb.add_node("b", "b")
    lb.add_edge("Client", (a, bb), theta=1, name="lc")
    rb = GraphBuilder(alloc)
    y1 = rb.add_node("b", "y1")
    y2 = rb.add_node("b", "y2")
    e1 = rb.add_edge("Client", (y1, y2), theta=1, name="c0")
    e2 = rb.add_edge("Client", (y1, y2), theta=1, name="c0")
    return Production("addC", lb.graph(), rb.graph(), {a: y1, bb: y2}, rhs_order=(e1, e2))


def travel_productions(alloc: Allocator) -> dict[str, Production]:
    ps = [
        book_flight_production(alloc),
        pay_production(alloc),
        browse_flights_production(alloc),
        book_with_client_production(alloc),
        add_client_production(alloc),
    ]
    return {p.name: p for p in ps}


#: Moves the booked client from the browsing stem onto the chosen result.
CLIENT_MOVE_RULE_TEXT = "rule cf : brF(x, bookF(y, z)) -> brF(bookF(x, z), y)"


# -- tracked booking scenarios ------------------------------------------------


def single_flight_system(alloc: Allocator):
    """One tracked flight edge f(u1,u2); the seed of the worked traces."""
    from .tracking import init_tracking

    b = GraphBuilder(alloc)
    u1 = b.add_node("b", "u1")
    u2 = b.add_node("b", "u2")
    b.add_edge("Fl", (u1, u2), theta=1, name="f")
    return init_tracking(b.graph(), travel_vocabulary())


def client_move_scenario(alloc: Allocator):
    """The full worked reconfiguration fixture.

    Starting from two flight edges (one a bystander), browsing splits the
    first, a booking hangs a client off the unbrowsed alternative, and the
    client is doubled.  Returns the tracked system, the production set, the
    parsed client-move rule and the bystander's edge id.
    """
    from .productions import find_matches
    from .reconfig import Signature, parse_rule
    from .tracking import init_tracking, record_production

    tg = travel_vocabulary()
    prods = travel_productions(alloc)

    b = GraphBuilder(alloc)
    u1 = b.add_node("b", "u1")
    u2 = b.add_node("b", "u2")
    u5 = b.add_node("b", "u5")
    b.add_edge("Fl", (u1, u2), theta=1, name="f")
    bystander = b.add_edge("Fl", (u5, u2), theta=1, name="fz")
    s = init_tracking(b.graph(), tg)

    brf, bookf, addc = prods["brF"], prods["bookF"], prods["addC"]
    s = record_production(s, brf, next(m for m in find_matches(s.graph, brf)
                                       if s.graph.edge_name(m.edge) == "f"))
    f2 = next(e for e in s.graph.edge_ids if s.graph.edge_name(e) == "f2")
    s = record_production(s, bookf, next(m for m in find_matches(s.graph, bookf)
                                         if m.edge == f2))
    c1 = next(e for e in s.graph.edge_ids if s.graph.edge_type(e) == "Client")
    s = record_production(s, addc, next(m for m in find_matches(s.graph, addc)
                                        if m.edge == c1))

    rule = parse_rule(CLIENT_MOVE_RULE_TEXT, Signature(tg, prods))
    return s, prods, rule, bystander


# -- connectivity toy (model-checking demo) ---------------------------------


def adjacency_vocabulary() -> TypeGraph:
    return TypeGraph(node_types=("b",), edge_types={"D": ("b", "b"), "Dp": ("b",)})


ADJACENCY_FORMULA = "forall D(x, y). exists Dp(z). x = z"


def adjacency_examples(alloc: Allocator) -> tuple[Graph, Graph]:
    """A graph satisfying the first-tentacle coverage formula and one that
    breaks it (its second D-edge starts at an uncovered point)."""
    gb = GraphBuilder(alloc)
    u1 = gb.add_node("b", "u1")
    u2 = gb.add_node("b", "u2")
    u4 = gb.add_node("b", "u4")
    gb.add_edge("D", (u1, u2), theta=0, name="d1")
    gb.add_edge("Dp", (u1,), theta=0, name="dp")
    gb.add_edge("D", (u1, u4), theta=0, name="d2")
    good = gb.graph()

    bb = GraphBuilder(alloc)
    v1 = bb.add_node("b", "u1")
    v2 = bb.add_node("b", "u2")
    v3 = bb.add_node("b", "u3")
    v4 = bb.add_node("b", "u4")
    bb.add_edge("D", (v1, v2), theta=0, name="d1")
    bb.add_edge("Dp", (v1,), theta=0, name="dp")
    bb.add_edge("D", (v3, v4), theta=0, name="d2")
    bad = bb.graph()
    return good, bad


# -- server failover ---------------------------------------------------------


def failover_vocabulary() -> TypeGraph:
    return TypeGraph(node_types=("b",),
                     edge_types={"S": ("b", "b"), "F": ("b", "b"), "C": ("b",)})


FAILOVER_INVARIANT = "forall C(x). exists S(y, z). x = z"


def failover_graph(alloc: Allocator) -> Graph:
    """A live server with one attached client."""
    b = GraphBuilder(alloc)
    v = b.add_node("b", "v")
    u = b.add_node("b", "u")
    b.add_edge("S", (v, u), theta=1, name="s")
    b.add_edge("C", (u,), theta=0, name="c")
    return b.graph()


def bad_server_production(alloc: Allocator) -> Production:
    """S(a,b) -> F(y1,y2): a server drops into the failed state."""
    lb = GraphBuilder(alloc)
    a = lb.add_node("b", "a")
    bb = lb.add_node("b", "b")
    lb.add_edge("S", (a, bb), theta=1, name="ls")
    rb = GraphBuilder(alloc)
    y1 = rb.add_node("b", "y1")
    y2 = rb.add_node("b", "y2")
    rb.add_edge("F", (y1, y2), theta=1, name="fe")
    return Production("badServer", lb.graph(), rb.graph(), {a: y1, bb: y2})


def good_server_production(alloc: Allocator) -> Production:
    """F(a,b) -> S(y1,y2): a failed server is replaced by a live one."""
    lb = GraphBuilder(alloc)
    a = lb.add_node("b", "a")
    bb = lb.add_node("b", "b")
    lb.add_edge("F", (a, bb), theta=1, name="lf")
    rb = GraphBuilder(alloc)
    y1 = rb.add_node("b", "y1")
    y2 = rb.add_node("b", "y2")
    rb.add_edge("S", (y1, y2), theta=1, name="se")
    return Production("goodServer", lb.graph(), rb.graph(), {a: y1, bb: y2})


def failover_productions(alloc: Allocator) -> dict[str, Production]:
    ps = [bad_server_production(alloc), good_server_production(alloc)]
    return {p.name: p for p in ps}


# -- ready-made workspaces ----------------------------------------------------


def build_travel_workspace():
    """Travel vocabulary, all booking productions, the client-move rule and
    one tracked system seeded with a single flight edge."""
    from .logic import parse_formula
    from .reconfig import Signature, parse_rule, validate_rule
    from .workspace import Workspace

    alloc = Allocator()
    tg = travel_vocabulary()
    ws = Workspace(tg)
    for p in travel_productions(alloc).values():
        ws.asserted[p.name] = AssertedProduction(p)
    rule = parse_rule(CLIENT_MOVE_RULE_TEXT, ws.signature())
    validate_rule(rule, ws.signature())
    ws.rules[rule.name] = rule
    ws.invariant = parse_formula("forall Client(x, y). exists Fl(v, w). y = w", tg)
    ws.systems["trip"] = single_flight_system(alloc)
    return ws


def build_failover_workspace(broken: bool = True):
    """Failover vocabulary with the break/repair productions and a tracked
    cluster; when ``broken``, the server has already dropped into the
    failed state, so the invariant is violated."""
    from .logic import parse_formula
    from .productions import find_matches
    from .tracking import init_tracking, record_production
    from .workspace import Workspace

    alloc = Allocator()
    tg = failover_vocabulary()
    ws = Workspace(tg)
    prods = failover_productions(alloc)
    for p in prods.values():
        ws.asserted[p.name] = AssertedProduction(p)
    ws.invariant = parse_formula(FAILOVER_INVARIANT, tg)
    s = init_tracking(failover_graph(alloc), tg)
    if broken:
        bad = prods["badServer"]
        s = record_production(s, bad, find_matches(s.graph, bad)[0])
    ws.systems["cluster"] = s
    return ws
