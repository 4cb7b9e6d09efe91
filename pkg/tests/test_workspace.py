from __future__ import annotations

import json

import pytest

from adr import scenarios
from adr.graphs import isomorphic
from adr.reconfig import find_rule_matches, apply_reconfiguration
from adr.tracking import current_graph
from adr.workspace import (WorkspaceFormatError, load_workspace, save_workspace,
                           system_to_json, workspace_from_json, workspace_to_json)


@pytest.fixture
def travel_ws():
    return scenarios.build_travel_workspace()


@pytest.fixture
def failover_ws():
    return scenarios.build_failover_workspace()


class TestRoundTrip:
    def test_travel_round_trips(self, travel_ws, tmp_path):
        path = tmp_path / "travel.json"
        save_workspace(travel_ws, path)
        loaded = load_workspace(path)
        assert set(loaded.asserted) == set(travel_ws.asserted)
        assert set(loaded.rules) == set(travel_ws.rules)
        assert loaded.invariant == travel_ws.invariant
        for name in travel_ws.systems:
            a, b = travel_ws.systems[name], loaded.systems[name]
            assert a.graph == b.graph
            assert a.env1 == b.env1 and a.env2 == b.env2
            assert a.log == b.log
        for name, p in travel_ws.productions.items():
            q = loaded.productions[name]
            assert p.rhs_order == q.rhs_order
            assert p.interface == q.interface
            assert p.lhs == q.lhs and p.rhs == q.rhs

    def test_serialisation_is_canonical(self, failover_ws, tmp_path):
        path = tmp_path / "a.json"
        save_workspace(failover_ws, path)
        text1 = path.read_text()
        save_workspace(load_workspace(path), path)
        assert path.read_text() == text1

    def test_failover_is_loaded_violated(self, failover_ws, tmp_path):
        path = tmp_path / "cluster.json"
        save_workspace(failover_ws, path)
        loaded = load_workspace(path)
        s = loaded.systems["cluster"]
        types = sorted(s.graph.edge_type(e) for e in s.graph.edge_ids)
        assert types == ["C", "F"]


class TestRejection:
    def test_two_edge_lhs_rejected(self, travel_ws, tmp_path):
        doc = workspace_to_json(travel_ws)
        bad = doc["productions"][0]
        extra = dict(bad["lhs"]["edges"][0])
        extra["id"] = 99999
        bad["lhs"]["edges"].append(extra)
        with pytest.raises(WorkspaceFormatError, match="single edge"):
            workspace_from_json(doc)

    def test_bad_theta_rejected(self, travel_ws):
        doc = workspace_to_json(travel_ws)
        doc["systems"]["trip"]["initial"]["edges"][0]["theta"] = 2
        with pytest.raises(WorkspaceFormatError, match="theta"):
            workspace_from_json(doc)

    def test_unknown_rule_operation_rejected(self, travel_ws):
        doc = workspace_to_json(travel_ws)
        doc["rules"] = ["rule broken : nosuch(x) -> nosuch(x)"]
        with pytest.raises(WorkspaceFormatError, match="rules"):
            workspace_from_json(doc)

    def test_corrupt_current_graph_rejected(self, failover_ws):
        doc = workspace_to_json(failover_ws)
        doc["systems"]["cluster"]["current"]["edges"][0]["tau"] = "S"
        with pytest.raises(WorkspaceFormatError, match="replay"):
            workspace_from_json(doc)

    def test_diagnostics_carry_field_paths(self, travel_ws):
        doc = workspace_to_json(travel_ws)
        del doc["systems"]["trip"]["initial"]
        with pytest.raises(WorkspaceFormatError) as err:
            workspace_from_json(doc)
        assert "$.systems.trip" in str(err.value)


class TestReplay:
    def test_full_reconfiguration_scenario_replays(self, tmp_path):
        """Save the worked client-move scenario, reload it, and check replay
        reproduced graph, forest and environment identically."""
        from adr.ids import Allocator
        from adr.productions import AssertedProduction
        from adr.workspace import Workspace

        alloc = Allocator()
        s, prods, rule, _ = scenarios.client_move_scenario(alloc)
        tg = scenarios.travel_vocabulary()
        (root,) = find_rule_matches(s, rule)
        s = apply_reconfiguration(s, rule, root, tg, prods)

        ws = Workspace(tg)
        for p in prods.values():
            ws.asserted[p.name] = AssertedProduction(p)
        ws.rules[rule.name] = rule
        ws.systems["moved"] = s
        path = tmp_path / "moved.json"
        save_workspace(ws, path)

        loaded = load_workspace(path)
        t = loaded.systems["moved"]
        assert t.graph == s.graph
        assert t.env1 == s.env1 and t.env2 == s.env2
        assert list(t.forest.vertices()) == list(s.forest.vertices())
        assert t.log == s.log
        assert current_graph(t) == t.graph

    def test_documented_final_shape_survives_reload(self, tmp_path):
        from adr.graphs import GraphBuilder
        from adr.ids import Allocator
        from adr.productions import AssertedProduction
        from adr.workspace import Workspace

        alloc = Allocator()
        s, prods, rule, _ = scenarios.client_move_scenario(alloc)
        tg = scenarios.travel_vocabulary()
        (root,) = find_rule_matches(s, rule)
        s = apply_reconfiguration(s, rule, root, tg, prods)

        ws = Workspace(tg)
        for p in prods.values():
            ws.asserted[p.name] = AssertedProduction(p)
        ws.rules[rule.name] = rule
        ws.systems["moved"] = s
        path = tmp_path / "moved.json"
        save_workspace(ws, path)
        loaded = load_workspace(path).systems["moved"]

        expect = GraphBuilder(alloc)
        v1, v2, v3, v4, v5 = (expect.add_node("b") for _ in range(5))
        expect.add_edge("Fl", (v3, v2), theta=1)
        expect.add_edge("Fl", (v1, v2), theta=1)
        expect.add_edge("Fl", (v5, v2), theta=1)
        expect.add_edge("Client", (v4, v3), theta=1)
        expect.add_edge("Client", (v4, v3), theta=1)
        assert isomorphic(loaded.graph, expect.graph())

    def test_json_is_plain_data(self, failover_ws):
        doc = workspace_to_json(failover_ws)
        json.dumps(doc)  # no exotic objects anywhere
        assert doc["format"] == "adr-workspace"
        sysdoc = system_to_json(failover_ws.systems["cluster"])
        assert [ev["kind"] for ev in sysdoc["events"]] == ["production"]
