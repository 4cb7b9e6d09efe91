"""Typed-hypergraph design rewriting.

An engine for architectures modelled as typed hypergraphs: designs are
generated by productions (single replaceable edge -> fresh right side),
decorated with logical contracts, monitored through tracking forests,
reconfigured by term-level rewrite rules, and -- when a style invariant
breaks -- recovered through an iterative weakest-precondition/parsing loop.
"""
from .graphs import (Graph, GraphBuilder, GraphError, GraphMorphism, TypeGraph,
                     check_morphism, find_isomorphism, isomorphic, validate_graph)
from .ids import Allocator
from .logic import (Formula, desugar, format_formula, free_vars, parse_formula,
                    satisfies)
from .productions import (AssertedProduction, Match, Production, apply_asserted,
                          apply_production, find_matches)
from .recovery import (RecoverySession, TwoTierSubtree, decide, parse_step,
                       propose_productions, run_auto, start_recovery)
from .reconfig import (ReconfigRule, Signature, apply_reconfiguration, bow_tie,
                       find_rule_matches, get_var_tree, parse_rule, term_to_graph,
                       validate_rule)
from .tracking import (TrackedSystem, current_graph, init_tracking,
                       record_production, render_forest)
from .workspace import Workspace, load_workspace, save_workspace
from .wp import (check_validity_oracle, enumerate_graphs, semantically_equivalent,
                 weakest_precondition)

__all__ = [
    "Allocator", "AssertedProduction", "Formula", "Graph", "GraphBuilder",
    "GraphError", "GraphMorphism", "Match", "Production", "ReconfigRule",
    "RecoverySession", "Signature", "TrackedSystem", "TwoTierSubtree",
    "TypeGraph", "Workspace", "apply_asserted", "apply_production",
    "apply_reconfiguration", "bow_tie", "check_morphism", "check_validity_oracle",
    "current_graph", "decide", "desugar", "enumerate_graphs", "find_isomorphism",
    "find_matches", "find_rule_matches", "format_formula", "free_vars",
    "get_var_tree", "init_tracking", "isomorphic", "load_workspace",
    "parse_formula", "parse_rule", "parse_step", "propose_productions",
    "record_production", "render_forest", "run_auto", "satisfies",
    "save_workspace", "semantically_equivalent", "start_recovery",
    "term_to_graph", "validate_graph", "validate_rule", "weakest_precondition",
]

__version__ = "0.1.0"
