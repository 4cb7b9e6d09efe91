"""Node-equality logic over typed hypergraphs, with a naive model checker.

Formulae predicate on (in)equalities between nodes and quantify over the
edges of a given type: ``forall D(x,y). body`` binds ``x,y`` to the attached
nodes of every D-edge in turn.  The core grammar is tiny -- equality, top,
negation, conjunction and the edge quantifier -- and everything else
(``bot``, ``|``, ``->``, ``exists``, ``no D``, equality chains) is definable
sugar.

Satisfaction is decided by direct enumeration, so evaluation cost is
O(|edges| ^ quantifier depth); fine at desk scale.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .graphs import Graph, NodeId, TypeGraph


class FormulaError(Exception):
    """Malformed formula or formula text."""


class UnboundVariableError(FormulaError):
    """A free variable was not covered by the assignment."""


# -- abstract syntax --------------------------------------------------------


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class NodeEq:
    x: str
    y: str


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForallEdge:
    etype: str
    bound: tuple[str, ...]
    body: "Formula"

    def __post_init__(self):
        if len(set(self.bound)) != len(self.bound):
            raise FormulaError(f"bound variables of forall {self.etype} must be pairwise distinct")


Formula = Top | NodeEq | Not | And | ForallEdge

TOP = Top()
BOT = Not(TOP)


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-folded conjunction; empty conjunction is top."""
    result: Formula | None = None
    for p in parts:
        result = p if result is None else And(result, p)
    return result if result is not None else TOP


def free_vars(phi: Formula) -> frozenset[str]:
    if isinstance(phi, Top):
        return frozenset()
    if isinstance(phi, NodeEq):
        return frozenset((phi.x, phi.y))
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, And):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, ForallEdge):
        return free_vars(phi.body) - frozenset(phi.bound)
    raise FormulaError(f"not a formula: {phi!r}")


def edge_types_in(phi: Formula) -> frozenset[str]:
    if isinstance(phi, (Top, NodeEq)):
        return frozenset()
    if isinstance(phi, Not):
        return edge_types_in(phi.body)
    if isinstance(phi, And):
        return edge_types_in(phi.left) | edge_types_in(phi.right)
    if isinstance(phi, ForallEdge):
        return frozenset((phi.etype,)) | edge_types_in(phi.body)
    raise FormulaError(f"not a formula: {phi!r}")


def check_formula(phi: Formula, tg: TypeGraph) -> list[str]:
    """Well-formedness against a vocabulary: every quantified edge type must
    be declared and bind exactly arity-many variables."""
    problems: list[str] = []

    def walk(f: Formula) -> None:
        if isinstance(f, Not):
            walk(f.body)
        elif isinstance(f, And):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, ForallEdge):
            if f.etype not in tg:
                problems.append(f"undeclared edge type {f.etype!r} in quantifier")
            elif len(f.bound) != tg.arity(f.etype):
                problems.append(
                    f"quantifier over {f.etype} binds {len(f.bound)} variables, arity is {tg.arity(f.etype)}")
            walk(f.body)

    walk(phi)
    return problems


def desugar(name: str, args: tuple, type_graph: TypeGraph | None = None) -> Formula:
    """Expand a derived connective into the core grammar.

    Known names: ``Bot``, ``Or(a,b)``, ``Implies(a,b)``,
    ``Exists(etype, vars, body)``, ``NoD(etype)`` (requires the type graph
    for the arity) and ``EqChain(x1, ..., xn)``.
    """
    if name == "Bot":
        return BOT
    if name == "Or":
        a, b = args
        return Not(And(Not(a), Not(b)))
    if name == "Implies":
        a, b = args
        return desugar("Or", (Not(a), b))
    if name == "Exists":
        etype, variables, body = args
        return Not(ForallEdge(etype, tuple(variables), Not(body)))
    if name == "NoD":
        (etype,) = args
        if type_graph is None or etype not in type_graph:
            raise FormulaError(f"'no {etype}' needs the type graph to know the arity of {etype}")
        variables = tuple(f"z{k + 1}" for k in range(type_graph.arity(etype)))
        return ForallEdge(etype, variables, BOT)
    if name == "EqChain":
        if len(args) < 2:
            raise FormulaError("equality chain needs at least two variables")
        return conj(NodeEq(a, b) for a, b in zip(args, args[1:]))
    raise FormulaError(f"unknown derived connective {name!r}")


def exists(etype: str, variables: Iterable[str], body: Formula) -> Formula:
    return desugar("Exists", (etype, tuple(variables), body))


# -- satisfaction -----------------------------------------------------------


def satisfies(g: Graph, phi: Formula, h: Mapping[str, NodeId]) -> bool:
    """Decide whether the graph models the formula under the assignment.

    The assignment must cover the free variables with nodes of ``g``; a
    missing variable raises :class:`UnboundVariableError` rather than
    evaluating to false.
    """
    for v in free_vars(phi):
        if v not in h:
            raise UnboundVariableError(f"assignment missing free variable {v!r}")
        if not g.has_node(h[v]):
            raise UnboundVariableError(f"assignment sends {v!r} to a node outside the graph")
    return _sat(g, phi, dict(h))


def _sat(g: Graph, phi: Formula, h: dict[str, NodeId]) -> bool:
    if isinstance(phi, Top):
        return True
    if isinstance(phi, NodeEq):
        try:
            return h[phi.x] == h[phi.y]
        except KeyError as k:
            raise UnboundVariableError(f"unbound variable {k.args[0]!r}") from None
    if isinstance(phi, Not):
        return not _sat(g, phi.body, h)
    if isinstance(phi, And):
        return _sat(g, phi.left, h) and _sat(g, phi.right, h)
    if isinstance(phi, ForallEdge):
        for e in g.edges_of_type(phi.etype):
            nodes = g.attachment(e)
            if len(nodes) != len(phi.bound):
                raise FormulaError(
                    f"quantifier over {phi.etype} binds {len(phi.bound)} variables "
                    f"but edge {g.edge_name(e)} has arity {len(nodes)}")
            inner = dict(h)
            inner.update(zip(phi.bound, nodes))
            if not _sat(g, phi.body, inner):
                return False
        return True
    raise FormulaError(f"not a formula: {phi!r}")


@dataclass(frozen=True)
class Witness:
    """How a satisfaction check failed: the deepest assignment reached and
    the edges bound along the failing quantifier path."""

    assignment: dict[str, NodeId]
    edges: tuple[int, ...]


def violation_witness(g: Graph, phi: Formula, h: Mapping[str, NodeId]) -> Optional[Witness]:
    """None when ``g`` satisfies ``phi``; otherwise a witness of the failure."""
    ok, wit = _explain(g, phi, dict(h), ())
    return None if ok else wit


def _explain(g, phi, h, edges) -> tuple[bool, Optional[Witness]]:
    if isinstance(phi, Top):
        return True, None
    if isinstance(phi, NodeEq):
        if h[phi.x] == h[phi.y]:
            return True, None
        return False, Witness(dict(h), edges)
    if isinstance(phi, Not):
        ok, _ = _explain(g, phi.body, h, edges)
        return (False, Witness(dict(h), edges)) if ok else (True, None)
    if isinstance(phi, And):
        ok, wit = _explain(g, phi.left, h, edges)
        if not ok:
            return ok, wit
        return _explain(g, phi.right, h, edges)
    if isinstance(phi, ForallEdge):
        for e in g.edges_of_type(phi.etype):
            inner = dict(h)
            inner.update(zip(phi.bound, g.attachment(e)))
            ok, wit = _explain(g, phi.body, inner, edges + (e,))
            if not ok:
                return ok, wit
        return True, None
    raise FormulaError(f"not a formula: {phi!r}")


# -- text syntax ------------------------------------------------------------
#
#   formula := or ('->' formula)?
#   or      := and ('|' and)*
#   and     := unary ('&' unary)*
#   unary   := '!' unary | quantifier | atom
#   quant   := ('forall'|'exists') TYPE '(' var,* ')' '.' formula
#   atom    := 'top' | 'bot' | 'no' TYPE | var ('='|'!=') var ('=' var)* | '(' formula ')'
#
# Quantifier bodies extend as far right as possible.

_TOKEN = re.compile(r"\s*(->|!=|[()=.,&|!]|[A-Za-z_][A-Za-z0-9_']*)")
_KEYWORDS = {"forall", "exists", "top", "bot", "no"}


def _tokenize(text: str) -> list[str]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise FormulaError(f"cannot tokenize formula near {text[pos:pos + 12]!r}")
            break
        out.append(m.group(1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens: list[str], tg: TypeGraph | None):
        self.toks = tokens
        self.pos = 0
        self.tg = tg

    def peek(self) -> str | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise FormulaError("unexpected end of formula")
        if expected is not None and tok != expected:
            raise FormulaError(f"expected {expected!r}, found {tok!r}")
        self.pos += 1
        return tok

    def ident(self) -> str:
        tok = self.take()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok) or tok in _KEYWORDS:
            raise FormulaError(f"expected an identifier, found {tok!r}")
        return tok

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return desugar("Implies", (left, self.formula()))
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.peek() == "|":
            self.take()
            left = desugar("Or", (left, self.conjunction()))
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok in ("forall", "exists"):
            self.take()
            etype = self.ident()
            self.take("(")
            variables = [self.ident()]
            while self.peek() == ",":
                self.take()
                variables.append(self.ident())
            self.take(")")
            self.take(".")
            body = self.formula()
            if tok == "forall":
                return ForallEdge(etype, tuple(variables), body)
            return desugar("Exists", (etype, tuple(variables), body))
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok == "(":
            self.take()
            inner = self.formula()
            self.take(")")
            return inner
        if tok == "top":
            self.take()
            return TOP
        if tok == "bot":
            self.take()
            return BOT
        if tok == "no":
            self.take()
            return desugar("NoD", (self.ident(),), self.tg)
        x = self.ident()
        op = self.take()
        if op == "!=":
            return Not(NodeEq(x, self.ident()))
        if op != "=":
            raise FormulaError(f"expected '=' or '!=' after {x!r}, found {op!r}")
        chain = [x, self.ident()]
        while self.peek() == "=":
            self.take()
            chain.append(self.ident())
        return desugar("EqChain", tuple(chain))


def parse_formula(text: str, type_graph: TypeGraph | None = None) -> Formula:
    """Parse the textual syntax; the type graph is only needed for ``no D``."""
    parser = _Parser(_tokenize(text), type_graph)
    phi = parser.formula()
    if parser.peek() is not None:
        raise FormulaError(f"trailing input at {parser.peek()!r}")
    return phi


# Printing.  A few sugared shapes are recognised so output stays readable;
# every printed string re-parses to the identical tree.

_PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3


def format_formula(phi: Formula) -> str:
    return _fmt(phi, 0)


def _fmt(phi: Formula, ctx: int) -> str:
    if isinstance(phi, Top):
        return "top"
    if isinstance(phi, NodeEq):
        return f"{phi.x} = {phi.y}"
    if isinstance(phi, Not):
        if isinstance(phi.body, Top):
            return "bot"
        if isinstance(phi.body, NodeEq):
            return f"{phi.body.x} != {phi.body.y}"
        if isinstance(phi.body, ForallEdge) and isinstance(phi.body.body, Not):
            inner = phi.body
            text = f"exists {inner.etype}({', '.join(inner.bound)}). {_fmt(inner.body.body, 0)}"
            return f"({text})" if ctx > 0 else text
        if isinstance(phi.body, And) and isinstance(phi.body.left, Not) and isinstance(phi.body.right, Not):
            text = f"{_fmt(phi.body.left.body, _PREC_OR)} | {_fmt(phi.body.right.body, _PREC_OR + 1)}"
            return f"({text})" if ctx >= _PREC_AND else text
        return "!" + _fmt(phi.body, _PREC_UNARY + 1)
    if isinstance(phi, And):
        text = f"{_fmt(phi.left, _PREC_AND)} & {_fmt(phi.right, _PREC_AND + 1)}"
        return f"({text})" if ctx > _PREC_AND else text
    if isinstance(phi, ForallEdge):
        text = f"forall {phi.etype}({', '.join(phi.bound)}). {_fmt(phi.body, 0)}"
        return f"({text})" if ctx > 0 else text
    raise FormulaError(f"not a formula: {phi!r}")
