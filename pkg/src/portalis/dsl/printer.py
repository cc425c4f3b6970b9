"""Canonical schema formatting.

Deterministic output in declaration order: parse(print_schema(ast)) is
structurally equal to ast (spans aside), and printing is insensitive to the
spans themselves. Comments do not survive (they are not AST content).
"""

from __future__ import annotations

import re

from ..events import (
    ArgRef,
    LiteralExpr,
    RefreshAction,
    SetAction,
    TransitionAction,
)
from ..frames import Variable
from ..pages import (
    CountItem,
    FieldItem,
    FrameQueryItem,
    IdsItem,
    LiteralItem,
    PortalKeyItem,
)
from ..predicate import format_literal, format_predicate
from .ast import (
    ConceptDecl,
    FrameDecl,
    IndividualDecl,
    MetricDecl,
    PageDecl,
    ProfileDecl,
    RelationDecl,
    SchemaAst,
    ScriptDecl,
    SourceDecl,
)
from .parser import KEYWORDS

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(-[A-Za-z0-9_]+)*\Z")

INDENT = "  "


def _symbol(name: str) -> str:
    """Metric symbols print bare when they lex as identifiers."""
    if _IDENT_RE.match(name) and name not in KEYWORDS:
        return name
    return format_literal(name)


def _block(entries: list[str], depth: int) -> str:
    if not entries:
        return "{}"
    pad = INDENT * (depth + 1)
    body = ",\n".join(pad + entry for entry in entries)
    return "{\n" + body + "\n" + INDENT * depth + "}"


def _assignments(values) -> list[str]:
    return [f"{name} = {format_literal(value)}" for name, value in values]


def _script_expr(expr) -> str:
    if isinstance(expr, ArgRef):
        return f"arg {expr.name}"
    if isinstance(expr, LiteralExpr):
        return format_literal(expr.value)
    raise TypeError(f"unknown script expression {expr!r}")


def _action(action, depth: int) -> str:
    if isinstance(action, SetAction):
        return (f"set {action.page}.{action.object}.{action.field} = "
                f"{_script_expr(action.expr)}")
    if isinstance(action, RefreshAction):
        return f"refresh {action.page}"
    if isinstance(action, TransitionAction):
        entries = [f"{name} = {_script_expr(expr)}"
                   for name, expr in action.assignments]
        return f"transition {action.individual_id} {_block(entries, depth)}"
    raise TypeError(f"unknown script action {action!r}")


def _term(term) -> str:
    if isinstance(term, Variable):
        return f"?{term.name}"
    return term


def _item_source(source) -> str:
    if isinstance(source, PortalKeyItem):
        return f"portal {source.key}"
    if isinstance(source, CountItem):
        return f"count {source.concept} where {format_predicate(source.phi)}"
    if isinstance(source, IdsItem):
        return f"ids {source.concept} where {format_predicate(source.phi)}"
    if isinstance(source, FieldItem):
        return f"field {source.individual_id}.{source.field}"
    if isinstance(source, FrameQueryItem):
        pattern = source.pattern
        return (f"query {pattern.relation}({_term(pattern.subject)}, "
                f"{_term(pattern.object)})")
    if isinstance(source, LiteralItem):
        return format_literal(source.value)
    raise TypeError(f"unknown item source {source!r}")


def _declaration(decl) -> str:
    if isinstance(decl, ConceptDecl):
        fields = ", ".join(f"{name}: {kind.value}"
                           for name, kind in decl.fields)
        return f"concept {decl.name} ({fields})"
    if isinstance(decl, IndividualDecl):
        return (f"individual {decl.name} : {decl.concept} "
                f"{_block(_assignments(decl.values), 0)}")
    if isinstance(decl, RelationDecl):
        return f"relation {decl.name}"
    if isinstance(decl, FrameDecl):
        return f"frame {decl.relation}({decl.subject}, {decl.object})"
    if isinstance(decl, ProfileDecl):
        entries = [f"rank = {decl.rank}"]
        entries.extend(f"{dim} = {value}" for dim, value in decl.dims)
        return f"profile {decl.name} {_block(entries, 0)}"
    if isinstance(decl, MetricDecl):
        order = ", ".join(decl.order)
        rows = []
        for row in decl.rows:
            chain = ", ".join(f"{dim} = {value}" for dim, value in row.chain)
            symbols = ", ".join(_symbol(s) for s in row.symbols)
            rows.append(f"[{chain}] -> {{ {symbols} }}")
        return f"metric {decl.name} order ({order}) {_block(rows, 0)}"
    if isinstance(decl, ScriptDecl):
        hook = " hook" if decl.hook else ""
        actions = [_action(action, 1) for action in decl.actions]
        return (f"script {decl.name} on {decl.trigger}{hook} "
                f"{_block(actions, 0)}")
    if isinstance(decl, SourceDecl):
        items = [f"item {item.id} {_block(_assignments(item.values), 1)}"
                 for item in decl.items]
        return f"source {decl.name} kind {decl.kind} {_block(items, 0)}"
    if isinstance(decl, PageDecl):
        conditions = "".join(f" when {dim} = {value}"
                             for dim, value in decl.conditions)
        items = [f"item {item.name} = {_item_source(item.source)}"
                 for item in decl.items]
        return (f"page {decl.name} requires {decl.rank}{conditions} "
                f"{_block(items, 0)}")
    raise TypeError(f"unknown declaration {decl!r}")


def print_schema(ast: SchemaAst) -> str:
    """Canonical text; empty AST prints as empty text."""
    if not ast.declarations:
        return ""
    return "\n\n".join(_declaration(d) for d in ast.declarations) + "\n"
