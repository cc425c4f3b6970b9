"""Schema AST: one node per declaration form, each carrying a source span.

Predicate expressions, page item sources and script actions reuse the
engine's own dataclasses (they are already pure data); the declarations here
wrap them with names and positions. Structural equality for round-trip tests
ignores spans.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from ..events import ScriptAction
from ..pages import ItemSource
from ..predicate import Kind, Value


@dataclass(frozen=True)
class Span:
    line: int  # 1-based
    col: int   # 1-based, in decoded code points


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" | "warning"
    message: str
    line: int
    col: int
    lexeme: str = ""

    def format(self, path: str = "<schema>") -> str:
        return f"{path}:{self.line}:{self.col}: {self.severity}: {self.message}"


@dataclass(frozen=True)
class ConceptDecl:
    name: str
    fields: tuple[tuple[str, Kind], ...]
    span: Span


@dataclass(frozen=True)
class IndividualDecl:
    name: str
    concept: str
    values: tuple[tuple[str, Value], ...]
    span: Span


@dataclass(frozen=True)
class RelationDecl:
    name: str
    span: Span


@dataclass(frozen=True)
class FrameDecl:
    relation: str
    subject: str
    object: str
    span: Span


@dataclass(frozen=True)
class ProfileDecl:
    name: str
    rank: str
    dims: tuple[tuple[str, str], ...]
    span: Span


@dataclass(frozen=True)
class MetricRow:
    chain: tuple[tuple[str, str], ...]
    symbols: tuple[str, ...]
    span: Span


@dataclass(frozen=True)
class MetricDecl:
    name: str
    order: tuple[str, ...]
    rows: tuple[MetricRow, ...]
    span: Span


@dataclass(frozen=True)
class ScriptDecl:
    name: str
    trigger: str
    hook: bool
    actions: tuple[ScriptAction, ...]
    span: Span


@dataclass(frozen=True)
class SeedItem:
    id: str
    values: tuple[tuple[str, Value], ...]
    span: Span


@dataclass(frozen=True)
class SourceDecl:
    name: str
    kind: str
    items: tuple[SeedItem, ...]
    span: Span


@dataclass(frozen=True)
class PageItemDecl:
    name: str
    source: ItemSource
    span: Span


@dataclass(frozen=True)
class PageDecl:
    name: str
    rank: str
    conditions: tuple[tuple[str, str], ...]
    items: tuple[PageItemDecl, ...]
    span: Span


Declaration = Union[ConceptDecl, IndividualDecl, RelationDecl, FrameDecl,
                    ProfileDecl, MetricDecl, ScriptDecl, SourceDecl, PageDecl]


@dataclass(frozen=True)
class SchemaAst:
    declarations: tuple[Declaration, ...]


def strip_spans(node):
    """Canonical span-free structure, for AST equality in round trips."""
    if isinstance(node, Span):
        return None
    if isinstance(node, Enum):
        return node.value
    if dataclasses.is_dataclass(node) and not isinstance(node, type):
        return (type(node).__name__,) + tuple(
            strip_spans(getattr(node, f.name))
            for f in dataclasses.fields(node)
            if f.name != "span")
    if isinstance(node, tuple):
        return tuple(strip_spans(item) for item in node)
    return node


def ast_equal(a: Optional[SchemaAst], b: Optional[SchemaAst]) -> bool:
    if a is None or b is None:
        return a is b
    return strip_spans(a) == strip_spans(b)
