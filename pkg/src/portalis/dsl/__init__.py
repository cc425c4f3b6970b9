"""Portal definition schema (.pds): parser, canonical printer, loader."""

from .ast import SchemaAst, ParseDiagnostic, ast_equal, strip_spans
from .parser import (
    parse,
    parse_bytes,
    parse_chain_text,
    parse_pattern_text,
    parse_predicate_text,
)
from .printer import print_schema
from .loader import load, load_file, load_text

__all__ = [
    "SchemaAst",
    "ParseDiagnostic",
    "ast_equal",
    "strip_spans",
    "parse",
    "parse_bytes",
    "parse_chain_text",
    "parse_pattern_text",
    "parse_predicate_text",
    "print_schema",
    "load",
    "load_file",
    "load_text",
]
