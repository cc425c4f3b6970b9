"""Recursive-descent parser for .pds schema files.

Totality contract: any str input yields either an AST or error diagnostics,
never an exception; byte inputs that do not decode as UTF-8 yield a single
EncodingError diagnostic. Error recovery skips to the next top-level keyword
so one file can report several problems. When the input ends inside a
bracketed group, the diagnostic points at the dangling opener.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from ..events import (
    ArgRef,
    LiteralExpr,
    RefreshAction,
    ScriptAction,
    SetAction,
    TransitionAction,
)
from ..frames import FramePattern, Variable
from ..pages import (
    CountItem,
    FieldItem,
    FrameQueryItem,
    IdsItem,
    ItemSource,
    LiteralItem,
    PortalKeyItem,
)
from ..predicate import (
    And,
    Compare,
    Expr,
    FieldRef,
    Kind,
    Literal,
    Member,
    Not,
    Or,
    Value,
)
from .ast import (
    ConceptDecl,
    FrameDecl,
    IndividualDecl,
    MetricDecl,
    MetricRow,
    PageDecl,
    PageItemDecl,
    ParseDiagnostic,
    ProfileDecl,
    RelationDecl,
    SchemaAst,
    ScriptDecl,
    SeedItem,
    SourceDecl,
    Span,
)

DECL_KEYWORDS = ("concept", "individual", "relation", "frame", "profile",
                 "metric", "script", "source", "page")

KIND_NAMES = {
    "integer": Kind.INTEGER,
    "real": Kind.REAL,
    "text": Kind.TEXT,
    "boolean": Kind.BOOLEAN,
    "media": Kind.MEDIA,
    "ref": Kind.REF,
}

KEYWORDS = frozenset(DECL_KEYWORDS) | frozenset(KIND_NAMES) | frozenset({
    "on", "hook", "order", "kind", "requires", "when", "where",
    "item", "portal", "count", "ids", "field", "query", "arg",
    "set", "refresh", "transition", "rank",
    "and", "or", "not", "in", "true", "false",
})

MAX_DIAGNOSTICS = 100

_PUNCT_TWO = ("->", "!=", "<=", ">=")
_PUNCT_ONE = "(){}[],:.=<>?"


@dataclass(frozen=True)
class Token:
    type: str  # IDENT KEYWORD INT REAL STRING PUNCT EOF ERROR
    value: object
    line: int
    col: int
    text: str


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1
        self.diagnostics: list[ParseDiagnostic] = []

    def _error(self, message: str, line: int, col: int, lexeme: str) -> Token:
        self.diagnostics.append(
            ParseDiagnostic("error", message, line, col, lexeme))
        return Token("ERROR", lexeme, line, col, lexeme)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        while True:
            tok = self._next()
            if tok is None:
                continue
            out.append(tok)
            if tok.type == "EOF":
                return out

    def _next(self) -> Optional[Token]:
        text = self.text
        # skip whitespace and comments
        while self.pos < len(text):
            ch = text[self.pos]
            if ch in " \t\r\n":
                self._advance()
            elif ch == "#":
                while self.pos < len(text) and text[self.pos] != "\n":
                    self._advance()
            else:
                break
        if self.pos >= len(text):
            return Token("EOF", None, self.line, self.col, "")
        line, col = self.line, self.col
        ch = text[self.pos]

        if ch == '"':
            return self._string(line, col)
        if ch.isdigit() or (ch == "-" and self.pos + 1 < len(text)
                            and text[self.pos + 1].isdigit()):
            return self._number(line, col)
        if ch.isalpha() or ch == "_":
            return self._word(line, col)
        two = text[self.pos:self.pos + 2]
        if two in _PUNCT_TWO:
            self._advance(2)
            return Token("PUNCT", two, line, col, two)
        if ch in _PUNCT_ONE:
            self._advance()
            return Token("PUNCT", ch, line, col, ch)
        self._advance()
        return self._error(f"unexpected character {ch!r}", line, col, ch)

    def _word(self, line: int, col: int) -> Token:
        text = self.text
        start = self.pos
        while self.pos < len(text):
            ch = text[self.pos]
            if ch.isalnum() or ch == "_":
                self._advance()
            # hyphen joins identifier parts (event names like vacancy-updated)
            elif ch == "-" and self.pos + 1 < len(text) \
                    and (text[self.pos + 1].isalnum()
                         or text[self.pos + 1] == "_"):
                self._advance()
            else:
                break
        word = text[start:self.pos]
        if word in KEYWORDS:
            return Token("KEYWORD", word, line, col, word)
        return Token("IDENT", word, line, col, word)

    def _number(self, line: int, col: int) -> Token:
        text = self.text
        start = self.pos
        if text[self.pos] == "-":
            self._advance()
        while self.pos < len(text) and text[self.pos].isdigit():
            self._advance()
        is_real = False
        if self.pos + 1 < len(text) and text[self.pos] == "." \
                and text[self.pos + 1].isdigit():
            is_real = True
            self._advance()
            while self.pos < len(text) and text[self.pos].isdigit():
                self._advance()
        if self.pos < len(text) and text[self.pos] in "eE":
            mark = self.pos
            probe = self.pos + 1
            if probe < len(text) and text[probe] in "+-":
                probe += 1
            if probe < len(text) and text[probe].isdigit():
                is_real = True
                while self.pos < probe:
                    self._advance()
                while self.pos < len(text) and text[self.pos].isdigit():
                    self._advance()
        lexeme = text[start:self.pos]
        if is_real:
            value = float(lexeme)
            if value in (float("inf"), float("-inf")) or value != value:
                return self._error("numeric literal out of range",
                                   line, col, lexeme)
            return Token("REAL", value, line, col, lexeme)
        return Token("INT", int(lexeme), line, col, lexeme)

    def _string(self, line: int, col: int) -> Token:
        text = self.text
        start = self.pos
        self._advance()  # opening quote
        chunks: list[str] = []
        while self.pos < len(text):
            ch = text[self.pos]
            if ch == '"':
                self._advance()
                return Token("STRING", "".join(chunks), line, col,
                             text[start:self.pos])
            if ch == "\n":
                break
            if ch == "\\":
                if self.pos + 1 >= len(text):
                    break
                escape = text[self.pos + 1]
                mapped = {"\\": "\\", '"': '"', "n": "\n", "t": "\t"}.get(escape)
                if mapped is None:
                    return self._error(f"unknown escape \\{escape}",
                                       line, col, f"\\{escape}")
                chunks.append(mapped)
                self._advance(2)
            else:
                chunks.append(ch)
                self._advance()
        return self._error("unterminated string literal", line, col, '"')


class _ParseFailure(Exception):
    def __init__(self, message: str, token: Token):
        super().__init__(message)
        self.message = message
        self.token = token


class _Parser:
    def __init__(self, tokens: list[Token],
                 diagnostics: list[ParseDiagnostic]):
        self.tokens = tokens
        self.index = 0
        self.diagnostics = diagnostics
        self.openers: list[Token] = []

    # -- token plumbing -------------------------------------------------------

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        tok = self.current
        if tok.type != "EOF":
            self.index += 1
        return tok

    def _fail(self, message: str, token: Optional[Token] = None):
        tok = token or self.current
        if tok.type == "EOF" and self.openers:
            opener = self.openers[-1]
            raise _ParseFailure(
                f"{message} (group opened with {opener.text!r} here is "
                "never closed)", opener)
        raise _ParseFailure(message, tok)

    def _diag(self, failure: _ParseFailure) -> None:
        if len(self.diagnostics) < MAX_DIAGNOSTICS:
            self.diagnostics.append(ParseDiagnostic(
                "error", failure.message, failure.token.line,
                failure.token.col, failure.token.text))

    def _at_keyword(self, word: str) -> bool:
        tok = self.current
        return tok.type == "KEYWORD" and tok.value == word

    def _at_punct(self, punct: str) -> bool:
        tok = self.current
        return tok.type == "PUNCT" and tok.value == punct

    def _keyword(self, word: str) -> Token:
        if not self._at_keyword(word):
            self._fail(f"expected {word!r}")
        return self._advance()

    def _punct(self, punct: str) -> Token:
        if not self._at_punct(punct):
            self._fail(f"expected {punct!r}")
        return self._advance()

    def _open(self, punct: str) -> Token:
        tok = self._punct(punct)
        self.openers.append(tok)
        return tok

    def _close(self, punct: str) -> None:
        self._punct(punct)
        self.openers.pop()

    def _ident(self, what: str = "identifier") -> str:
        tok = self.current
        if tok.type == "IDENT":
            self._advance()
            return tok.value
        if tok.type == "KEYWORD":
            self._fail(f"reserved word {tok.value!r} used as {what}")
        self._fail(f"expected {what}")

    def _literal(self) -> Value:
        tok = self.current
        if tok.type in ("INT", "REAL", "STRING"):
            self._advance()
            return tok.value
        if tok.type == "KEYWORD" and tok.value in ("true", "false"):
            self._advance()
            return tok.value == "true"
        self._fail("expected a literal")

    def _span(self, token: Token) -> Span:
        return Span(token.line, token.col)

    # -- comma-separated helpers ----------------------------------------------

    def _sep_list(self, parse_entry, close: str):
        """Entries separated by commas until the closing punct (not consumed)."""
        entries = []
        if self._at_punct(close):
            return entries
        entries.append(parse_entry())
        while self._at_punct(","):
            self._advance()
            entries.append(parse_entry())
        return entries

    # -- top level --------------------------------------------------------------

    def parse_schema(self) -> SchemaAst:
        declarations = []
        while self.current.type != "EOF":
            tok = self.current
            if tok.type == "ERROR":
                self._advance()
                continue
            if tok.type == "KEYWORD" and tok.value in DECL_KEYWORDS:
                try:
                    declarations.append(self._declaration(tok.value))
                except _ParseFailure as failure:
                    self._diag(failure)
                    self.openers.clear()
                    self._sync()
            else:
                self._diag(_ParseFailure(
                    f"expected a declaration keyword, found {tok.text!r}",
                    tok))
                self._advance()
                self._sync()
        return SchemaAst(tuple(declarations))

    def _sync(self) -> None:
        while self.current.type != "EOF":
            tok = self.current
            if tok.type == "KEYWORD" and tok.value in DECL_KEYWORDS:
                return
            self._advance()

    def _declaration(self, keyword: str):
        return {
            "concept": self._concept,
            "individual": self._individual,
            "relation": self._relation,
            "frame": self._frame,
            "profile": self._profile,
            "metric": self._metric,
            "script": self._script,
            "source": self._source,
            "page": self._page,
        }[keyword]()

    # -- declarations -----------------------------------------------------------

    def _concept(self) -> ConceptDecl:
        start = self._keyword("concept")
        name = self._ident("concept name")
        self._open("(")
        fields = self._sep_list(self._concept_field, ")")
        self._close(")")
        return ConceptDecl(name, tuple(fields), self._span(start))

    def _concept_field(self) -> tuple[str, Kind]:
        fname = self._ident("field name")
        self._punct(":")
        tok = self.current
        if tok.type == "KEYWORD" and tok.value in KIND_NAMES:
            self._advance()
            return fname, KIND_NAMES[tok.value]
        self._fail("expected a value kind "
                   "(integer, real, text, boolean, media, ref)")

    def _individual(self) -> IndividualDecl:
        start = self._keyword("individual")
        name = self._ident("individual id")
        self._punct(":")
        concept = self._ident("concept name")
        self._open("{")
        values = self._sep_list(self._assignment, "}")
        self._close("}")
        return IndividualDecl(name, concept, tuple(values), self._span(start))

    def _assignment(self) -> tuple[str, Value]:
        fname = self._ident("field name")
        self._punct("=")
        return fname, self._literal()

    def _relation(self) -> RelationDecl:
        start = self._keyword("relation")
        return RelationDecl(self._ident("relation name"), self._span(start))

    def _frame(self) -> FrameDecl:
        start = self._keyword("frame")
        relation = self._ident("relation name")
        self._open("(")
        subject = self._ident("constant")
        self._punct(",")
        obj = self._ident("constant")
        self._close(")")
        return FrameDecl(relation, subject, obj, self._span(start))

    def _profile(self) -> ProfileDecl:
        start = self._keyword("profile")
        name = self._ident("profile name")
        self._open("{")
        rank: Optional[str] = None
        dims: list[tuple[str, str]] = []

        def entry():
            nonlocal rank
            if self._at_keyword("rank"):
                self._advance()
                self._punct("=")
                rank = self._ident("rank name")
            else:
                dim = self._ident("dimension name")
                self._punct("=")
                dims.append((dim, self._ident("dimension value")))

        self._sep_list(entry, "}")
        self._close("}")
        if rank is None:
            self._fail(f"profile {name!r} declares no rank", start)
        return ProfileDecl(name, rank, tuple(dims), self._span(start))

    def _metric(self) -> MetricDecl:
        start = self._keyword("metric")
        name = self._ident("metric name")
        self._keyword("order")
        self._open("(")
        order = self._sep_list(lambda: self._ident("dimension name"), ")")
        self._close(")")
        self._open("{")
        rows = self._sep_list(self._metric_row, "}")
        self._close("}")
        return MetricDecl(name, tuple(order), tuple(rows), self._span(start))

    def _metric_row(self) -> MetricRow:
        start = self._open("[")
        chain = self._sep_list(self._chain_entry, "]")
        self._close("]")
        self._punct("->")
        self._open("{")
        symbols = self._sep_list(self._symbol, "}")
        self._close("}")
        return MetricRow(tuple(chain), tuple(symbols), self._span(start))

    def _chain_entry(self) -> tuple[str, str]:
        dim = self._ident("dimension name")
        self._punct("=")
        return dim, self._ident("dimension value")

    def _symbol(self) -> str:
        tok = self.current
        if tok.type == "STRING":
            self._advance()
            return tok.value
        return self._ident("symbol")

    def _script(self) -> ScriptDecl:
        start = self._keyword("script")
        name = self._ident("script name")
        self._keyword("on")
        trigger = self._ident("event name")
        hook = False
        if self._at_keyword("hook"):
            self._advance()
            hook = True
        self._open("{")
        actions = self._sep_list(self._script_action, "}")
        self._close("}")
        return ScriptDecl(name, trigger, hook, tuple(actions),
                          self._span(start))

    def _script_action(self) -> ScriptAction:
        if self._at_keyword("set"):
            self._advance()
            page = self._ident("page id")
            self._punct(".")
            obj = self._ident("object id")
            self._punct(".")
            fname = self._ident("field name")
            self._punct("=")
            return SetAction(page, obj, fname, self._script_expr())
        if self._at_keyword("refresh"):
            self._advance()
            return RefreshAction(self._ident("page id"))
        if self._at_keyword("transition"):
            self._advance()
            individual = self._ident("individual id")
            self._open("{")
            assignments = self._sep_list(self._transition_assign, "}")
            self._close("}")
            return TransitionAction(individual, tuple(assignments))
        self._fail("expected a script action (set, refresh, transition)")

    def _transition_assign(self) -> tuple[str, Union[LiteralExpr, ArgRef]]:
        fname = self._ident("field name")
        self._punct("=")
        return fname, self._script_expr()

    def _script_expr(self) -> Union[LiteralExpr, ArgRef]:
        if self._at_keyword("arg"):
            self._advance()
            return ArgRef(self._ident("argument name"))
        return LiteralExpr(self._literal())

    def _word_label(self, what: str) -> str:
        """A bare word where keywords are fine (e.g. the media repo kind)."""
        tok = self.current
        if tok.type in ("IDENT", "KEYWORD"):
            self._advance()
            return tok.value
        self._fail(f"expected {what}")

    def _source(self) -> SourceDecl:
        start = self._keyword("source")
        name = self._ident("source name")
        self._keyword("kind")
        kind = self._word_label("repository kind")
        self._open("{")
        items = self._sep_list(self._seed_item, "}")
        self._close("}")
        return SourceDecl(name, kind, tuple(items), self._span(start))

    def _seed_item(self) -> SeedItem:
        start = self._keyword("item")
        item_id = self._ident("item id")
        self._open("{")
        values = self._sep_list(self._assignment, "}")
        self._close("}")
        return SeedItem(item_id, tuple(values), self._span(start))

    def _page(self) -> PageDecl:
        start = self._keyword("page")
        name = self._ident("page id")
        self._keyword("requires")
        rank = self._ident("rank name")
        conditions: list[tuple[str, str]] = []
        while self._at_keyword("when"):
            self._advance()
            dim = self._ident("dimension name")
            self._punct("=")
            conditions.append((dim, self._ident("dimension value")))
        self._open("{")
        items = self._sep_list(self._page_item, "}")
        self._close("}")
        return PageDecl(name, rank, tuple(conditions), tuple(items),
                        self._span(start))

    def _page_item(self) -> PageItemDecl:
        start = self._keyword("item")
        name = self._ident("item name")
        self._punct("=")
        return PageItemDecl(name, self._item_source(), self._span(start))

    def _item_source(self) -> ItemSource:
        if self._at_keyword("portal"):
            self._advance()
            return PortalKeyItem(self._ident("portal item key"))
        if self._at_keyword("count"):
            self._advance()
            concept = self._ident("concept name")
            self._keyword("where")
            return CountItem(concept, self._predicate())
        if self._at_keyword("ids"):
            self._advance()
            concept = self._ident("concept name")
            self._keyword("where")
            return IdsItem(concept, self._predicate())
        if self._at_keyword("field"):
            self._advance()
            individual = self._ident("individual id")
            self._punct(".")
            if self._at_keyword("concept"):
                self._advance()
                return FieldItem(individual, "concept")
            return FieldItem(individual, self._ident("field name"))
        if self._at_keyword("query"):
            self._advance()
            relation = self._ident("relation name")
            self._open("(")
            subject = self._pattern_term()
            self._punct(",")
            obj = self._pattern_term()
            self._close(")")
            return FrameQueryItem(FramePattern(relation, subject, obj))
        return LiteralItem(self._literal())

    def _pattern_term(self):
        if self._at_punct("?"):
            self._advance()
            return Variable(self._ident("variable name"))
        return self._ident("constant")

    # -- predicates ---------------------------------------------------------------

    def _predicate(self) -> Expr:
        return self._or_expr()

    def _or_expr(self) -> Expr:
        expr = self._and_expr()
        while self._at_keyword("or"):
            self._advance()
            expr = Or(expr, self._and_expr())
        return expr

    def _and_expr(self) -> Expr:
        expr = self._not_expr()
        while self._at_keyword("and"):
            self._advance()
            expr = And(expr, self._not_expr())
        return expr

    def _not_expr(self) -> Expr:
        if self._at_keyword("not"):
            self._advance()
            return Not(self._not_expr())
        return self._atom()

    def _atom(self) -> Expr:
        if self._at_punct("("):
            self._open("(")
            expr = self._predicate()
            self._close(")")
            return expr
        operand = self._operand()
        tok = self.current
        if tok.type == "PUNCT" and tok.value in ("=", "!=", "<", "<=", ">",
                                                 ">="):
            self._advance()
            return Compare(tok.value, operand, self._operand())
        if self._at_keyword("in"):
            self._advance()
            self._open("(")
            choices = self._sep_list(lambda: Literal(self._literal()), ")")
            self._close(")")
            return Member(operand, tuple(choices))
        return operand

    def _operand(self):
        tok = self.current
        if tok.type == "IDENT":
            self._advance()
            return FieldRef(tok.value)
        # 'concept' doubles as the level-0 pseudo-field
        if tok.type == "KEYWORD" and tok.value == "concept":
            self._advance()
            return FieldRef(tok.value)
        if tok.type in ("INT", "REAL", "STRING") \
                or (tok.type == "KEYWORD" and tok.value in ("true", "false")):
            return Literal(self._literal())
        self._fail("expected a field name or literal")


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParseResult:
    ast: Optional[SchemaAst]
    diagnostics: tuple[ParseDiagnostic, ...]

    @property
    def ok(self) -> bool:
        return self.ast is not None


def parse(text: str) -> ParseResult:
    """Parse decoded schema text; never raises."""
    lexer = _Lexer(text)
    tokens = lexer.tokens()
    diagnostics = list(lexer.diagnostics)
    parser = _Parser(tokens, diagnostics)
    ast = parser.parse_schema()
    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        return ParseResult(None, tuple(diagnostics))
    return ParseResult(ast, tuple(diagnostics))


def parse_bytes(data: bytes) -> ParseResult:
    """Parse raw file bytes, rejecting non-UTF-8 input with one diagnostic."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        return ParseResult(None, (ParseDiagnostic(
            "error", f"EncodingError: input is not UTF-8 ({exc.reason} at "
            f"byte {exc.start})", 1, 1), ))
    return parse(text)


def _fragment_parser(text: str):
    lexer = _Lexer(text)
    tokens = lexer.tokens()
    diagnostics = list(lexer.diagnostics)
    return _Parser(tokens, diagnostics), diagnostics


def parse_predicate_text(text: str) -> tuple[Optional[Expr],
                                             list[ParseDiagnostic]]:
    """Parse a bare predicate expression (CLI eval, tests)."""
    parser, diagnostics = _fragment_parser(text)
    expr: Optional[Expr] = None
    try:
        expr = parser._predicate()
        if parser.current.type != "EOF":
            parser._fail("trailing input after predicate")
    except _ParseFailure as failure:
        parser._diag(failure)
    if any(d.severity == "error" for d in diagnostics):
        return None, diagnostics
    return expr, diagnostics


def parse_pattern_text(text: str) -> tuple[Optional[FramePattern],
                                           list[ParseDiagnostic]]:
    """Parse a frame pattern like "follows(?who, vAnn)"."""
    parser, diagnostics = _fragment_parser(text)
    pattern: Optional[FramePattern] = None
    try:
        relation = parser._ident("relation name")
        parser._open("(")
        subject = parser._pattern_term()
        parser._punct(",")
        obj = parser._pattern_term()
        parser._close(")")
        if parser.current.type != "EOF":
            parser._fail("trailing input after pattern")
        pattern = FramePattern(relation, subject, obj)
    except _ParseFailure as failure:
        parser._diag(failure)
    if any(d.severity == "error" for d in diagnostics):
        return None, diagnostics
    return pattern, diagnostics


def parse_chain_text(text: str) -> tuple[Optional[list[tuple[str, str]]],
                                         list[ParseDiagnostic]]:
    """Parse an assignment chain like "s=higraph,p=registered"."""
    parser, diagnostics = _fragment_parser(text)
    chain: list[tuple[str, str]] = []
    try:
        if parser.current.type != "EOF":
            chain.append(parser._chain_entry())
            while parser._at_punct(","):
                parser._advance()
                chain.append(parser._chain_entry())
        if parser.current.type != "EOF":
            parser._fail("trailing input after chain")
    except _ParseFailure as failure:
        parser._diag(failure)
    if any(d.severity == "error" for d in diagnostics):
        return None, diagnostics
    return chain, diagnostics
