"""Semantic analysis: turn a parsed schema into a running engine.

All-or-nothing: either every declaration installs cleanly into a fresh
PortalEngine, or the load reports positioned semantic diagnostics and no
engine state exists. Callers holding an older engine keep it untouched on
failure.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

from ..engine import PortalEngine
from ..errors import PortalisError
from ..events import (
    LiteralExpr,
    PolicyMode,
    RefreshAction,
    Script,
    SetAction,
    TransitionAction,
    UpdatePolicy,
)
from ..frames import AtomicFrame, Variable
from ..metatower import DEFAULT_MAX_DEPTH
from ..model import Concept
from ..pages import (
    CountItem,
    FieldItem,
    FrameQueryItem,
    IdsItem,
    PageDefinition,
    PortalKeyItem,
)
from ..predicate import Kind, validate_predicate, value_conforms
from ..profiles import (
    AssignmentDimension,
    DEFAULT_ALPHABETS,
    DIMENSION_NAMES,
    MetricDenotation,
    Rank,
    UserProfile,
)
from ..warehouse import PORTAL_CATALOG, RepoKind
from .ast import (
    ConceptDecl,
    FrameDecl,
    IndividualDecl,
    MetricDecl,
    PageDecl,
    ParseDiagnostic,
    ProfileDecl,
    RelationDecl,
    SchemaAst,
    ScriptDecl,
    SourceDecl,
    Span,
)
from .parser import ParseResult, parse, parse_bytes

CATALOG_KEYS = {key for key, _ in PORTAL_CATALOG}


class LoadResult:
    def __init__(self, engine: Optional[PortalEngine],
                 diagnostics: list[ParseDiagnostic]):
        self.engine = engine
        self.diagnostics = diagnostics

    @property
    def ok(self) -> bool:
        return self.engine is not None


class _Analysis:
    def __init__(self, ast: SchemaAst, policy: UpdatePolicy, max_depth: int):
        self.ast = ast
        self.engine = PortalEngine(policy=policy, max_depth=max_depth)
        self.diagnostics: list[ParseDiagnostic] = []
        self.concepts: dict[str, ConceptDecl] = {}
        self.individual_concepts: dict[str, str] = {}  # id -> concept name
        self.relations: set[str] = set()
        self.pages: set[str] = set()
        self.source_kinds: dict[str, str] = {}

    def error(self, span: Span, message: str) -> None:
        self.diagnostics.append(
            ParseDiagnostic("error", message, span.line, span.col))

    # -- pass 1: name registration -------------------------------------------

    def register_names(self) -> None:
        seen: dict[tuple[str, str], Span] = {}

        def unique(namespace: str, name: str, span: Span) -> bool:
            key = (namespace, name)
            if key in seen:
                prior = seen[key]
                self.error(span, f"duplicate {namespace} {name!r} "
                                 f"(first declared at line {prior.line})")
                return False
            seen[key] = span
            return True

        for decl in self.ast.declarations:
            if isinstance(decl, ConceptDecl):
                if unique("concept", decl.name, decl.span):
                    self.concepts[decl.name] = decl
            elif isinstance(decl, IndividualDecl):
                if unique("individual", decl.name, decl.span):
                    self.individual_concepts[decl.name] = decl.concept
            elif isinstance(decl, RelationDecl):
                if unique("relation", decl.name, decl.span):
                    self.relations.add(decl.name)
            elif isinstance(decl, ProfileDecl):
                unique("profile", decl.name, decl.span)
            elif isinstance(decl, MetricDecl):
                unique("metric", decl.name, decl.span)
            elif isinstance(decl, ScriptDecl):
                unique("script", decl.name, decl.span)
            elif isinstance(decl, SourceDecl):
                if unique("source", decl.name, decl.span):
                    self.source_kinds[decl.name] = decl.kind
                for item in decl.items:
                    if unique("individual", item.id, item.span):
                        kind = _repo_kind(decl.kind)
                        if kind is not None:
                            self.individual_concepts[item.id] = \
                                _ADAPTER_CONCEPT[kind]
            elif isinstance(decl, PageDecl):
                if unique("page", decl.name, decl.span):
                    self.pages.add(decl.name)

    # -- dimension alphabets ----------------------------------------------------

    def collect_dimensions(self) -> None:
        values: dict[str, set[str]] = {name: set() for name in DIMENSION_NAMES}
        for name, alphabet in DEFAULT_ALPHABETS.items():
            values[name].update(alphabet)
        for decl in self.ast.declarations:
            if isinstance(decl, ProfileDecl):
                for dim, value in decl.dims:
                    if dim in ("v", "e"):
                        values[dim].add(value)
            elif isinstance(decl, MetricDecl):
                for row in decl.rows:
                    for dim, value in row.chain:
                        if dim in ("v", "e"):
                            values[dim].add(value)
            elif isinstance(decl, PageDecl):
                for dim, value in decl.conditions:
                    if dim in ("v", "e"):
                        values[dim].add(value)
        for name in DIMENSION_NAMES:
            if values[name]:
                self.engine.dimensions[name] = AssignmentDimension(
                    name, frozenset(values[name]))

    # -- pass 2: build ------------------------------------------------------------

    def build(self) -> None:
        handlers = {
            ConceptDecl: self._concept,
            IndividualDecl: self._individual,
            SourceDecl: self._source,
            RelationDecl: self._relation,
            ProfileDecl: self._profile,
            MetricDecl: self._metric,
            PageDecl: self._page,
        }
        # declaration-order passes: data first, frames and scripts once every
        # name exists, pages last before scripts so refresh targets resolve
        for wave in (
            (ConceptDecl,),
            (IndividualDecl,),
            (SourceDecl,),
            (RelationDecl,),
            (FrameDecl,),
            (ProfileDecl,),
            (MetricDecl,),
            (PageDecl,),
            (ScriptDecl,),
        ):
            for decl in self.ast.declarations:
                if not isinstance(decl, wave):
                    continue
                if isinstance(decl, FrameDecl):
                    self._frame(decl)
                elif isinstance(decl, ScriptDecl):
                    self._script(decl)
                else:
                    handlers[type(decl)](decl)
        self._check_hierarchy_monotonicity()

    def _concept(self, decl: ConceptDecl) -> None:
        try:
            concept = Concept(decl.name, decl.fields)
        except ValueError as exc:
            self.error(decl.span, str(exc))
            return
        try:
            self.engine.store.add_concept(concept)
        except PortalisError as exc:
            self.error(decl.span, str(exc))

    def _individual(self, decl: IndividualDecl) -> None:
        if decl.concept not in self.concepts:
            self.error(decl.span,
                       f"individual {decl.name!r} references undeclared "
                       f"concept {decl.concept!r}")
            return
        values = dict(decl.values)
        if len(values) != len(decl.values):
            self.error(decl.span,
                       f"individual {decl.name!r} assigns a field twice")
            return
        try:
            self.engine.store.add_individual(decl.name, decl.concept, values)
        except PortalisError as exc:
            self.error(decl.span, str(exc))
            return
        self.engine.frames.declare_constant(decl.name)

    def _source(self, decl: SourceDecl) -> None:
        kind = _repo_kind(decl.kind)
        if kind is None:
            self.error(decl.span,
                       f"unknown repository kind {decl.kind!r} "
                       "(hr, finance, media, docs)")
            return
        taken = [name for name, k in self.source_kinds.items()
                 if k == decl.kind and name != decl.name]
        if any(name in self.engine.warehouse.repos for name in taken):
            self.error(decl.span,
                       f"a source of kind {decl.kind!r} is already declared; "
                       "each kind has one adapter")
            return
        try:
            self.engine.warehouse.add_repository(decl.name, kind)
        except PortalisError as exc:
            self.error(decl.span, str(exc))
            return
        for item in decl.items:
            values = dict(item.values)
            if len(values) != len(item.values):
                self.error(item.span,
                           f"item {item.id!r} assigns a field twice")
                continue
            try:
                self.engine.warehouse.seed(decl.name, item.id, values)
            except PortalisError as exc:
                self.error(item.span, f"item {item.id!r}: {exc}")
                continue
            self.engine.frames.declare_constant(item.id)

    def _relation(self, decl: RelationDecl) -> None:
        self.engine.frames.declare_relation(decl.name)

    def _frame(self, decl: FrameDecl) -> None:
        if decl.relation not in self.relations:
            self.error(decl.span,
                       f"frame references undeclared relation "
                       f"{decl.relation!r}")
            return
        for constant in (decl.subject, decl.object):
            if constant not in self.engine.store.individuals:
                self.error(decl.span,
                           f"frame constant {constant!r} names no declared "
                           "individual")
                return
        self.engine.frames.assert_frame(
            AtomicFrame(decl.relation, decl.subject, decl.object))

    def _profile(self, decl: ProfileDecl) -> None:
        try:
            rank = Rank.from_label(decl.rank)
        except ValueError as exc:
            self.error(decl.span, str(exc))
            return
        dims: dict[str, str] = {}
        for dim, value in decl.dims:
            if dim not in DIMENSION_NAMES:
                self.error(decl.span,
                           f"profile {decl.name!r}: unknown dimension "
                           f"{dim!r} (s, p, v, e)")
                return
            if dim in dims:
                self.error(decl.span,
                           f"profile {decl.name!r} assigns {dim} twice")
                return
            alphabet = self.engine.dimensions.get(dim)
            if alphabet is not None and value not in alphabet.alphabet:
                self.error(decl.span,
                           f"profile {decl.name!r}: {value!r} not in the "
                           f"{dim} alphabet")
                return
            dims[dim] = value
        self.engine.personas[decl.name] = UserProfile(decl.name, rank, dims)

    def _metric(self, decl: MetricDecl) -> None:
        for dim in decl.order:
            if dim not in DIMENSION_NAMES:
                self.error(decl.span,
                           f"metric {decl.name!r}: unknown dimension {dim!r}")
                return
        if len(set(decl.order)) != len(decl.order):
            self.error(decl.span,
                       f"metric {decl.name!r} repeats a dimension")
            return
        table: dict[tuple[str, ...], tuple[str, ...]] = {}
        for row in decl.rows:
            values: list[str] = []
            for position, (dim, value) in enumerate(row.chain):
                if position >= len(decl.order) or dim != decl.order[position]:
                    self.error(row.span,
                               f"metric {decl.name!r}: chain entry {dim!r} "
                               "out of dimension order")
                    return
                values.append(value)
            key = tuple(values)
            if key in table:
                self.error(row.span,
                           f"metric {decl.name!r}: duplicate chain "
                           f"{list(key)}")
                return
            table[key] = row.symbols
        dims = {}
        for dim in decl.order:
            dimension = self.engine.dimensions.get(dim)
            if dimension is None:
                self.error(decl.span,
                           f"metric {decl.name!r}: dimension {dim!r} has no "
                           "declared values anywhere in the schema")
                return
            dims[dim] = dimension
        try:
            metric = MetricDenotation(decl.name, decl.order, table, dims)
        except PortalisError as exc:
            self.error(decl.span, str(exc))
            return
        self.engine.metrics[decl.name] = metric

    def _script(self, decl: ScriptDecl) -> None:
        for action in decl.actions:
            if isinstance(action, SetAction):
                if decl.hook:
                    self.error(decl.span,
                               f"script {decl.name!r}: set actions need a "
                               "client session; hooks have none")
                    return
                if action.page not in self.pages:
                    self.error(decl.span,
                               f"script {decl.name!r} sets state on "
                               f"undeclared page {action.page!r}")
                    return
            elif isinstance(action, RefreshAction):
                if action.page not in self.pages:
                    self.error(decl.span,
                               f"script {decl.name!r} refreshes undeclared "
                               f"page {action.page!r}")
                    return
            elif isinstance(action, TransitionAction):
                if not decl.hook:
                    self.error(decl.span,
                               f"script {decl.name!r}: transition actions "
                               "are allowed only in warehouse-update hooks")
                    return
                if not self._check_transition(decl, action):
                    return
        self.engine.scripts.append(Script(
            decl.name, decl.trigger, decl.actions, hook=decl.hook))

    def _check_transition(self, decl: ScriptDecl,
                          action: TransitionAction) -> bool:
        concept_name = self.individual_concepts.get(action.individual_id)
        if concept_name is None:
            self.error(decl.span,
                       f"script {decl.name!r} transitions undeclared "
                       f"individual {action.individual_id!r}")
            return False
        concept = self.engine.store.concepts.get(concept_name)
        kinds = concept.field_kinds() if concept else {}
        for fname, expr in action.assignments:
            if fname not in kinds:
                self.error(decl.span,
                           f"script {decl.name!r}: {concept_name} has no "
                           f"field {fname!r}")
                return False
            if isinstance(expr, LiteralExpr):
                kind = kinds[fname]
                ok = value_conforms(expr.value, kind) or (
                    kind is Kind.REAL and isinstance(expr.value, int)
                    and not isinstance(expr.value, bool))
                if not ok:
                    self.error(decl.span,
                               f"script {decl.name!r}: {fname} wants "
                               f"{kind.value}, got "
                               f"{expr.value!r}")
                    return False
        return True

    def _page(self, decl: PageDecl) -> None:
        try:
            rank = Rank.from_label(decl.rank)
        except ValueError as exc:
            self.error(decl.span, str(exc))
            return
        for dim, value in decl.conditions:
            if dim not in DIMENSION_NAMES:
                self.error(decl.span,
                           f"page {decl.name!r}: unknown dimension {dim!r}")
                return
            alphabet = self.engine.dimensions.get(dim)
            if alphabet is not None and value not in alphabet.alphabet:
                self.error(decl.span,
                           f"page {decl.name!r}: {value!r} not in the "
                           f"{dim} alphabet")
                return
        items = []
        names = set()
        for item in decl.items:
            if item.name in names:
                self.error(item.span,
                           f"page {decl.name!r} declares item "
                           f"{item.name!r} twice")
                return
            names.add(item.name)
            if not self._check_item(decl, item):
                return
            items.append((item.name, item.source))
        self.engine.add_page(PageDefinition(
            decl.name, rank, decl.conditions, tuple(items)))

    def _check_item(self, page: PageDecl, item) -> bool:
        source = item.source
        if isinstance(source, PortalKeyItem):
            if source.key not in CATALOG_KEYS:
                self.error(item.span,
                           f"unknown portal item key {source.key!r}")
                return False
        elif isinstance(source, (CountItem, IdsItem)):
            concept = self.engine.store.concepts.get(source.concept)
            if concept is None:
                self.error(item.span,
                           f"comprehension over undeclared concept "
                           f"{source.concept!r}")
                return False
            try:
                validate_predicate(source.phi, concept.schema())
            except PortalisError as exc:
                self.error(item.span, str(exc))
                return False
        elif isinstance(source, FieldItem):
            concept_name = self.individual_concepts.get(source.individual_id)
            if concept_name is None:
                self.error(item.span,
                           f"field item references undeclared individual "
                           f"{source.individual_id!r}")
                return False
            concept = self.engine.store.concepts.get(concept_name)
            if concept and source.field not in concept.schema():
                self.error(item.span,
                           f"{concept_name} has no field {source.field!r}")
                return False
        elif isinstance(source, FrameQueryItem):
            pattern = source.pattern
            if pattern.relation not in self.relations:
                self.error(item.span,
                           f"query over undeclared relation "
                           f"{pattern.relation!r}")
                return False
            for term in (pattern.subject, pattern.object):
                if not isinstance(term, Variable) \
                        and term not in self.engine.store.individuals:
                    self.error(item.span,
                               f"query constant {term!r} names no declared "
                               "individual")
                    return False
        return True

    def _check_hierarchy_monotonicity(self) -> None:
        """Visible page sets must nest along the rank hierarchy."""
        pages = [self.engine.pages[pid] for pid in self.engine.page_order]
        for persona in self.engine.personas.values():
            previous: Optional[set[str]] = None
            for rank in (Rank.ORDINARY, Rank.MANAGER, Rank.ADMINISTRATOR):
                probe = UserProfile(persona.user_id, rank, persona.dims)
                visible = {page.id for page in pages
                           if _visible(probe, page)}
                if previous is not None and not previous <= visible:
                    self.diagnostics.append(ParseDiagnostic(
                        "error",
                        f"hierarchy monotonicity violated for persona "
                        f"{persona.user_id!r}: rank {rank.label} sees less "
                        "than the rank below", 1, 1))
                    return
                previous = visible


def _visible(profile: UserProfile, page: PageDefinition) -> bool:
    from ..profiles import page_visible
    return page_visible(profile, page)


_ADAPTER_CONCEPT = {
    RepoKind.HR: "HrPosition",
    RepoKind.FINANCE: "FinanceRecord",
    RepoKind.MEDIA: "MediaAsset",
    RepoKind.DOCS: "ContactEntry",
}


def _repo_kind(label: str) -> Optional[RepoKind]:
    try:
        return RepoKind(label)
    except ValueError:
        return None


def load(ast: SchemaAst,
         policy: UpdatePolicy = UpdatePolicy(PolicyMode.EVENT_DRIVEN),
         max_depth: int = DEFAULT_MAX_DEPTH) -> LoadResult:
    """Install a parsed schema into a fresh engine, or report diagnostics."""
    analysis = _Analysis(ast, policy, max_depth)
    analysis.register_names()
    if not analysis.diagnostics:
        analysis.collect_dimensions()
        analysis.build()
    if analysis.diagnostics:
        return LoadResult(None, analysis.diagnostics)
    analysis.engine.finalize()
    return LoadResult(analysis.engine, [])


def load_text(text: str,
              policy: UpdatePolicy = UpdatePolicy(PolicyMode.EVENT_DRIVEN),
              max_depth: int = DEFAULT_MAX_DEPTH) -> LoadResult:
    result: ParseResult = parse(text)
    if not result.ok:
        return LoadResult(None, list(result.diagnostics))
    return load(result.ast, policy, max_depth)


def load_file(path: Union[str, Path],
              policy: UpdatePolicy = UpdatePolicy(PolicyMode.EVENT_DRIVEN),
              max_depth: int = DEFAULT_MAX_DEPTH) -> LoadResult:
    data = Path(path).read_bytes()
    result = parse_bytes(data)
    if not result.ok:
        return LoadResult(None, list(result.diagnostics))
    return load(result.ast, policy, max_depth)
