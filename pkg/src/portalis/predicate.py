"""Boolean expression trees over field environments.

The filter language used everywhere in the engine: field access, literals,
the six comparisons, membership in a literal set, and and/or/not. A predicate
is any expression of boolean kind. Expressions are validated once against a
field schema (field name -> Kind); evaluation of a validated expression is
total — no runtime type errors.

Kind discipline:
  * integer and real mix freely in comparisons (numeric family);
  * ordered comparisons (<, <=, >, >=) need numeric or text operands;
  * boolean, media and ref values support only =, != and membership;
  * a text literal may be compared against media/ref fields (their values
    are opaque names), two fields of different kinds may not.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Union

from .errors import IllTypedPredicate


class Kind(str, Enum):
    """Closed, nominal set of field value kinds."""

    INTEGER = "integer"
    REAL = "real"
    TEXT = "text"
    BOOLEAN = "boolean"
    MEDIA = "media"      # media-reference: opaque payload name, =/!= only
    REF = "ref"          # reference-to-concept: opaque individual id

    @property
    def numeric(self) -> bool:
        return self in (Kind.INTEGER, Kind.REAL)


Value = Union[int, float, str, bool]

#: comparison operators in canonical source spelling
CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")
ORDERED_OPS = ("<", "<=", ">", ">=")


def value_conforms(value: Value, kind: Kind) -> bool:
    """True when a raw Python value inhabits the kind.

    bool is checked before int: Python bools are ints, booleans here are not
    integers.
    """
    if kind is Kind.BOOLEAN:
        return isinstance(value, bool)
    if kind is Kind.INTEGER:
        return isinstance(value, int) and not isinstance(value, bool)
    if kind is Kind.REAL:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    return isinstance(value, str)


def kind_of_value(value: Value) -> Kind:
    """Kind a bare literal is taken at before any field context applies."""
    if isinstance(value, bool):
        return Kind.BOOLEAN
    if isinstance(value, int):
        return Kind.INTEGER
    if isinstance(value, float):
        return Kind.REAL
    if isinstance(value, str):
        return Kind.TEXT
    raise IllTypedPredicate(f"unsupported literal value {value!r}")


# ---------------------------------------------------------------------------
# expression nodes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    value: Value

    @property
    def kind(self) -> Kind:
        return kind_of_value(self.value)


@dataclass(frozen=True)
class FieldRef:
    name: str


Operand = Union[Literal, FieldRef]


@dataclass(frozen=True)
class Compare:
    op: str  # one of CMP_OPS
    left: Operand
    right: Operand


@dataclass(frozen=True)
class Member:
    operand: Operand
    choices: tuple[Literal, ...]


@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Not:
    item: "Expr"


Expr = Union[Literal, FieldRef, Compare, Member, And, Or, Not]

TRUE = Literal(True)
FALSE = Literal(False)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def _operand_kind(node: Operand, schema: Mapping[str, Kind]) -> Kind:
    if isinstance(node, Literal):
        return node.kind
    if isinstance(node, FieldRef):
        try:
            return schema[node.name]
        except KeyError:
            raise IllTypedPredicate(f"unknown field {node.name!r}") from None
    raise IllTypedPredicate(f"not an operand: {node!r}")


def _eq_compatible(a: Kind, b: Kind, a_literal: bool, b_literal: bool) -> bool:
    if a is b:
        return True
    if a.numeric and b.numeric:
        return True
    # text literals double as media/ref names; fields keep nominal kinds
    if a_literal and a is Kind.TEXT and b in (Kind.MEDIA, Kind.REF):
        return True
    if b_literal and b is Kind.TEXT and a in (Kind.MEDIA, Kind.REF):
        return True
    return False


def _order_compatible(a: Kind, b: Kind) -> bool:
    if a.numeric and b.numeric:
        return True
    return a is Kind.TEXT and b is Kind.TEXT


def infer_kind(expr: Expr, schema: Mapping[str, Kind]) -> Kind:
    """Kind of the expression; raises IllTypedPredicate on any violation."""
    if isinstance(expr, (Literal, FieldRef)):
        return _operand_kind(expr, schema)
    if isinstance(expr, Compare):
        if expr.op not in CMP_OPS:
            raise IllTypedPredicate(f"unknown comparison operator {expr.op!r}")
        lk = _operand_kind(expr.left, schema)
        rk = _operand_kind(expr.right, schema)
        if expr.op in ORDERED_OPS:
            if not _order_compatible(lk, rk):
                raise IllTypedPredicate(
                    f"cannot order {lk.value} against {rk.value}")
        else:
            if not _eq_compatible(lk, rk,
                                  isinstance(expr.left, Literal),
                                  isinstance(expr.right, Literal)):
                raise IllTypedPredicate(
                    f"cannot compare {lk.value} against {rk.value}")
        return Kind.BOOLEAN
    if isinstance(expr, Member):
        ok = _operand_kind(expr.operand, schema)
        if not expr.choices:
            raise IllTypedPredicate("membership needs at least one choice")
        for choice in expr.choices:
            if not _eq_compatible(ok, choice.kind,
                                  isinstance(expr.operand, Literal), True):
                raise IllTypedPredicate(
                    f"membership choice {choice.value!r} does not fit "
                    f"{ok.value}")
        return Kind.BOOLEAN
    if isinstance(expr, (And, Or)):
        for side in (expr.left, expr.right):
            if infer_kind(side, schema) is not Kind.BOOLEAN:
                raise IllTypedPredicate("and/or needs boolean operands")
        return Kind.BOOLEAN
    if isinstance(expr, Not):
        if infer_kind(expr.item, schema) is not Kind.BOOLEAN:
            raise IllTypedPredicate("not needs a boolean operand")
        return Kind.BOOLEAN
    raise IllTypedPredicate(f"not an expression: {expr!r}")


def validate_predicate(expr: Expr, schema: Mapping[str, Kind]) -> Expr:
    """Check that expr is a boolean expression over the schema."""
    kind = infer_kind(expr, schema)
    if kind is not Kind.BOOLEAN:
        raise IllTypedPredicate(f"predicate has kind {kind.value}, not boolean")
    return expr


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _resolve(node: Operand, env: Mapping[str, Value]) -> Value:
    if isinstance(node, Literal):
        return node.value
    return env[node.name]


def _values_equal(a: Value, b: Value) -> bool:
    # validated expressions never mix bool with numerics, but keep the
    # equality honest anyway (True == 1 in raw Python)
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    return a == b


def evaluate(expr: Expr, env: Mapping[str, Value]) -> Value:
    """Evaluate a validated expression over a total field environment."""
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, FieldRef):
        return env[expr.name]
    if isinstance(expr, Compare):
        left = _resolve(expr.left, env)
        right = _resolve(expr.right, env)
        if expr.op == "=":
            return _values_equal(left, right)
        if expr.op == "!=":
            return not _values_equal(left, right)
        if expr.op == "<":
            return left < right
        if expr.op == "<=":
            return left <= right
        if expr.op == ">":
            return left > right
        return left >= right
    if isinstance(expr, Member):
        value = _resolve(expr.operand, env)
        return any(_values_equal(value, c.value) for c in expr.choices)
    if isinstance(expr, And):
        return bool(evaluate(expr.left, env)) and bool(evaluate(expr.right, env))
    if isinstance(expr, Or):
        return bool(evaluate(expr.left, env)) or bool(evaluate(expr.right, env))
    if isinstance(expr, Not):
        return not evaluate(expr.item, env)
    raise IllTypedPredicate(f"not an expression: {expr!r}")


# ---------------------------------------------------------------------------
# canonical text form (shared by the DSL printer and hashing)
# ---------------------------------------------------------------------------

def format_literal(value: Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        escaped = (value.replace("\\", "\\\\").replace('"', '\\"')
                   .replace("\n", "\\n").replace("\t", "\\t"))
        return f'"{escaped}"'
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _fmt_operand(node: Operand) -> str:
    if isinstance(node, Literal):
        return format_literal(node.value)
    return node.name


# precedence: or(1) < and(2) < not(3) < atoms(4)
def _fmt(expr: Expr, parent_level: int) -> str:
    if isinstance(expr, (Literal, FieldRef)):
        text, level = _fmt_operand(expr), 4
    elif isinstance(expr, Compare):
        text = f"{_fmt_operand(expr.left)} {expr.op} {_fmt_operand(expr.right)}"
        level = 4
    elif isinstance(expr, Member):
        choices = ", ".join(format_literal(c.value) for c in expr.choices)
        text, level = f"{_fmt_operand(expr.operand)} in ({choices})", 4
    elif isinstance(expr, Not):
        text, level = f"not {_fmt(expr.item, 3)}", 3
    elif isinstance(expr, And):
        text, level = f"{_fmt(expr.left, 2)} and {_fmt(expr.right, 3)}", 2
    elif isinstance(expr, Or):
        text, level = f"{_fmt(expr.left, 1)} or {_fmt(expr.right, 2)}", 1
    else:
        raise IllTypedPredicate(f"not an expression: {expr!r}")
    if level < parent_level:
        return f"({text})"
    return text


def format_predicate(expr: Expr) -> str:
    """Deterministic source form; the DSL parser reads it back unchanged."""
    return _fmt(expr, 0)
