"""Curried profile metrics, saturation, personas and sessions.

A metric denotation is a family of generalized value sets indexed by chains
of assignments (settings, then status, then whatever the schema orders next).
Applying a chain walks to the longest stored prefix; the saturation level is
where longer chains stop refining the value set. User personas carry one
value per dimension plus a hierarchy rank; opening a session mints an
unguessable token whose access profile dies with the session.
"""

from __future__ import annotations

import enum
import itertools
import secrets
import threading
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    AlreadyClosed,
    IncompleteTable,
    OutOfOrderChain,
    SessionClosed,
    UnknownDimensionValue,
    UnknownToken,
)

#: the four assignment dimensions, in the paper-demo order
DIMENSION_NAMES = ("s", "p", "v", "e")

DEFAULT_ALPHABETS: dict[str, frozenset[str]] = {
    "s": frozenset({"higraph", "mmedia"}),
    "p": frozenset({"registered", "unregistered", "corporate"}),
}


class Rank(enum.IntEnum):
    """Access hierarchy; comparisons follow extended-access order."""

    ORDINARY = 0
    MANAGER = 1
    ADMINISTRATOR = 2

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "Rank":
        try:
            return cls[label.upper()]
        except KeyError:
            raise ValueError(f"unknown rank {label!r}") from None


@dataclass(frozen=True)
class AssignmentDimension:
    name: str
    alphabet: frozenset[str]

    def __post_init__(self):
        if not self.alphabet:
            raise ValueError(f"dimension {self.name!r} has an empty alphabet")


Chain = Sequence[tuple[str, str]]  # ordered (dimension, value) pairs


class MetricDenotation:
    """Prefix-closed table from assignment chains to generalized value sets."""

    def __init__(self, name: str, dimension_order: Sequence[str],
                 table: Mapping[tuple[str, ...], Iterable[str]],
                 dimensions: Mapping[str, AssignmentDimension],
                 declared_saturation: Optional[int] = None):
        self.name = name
        self.dimension_order = tuple(dimension_order)
        self.dimensions = dict(dimensions)
        self.declared_saturation = declared_saturation
        self.table: dict[tuple[str, ...], frozenset[str]] = {
            tuple(chain): frozenset(symbols)
            for chain, symbols in table.items()}
        self._validate()

    def _validate(self) -> None:
        for dim in self.dimension_order:
            if dim not in self.dimensions:
                raise IncompleteTable(
                    f"metric {self.name}: undeclared dimension {dim!r}")
        if () not in self.table:
            raise IncompleteTable(
                f"metric {self.name}: missing base entry []")
        for chain, symbols in self.table.items():
            if len(chain) > len(self.dimension_order):
                raise IncompleteTable(
                    f"metric {self.name}: chain {chain} longer than the "
                    "dimension order")
            for position, value in enumerate(chain):
                dim = self.dimension_order[position]
                if value not in self.dimensions[dim].alphabet:
                    raise UnknownDimensionValue(
                        f"metric {self.name}: {value!r} not in the "
                        f"{dim} alphabet")
            if not symbols:
                raise IncompleteTable(
                    f"metric {self.name}: empty value set for chain {chain}")
            if chain and chain[:-1] not in self.table:
                raise IncompleteTable(
                    f"metric {self.name}: missing prefix entry "
                    f"{list(chain[:-1])}")

    # -- application ----------------------------------------------------------

    def _check_chain(self, chain: Chain) -> tuple[str, ...]:
        values: list[str] = []
        for position, (dim, value) in enumerate(chain):
            if position >= len(self.dimension_order):
                raise OutOfOrderChain(
                    f"metric {self.name}: chain longer than dimension order")
            expected = self.dimension_order[position]
            if dim != expected:
                raise OutOfOrderChain(
                    f"metric {self.name}: assignment {position} is {dim!r}, "
                    f"order wants {expected!r}")
            if value not in self.dimensions[dim].alphabet:
                raise UnknownDimensionValue(
                    f"metric {self.name}: {value!r} not in the {dim} alphabet")
            values.append(value)
        return tuple(values)

    def apply_assignment(self, chain: Chain) -> frozenset[str]:
        """Value set at the longest stored prefix of the chain.

        Assignments beyond the table's depth cannot refine further, which is
        exactly the saturation behaviour.
        """
        values = self._check_chain(chain)
        for cut in range(len(values), -1, -1):
            entry = self.table.get(values[:cut])
            if entry is not None:
                return entry
        raise IncompleteTable(f"metric {self.name}: missing base entry []")

    def saturation_level(self) -> int:
        """Least k after which longer chains return the same value set."""
        alphabets = [sorted(self.dimensions[dim].alphabet)
                     for dim in self.dimension_order]
        # every chain (as a value tuple) up to the full depth
        chains: list[tuple[str, ...]] = [()]
        frontier: list[tuple[str, ...]] = [()]
        for values in alphabets:
            frontier = [c + (v,) for c in frontier for v in values]
            chains.extend(frontier)
        for k in range(len(self.dimension_order) + 1):
            if all(self._apply_values(c) == self._apply_values(c[:k])
                   for c in chains if len(c) >= k):
                return k
        return len(self.dimension_order)

    def _apply_values(self, values: tuple[str, ...]) -> frozenset[str]:
        for cut in range(len(values), -1, -1):
            entry = self.table.get(values[:cut])
            if entry is not None:
                return entry
        raise IncompleteTable(f"metric {self.name}: missing base entry []")


@dataclass(frozen=True)
class UserProfile:
    """A persona: one value per dimension plus a hierarchy rank."""

    user_id: str
    rank: Rank
    dims: Mapping[str, str]

    def dimension(self, name: str) -> Optional[str]:
        return self.dims.get(name)


@dataclass(frozen=True)
class AccessProfile:
    """Session-scoped visibility; dies when the session closes."""

    session_token: str
    visible_pages: frozenset[str]
    visible_objects: frozenset[str]
    metadata_access: bool
    expiry: Optional[int] = None


class SessionState(enum.Enum):
    OPEN = "open"
    CLOSED = "closed"


@dataclass
class Session:
    token: str
    profile: UserProfile
    opened_at: int
    state: SessionState = SessionState.OPEN


class SessionRegistry:
    """Session lifecycle; validation is linearizable with close."""

    def __init__(self):
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}
        self._clock = itertools.count(1)

    def open(self, profile: UserProfile) -> Session:
        with self._lock:
            while True:
                token = secrets.token_hex(16)  # 128 bits
                if token not in self._sessions:
                    break
            session = Session(token, profile, next(self._clock))
            self._sessions[token] = session
            return session

    def close(self, token: str) -> Session:
        with self._lock:
            session = self._sessions.get(token)
            if session is None:
                raise UnknownToken(f"token {token!r} was never issued")
            if session.state is SessionState.CLOSED:
                raise AlreadyClosed("session already closed")
            session.state = SessionState.CLOSED
            return session

    def validate(self, token: str) -> Session:
        with self._lock:
            session = self._sessions.get(token)
            if session is None:
                raise UnknownToken(f"token {token!r} was never issued")
            if session.state is SessionState.CLOSED:
                raise SessionClosed("session is closed")
            return session

    def is_open(self, token: str) -> bool:
        with self._lock:
            session = self._sessions.get(token)
            return session is not None and session.state is SessionState.OPEN


def page_visible(profile: UserProfile, page) -> bool:
    """Rank gate plus dimension conditions (duck-typed page definition)."""
    if profile.rank < page.required_rank:
        return False
    return all(profile.dimension(dim) == value
               for dim, value in page.conditions)


def derive_access_profile(profile: UserProfile, session: Session,
                          pages: Sequence, object_resolver) -> AccessProfile:
    """Access profile for an open session.

    Visible pages come from the rank/condition policy; visible objects are
    whatever the resolver says those pages expose. Metadata access is the
    administrator privilege, nobody else's.
    """
    if session.state is not SessionState.OPEN:
        raise SessionClosed("session is closed")
    visible = [page for page in pages if page_visible(profile, page)]
    objects: set[str] = set()
    for page in visible:
        objects.update(object_resolver(page))
    return AccessProfile(
        session_token=session.token,
        visible_pages=frozenset(page.id for page in visible),
        visible_objects=frozenset(objects),
        metadata_access=profile.rank is Rank.ADMINISTRATOR,
    )
