from __future__ import annotations

import random
import threading

import pytest

from portalis.errors import (
    AlreadyClosed,
    IncompleteTable,
    OutOfOrderChain,
    SessionClosed,
    UnknownDimensionValue,
    UnknownToken,
)
from portalis.profiles import (
    AssignmentDimension,
    DEFAULT_ALPHABETS,
    MetricDenotation,
    Rank,
    SessionRegistry,
    SessionState,
    UserProfile,
    derive_access_profile,
)

DIMS = {
    "s": AssignmentDimension("s", DEFAULT_ALPHABETS["s"]),
    "p": AssignmentDimension("p", DEFAULT_ALPHABETS["p"]),
}


def metric_z() -> MetricDenotation:
    return MetricDenotation("z", ("s", "p"), {
        (): {"z_c.s.", "z_r.s."},
        ("higraph",): {"z_higraph"},
        ("mmedia",): {"z_mmedia"},
    }, DIMS)


def metric_q_full() -> MetricDenotation:
    table = {(): set()}
    for s in ("higraph", "mmedia"):
        table[(s,)] = set()
        for p in ("registered", "unregistered", "corporate"):
            symbol = f"q_{s}_{p}"
            table[(s, p)] = {symbol}
            table[(s,)].add(symbol)
            table[()].add(symbol)
    return MetricDenotation("q", ("s", "p"), table, DIMS)


# ---------------------------------------------------------------------------
# curried application
# ---------------------------------------------------------------------------

def test_settings_assignment_selects_symbol():
    assert metric_z().apply_assignment([("s", "higraph")]) == {"z_higraph"}


def test_second_assignment_does_not_refine_z():
    z = metric_z()
    once = z.apply_assignment([("s", "higraph")])
    twice = z.apply_assignment([("s", "higraph"), ("p", "registered")])
    assert twice == once == {"z_higraph"}


def test_overheads_refine_through_status():
    q = metric_q_full()
    settings_only = q.apply_assignment([("s", "mmedia")])
    both = q.apply_assignment([("s", "mmedia"), ("p", "corporate")])
    assert both < settings_only  # strictly refined
    assert both == {"q_mmedia_corporate"}


def test_empty_chain_returns_base_set():
    assert metric_z().apply_assignment([]) == {"z_c.s.", "z_r.s."}


def test_unknown_dimension_value():
    with pytest.raises(UnknownDimensionValue):
        metric_z().apply_assignment([("s", "plaintext")])


def test_out_of_order_chain():
    with pytest.raises(OutOfOrderChain):
        metric_z().apply_assignment([("p", "registered")])
    with pytest.raises(OutOfOrderChain):
        metric_z().apply_assignment(
            [("s", "higraph"), ("p", "registered"), ("p", "corporate")])


def test_missing_prefix_rejected():
    with pytest.raises(IncompleteTable):
        MetricDenotation("broken", ("s", "p"), {
            (): {"base"},
            ("higraph", "registered"): {"leaf"},  # no ("higraph",) prefix
        }, DIMS)


def test_missing_base_rejected():
    with pytest.raises(IncompleteTable):
        MetricDenotation("broken", ("s",), {("higraph",): {"x"}}, DIMS)


def test_empty_value_set_rejected():
    with pytest.raises(IncompleteTable):
        MetricDenotation("broken", ("s",), {(): set()}, DIMS)


# ---------------------------------------------------------------------------
# saturation
# ---------------------------------------------------------------------------

def test_saturation_demo_values():
    assert metric_z().saturation_level() == 1
    r = MetricDenotation("r", ("s", "p"), {
        (): {"r_c.s.", "r_r.s."},
        ("higraph",): {"r_higraph"},
        ("mmedia",): {"r_mmedia"},
    }, DIMS)
    assert r.saturation_level() == 1
    assert metric_q_full().saturation_level() == 2


def test_saturation_degenerate_constant():
    table = {(): {"q_i"}}
    for s in ("higraph", "mmedia"):
        table[(s,)] = {"q_i"}
        for p in ("registered", "unregistered", "corporate"):
            table[(s, p)] = {"q_i"}
    metric = MetricDenotation("q", ("s", "p"), table, DIMS)
    assert metric.saturation_level() == 0


def _brute_force_saturation(metric: MetricDenotation) -> int:
    alphabets = [sorted(metric.dimensions[d].alphabet)
                 for d in metric.dimension_order]
    chains = [()]
    frontier = [()]
    for values in alphabets:
        frontier = [c + (v,) for c in frontier for v in values]
        chains.extend(frontier)
    for k in range(len(metric.dimension_order) + 1):
        stable = True
        for chain in chains:
            if len(chain) < k:
                continue
            if metric._apply_values(chain) != metric._apply_values(chain[:k]):
                stable = False
                break
        if stable:
            return k
    return len(metric.dimension_order)


def test_saturation_randomized_matches_exhaustive_scan():
    rng = random.Random(0xA5)
    for _ in range(40):
        n_dims = rng.randint(1, 3)
        order = ("s", "p", "v")[:n_dims]
        dims = {name: AssignmentDimension(
            name, frozenset(f"{name}{i}" for i in range(rng.randint(1, 3))))
            for name in order}
        symbols = ["alpha", "beta", "gamma", "delta"]
        table = {(): frozenset(rng.sample(symbols, rng.randint(1, 3)))}
        frontier = [()]
        for name in order:
            new_frontier = []
            for prefix in frontier:
                for value in dims[name].alphabet:
                    chain = prefix + (value,)
                    if rng.random() < 0.5:
                        table[chain] = frozenset(
                            rng.sample(symbols, rng.randint(1, 3)))
                    else:
                        table[chain] = table[prefix]
                    new_frontier.append(chain)
            frontier = new_frontier
        metric = MetricDenotation("m", order, table, dims)
        assert metric.saturation_level() == _brute_force_saturation(metric)


# ---------------------------------------------------------------------------
# sessions
# ---------------------------------------------------------------------------

def make_profile(rank=Rank.ORDINARY) -> UserProfile:
    return UserProfile("u", rank, {"s": "higraph", "p": "registered"})


def test_open_close_lifecycle():
    registry = SessionRegistry()
    session = registry.open(make_profile())
    assert registry.validate(session.token) is session
    registry.close(session.token)
    with pytest.raises(SessionClosed):
        registry.validate(session.token)
    with pytest.raises(AlreadyClosed):
        registry.close(session.token)


def test_unknown_token():
    registry = SessionRegistry()
    with pytest.raises(UnknownToken):
        registry.validate("feedface")
    with pytest.raises(UnknownToken):
        registry.close("feedface")


def test_two_opens_are_independent():
    registry = SessionRegistry()
    first = registry.open(make_profile())
    second = registry.open(make_profile())
    assert first.token != second.token
    registry.close(first.token)
    assert registry.validate(second.token) is second


def test_thousand_opens_unique_tokens():
    registry = SessionRegistry()
    tokens = {registry.open(make_profile()).token for _ in range(1000)}
    assert len(tokens) == 1000
    assert all(len(t) == 32 for t in tokens)  # 128 bits hex


def test_close_validate_linearizable():
    registry = SessionRegistry()
    session = registry.open(make_profile())
    outcomes = []

    def worker():
        try:
            registry.validate(session.token)
            outcomes.append("valid")
        except (SessionClosed, UnknownToken):
            outcomes.append("closed")

    threads = [threading.Thread(target=worker) for _ in range(16)]
    closer = threading.Thread(target=lambda: registry.close(session.token))
    for t in threads[:8]:
        t.start()
    closer.start()
    for t in threads[8:]:
        t.start()
    for t in threads + [closer]:
        t.join()
    # once closed, never valid again
    assert registry.is_open(session.token) is False
    with pytest.raises(SessionClosed):
        registry.validate(session.token)


# ---------------------------------------------------------------------------
# access profiles
# ---------------------------------------------------------------------------

class _Page:
    def __init__(self, id, required_rank, conditions=()):
        self.id = id
        self.required_rank = required_rank
        self.conditions = conditions


PAGES = [
    _Page("home", Rank.ORDINARY),
    _Page("reports", Rank.MANAGER),
    _Page("console", Rank.ADMINISTRATOR),
]


def _resolver(page):
    return {f"obj-{page.id}"}


def test_admin_supersets_manager():
    registry = SessionRegistry()
    manager = UserProfile("m", Rank.MANAGER, {})
    admin = UserProfile("a", Rank.ADMINISTRATOR, {})
    m_access = derive_access_profile(manager, registry.open(manager), PAGES,
                                     _resolver)
    a_access = derive_access_profile(admin, registry.open(admin), PAGES,
                                     _resolver)
    assert m_access.visible_pages < a_access.visible_pages
    assert m_access.visible_objects < a_access.visible_objects
    assert a_access.metadata_access is True


def test_ordinary_has_no_metadata_access():
    registry = SessionRegistry()
    profile = make_profile(Rank.ORDINARY)
    access = derive_access_profile(profile, registry.open(profile), PAGES,
                                   _resolver)
    assert access.metadata_access is False


def test_closed_session_rejected():
    registry = SessionRegistry()
    profile = make_profile()
    session = registry.open(profile)
    registry.close(session.token)
    assert session.state is SessionState.CLOSED
    with pytest.raises(SessionClosed):
        derive_access_profile(profile, session, PAGES, _resolver)
