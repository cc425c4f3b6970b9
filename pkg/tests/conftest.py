from __future__ import annotations

from pathlib import Path

import pytest

from portalis.dsl import load_file
from portalis.events import PolicyMode, UpdatePolicy

SCHEMAS = Path(__file__).resolve().parents[1] / "src" / "portalis" / "schemas"
DEMO = SCHEMAS / "demo.pds"


@pytest.fixture(scope="session")
def schemas_dir() -> Path:
    return SCHEMAS


@pytest.fixture(scope="session")
def demo_path() -> Path:
    return DEMO


@pytest.fixture()
def demo_engine():
    result = load_file(DEMO)
    assert result.ok, [d.format("demo.pds") for d in result.diagnostics]
    return result.engine


def engine_with_policy(mode: PolicyMode, period: int = 1):
    result = load_file(DEMO, policy=UpdatePolicy(mode, period=period))
    assert result.ok
    return result.engine


@pytest.fixture()
def manual_engine():
    return engine_with_policy(PolicyMode.MANUAL)


@pytest.fixture()
def periodic_engine():
    return engine_with_policy(PolicyMode.PERIODIC, period=5)
