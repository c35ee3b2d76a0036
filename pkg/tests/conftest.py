import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from consistency_lens.io.trace_format import read_document  # noqa: E402

TRACES = ROOT / "tests" / "fixtures" / "traces"

settings.register_profile("dev", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("acceptance", max_examples=10_000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "dev"))


def load_trace(name: str):
    return read_document(str(TRACES / f"{name}.trace")).trace


@pytest.fixture
def trace_path():
    return lambda name: str(TRACES / f"{name}.trace")


@pytest.fixture
def E1():
    return load_trace("e1")


@pytest.fixture
def E2():
    return load_trace("e2")


@pytest.fixture
def E3():
    return load_trace("e3")


@pytest.fixture
def E4():
    return load_trace("e4")


@pytest.fixture
def E5():
    return load_trace("e5")


@pytest.fixture
def E6():
    return load_trace("e6")


@pytest.fixture
def E7():
    return load_trace("e7")


@pytest.fixture
def E8():
    return load_trace("e8")
