import os
import time

import pytest

from meritfame.model import load_params
from meritfame.simulator import grow

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIGS = os.path.join(ROOT, "configs")

ACCEPTANCE_LINES = []
# wall-clock seconds spent growing each session graph
BUILD_SECONDS = {}


@pytest.fixture(scope="session")
def acceptance_params():
    return load_params(os.path.join(CONFIGS, "acceptance.json"))


@pytest.fixture(scope="session")
def tail_params():
    return load_params(os.path.join(CONFIGS, "fig3_tail.json"))


@pytest.fixture(scope="session")
def acceptance_graph(acceptance_params):
    t0 = time.perf_counter()
    g = grow(acceptance_params)
    BUILD_SECONDS["acceptance"] = time.perf_counter() - t0
    return g


@pytest.fixture(scope="session")
def tail_graph(tail_params):
    t0 = time.perf_counter()
    g = grow(tail_params)
    BUILD_SECONDS["tail"] = time.perf_counter() - t0
    return g


@pytest.fixture
def record():
    """Collects one summary line per acceptance criterion."""
    def _record(criterion, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
