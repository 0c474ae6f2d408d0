import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from medianspace import fixtures  # noqa: E402

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

SMALL = ["hypercube:3", "grid:2", "path:4", "star:3", "substar", "weighted_star:5",
         "substar:3:2:1/2", "star:2*path:3", "cycle:4"]


@pytest.fixture(scope="session")
def small_spaces():
    return {spec: fixtures.parse_fixture(spec) for spec in SMALL}


def grid_pts(xs, ys):
    return {f"{x},{y}" for x in xs for y in ys}


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
