import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dshift import GradedSubmodule, parse_poly

settings.register_profile("default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def module(d, *polys, label=""):
    return GradedSubmodule.from_polys([parse_poly(p, dim=d) for p in polys], label=label)


@pytest.fixture
def coordinate_family():
    return [module(3, f"z{i}", label=f"N{i}") for i in (1, 2, 3)]


@pytest.fixture
def degrading_pair():
    return [module(3, "z1^2 + z2*z3", label="N1"), module(3, "z2^2", label="N2")]


@pytest.fixture
def refined_family():
    return [module(3, p) for p in ("z1^4", "z1^2*z2", "z1^2 + z2*z3", "z2^2")]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line; returns the boolean for asserting."""

    def record(criterion: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
