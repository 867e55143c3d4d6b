import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "finslab",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("finslab")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance_results():
    """Every acceptance criterion evaluated once per session, keyed by number."""
    from finslab.acceptance import CRITERIA, evaluate
    return {c.number: evaluate(c) for c in CRITERIA}
