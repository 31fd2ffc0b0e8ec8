import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE: list[tuple[str, str, str]] = []


@pytest.fixture
def report_criterion():
    """Record one acceptance line; printed in the terminal summary."""

    def _report(name: str, ok: bool, detail: str = "", status: str | None = None):
        _ACCEPTANCE.append((name, status or ("PASS" if ok else "FAIL"), detail))

    return _report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{status:4}  {name}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240109)


def random_walk(seed: int, T: int, offset: float = 0.0) -> np.ndarray:
    return offset + np.cumsum(np.random.default_rng(seed).standard_normal(T))
