"""Shared fixtures and the acceptance summary printed at the end of a run."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from relsym import EquationOfState

# fixed example generation keeps reruns reproducible
settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")

# criterion number -> (description, passed, detail), filled by test_acceptance
ACCEPTANCE: dict = {}


def record_acceptance(number: int, description: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE[number] = (description, bool(passed), detail)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def eos_rel():
    return EquationOfState(k=1.0, gamma=2.0, eps=0.5)


@pytest.fixture
def eos_newton():
    return EquationOfState(k=1.0, gamma=2.0, eps=0.0)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        desc, ok, detail = ACCEPTANCE[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {desc}  {detail}".rstrip())
