import numpy as np
import pytest

from relsym.errors import DomainError
from relsym.verify import SUITES, run_suite, run_suites


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes(name):
    rep = run_suite(name, 2000, seed=5)
    assert rep.passed, rep.to_text()
    assert all(np.isfinite(r.worst_margin) and r.worst_margin >= 0 for r in rep.results)


def test_seeded_reports_are_reproducible():
    assert run_suite("kinematics", 500, 7).to_text() == run_suite("kinematics", 500, 7).to_text()
    assert run_suite("kinematics", 500, 7).to_text() != run_suite("kinematics", 500, 8).to_text()


def test_all_and_validation():
    assert [r.suite for r in run_suites("all", 200, 0)] == list(SUITES)
    with pytest.raises(DomainError):
        run_suite("nope")
    with pytest.raises(DomainError):
        run_suite("eos", 0)
