"""Shared fixtures: case-study contests and solved equilibrium profiles.

Profiles are session-scoped because the variable-prize solve tabulates
two strategy and prize schedules (a few seconds each).
"""

import pytest

from allpay.config import case_study_spec
from allpay.mechanisms import solve_profile


@pytest.fixture(scope="session")
def spec01():
    return case_study_spec(0.1)


@pytest.fixture(scope="session")
def spec05():
    return case_study_spec(0.5)


@pytest.fixture(scope="session")
def opt01(spec01):
    return solve_profile(spec01, "opt")


@pytest.fixture(scope="session")
def fix01(spec01):
    return solve_profile(spec01, "fix")


@pytest.fixture(scope="session")
def sym1_01(spec01):
    return solve_profile(spec01, "sym1")


@pytest.fixture(scope="session")
def sym2_01(spec01):
    return solve_profile(spec01, "sym2")


@pytest.fixture(scope="session")
def all_profiles(opt01, fix01, sym1_01, sym2_01):
    return {"opt": opt01, "fix": fix01, "sym1": sym1_01, "sym2": sym2_01}
