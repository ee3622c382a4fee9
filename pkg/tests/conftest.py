import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("repo", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def scenarios():
    from nilmag.scenarios import load_scenario

    return {name: load_scenario(name) for name in ("heisenberg", "paper5d", "paper5d-xy", "t4ext", "abelian2")}
