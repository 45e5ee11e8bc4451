import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def classes():
    """Every class of size 1..6, keyed by size."""
    from ybset.enumeration import all_solutions

    return {n: all_solutions(n) for n in range(1, 7)}
