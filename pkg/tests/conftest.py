import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from leibniz_lab.exact import Matrix

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_rational(rng, lo=-5, hi=5, den=3):
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))


def random_invertible(n, rng, lo=-3, hi=3, den=3):
    """Random rational matrix, redrawn until invertible."""
    while True:
        M = Matrix.from_dense([[random_rational(rng, lo, hi, den) for _ in range(n)] for _ in range(n)])
        if M.rank() == n:
            return M


@pytest.fixture
def rng():
    return random.Random(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
