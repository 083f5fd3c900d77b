import math

import pytest
from hypothesis import settings

from cardinal_mra import Gaussian, GeneralizedMultiquadric, Polyharmonic

settings.register_profile("repo", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("repo")

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def one_d_families():
    """The four one-dimensional instances used throughout."""
    return [
        Polyharmonic(1, 1),
        Polyharmonic(1, 2),
        GeneralizedMultiquadric(1, 0.5, 1.0),
        Gaussian(1, 1.0),
    ]


PI = math.pi
