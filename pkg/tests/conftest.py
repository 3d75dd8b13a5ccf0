import random

import pytest

from herdability.matrix import RationalMatrix


def int_matmul(X, Y):
    """Plain nested-list product, independent of RationalMatrix."""
    return [[sum(X[i][k] * Y[k][j] for k in range(len(Y))) for j in range(len(Y[0]))] for i in range(len(X))]


def two_level_rows(a, b, c):
    return [
        [0, 1, a, 2, 0, 0],
        [1, 0, 0, 0, 0, 0],
        [a, 0, 0, 0, b, c],
        [2, 0, 0, 0, 0, 0],
        [0, 0, b, 0, 0, 0],
        [0, 0, c, 0, 0, 0],
    ]


@pytest.fixture
def rng():
    return random.Random(20240611)


def M(rows):
    return RationalMatrix(rows)


# acceptance criterion -> (passed, detail), filled in by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {key}: {detail}")
