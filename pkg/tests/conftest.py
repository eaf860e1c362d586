from fractions import Fraction

import pytest

from gridlet.caseio import load_bundled
from gridlet.netmodel import Network


def exact_dc_flow(n_bus, lines, slack, injections):
    """Exact DC flows with rational arithmetic.

    ``lines`` are ``(u, v, x)`` over bus positions ``0..n_bus-1``. Plain Gaussian
    elimination on the slack-reduced susceptance matrix; used to derive the
    expected values of small analytic fixtures.
    """
    B = [[Fraction(0)] * n_bus for _ in range(n_bus)]
    for u, v, x in lines:
        b = 1 / Fraction(x)
        B[u][u] += b
        B[v][v] += b
        B[u][v] -= b
        B[v][u] -= b
    keep = [i for i in range(n_bus) if i != slack]
    A = [[B[i][j] for j in keep] + [Fraction(injections[i])] for i in keep]
    m = len(keep)
    for c in range(m):
        piv = next(r for r in range(c, m) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        for r in range(m):
            if r != c and A[r][c] != 0:
                f = A[r][c] / A[c][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    theta = [Fraction(0)] * n_bus
    for k, i in enumerate(keep):
        theta[i] = A[k][m] / A[k][k]
    return [(theta[u] - theta[v]) / Fraction(x) for u, v, x in lines]


@pytest.fixture(scope="session")
def ieee30():
    return load_bundled("case_ieee30")


@pytest.fixture(scope="session")
def case57():
    return load_bundled("case57")


@pytest.fixture(scope="session")
def case118():
    return load_bundled("case118")


@pytest.fixture
def triangle():
    return Network.from_edges([(1, 2), (2, 3), (1, 3)], slack=3, reactance=0.1, name="triangle")


@pytest.fixture
def path3():
    return Network.from_edges([(1, 2), (2, 3)], slack=3, reactance=0.1, name="path")


@pytest.fixture
def ring4():
    return Network.from_edges([(1, 2), (2, 3), (3, 4), (4, 1)], slack=1, reactance=0.1, name="c4")


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(test_acceptance.RESULTS):
        terminalreporter.write_line(test_acceptance.RESULTS[n][1])
