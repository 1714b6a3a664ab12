import numpy as np
import pytest
from hypothesis import settings

from extremal_lab import polytope as pt

settings.register_profile("default", max_examples=30, deadline=None)
settings.load_profile("default")


@pytest.fixture
def square():
    return pt.unit_cube(2)


@pytest.fixture
def interval():
    return pt.unit_cube(1)


@pytest.fixture
def simplex2():
    return pt.standard_simplex(2)


def inf_definition(P, y, x, iters=80):
    """Bisection on ``r`` for ``min{r in [-1, 1/n] : x in y + n(r+1)/(n+1) (P - y)}``."""
    n = P.dim
    lo, hi = -1.0, 1.0 / n

    def inside(r):
        s = n * (r + 1.0) / (n + 1.0)
        if s <= 0:
            return np.allclose(x, y, atol=1e-12)
        return bool(pt.contains(pt.homothety(P, y, s), x, 1e-12))

    if inside(lo):
        return lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if inside(mid):
            hi = mid
        else:
            lo = mid
    return hi


def interior_point(P, rng):
    w = rng.dirichlet(np.ones(len(P.vertices)))
    return w @ P.vertices


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
