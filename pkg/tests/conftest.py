import math
import sys

import numpy as np
import pytest
from scipy.linalg import expm

from chdom.cx3 import J
from chdom.surface import builtin


def random_j_unitary(rng, strength=1.0, scale=1.0):
    """``expm(J H)`` with ``H`` anti-Hermitian; preserves the form exactly in exact arithmetic.

    ``scale`` multiplies the result by a positive constant times a unit phase.
    """
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    h = strength * (g - g.conj().T) / 2
    a = expm(J @ h)
    return a * scale * np.exp(1j * rng.uniform(0, 2 * math.pi))


def random_null(rng):
    zeta = complex(rng.normal(), rng.normal())
    t = rng.normal()
    v = np.array([-abs(zeta) ** 2 + 1j * t, zeta * math.sqrt(2), 1], dtype=complex)
    return v * complex(rng.normal(), rng.normal())


def random_real_triangle(rng):
    """A real ideal triangle: tau0 moved by a random isometry."""
    from chdom.chgeom import BoundaryPoint
    from chdom.zgeom import TAU0_LIFTS, RealIdealTriangle

    a = random_j_unitary(rng, strength=0.7)
    return RealIdealTriangle(*(BoundaryPoint(a @ v) for v in TAU0_LIFTS))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=["S11", "S03"])
def tri(request):
    return builtin(request.param)


@pytest.fixture
def s11():
    return builtin("S11")


@pytest.fixture
def s03():
    return builtin("S03")


NOT_BIPARTITE = """\
surface g=0 k=3
triangle 0 e0+ e0- e1+
triangle 1 e1- e2+ e2-
"""


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
