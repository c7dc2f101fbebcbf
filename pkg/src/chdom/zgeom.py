"""Real ideal triangles, Z-invariants of adjacent pairs and the holonomy blocks.

A pair of adjacent real ideal triangles ``(p1, p2, p3)`` and ``(p3, p4, p1)``
sharing the edge ``{p1, p3}`` is classified up to PU(2,1) by one complex
number ``z`` outside ``{-1, 0}``.  The normal form of such a pair is
``standard_pair(z)``; ``develop_vertex`` goes the other way and places the
fourth vertex for a prescribed invariant.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .chgeom import SQRT2, BoundaryPoint, cartan, heis_to_lift
from .cx3 import ScaledMat33, box, herm, j_unitary_residual, projectively_equal
from .errors import (
    Degenerate,
    DegeneratePair,
    DivisionByZero,
    ForbiddenInvariant,
    NonPositiveModulus,
    NotRealTriangle,
)

REAL_TRIANGLE_TOL = 1e-8

# Lifts of the standard triangle: infinity, [-1, 0], [0, 0].
TAU0_LIFTS = (
    np.array([1, 0, 0], dtype=np.complex128),
    np.array([-1, -SQRT2, 1], dtype=np.complex128),
    np.array([0, 0, 1], dtype=np.complex128),
)
_TAU0 = np.column_stack(TAU0_LIFTS)

_E = np.array([[-1, SQRT2, 1], [-SQRT2, 1, 0], [1, 0, 0]], dtype=np.complex128)
_E_INV = np.array([[0, 0, 1], [0, 1, SQRT2], [1, -SQRT2, -1]], dtype=np.complex128)


@dataclass(frozen=True)
class RealIdealTriangle:
    p1: BoundaryPoint
    p2: BoundaryPoint
    p3: BoundaryPoint

    def __post_init__(self):
        c = cartan(self.p1, self.p2, self.p3)
        if abs(c) > REAL_TRIANGLE_TOL:
            raise NotRealTriangle(f"Cartan invariant {c:.3g} is not 0")

    @property
    def vertices(self):
        return (self.p1, self.p2, self.p3)

    def transform(self, a) -> "RealIdealTriangle":
        return RealIdealTriangle(*(p.transform(a) for p in self.vertices))


def _z_formula(p1, p2, p3, p4) -> complex:
    a1, a2, a3, a4 = (p.lift for p in (p1, p2, p3, p4))
    v = box(a1, a3)
    n_v = np.linalg.norm(v)
    den_a = herm(a2, v)
    den_b = herm(a4, a1)
    if abs(den_a) <= 1e-12 * np.linalg.norm(a2) * n_v:
        raise DivisionByZero("p2 lies on the complex line through p1 and p3")
    if abs(den_b) <= 1e-12 * np.linalg.norm(a4) * np.linalg.norm(a1):
        raise DivisionByZero("p4 coincides with p1")
    return -(herm(a4, v) * herm(a2, a1)) / (den_a * den_b)


@dataclass(frozen=True)
class TrianglePair:
    """Adjacent real ideal triangles ``(p1, p2, p3)`` and ``(p3, p4, p1)``."""

    p1: BoundaryPoint
    p2: BoundaryPoint
    p3: BoundaryPoint
    p4: BoundaryPoint

    def __post_init__(self):
        RealIdealTriangle(self.p1, self.p2, self.p3)
        RealIdealTriangle(self.p3, self.p4, self.p1)
        z = _z_formula(self.p1, self.p2, self.p3, self.p4)
        if abs(z) <= 1e-10 or abs(z + 1) <= 1e-10:
            raise ForbiddenInvariant(f"Z-invariant {z} is in {{-1, 0}}")

    @property
    def tau1(self) -> RealIdealTriangle:
        return RealIdealTriangle(self.p1, self.p2, self.p3)

    @property
    def tau2(self) -> RealIdealTriangle:
        return RealIdealTriangle(self.p3, self.p4, self.p1)

    @classmethod
    def from_triangles(cls, tau1: RealIdealTriangle, tau2: RealIdealTriangle) -> "TrianglePair":
        p1, p2, p3 = tau1.vertices
        q3, p4, q1 = tau2.vertices
        if not (q3.same_as(p3) and q1.same_as(p1)):
            raise DegeneratePair("triangles must be (p1,p2,p3) and (p3,p4,p1)")
        return cls(p1, p2, p3, p4)

    def swapped(self) -> "TrianglePair":
        """The pair ``(tau2, tau1)``."""
        return TrianglePair(self.p3, self.p4, self.p1, self.p2)

    def transform(self, a) -> "TrianglePair":
        return TrianglePair(*(p.transform(a) for p in (self.p1, self.p2, self.p3, self.p4)))


def z_invariant(pair: TrianglePair) -> complex:
    """Z-invariant of an ordered pair; independent of lifts and of the polar vector scale."""
    return _z_formula(pair.p1, pair.p2, pair.p3, pair.p4)


def _check_invariant(z: complex) -> complex:
    z = complex(z)
    if not cmath.isfinite(z):
        raise ForbiddenInvariant("invariant must be finite")
    if abs(z) <= 1e-12 or abs(z + 1) <= 1e-12:
        raise ForbiddenInvariant(f"invariant {z} is in {{-1, 0}}")
    return z


def standard_pair(z: complex) -> TrianglePair:
    """The normal pair: tau0 = (inf, [-1,0], [0,0]) and fourth vertex [z, 0]."""
    z = _check_invariant(z)
    p1, p2, p3 = (BoundaryPoint(v) for v in TAU0_LIFTS)
    return TrianglePair(p1, p2, p3, BoundaryPoint(heis_to_lift((z, 0.0))))


def _frame(t: RealIdealTriangle) -> np.ndarray:
    """Lifts of ``t`` as columns, rescaled so the pairwise form values match tau0's, ``(1, -1, 1)``."""
    a1, a2, a3 = (p.lift for p in t.vertices)
    h12, h23, h31 = herm(a1, a2), herm(a2, a3), herm(a3, a1)
    if min(abs(h12), abs(h23), abs(h31)) == 0.0:
        raise Degenerate("vertices are not pairwise distinct")
    c1 = math.sqrt(abs(h23) / (abs(h12) * abs(h31)))
    c2 = 1.0 / (c1 * np.conj(h12))
    c3 = 1.0 / (c1 * h31)
    q = np.column_stack([c1 * a1, c2 * a2, c3 * a3])
    if np.linalg.cond(q) > 1e12:
        raise Degenerate("lifts do not span C^3")
    return q


def map_to_standard(t: RealIdealTriangle) -> ScaledMat33:
    """Holomorphic isometry sending the vertices of ``t`` to those of tau0.

    Once the lifts are rescaled to tau0's pairwise form values the matrix
    taking one frame to the other preserves the form.
    """
    a = ScaledMat33.of(_TAU0 @ np.linalg.inv(_frame(t)))
    if j_unitary_residual(a) > 1e-8:
        raise NotRealTriangle("triangle cannot be normalised to tau0")
    return a


def develop_vertex(t: RealIdealTriangle, z: complex) -> BoundaryPoint:
    """The vertex ``p4`` making ``(t, (p3, p4, p1))`` a pair with invariant ``z``.

    This is ``map_to_standard(t)^-1`` applied to ``[z, 0]``, evaluated in
    factored form: in tau0's basis ``[z, 0]`` has coordinates
    ``(-|z|^2 - z, -z, 1 + z)``, so no matrix inverse is formed.
    """
    z = _check_invariant(z)
    map_to_standard(t)  # validation only
    q = _frame(t)
    v = q @ np.array([-abs(z) ** 2 - z, -z, 1 + z])
    return BoundaryPoint(v / np.linalg.norm(v))


def m_matrix(x: float, alpha: float) -> ScaledMat33:
    """The real symmetry block ``[[0,0,x],[0,e^{i alpha},0],[1/x,0,0]]``."""
    x = float(x)
    if not x > 0:
        raise NonPositiveModulus(f"modulus must be positive, got {x}")
    return ScaledMat33.of(m_array(x, alpha))


def m_array(x: float, alpha: float) -> np.ndarray:
    return np.array(
        [[0, 0, x], [0, cmath.exp(1j * alpha), 0], [1.0 / x, 0, 0]], dtype=np.complex128
    )


def e_matrix(power: int = 1) -> ScaledMat33:
    """The order-three element cycling tau0's vertices (``power`` = +1 or -1)."""
    if power == 1:
        return ScaledMat33.of(_E)
    if power == -1:
        return ScaledMat33.of(_E_INV)
    raise ValueError("power must be +1 or -1")


def e_array(power: int = 1) -> np.ndarray:
    if power not in (1, -1):
        raise ValueError("power must be +1 or -1")
    return (_E if power == 1 else _E_INV).copy()


def verify_flip(pair: TrianglePair, z: complex | None = None, tol: float = 1e-9) -> bool:
    """Check that ``v -> M conj(v)`` swaps p1<->p3 and p2<->p4 in normal position.

    ``z`` selects the symmetry ``M``; by default the pair's own invariant.
    """
    if z is None:
        z = z_invariant(pair)
    z = _check_invariant(z)
    m = m_array(abs(z), cmath.phase(z))
    a = np.asarray(map_to_standard(pair.tau1).mat)
    q1, q2, q3, q4 = (a @ p.lift for p in (pair.p1, pair.p2, pair.p3, pair.p4))

    def flip(v):
        return m @ np.conj(v)

    return all(
        projectively_equal(flip(u), w, tol)
        for u, w in ((q1, q3), (q3, q1), (q2, q4), (q4, q2))
    )
