"""Geometry of the complex hyperbolic plane in the Siegel model.

Points of the plane are negative vectors, boundary points are null vectors,
both up to complex scaling.  Isometries are :class:`~chdom.cx3.ScaledMat33`
matrices preserving the form up to a positive factor.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .cx3 import (
    ScaledMat33,
    _as_scaled,
    cvec,
    herm,
    j_unitary_residual,
    log_spectral_radius,
    projectively_equal,
    su_normalize,
    trace,
)
from .errors import DegenerateTriple, NotInterior, NotIsometry, NotNull, ZeroVector

SQRT2 = math.sqrt(2.0)
NULL_BAND = 1e-10
PARABOLIC_BAND = 1e-7
DEFAULT_ISOMETRY_TOL = 1e-9


class VectorSign(enum.Enum):
    NEGATIVE = -1
    NULL = 0
    POSITIVE = 1


class IsometryKind(enum.Enum):
    LOXODROMIC = "loxodromic"
    ELLIPTIC = "elliptic"
    PARABOLIC_OR_SPECIAL_ELLIPTIC = "parabolic-or-special-elliptic"


class _Infinity:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INF"


INF = _Infinity()
"""The point at infinity in Heisenberg coordinates."""


def vector_sign(v) -> VectorSign:
    v = cvec(v)
    n2 = float(np.vdot(v, v).real)
    if n2 == 0.0:
        raise ZeroVector("zero vector has no sign")
    h = herm(v, v).real
    if abs(h) <= NULL_BAND * n2:
        return VectorSign.NULL
    return VectorSign.NEGATIVE if h < 0 else VectorSign.POSITIVE


def heis_to_lift(p) -> np.ndarray:
    """Standard null lift of a Heisenberg point ``INF`` or ``(zeta, t)``."""
    if p is INF:
        return cvec(1, 0, 0)
    zeta, t = p
    zeta = complex(zeta)
    return cvec(-abs(zeta) ** 2 + 1j * float(t), zeta * SQRT2, 1)


def lift_to_heis(v):
    """Heisenberg coordinates ``INF`` or ``(zeta, t)`` of a null vector."""
    v = cvec(v)
    if vector_sign(v) is not VectorSign.NULL:
        raise NotNull("vector is not null")
    if abs(v[2]) <= 1e-12 * np.linalg.norm(v):
        return INF
    w = v / v[2]
    return complex(w[1] / SQRT2), float(w[0].imag)


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """A point of the ideal boundary, stored as a null lift."""

    lift: np.ndarray

    def __post_init__(self):
        v = cvec(self.lift)
        n2 = float(np.vdot(v, v).real)
        if n2 == 0.0:
            raise ZeroVector("boundary point needs a nonzero lift")
        if abs(herm(v, v)) > NULL_BAND * n2:
            raise NotNull(f"lift {v} is not null")
        v.setflags(write=False)
        object.__setattr__(self, "lift", v)

    @classmethod
    def from_heis(cls, p) -> "BoundaryPoint":
        return cls(heis_to_lift(p))

    @classmethod
    def infinity(cls) -> "BoundaryPoint":
        return cls(heis_to_lift(INF))

    @property
    def heis(self):
        return lift_to_heis(self.lift)

    def transform(self, a) -> "BoundaryPoint":
        a = _as_scaled(a)
        v = np.asarray(a.mat) @ self.lift
        return BoundaryPoint(v / np.linalg.norm(v))

    def same_as(self, other: "BoundaryPoint", tol: float = 1e-9) -> bool:
        return projectively_equal(self.lift, other.lift, tol)

    def __repr__(self):
        return f"BoundaryPoint({self.heis!r})"


def _lift(p) -> np.ndarray:
    return p.lift if isinstance(p, BoundaryPoint) else cvec(p)


def bergman_dist(z, w) -> float:
    z, w = cvec(z), cvec(w)
    if vector_sign(z) is not VectorSign.NEGATIVE or vector_sign(w) is not VectorSign.NEGATIVE:
        raise NotInterior("Bergman distance needs two negative vectors")
    ratio = (herm(z, w) * herm(w, z)).real / (herm(z, z).real * herm(w, w).real)
    return 2.0 * math.acosh(math.sqrt(max(1.0, ratio)))


def cartan(v1, v2, v3) -> float:
    """Cartan angular invariant of an ideal triangle, in [-pi/2, pi/2]."""
    a, b, c = _lift(v1), _lift(v2), _lift(v3)
    for u, w in ((a, b), (b, c), (c, a)):
        if projectively_equal(u, w, 1e-12):
            raise DegenerateTriple("two vertices coincide")
    ang = float(np.angle(-herm(a, b) * herm(b, c) * herm(c, a)))
    return min(max(ang, -math.pi / 2), math.pi / 2)


class TriangleKind(enum.Enum):
    REAL_PLANE = "real-plane"
    COMPLEX_LINE = "complex-line"
    GENERIC = "generic"


def triangle_kind(c: float) -> TriangleKind:
    if abs(c) <= 1e-9:
        return TriangleKind.REAL_PLANE
    if abs(abs(c) - math.pi / 2) <= 1e-9:
        return TriangleKind.COMPLEX_LINE
    return TriangleKind.GENERIC


def discriminator(z: complex) -> float:
    """``|z|^4 - 8 Re(z^3) + 18 |z|^2 - 27``; its sign classifies SU(2,1) traces."""
    z = complex(z)
    r = abs(z)
    if r > 1e70:  # |z|^4 dominates and would overflow
        return math.inf
    return r**4 - 8.0 * (z**3).real + 18.0 * r**2 - 27.0


@dataclass(frozen=True)
class IsometryClass:
    kind: IsometryKind
    f: float
    su_trace: complex


def _require_isometry(a: ScaledMat33, tol: float) -> None:
    res = j_unitary_residual(a)
    if not res <= tol:
        raise NotIsometry(f"matrix is not in U(2,1) up to scale (residual {res:.3g})")


def classify(a, tol: float = DEFAULT_ISOMETRY_TOL) -> IsometryClass:
    a = _as_scaled(a)
    _require_isometry(a, tol)
    tr = trace(su_normalize(a))
    f = discriminator(tr)
    if abs(f) <= PARABOLIC_BAND:
        kind = IsometryKind.PARABOLIC_OR_SPECIAL_ELLIPTIC
    elif f > 0:
        kind = IsometryKind.LOXODROMIC
    else:
        kind = IsometryKind.ELLIPTIC
    return IsometryClass(kind, f, tr)


def translation_length(a, tol: float = DEFAULT_ISOMETRY_TOL) -> float:
    """Bergman translation length ``2 ln(spectral radius)`` of a unit-determinant lift."""
    a = _as_scaled(a)
    _require_isometry(a, tol)
    return max(0.0, 2.0 * (log_spectral_radius(a, isometry=True) - a.det_logmod / 3.0))


__all__ = [
    "INF",
    "BoundaryPoint",
    "IsometryClass",
    "IsometryKind",
    "TriangleKind",
    "VectorSign",
    "bergman_dist",
    "cartan",
    "classify",
    "discriminator",
    "heis_to_lift",
    "lift_to_heis",
    "translation_length",
    "triangle_kind",
    "vector_sign",
]
