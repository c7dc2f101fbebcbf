"""Complex 3x3 linear algebra for the signature (2,1) Hermitian form.

Vectors are plain ``complex128`` arrays of shape ``(3,)``.  Matrices that
appear in long products are carried as :class:`ScaledMat33`, a bounded
mantissa matrix times ``exp(logscale)``, together with a separately tracked
determinant so that normalisations stay accurate even when the mantissa has
lost its small singular directions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import kernels
from .errors import DegeneratePair, NonFinite, Singular, ZeroMatrix

J = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=np.complex128)

# |det| below 1e-300 counts as singular
_LOG_TINY = math.log(1e-300)


def cvec(z1, z2=None, z3=None) -> np.ndarray:
    """Build a complex 3-vector from three components or one 3-sequence."""
    if z2 is None and z3 is None:
        v = np.asarray(z1, dtype=np.complex128).reshape(3)
    else:
        v = np.array([z1, z2, z3], dtype=np.complex128)
    if not np.all(np.isfinite(v)):
        raise NonFinite("vector has non-finite components")
    return v


def herm(z, w) -> complex:
    """``z1*conj(w3) + z2*conj(w2) + z3*conj(w1)``; linear in ``z``."""
    return complex(z[0] * np.conj(w[2]) + z[1] * np.conj(w[1]) + z[2] * np.conj(w[0]))


def box(p, q) -> np.ndarray:
    """Polar vector of the complex line through ``p`` and ``q``.

    ``J @ conj(p x q)``, which is Hermitian-orthogonal to both inputs.
    """
    p = np.asarray(p, dtype=np.complex128)
    q = np.asarray(q, dtype=np.complex128)
    c = np.cross(p, q)
    if np.linalg.norm(c) < 1e-12 * np.linalg.norm(p) * np.linalg.norm(q):
        raise DegeneratePair("vectors are projectively equal")
    return J @ np.conj(c)


def projectively_equal(u, v, tol=1e-9) -> bool:
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    return bool(np.linalg.norm(np.cross(u, v)) <= tol * np.linalg.norm(u) * np.linalg.norm(v))


@dataclass(frozen=True, eq=False)
class ScaledMat33:
    """The matrix ``exp(logscale) * mat`` with its determinant tracked.

    ``det_phase * exp(det_logmod)`` is the determinant of the represented
    matrix.  Use :meth:`of` to build one from a plain array.
    """

    mat: np.ndarray
    logscale: float = 0.0
    det_phase: complex = 1.0
    det_logmod: float = 0.0

    @classmethod
    def of(cls, a, logscale: float = 0.0) -> "ScaledMat33":
        a = np.array(a, dtype=np.complex128).reshape(3, 3)
        mat, e = kernels.normalize(a)
        logscale = float(logscale) + e * kernels.LN2
        _, _, d = kernels.charpoly3(mat)
        if d == 0:
            phase, logmod = 0j, -math.inf
        else:
            phase, logmod = d / abs(d), math.log(abs(d)) + 3.0 * logscale
        mat.setflags(write=False)
        return cls(mat, logscale, complex(phase), logmod)

    @classmethod
    def identity(cls) -> "ScaledMat33":
        return cls.of(np.eye(3))

    def array(self) -> np.ndarray:
        """The represented matrix as a plain array (may overflow for huge scales)."""
        return self.mat * math.exp(self.logscale)

    def inv(self) -> "ScaledMat33":
        if self.det_logmod < _LOG_TINY:
            raise Singular("matrix is singular")
        mat, e = kernels.normalize(np.linalg.inv(self.mat))
        mat.setflags(write=False)
        return ScaledMat33(mat, -self.logscale + e * kernels.LN2,
                           complex(np.conj(self.det_phase)), -self.det_logmod)

    def conj(self) -> "ScaledMat33":
        mat = np.conj(self.mat)
        mat.setflags(write=False)
        return ScaledMat33(mat, self.logscale, complex(np.conj(self.det_phase)), self.det_logmod)

    def scale(self, c: complex) -> "ScaledMat33":
        """Multiply the represented matrix by the nonzero scalar ``c``."""
        c = complex(c)
        r = abs(c)
        if r == 0:
            raise ZeroMatrix("scaling by zero")
        mat = self.mat * (c / r)
        mat.setflags(write=False)
        return ScaledMat33(mat, self.logscale + math.log(r),
                           self.det_phase * (c / r) ** 3, self.det_logmod + 3.0 * math.log(r))

    def __matmul__(self, other: "ScaledMat33") -> "ScaledMat33":
        return mul(self, other)

    def __repr__(self):
        return f"ScaledMat33(logscale={self.logscale:.6g}, mat={self.mat.tolist()!r})"


@dataclass(frozen=True)
class EigenTriple:
    """Eigenvalues of the mantissa; multiply by ``exp(logscale)`` for the represented matrix."""

    roots: np.ndarray
    logscale: float = 0.0

    def values(self) -> np.ndarray:
        return self.roots * math.exp(self.logscale)

    def log_moduli(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.roots)) + self.logscale


def _as_scaled(a) -> ScaledMat33:
    return a if isinstance(a, ScaledMat33) else ScaledMat33.of(a)


def mul(a, b) -> ScaledMat33:
    a, b = _as_scaled(a), _as_scaled(b)
    mat, e = kernels.matmul_normalized(a.mat, b.mat)
    mat.setflags(write=False)
    return ScaledMat33(mat, a.logscale + b.logscale + e * kernels.LN2,
                       a.det_phase * b.det_phase, a.det_logmod + b.det_logmod)


def product(factors) -> ScaledMat33:
    """``factors[-1] @ ... @ factors[0]``: the first factor acts first."""
    factors = [_as_scaled(f) for f in factors]
    if not factors:
        return ScaledMat33.identity()
    stack = np.stack([f.mat for f in factors])
    mat, e = kernels.chain_product(stack)
    mat.setflags(write=False)
    phase = complex(np.prod([f.det_phase for f in factors]))
    return ScaledMat33(mat, sum(f.logscale for f in factors) + e * kernels.LN2,
                       phase, float(sum(f.det_logmod for f in factors)))


def det3(a) -> tuple[complex, float]:
    """Determinant as ``(unit phase, log modulus)``."""
    a = _as_scaled(a)
    return a.det_phase, a.det_logmod


def _mantissa_det(a: ScaledMat33) -> complex:
    if a.det_logmod == -math.inf:
        return 0j
    return a.det_phase * math.exp(a.det_logmod - 3.0 * a.logscale)


def _is_triangular(mat) -> bool:
    return not (mat[0, 1] or mat[0, 2] or mat[1, 2]) or not (mat[1, 0] or mat[2, 0] or mat[2, 1])


def eig3(a, isometry: bool = False) -> EigenTriple:
    """Eigenvalues sorted by decreasing modulus.

    With ``isometry=True`` the input is taken to preserve the form up to a
    positive factor ``c``; then the second charpoly coefficient equals
    ``det * conj(tr) / c`` and is computed that way, avoiding the
    cancellation in the 2x2 minors of a badly scaled matrix.
    """
    a = _as_scaled(a)
    mat = np.asarray(a.mat)
    d = _mantissa_det(a)
    if not isometry or d == 0 or _is_triangular(mat):
        return EigenTriple(kernels.eigvals3(mat, d), a.logscale)
    tr = complex(np.trace(mat))
    c = abs(d) ** (2.0 / 3.0)
    roots = kernels.cubic_roots(-tr, d * tr.conjugate() / c, -d)
    return EigenTriple(np.asarray(roots), a.logscale)


def charpoly_residual(roots, mat) -> np.ndarray:
    """``|charpoly(mat)(root)| / max(1, |root|**3)`` for each root."""
    tr, m, d = kernels.charpoly3(np.asarray(mat))
    out = []
    for r in roots:
        out.append(abs(((r - tr) * r + m) * r - d) / max(1.0, abs(r) ** 3))
    return np.array(out)


def log_spectral_radius(a, isometry: bool = False) -> float:
    e = eig3(a, isometry)
    rmax = float(np.max(np.abs(e.roots)))
    if rmax == 0.0:
        return -math.inf
    return math.log(rmax) + e.logscale


def spectral_radius(a) -> float:
    """Largest eigenvalue modulus of the represented matrix."""
    return math.exp(log_spectral_radius(a))


def gelfand_oracle(a, doublings: int = 10) -> float:
    """Spectral radius estimate ``||A**N||**(1/N)``, ``N = 2**doublings``.

    The norm is the max absolute row sum, so the identity gives exactly 1.
    Independent of the cubic solver.  Accuracy: 2% when the two largest
    eigenvalue moduli differ by at least 1e-6 relative, 5% otherwise; see
    :func:`gelfand_tolerance`.
    """
    if doublings < 8:
        raise ValueError("gelfand_oracle needs doublings >= 8")
    a = _as_scaled(a)
    lg = kernels.gelfand_log(a.mat, int(doublings))
    if lg == -math.inf:
        return 0.0
    return math.exp(lg + a.logscale)


def gelfand_tolerance(roots) -> float:
    """Relative accuracy promised by :func:`gelfand_oracle` for these eigenvalues."""
    mods = sorted(np.abs(np.asarray(roots)), reverse=True)
    if mods[0] == 0.0:
        return 0.02
    return 0.02 if (mods[0] - mods[1]) / mods[0] >= 1e-6 else 0.05


def j_unitary_residual(a) -> float:
    """Scale-free distance of ``A`` from ``U(2,1)`` up to a positive factor.

    ``||A* J A - c J||_F / ||A||_F**2`` with ``c = |det A|**(2/3)``.
    """
    a = _as_scaled(a)
    mat = np.asarray(a.mat)
    if a.det_logmod == -math.inf:
        return math.inf
    c = math.exp(2.0 * a.det_logmod / 3.0 - 2.0 * a.logscale)
    g = mat.conj().T @ J @ mat
    return float(np.linalg.norm(g - c * J) / np.linalg.norm(mat) ** 2)


def is_J_unitary(a, tol: float = 1e-10) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return j_unitary_residual(a) <= tol


def su_normalize(a) -> ScaledMat33:
    """Divide by the principal cube root of the determinant, so ``det == 1``."""
    a = _as_scaled(a)
    if a.det_logmod < _LOG_TINY:
        raise Singular("determinant too small to normalise")
    root_phase = cmath.exp(-1j * cmath.phase(a.det_phase) / 3.0)
    mat = a.mat * root_phase
    mat.setflags(write=False)
    return ScaledMat33(mat, a.logscale - a.det_logmod / 3.0, 1.0 + 0j, 0.0)


def trace(a) -> complex:
    """Trace of the represented matrix."""
    a = _as_scaled(a)
    return complex(np.trace(a.mat)) * math.exp(a.logscale)


def match_multisets(u, v) -> float:
    """Smallest max-abs difference over pairings of two length-3 multisets."""
    u = list(u)
    v = list(v)
    return min(max(abs(u[i] - v[p[i]]) for i in range(3)) for p in permutations(range(3)))
