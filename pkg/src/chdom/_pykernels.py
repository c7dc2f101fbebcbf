"""Pure-Python numeric kernels.

Reference implementation of the hot 3x3 routines.  ``chdom._ckernels``
(Cython) exposes the identical API and is preferred when it is built; see
``chdom.kernels`` for the selection logic.

All matrices are ``complex128`` arrays of shape ``(3, 3)``.  Scales are
tracked as powers of two so that renormalisation is exact.
"""

import cmath
import math

import numpy as np

from .errors import NonFinite, ZeroMatrix

BACKEND = "python"

LN2 = math.log(2.0)
_OMEGA = (1.0, complex(-0.5, math.sqrt(3.0) / 2.0), complex(-0.5, -math.sqrt(3.0) / 2.0))


def normalize(mat):
    """Rescale ``mat`` by a power of two so its largest entry modulus is in [1/2, 1).

    Returns ``(scaled, exponent)`` with ``mat == scaled * 2**exponent``.
    """
    m = float(np.max(np.abs(mat)))
    if not math.isfinite(m):
        raise NonFinite("matrix has non-finite entries")
    if m == 0.0:
        raise ZeroMatrix("matrix is identically zero")
    _, e = math.frexp(m)
    return np.ldexp(mat.real, -e) + 1j * np.ldexp(mat.imag, -e), e


def matmul_normalized(a, b):
    """``a @ b`` renormalised; returns ``(mat, exponent)``."""
    return normalize(a @ b)


def chain_product(blocks):
    """Product ``blocks[n-1] @ ... @ blocks[0]`` with running renormalisation.

    Returns ``(mat, exponent)``; the represented product is ``mat * 2**exponent``.
    An empty stack gives the identity.
    """
    acc = np.eye(3, dtype=np.complex128)
    total = 0
    for block in blocks:
        acc, e = normalize(block @ acc)
        total += e
    return acc, total


def charpoly3(mat):
    """Return ``(trace, sum of principal 2x2 minors, determinant)``."""
    a = mat.tolist()
    tr = a[0][0] + a[1][1] + a[2][2]
    m = (
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
        + a[0][0] * a[2][2] - a[0][2] * a[2][0]
        + a[1][1] * a[2][2] - a[1][2] * a[2][1]
    )
    det = (
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    )
    return complex(tr), complex(m), complex(det)


def _horner(lam, c2, c1, c0):
    return ((lam + c2) * lam + c1) * lam + c0


def _polish(lam, c2, c1, c0, steps=4):
    best = lam
    best_res = abs(_horner(lam, c2, c1, c0))
    for _ in range(steps):
        if best_res == 0.0:
            break
        d = (3.0 * best + 2.0 * c2) * best + c1
        if d == 0:
            break
        cand = best - _horner(best, c2, c1, c0) / d
        res = abs(_horner(cand, c2, c1, c0))
        if not res < best_res:
            break
        best, best_res = cand, res
    return best


def _backward_error(roots, c2, c1, c0):
    worst = 0.0
    for x in roots:
        a = abs(x)
        scale = ((a + abs(c2)) * a + abs(c1)) * a + abs(c0)
        if scale > 0:
            worst = max(worst, abs(_horner(x, c2, c1, c0)) / scale)
    return worst


def _sorted(roots):
    return sorted(roots, key=abs, reverse=True)


def _cardano(c2, c1, c0):
    shift = c2 / 3.0
    p = c1 - c2 * c2 / 3.0
    q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0
    disc = cmath.sqrt(q * q / 4.0 + p * p * p / 27.0)
    u3 = -q / 2.0 + disc
    alt = -q / 2.0 - disc
    if abs(alt) > abs(u3):
        u3 = alt
    if u3 == 0:
        return [-shift] * 3
    u = u3 ** (1.0 / 3.0)
    return _sorted([w * u - p / (3.0 * w * u) - shift for w in _OMEGA])


def _deflate(big, c1, c0):
    """The two remaining roots given the largest one, from the low-order coefficients."""
    prod = -c0 / big
    s = (c1 - prod) / big
    d = cmath.sqrt(s * s - 4.0 * prod)
    r1 = (s + d) / 2.0 if abs(s + d) >= abs(s - d) else (s - d) / 2.0
    r2 = prod / r1 if r1 != 0 else 0j
    return r1, r2


def cubic_roots(c2, c1, c0):
    """Roots of the monic cubic ``x**3 + c2*x**2 + c1*x + c0``, by decreasing modulus.

    Two candidates are formed: Cardano on the depressed cubic with the
    smallest root re-derived from Vieta, and the polished largest Cardano
    root with the other two from the deflated quadratic.  The candidate with
    the smaller normwise backward error is polished and returned.
    """
    c2, c1, c0 = complex(c2), complex(c1), complex(c0)
    roots = _cardano(c2, c1, c0)
    top = roots[0] * roots[1]
    if top != 0:
        vieta = -c0 / top
        if abs(_horner(vieta, c2, c1, c0)) < abs(_horner(roots[2], c2, c1, c0)):
            roots[2] = vieta
    cands = [[_polish(r, c2, c1, c0) for r in roots]]
    big = cands[0][0]
    if big != 0:
        r1, r2 = _deflate(big, c1, c0)
        cands.append([big, _polish(r1, c2, c1, c0), _polish(r2, c2, c1, c0)])
    best = min(cands, key=lambda rs: _backward_error(rs, c2, c1, c0))
    return np.array(_sorted(best), dtype=np.complex128)


def eigvals3(mat, det=None):
    """Eigenvalues of a 3x3 matrix, ordered by decreasing modulus.

    ``det`` may be supplied when it is known more accurately than a cofactor
    expansion of ``mat`` would give (e.g. tracked through a long product).
    Exactly triangular input returns its diagonal.
    """
    if not np.all(np.isfinite(mat)):
        raise NonFinite("matrix has non-finite entries")
    if (mat[0, 1] == 0 and mat[0, 2] == 0 and mat[1, 2] == 0) or (
        mat[1, 0] == 0 and mat[2, 0] == 0 and mat[2, 1] == 0
    ):
        d = [complex(mat[i, i]) for i in range(3)]
        d.sort(key=abs, reverse=True)
        return np.array(d, dtype=np.complex128)
    tr, m, cof = charpoly3(mat)
    if det is None:
        det = cof
    return cubic_roots(-tr, m, -complex(det))


def _row_norm(b):
    return float(np.max(np.sum(np.abs(b), axis=1)))


def gelfand_log(mat, doublings):
    """``log(||mat**N||) / N`` for ``N = 2**doublings`` by repeated squaring.

    The norm is the max absolute row sum; rescaling is by powers of two so
    the exponent bookkeeping is exact.
    """
    b = np.array(mat, dtype=np.complex128)
    s = _row_norm(b)
    if not math.isfinite(s):
        raise NonFinite("matrix has non-finite entries")
    if s == 0.0:
        return -math.inf
    _, e = math.frexp(s)
    b = np.ldexp(b.real, -e) + 1j * np.ldexp(b.imag, -e)
    acc = float(e)
    for _ in range(doublings):
        b = b @ b
        s = _row_norm(b)
        if s == 0.0:
            return -math.inf
        _, e = math.frexp(s)
        b = np.ldexp(b.real, -e) + 1j * np.ldexp(b.imag, -e)
        acc = 2.0 * acc + e
    return (acc * LN2 + math.log(_row_norm(b))) / 2.0**doublings
