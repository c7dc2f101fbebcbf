# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric kernels; same API as ``chdom._pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport atan2, cos, exp, fabs, frexp, hypot, isfinite, ldexp, log, sin, sqrt

from .errors import NonFinite, ZeroMatrix

cnp.import_array()

BACKEND = "cython"

ctypedef double complex cplx

cdef double SQRT3_2 = 0.8660254037844386
cdef double LN2_C = 0.6931471805599453


cdef inline double cabs(cplx z) noexcept nogil:
    return hypot(z.real, z.imag)


cdef inline cplx csqrt_(cplx z) noexcept nogil:
    cdef double r = cabs(z)
    cdef double t
    if r == 0.0:
        return 0.0
    t = 0.5 * atan2(z.imag, z.real)
    r = sqrt(r)
    return r * cos(t) + 1j * (r * sin(t))


cdef inline cplx ccbrt_(cplx z) noexcept nogil:
    cdef double r = cabs(z)
    cdef double t
    if r == 0.0:
        return 0.0
    t = atan2(z.imag, z.real) / 3.0
    r = exp(log(r) / 3.0)
    return r * cos(t) + 1j * (r * sin(t))


cdef inline void mm3(const cplx[:, ::1] a, const cplx[:, ::1] b, cplx[:, ::1] out) noexcept nogil:
    cdef int i, j
    for i in range(3):
        for j in range(3):
            out[i, j] = a[i, 0] * b[0, j] + a[i, 1] * b[1, j] + a[i, 2] * b[2, j]


cdef int renorm(cplx[:, ::1] a) except? -99999:
    cdef int i, j, e
    cdef double m = 0.0, v
    for i in range(3):
        for j in range(3):
            v = cabs(a[i, j])
            if not isfinite(v):
                raise NonFinite("matrix has non-finite entries")
            if v > m:
                m = v
    if m == 0.0:
        raise ZeroMatrix("matrix is identically zero")
    frexp(m, &e)
    for i in range(3):
        for j in range(3):
            a[i, j] = ldexp(a[i, j].real, -e) + 1j * ldexp(a[i, j].imag, -e)
    return e


def normalize(mat):
    out = np.array(mat, dtype=np.complex128, order="C", copy=True)
    cdef cplx[:, ::1] a = out
    cdef int e = renorm(a)
    return out, e


def matmul_normalized(a, b):
    cdef const cplx[:, ::1] av = np.ascontiguousarray(a, dtype=np.complex128)
    cdef const cplx[:, ::1] bv = np.ascontiguousarray(b, dtype=np.complex128)
    out = np.empty((3, 3), dtype=np.complex128)
    cdef cplx[:, ::1] ov = out
    mm3(av, bv, ov)
    cdef int e = renorm(ov)
    return out, e


def chain_product(blocks):
    cdef const cplx[:, :, ::1] bv = np.ascontiguousarray(blocks, dtype=np.complex128).reshape(-1, 3, 3)
    acc = np.eye(3, dtype=np.complex128)
    tmp = np.empty((3, 3), dtype=np.complex128)
    cdef cplx[:, ::1] av = acc
    cdef cplx[:, ::1] tv = tmp
    cdef Py_ssize_t k, n = bv.shape[0]
    cdef long total = 0
    cdef int i, j
    for k in range(n):
        mm3(bv[k], av, tv)
        total += renorm(tv)
        for i in range(3):
            for j in range(3):
                av[i, j] = tv[i, j]
    return acc, total


cdef inline void _charpoly(const cplx[:, ::1] a, cplx* tr, cplx* m, cplx* det) noexcept nogil:
    tr[0] = a[0, 0] + a[1, 1] + a[2, 2]
    m[0] = (a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
            + a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0]
            + a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
    det[0] = (a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
              - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
              + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0]))


def charpoly3(mat):
    cdef const cplx[:, ::1] a = np.ascontiguousarray(mat, dtype=np.complex128)
    cdef cplx tr, m, det
    _charpoly(a, &tr, &m, &det)
    return complex(tr), complex(m), complex(det)


cdef inline cplx horner(cplx x, cplx c2, cplx c1, cplx c0) noexcept nogil:
    return ((x + c2) * x + c1) * x + c0


cdef cplx polish(cplx x, cplx c2, cplx c1, cplx c0) noexcept nogil:
    cdef cplx best = x, cand, d
    cdef double best_res = cabs(horner(x, c2, c1, c0)), res
    cdef int it
    for it in range(4):
        if best_res == 0.0:
            break
        d = (3.0 * best + 2.0 * c2) * best + c1
        if d == 0:
            break
        cand = best - horner(best, c2, c1, c0) / d
        res = cabs(horner(cand, c2, c1, c0))
        if not res < best_res:
            break
        best = cand
        best_res = res
    return best


cdef inline void sort3(cplx* r) noexcept nogil:
    cdef int i, j
    cdef cplx t
    for i in range(3):
        for j in range(2 - i):
            if cabs(r[j]) < cabs(r[j + 1]):
                t = r[j]
                r[j] = r[j + 1]
                r[j + 1] = t


cdef double backward_error(cplx* r, cplx c2, cplx c1, cplx c0) noexcept nogil:
    cdef double worst = 0.0, a, scale, e
    cdef int k
    for k in range(3):
        a = cabs(r[k])
        scale = ((a + cabs(c2)) * a + cabs(c1)) * a + cabs(c0)
        if scale > 0:
            e = cabs(horner(r[k], c2, c1, c0)) / scale
            if e > worst:
                worst = e
    return worst


cdef void _cubic(cplx c2, cplx c1, cplx c0, cplx* r) noexcept nogil:
    cdef cplx shift = c2 / 3.0
    cdef cplx p = c1 - c2 * c2 / 3.0
    cdef cplx q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0
    cdef cplx disc = csqrt_(q * q / 4.0 + p * p * p / 27.0)
    cdef cplx u3 = -q / 2.0 + disc
    cdef cplx alt = -q / 2.0 - disc
    cdef cplx u, uk, w, vieta, prod, s, d, r1, r2
    cdef cplx other[3]
    cdef int k
    if cabs(alt) > cabs(u3):
        u3 = alt
    if u3 == 0:
        r[0] = -shift
        r[1] = -shift
        r[2] = -shift
    else:
        u = ccbrt_(u3)
        for k in range(3):
            if k == 0:
                w = 1.0
            elif k == 1:
                w = -0.5 + 1j * SQRT3_2
            else:
                w = -0.5 - 1j * SQRT3_2
            uk = w * u
            r[k] = uk - p / (3.0 * uk) - shift
    sort3(r)
    vieta = r[0] * r[1]
    if vieta != 0:
        vieta = -c0 / vieta
        if cabs(horner(vieta, c2, c1, c0)) < cabs(horner(r[2], c2, c1, c0)):
            r[2] = vieta
    for k in range(3):
        r[k] = polish(r[k], c2, c1, c0)
    # second candidate: deflate from the largest root using c1 and c0
    if r[0] != 0:
        prod = -c0 / r[0]
        s = (c1 - prod) / r[0]
        d = csqrt_(s * s - 4.0 * prod)
        if cabs(s + d) >= cabs(s - d):
            r1 = (s + d) / 2.0
        else:
            r1 = (s - d) / 2.0
        r2 = prod / r1 if r1 != 0 else 0.0
        other[0] = r[0]
        other[1] = polish(r1, c2, c1, c0)
        other[2] = polish(r2, c2, c1, c0)
        if backward_error(other, c2, c1, c0) < backward_error(r, c2, c1, c0):
            for k in range(3):
                r[k] = other[k]
    sort3(r)


def cubic_roots(c2, c1, c0):
    out = np.empty(3, dtype=np.complex128)
    cdef cplx[::1] ov = out
    cdef cplx r[3]
    _cubic(complex(c2), complex(c1), complex(c0), r)
    ov[0] = r[0]
    ov[1] = r[1]
    ov[2] = r[2]
    return out


def eigvals3(mat, det=None):
    cdef const cplx[:, ::1] a = np.ascontiguousarray(mat, dtype=np.complex128)
    cdef int i, j
    cdef cplx tr, m, d, t
    cdef cplx r[3]
    for i in range(3):
        for j in range(3):
            if not (isfinite(a[i, j].real) and isfinite(a[i, j].imag)):
                raise NonFinite("matrix has non-finite entries")
    out = np.empty(3, dtype=np.complex128)
    cdef cplx[::1] ov = out
    if (a[0, 1] == 0 and a[0, 2] == 0 and a[1, 2] == 0) or (
        a[1, 0] == 0 and a[2, 0] == 0 and a[2, 1] == 0
    ):
        for i in range(3):
            r[i] = a[i, i]
        for i in range(3):
            for j in range(2 - i):
                if cabs(r[j]) < cabs(r[j + 1]):
                    t = r[j]
                    r[j] = r[j + 1]
                    r[j + 1] = t
    else:
        _charpoly(a, &tr, &m, &d)
        if det is not None:
            d = complex(det)
        _cubic(-tr, m, -d, r)
    for i in range(3):
        ov[i] = r[i]
    return out


cdef double row_norm(cplx[:, ::1] b) noexcept nogil:
    cdef double best = 0.0, r
    cdef int i
    for i in range(3):
        r = cabs(b[i, 0]) + cabs(b[i, 1]) + cabs(b[i, 2])
        if r > best:
            best = r
    return best


cdef void scale2(cplx[:, ::1] b, int e) noexcept nogil:
    cdef int i, j
    for i in range(3):
        for j in range(3):
            b[i, j] = ldexp(b[i, j].real, -e) + 1j * ldexp(b[i, j].imag, -e)


def gelfand_log(mat, Py_ssize_t doublings):
    b = np.array(mat, dtype=np.complex128, order="C", copy=True)
    tmp = np.empty((3, 3), dtype=np.complex128)
    cdef cplx[:, ::1] bv = b
    cdef cplx[:, ::1] tv = tmp
    cdef int i, j, e
    cdef Py_ssize_t k
    cdef double s = row_norm(bv), acc
    if not isfinite(s):
        raise NonFinite("matrix has non-finite entries")
    if s == 0.0:
        return float("-inf")
    frexp(s, &e)
    scale2(bv, e)
    acc = e
    for k in range(doublings):
        mm3(bv, bv, tv)
        s = row_norm(tv)
        if s == 0.0:
            return float("-inf")
        frexp(s, &e)
        scale2(tv, e)
        acc = 2.0 * acc + e
        for i in range(3):
            for j in range(3):
                bv[i, j] = tv[i, j]
    return (acc * LN2_C + log(row_norm(bv))) / (2.0 ** doublings)
