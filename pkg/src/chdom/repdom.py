"""Bent representations from edge invariants and their domination checks.

A :class:`BentRep` assigns to every edge ``e_j`` of a bipartite triangulation
an invariant ``z_j = x_j e^{i alpha_j}``.  The holonomy of a word
``t^{d_1} e_1 ... t^{d_r} e_r`` is the literal product
``M_{z_r} E^{d_r} ... M_{z_1} E^{d_1}``.  Setting every angle to zero gives
the real representative ``rho0`` of the same bending fiber, which should
dominate ``rho`` in translation length and in trace modulus.
"""

from __future__ import annotations

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .chgeom import discriminator, translation_length
from .cx3 import (
    ScaledMat33,
    eig3,
    gelfand_oracle,
    gelfand_tolerance,
    j_unitary_residual,
    match_multisets,
    spectral_radius,
    su_normalize,
    trace,
)
from .errors import (
    BadConfig,
    ForbiddenInvariant,
    MismatchedTriangulation,
    NonPositiveModulus,
    NotIsometry,
    ParseError,
    PreconditionViolated,
    UnknownEdge,
)
from .surface import Triangulation, Word, bipartite_coloring
from .zgeom import e_array, m_array

TWO_PI = 2.0 * math.pi
SIGN_TOL = 1e-12
PERIPHERAL_TOL = 1e-9
TRACE_SLACK = 1e-9
J_UNITARY_PER_LETTER = 1e-10
S = np.diag([1.0, -1.0, -1.0]).astype(np.complex128)
# entries that are non-positive in the real representative (0-based)
_NEG_ENTRIES = ((0, 1), (0, 2), (1, 0), (2, 0))
_POS_ENTRIES = ((0, 0), (1, 1), (2, 2), (1, 2), (2, 1))


def domination_slack(ell0: float) -> float:
    return 1e-7 * max(1.0, ell0)


@dataclass(frozen=True, eq=False)
class BentRep:
    """Edge invariants ``edge -> (modulus, angle)`` on a triangulation."""

    triangulation: Triangulation
    invariants: dict
    _blocks: dict = field(init=False, repr=False)

    def __post_init__(self):
        t = self.triangulation
        bipartite_coloring(t)
        inv = {}
        for e, (x, a) in dict(self.invariants).items():
            x, a = float(x), float(a)
            if not (x > 0 and math.isfinite(x)):
                raise NonPositiveModulus(f"edge e{e}: modulus must be positive, got {x}")
            if not math.isfinite(a):
                raise ForbiddenInvariant(f"edge e{e}: angle must be finite")
            a = math.fmod(a, TWO_PI)
            if a < 0:
                a += TWO_PI
            if a >= TWO_PI:
                a = 0.0
            if abs(x - 1.0) <= 1e-12 and abs(a - math.pi) <= 1e-12:
                raise ForbiddenInvariant(f"edge e{e}: invariant is -1")
            inv[int(e)] = (x, a)
        if sorted(inv) != list(t.edges):
            raise MismatchedTriangulation(
                f"invariants cover edges {sorted(inv)}, triangulation has {list(t.edges)}"
            )
        object.__setattr__(self, "invariants", inv)
        e_plus, e_minus = e_array(1), e_array(-1)
        blocks = {}
        for e, (x, a) in inv.items():
            m = m_array(x, a)
            blocks[(e, 1)] = m @ e_plus
            blocks[(e, -1)] = m @ e_minus
        object.__setattr__(self, "_blocks", blocks)

    @classmethod
    def from_lists(cls, t: Triangulation, moduli, angles) -> "BentRep":
        return cls(t, {e: (x, a) for e, x, a in zip(t.edges, moduli, angles)})

    @classmethod
    def random(cls, t: Triangulation, rng, xmin=0.05, xmax=20.0) -> "BentRep":
        """Moduli log-uniform in ``[xmin, xmax]``, angles uniform in ``[0, 2 pi)``."""
        n = len(t.edges)
        xs = np.exp(rng.uniform(math.log(xmin), math.log(xmax), n))
        angs = rng.uniform(0.0, TWO_PI, n)
        return cls.from_lists(t, xs, angs)

    @property
    def moduli(self) -> dict:
        return {e: x for e, (x, _) in self.invariants.items()}

    @property
    def angles(self) -> dict:
        return {e: a for e, (_, a) in self.invariants.items()}

    def block(self, edge: int, delta: int) -> np.ndarray:
        try:
            return self._blocks[(edge, delta)]
        except KeyError:
            raise UnknownEdge(f"no invariant for edge e{edge}") from None

    def to_text(self) -> str:
        return "".join(
            f"invariant e{e} modulus {x!r} angle {a!r}\n" for e, (x, a) in sorted(self.invariants.items())
        )


def parse_invariants(text: str) -> dict:
    """Parse ``invariant e<int> modulus <float> angle <float>`` lines."""
    pat = re.compile(r"invariant\s+e(\d+)\s+modulus\s+(\S+)\s+angle\s+(\S+)")
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = pat.fullmatch(line)
        if not m:
            raise ParseError("expected 'invariant e<int> modulus <float> angle <float>'", lineno, 1)
        e = int(m.group(1))
        if e in out:
            raise ParseError(f"edge e{e} given twice", lineno, 1)
        try:
            out[e] = (float(m.group(2)), float(m.group(3)))
        except ValueError:
            raise ParseError("bad number", lineno, m.start(2) + 1) from None
    return out


def holonomy(rep: BentRep, w: Word) -> ScaledMat33:
    """``M_{z_r} E^{d_r} ... M_{z_1} E^{d_1}``, checked to be in U(2,1) up to scale."""
    if len(w.letters) % 2:
        raise ValueError("word must end with an edge letter")
    if not w.letters:
        return ScaledMat33.identity()
    blocks = np.stack([rep.block(e, d) for d, e in zip(w.deltas, w.edges)])
    mat, e = kernels.chain_product(blocks)
    mat.setflags(write=False)
    # each block has determinant e^{i alpha}, modulus one
    phase = complex(np.exp(1j * sum(rep.invariants[edge][1] for edge in w.edges)))
    h = ScaledMat33(mat, e * kernels.LN2, phase, 0.0)
    res = j_unitary_residual(h)
    if not res <= J_UNITARY_PER_LETTER * len(w):
        raise NotIsometry(f"holonomy left U(2,1): residual {res:.3g}")
    return h


def real_form(rep: BentRep) -> BentRep:
    """Same moduli, every angle set to zero."""
    if all(a == 0.0 for _, a in rep.invariants.values()):
        return rep
    return BentRep(rep.triangulation, {e: (x, 0.0) for e, (x, _) in rep.invariants.items()})


def same_bending_fiber(a: BentRep, b: BentRep) -> bool:
    if a.triangulation != b.triangulation:
        raise MismatchedTriangulation("representations live on different triangulations")
    return all(
        abs(a.invariants[e][0] - b.invariants[e][0]) <= 1e-12 * max(a.invariants[e][0], b.invariants[e][0])
        for e in a.triangulation.edges
    )


def b_matrix(rep: BentRep, w: Word) -> ScaledMat33:
    """Entrywise absolute value of the real representative's holonomy."""
    h = holonomy(real_form(rep), w)
    return ScaledMat33.of(np.abs(h.mat), h.logscale)


def _relative_abs(a: ScaledMat33, ref: ScaledMat33) -> np.ndarray:
    """``|a|`` expressed in the mantissa units of ``ref``."""
    return np.abs(a.mat) * math.exp(a.logscale - ref.logscale)


def entrywise_bounded(rep: BentRep, w: Word, tol: float = SIGN_TOL) -> bool:
    """``|rho(w)| <= B(w)`` entrywise, up to ``tol`` times the largest entry of ``B``."""
    b = b_matrix(rep, w)
    return bool(np.all(_relative_abs(holonomy(rep, w), b) <= np.asarray(b.mat).real + tol))


def sign_case(w: Word) -> str:
    """``"II"`` for constant-turn words (triangular holonomy), else ``"I"``."""
    return "II" if w.constant_turn is not None else "I"


def _sign_pattern_ok(mat: np.ndarray, tol: float) -> bool:
    if np.max(np.abs(mat.imag)) > tol:
        return False
    re_ = mat.real
    return all(re_[i, j] >= -tol for i, j in _POS_ENTRIES) and all(
        re_[i, j] <= tol for i, j in _NEG_ENTRIES
    )


def _triangular_ok(mat: np.ndarray, delta: int, tol: float) -> bool:
    part = np.triu(mat, 1) if delta == 1 else np.tril(mat, -1)
    return bool(np.max(np.abs(part)) <= tol)


def check_sign_structure(rep: BentRep, w: Word, tol: float = SIGN_TOL) -> bool:
    """Sign pattern of ``rho0(w)`` and the entrywise bound ``|rho(w)| <= B(w)``.

    Tolerances are relative to the largest entry of the matrix.
    """
    h0 = holonomy(real_form(rep), w)
    mat = np.asarray(h0.mat)
    ok = _sign_pattern_ok(mat, tol)
    delta = w.constant_turn
    if delta is not None:
        ok = ok and _triangular_ok(mat, delta, tol)
    return ok and entrywise_bounded(rep, w, tol)


@dataclass
class DominationReport:
    word: str
    ell: float
    ell0: float
    tr_abs: float
    tr0_abs: float
    f: float
    f0: float
    length_ok: bool
    trace_ok: bool
    sign_ok: bool
    entrywise_ok: bool
    peripheral_equal: bool | None = None
    residuals: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return (
            self.length_ok
            and self.trace_ok
            and self.sign_ok
            and self.entrywise_ok
            and self.peripheral_equal is not False
        )

    def to_dict(self) -> dict:
        return {**asdict(self), "ok": self.ok}

    @classmethod
    def from_dict(cls, d: dict) -> "DominationReport":
        d = dict(d)
        d.pop("ok", None)
        return cls(**d)


def peripheral_length(rep: BentRep, w: Word) -> float:
    """``2 |ln(x_1 ... x_r)|`` over the edge letters of ``w``."""
    return 2.0 * abs(sum(math.log(rep.invariants[e][0]) for e in w.edges))


def check_domination(rep: BentRep, w: Word, name: str | None = None) -> DominationReport:
    rep0 = real_form(rep)
    h, h0 = holonomy(rep, w), holonomy(rep0, w)
    tol = J_UNITARY_PER_LETTER * max(len(w), 1)
    ell = translation_length(h, tol)
    ell0 = translation_length(h0, tol)
    tr, tr0 = trace(h), trace(h0)
    f = discriminator(trace(su_normalize(h)))
    f0 = discriminator(trace(su_normalize(h0)))
    residuals = {
        "j_unitary": j_unitary_residual(h),
        "j_unitary0": j_unitary_residual(h0),
        "length_gap": ell - ell0,
    }
    peripheral = None
    if w.peripheral:
        target = peripheral_length(rep, w)
        err = max(abs(ell - ell0) / max(1.0, ell0), abs(ell - target), abs(ell0 - target))
        residuals["peripheral"] = err
        peripheral = bool(err <= PERIPHERAL_TOL)
    return DominationReport(
        word=name if name is not None else str(w),
        ell=ell,
        ell0=ell0,
        tr_abs=abs(tr),
        tr0_abs=abs(tr0),
        f=f,
        f0=f0,
        length_ok=bool(ell <= ell0 + domination_slack(ell0)),
        trace_ok=bool(abs(tr) <= abs(tr0) + TRACE_SLACK),
        sign_ok=check_sign_structure(rep, w),
        entrywise_ok=entrywise_bounded(rep, w),
        peripheral_equal=peripheral,
        residuals=residuals,
    )


def eigen_shape_residual(a) -> float:
    """Distance of the unit-determinant spectrum from ``{r e^{ip}, e^{ip}/r, e^{-2ip}}``.

    ``r`` and ``p`` are read off the largest root; each comparison is
    relative to ``max(1, |root|)``.
    """
    e = eig3(su_normalize(a), isometry=True)
    roots = e.values()
    big = roots[0]
    r, p = abs(big), np.angle(big)
    mid = np.exp(-2j * p)
    small = np.exp(1j * p) / r
    return match_multisets(roots / np.maximum(1.0, np.abs(roots)),
                           np.array([big, small, mid]) / np.maximum(1.0, np.abs([big, small, mid])))


def sign_flip_similarity(a, tol: float = 1e-9) -> bool:
    """Flipping the signs of entries (1,2),(1,3),(2,1),(3,1) keeps the spectrum."""
    a = np.asarray(a, dtype=np.complex128).reshape(3, 3)
    b = a.copy()
    for i, j in _NEG_ENTRIES:
        b[i, j] = -b[i, j]
    if not np.array_equal(b, S @ a @ S):
        return False
    ea, eb = eig3(a).values(), eig3(b).values()
    scale = max(1.0, float(np.max(np.abs(ea))))
    return match_multisets(ea, eb) <= tol * scale


def entrywise_dom_oracle(a, b, tol: float = 1e-9) -> bool:
    """``sigma(a) <= sigma(|a|) <= sigma(b)`` given ``|a| <= b`` entrywise.

    Every spectral radius is also checked against the power-iteration oracle.
    """
    a = np.asarray(a, dtype=np.complex128).reshape(3, 3)
    b = np.asarray(b, dtype=np.float64).reshape(3, 3)
    abs_a = np.abs(a)
    if np.any(b < 0) or np.any(abs_a > b):
        raise PreconditionViolated("need |a| <= b entrywise")
    radii = []
    for m in (a, abs_a.astype(np.complex128), b.astype(np.complex128)):
        if not np.any(m):
            radii.append(0.0)
            continue
        s = spectral_radius(m)
        g = gelfand_oracle(m)
        if abs(g - s) > gelfand_tolerance(eig3(m).values()) * max(s, 1e-300):
            return False
        radii.append(s)
    return radii[0] <= radii[1] + tol and radii[1] <= radii[2] + tol


# -- appendix experiment ---------------------------------------------------

RNG_ALGORITHM = "numpy.PCG64(seed ^ index); uniform = (k + 0.5) / 2**53, k in [0, 2**53)"


@dataclass(frozen=True)
class AppendixRow:
    index: int
    x: float
    y: float
    a: float
    b: float
    f_trace: float
    f_TRACE: float

    @property
    def violation(self) -> bool:
        return self.f_trace > self.f_TRACE


def _two_letter_trace(x, y, a, b) -> complex:
    m1 = m_array(x, a)
    m2 = m_array(y, b)
    return complex(np.trace(m1 @ e_array(1) @ m2 @ e_array(-1)))


def appendix_row(x, y, a, b, index: int = -1) -> AppendixRow:
    """Discriminator at the raw traces of ``M_{x,a} E M_{y,b} E^-1`` and its real form."""
    return AppendixRow(index, x, y, a, b,
                       discriminator(_two_letter_trace(x, y, a, b)),
                       discriminator(_two_letter_trace(x, y, 0.0, 0.0)))


def _open_uniform(rng, n: int) -> np.ndarray:
    k = rng.integers(0, 2**53, size=n, dtype=np.int64)
    return (k + 0.5) / 2.0**53


def _sample(seed: int, index: int, xmax: float, amax: float) -> AppendixRow:
    rng = np.random.Generator(np.random.PCG64(seed ^ index))
    u = _open_uniform(rng, 4)
    return appendix_row(float(u[0] * xmax), float(u[1] * xmax),
                        float(u[2] * amax), float(u[3] * amax), index)


def thread_count() -> int:
    raw = os.environ.get("CHDOM_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise BadConfig(f"CHDOM_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise BadConfig("CHDOM_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def appendix_experiment(samples: int = 10_000, seed: int = 0, xmax: float = 5.0,
                        amax: float = math.pi / 2, tuples=None, threads: int | None = None) -> list:
    """Random (or explicit) rows comparing the discriminator of rho and rho0.

    ``x, y`` are uniform in ``(0, xmax)`` and ``a, b`` in ``(0, amax)``.
    Explicit ``tuples`` of ``(x, y, a, b)`` skip the generator.  Rows come
    back ordered by index whatever the thread count.
    """
    if tuples is not None:
        rows = []
        for i, tup in enumerate(tuples):
            x, y, a, b = (float(v) for v in tup)
            if not (x > 0 and y > 0):
                raise BadConfig("moduli must be positive")
            rows.append(appendix_row(x, y, a, b, i))
        return rows
    if int(samples) < 1:
        raise BadConfig("samples must be >= 1")
    if not (xmax > 0 and amax > 0 and math.isfinite(xmax) and math.isfinite(amax)):
        raise BadConfig("xmax and amax must be positive and finite")
    if int(seed) < 0:
        raise BadConfig("seed must be non-negative")
    samples, seed = int(samples), int(seed)
    n_threads = threads if threads is not None else thread_count()
    if n_threads <= 1 or samples < 256:
        return [_sample(seed, i, xmax, amax) for i in range(samples)]
    with ThreadPoolExecutor(n_threads) as pool:
        rows = list(pool.map(lambda i: _sample(seed, i, xmax, amax), range(samples)))
    return sorted(rows, key=lambda r: r.index)
