import cmath
import math

import numpy as np
import pytest

from chdom.chgeom import classify, IsometryKind
from chdom.cx3 import charpoly_residual, eig3, su_normalize, trace
from chdom.errors import (
    BadConfig,
    ForbiddenInvariant,
    MismatchedTriangulation,
    NonPositiveModulus,
    NotBipartite,
    ParseError,
    PreconditionViolated,
    UnknownEdge,
    UTurn,
)
from chdom.repdom import (
    RNG_ALGORITHM,
    S,
    BentRep,
    DominationReport,
    appendix_experiment,
    appendix_row,
    b_matrix,
    check_domination,
    check_sign_structure,
    domination_slack,
    eigen_shape_residual,
    entrywise_dom_oracle,
    holonomy,
    parse_invariants,
    peripheral_length,
    real_form,
    same_bending_fiber,
    sign_case,
    sign_flip_similarity,
)
from chdom.surface import Word, compile_word, parse_triangulation, peripheral_word, random_closed_walk
from chdom.zgeom import e_array, m_array

from conftest import NOT_BIPARTITE

SQ2 = math.sqrt(2)
CASE_I = np.array([[1, -SQ2, -1], [-SQ2, 3, 2 * SQ2], [-1, 2 * SQ2, 4]])
Z1 = (3.0497, 0.2936)
Z2 = (2.0373, 0.0886)


def unit_rep(t):
    return BentRep.from_lists(t, [1, 1, 1], [0, 0, 0])


def sample_rep(t):
    # e0, e1 carry the reference sample invariants; e2 is an arbitrary third edge
    return BentRep(t, {0: Z1, 1: Z2, 2: (1.3, 2.0)})


# -- BentRep ----------------------------------------------------------------


def test_bent_rep_validation(s11):
    with pytest.raises(NonPositiveModulus):
        BentRep.from_lists(s11, [1, 0, 1], [0, 0, 0])
    with pytest.raises(ForbiddenInvariant):
        BentRep.from_lists(s11, [1, 1, 1], [0, math.pi, 0])
    with pytest.raises(MismatchedTriangulation):
        BentRep(s11, {0: (1, 0), 1: (1, 0)})
    with pytest.raises(NotBipartite):
        BentRep.from_lists(parse_triangulation(NOT_BIPARTITE), [1, 1, 1], [0, 0, 0])
    rep = BentRep.from_lists(s11, [2, 1, 1], [-0.5, 2 * math.pi, 7.0])
    angs = rep.angles
    assert abs(angs[0] - (2 * math.pi - 0.5)) < 1e-15
    assert angs[1] == 0.0
    assert abs(angs[2] - (7.0 - 2 * math.pi)) < 1e-15
    with pytest.raises(UnknownEdge):
        rep.block(7, 1)


def test_invariant_text_roundtrip(s11, rng):
    rep = BentRep.random(s11, rng)
    again = BentRep(s11, parse_invariants(rep.to_text()))
    assert again.invariants == rep.invariants
    with pytest.raises(ParseError) as info:
        parse_invariants("invariant e0 modulus 1 angle 0\ninvariant e1 modulus x angle 0\n")
    assert info.value.line == 2


# -- holonomy ---------------------------------------------------------------


def test_holonomy_case_i_example(s11):
    rep = unit_rep(s11)
    # M E M E^-1 as a plain product: the E^-1 letter acts first
    h = holonomy(rep, Word.parse("t- e1 t+ e0")).array()
    np.testing.assert_allclose(h, CASE_I, atol=1e-14)
    # the same letters based elsewhere are conjugate
    h2 = holonomy(rep, Word.parse("t+ e1 t- e2")).array()
    assert abs(np.trace(h2) - 8) < 1e-13


def test_holonomy_letter_order(s11):
    rep = sample_rep(s11)
    h = holonomy(rep, Word.parse("t- e1 t+ e0")).array()
    want = m_array(*Z1) @ e_array(1) @ m_array(*Z2) @ e_array(-1)
    np.testing.assert_allclose(h, want, rtol=1e-13, atol=1e-13)


def test_holonomy_empty_word(s11):
    np.testing.assert_array_equal(holonomy(unit_rep(s11), Word()).array(), np.eye(3))


def test_holonomy_peripheral_shape(tri, rng):
    for _ in range(20):
        rep = BentRep.random(tri, rng)
        for k in range(tri.punctures):
            w = peripheral_word(tri, k)
            assert w.constant_turn == 1
            h = holonomy(rep, w).array()
            prod_x = math.prod(rep.invariants[e][0] for e in w.edges)
            phase = cmath.exp(1j * sum(rep.invariants[e][1] for e in w.edges))
            scale = np.abs(h).max()
            assert np.all(np.abs(np.triu(h, 1)) <= 1e-12 * scale)
            np.testing.assert_allclose(np.diag(h), [prod_x, phase, 1 / prod_x], rtol=1e-10)


def test_holonomy_is_j_unitary_on_long_words(tri, rng):
    for _ in range(20):
        rep = BentRep.random(tri, rng)
        w = compile_word(tri, random_closed_walk(tri, 24, rng))
        h = holonomy(rep, w)  # raises NotIsometry past the residual bound
        assert abs(abs(h.det_phase) - 1) < 1e-14


def test_concatenation_holonomy(tri, rng):
    rep = BentRep.random(tri, rng)
    hits = 0
    for _ in range(100):
        p1 = random_closed_walk(tri, 2 * int(rng.integers(1, 5)), rng)
        p2 = random_closed_walk(tri, 2 * int(rng.integers(1, 5)), rng)
        w1, w2 = compile_word(tri, p1), compile_word(tri, p2)
        try:
            joined = compile_word(tri, p1 + p2)
        except UTurn:
            continue  # the pieces backtrack where they meet
        if joined != w1 + w2:
            continue
        hits += 1
        h = holonomy(rep, w1 + w2).array()
        direct = holonomy(rep, w2).array() @ holonomy(rep, w1).array()
        assert np.max(np.abs(h - direct)) <= 1e-10 * np.abs(direct).max()
    assert hits > 10


# -- real form, bending fibers, B matrix ------------------------------------


def test_real_form(s11, rng):
    rep = BentRep.from_lists(s11, [2, 3, 0.5], [0, 0, 0])
    assert real_form(rep) is rep
    rep = sample_rep(s11)
    h0 = holonomy(real_form(rep), Word.parse("t- e1 t+ e0")).array()
    assert np.max(np.abs(h0.imag)) < 1e-12
    for _ in range(50):
        rep = BentRep.random(s11, rng)
        w = compile_word(s11, random_closed_walk(s11, 8, rng))
        assert np.max(np.abs(holonomy(real_form(rep), w).mat.imag)) < 1e-12


def test_same_bending_fiber(s11, s03):
    rep = BentRep.from_lists(s11, [2, 3, 0.5], [0.1, 0.2, 0.3])
    assert same_bending_fiber(rep, real_form(rep))
    assert not same_bending_fiber(rep, BentRep.from_lists(s11, [4, 3, 0.5], [0.1, 0.2, 0.3]))
    assert same_bending_fiber(rep, BentRep.from_lists(s11, [2, 3, 0.5], [0.3, 0.1, 0.2]))
    with pytest.raises(MismatchedTriangulation):
        same_bending_fiber(rep, BentRep.from_lists(s03, [2, 3, 0.5], [0, 0, 0]))


def test_b_matrix(s11, rng):
    b = b_matrix(unit_rep(s11), Word.parse("t- e1 t+ e0")).array()
    np.testing.assert_allclose(b, np.abs(CASE_I), atol=1e-14)
    for _ in range(200):
        rep = BentRep.random(s11, rng)
        w = compile_word(s11, random_closed_walk(s11, 2 * int(rng.integers(1, 11)), rng))
        b = b_matrix(rep, w)
        h = holonomy(rep, w)
        ratio = math.exp(h.logscale - b.logscale)
        assert np.all(np.abs(h.mat) * ratio <= b.mat + 1e-12 * b.mat.max())


# -- sign structure ---------------------------------------------------------


def test_sign_structure_examples(s11, s03):
    rep = unit_rep(s11)
    w = Word.parse("t- e1 t+ e0")
    assert sign_case(w) == "I"
    assert check_sign_structure(rep, w)
    signs = np.sign(holonomy(rep, w).array().real)
    np.testing.assert_array_equal(signs, [[1, -1, -1], [-1, 1, 1], [-1, 1, 1]])
    for t in (s11, s03):
        for k in range(t.punctures):
            w = peripheral_word(t, k)
            assert sign_case(w) == "II"
            assert check_sign_structure(unit_rep(t), w)


def test_sign_structure_sweep(tri, rng):
    for _ in range(300):
        rep = BentRep.random(tri, rng)
        w = compile_word(tri, random_closed_walk(tri, 2 * int(rng.integers(1, 11)), rng))
        assert check_sign_structure(rep, w), str(w)


# -- domination -------------------------------------------------------------


def test_domination_examples(s11, rng):
    rep = BentRep.from_lists(s11, [2, 3, 0.5], [0, 0, 0])
    w = compile_word(s11, random_closed_walk(s11, 10, rng))
    r = check_domination(rep, w)
    assert r.ell == r.ell0 and r.tr_abs == r.tr0_abs and r.ok

    r = check_domination(sample_rep(s11), Word.parse("t- e1 t+ e0"))
    assert r.length_ok and r.trace_ok and r.ok
    assert r.ell < r.ell0

    # product of moduli one around the puncture
    rep = BentRep.from_lists(s11, [2.0, 0.25, 2.0], [0.4, 1.1, 2.5])
    r = check_domination(rep, peripheral_word(s11, 0))
    assert r.peripheral_equal
    assert abs(r.ell) <= 1e-9 and abs(r.ell0) <= 1e-9


def test_domination_report_roundtrip(s11):
    r = check_domination(sample_rep(s11), peripheral_word(s11, 0))
    d = r.to_dict()
    assert d["ok"] is True
    assert DominationReport.from_dict(d) == r


def test_domination_sweep(tri, rng):
    for _ in range(500):
        rep = BentRep.random(tri, rng)
        w = compile_word(tri, random_closed_walk(tri, 2 * int(rng.integers(1, 13)), rng))
        r = check_domination(rep, w)
        assert r.ell <= r.ell0 + domination_slack(r.ell0), str(w)
        assert r.tr_abs <= r.tr0_abs + 1e-9
        assert r.ok


def test_peripheral_preservation(tri, rng):
    for _ in range(200):
        rep = BentRep.random(tri, rng)
        for k in range(tri.punctures):
            w = peripheral_word(tri, k)
            r = check_domination(rep, w)
            target = peripheral_length(rep, w)
            assert abs(r.ell - r.ell0) <= 1e-9 * max(1, r.ell0)
            assert abs(r.ell - target) <= 1e-9 and abs(r.ell0 - target) <= 1e-9
            assert r.peripheral_equal


def test_eigen_shape(tri, rng):
    worst = 0.0
    for _ in range(300):
        rep = BentRep.random(tri, rng)
        w = compile_word(tri, random_closed_walk(tri, 2 * int(rng.integers(1, 13)), rng))
        h = holonomy(rep, w)
        if classify(h).kind is not IsometryKind.LOXODROMIC:
            continue
        worst = max(worst, eigen_shape_residual(h))
    assert worst <= 1e-8


# -- matrix lemmas ----------------------------------------------------------


def test_sign_flip_similarity(rng):
    assert sign_flip_similarity(np.eye(3))
    for _ in range(200):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        assert sign_flip_similarity(a)
        b = S @ a @ S
        np.testing.assert_allclose(np.poly(a), np.poly(b), atol=1e-12)


def test_entrywise_dom_oracle(rng):
    b = np.abs(CASE_I)
    assert entrywise_dom_oracle(b, b)
    for _ in range(200):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        bb = np.abs(a) + rng.uniform(0, 1, size=(3, 3))
        assert entrywise_dom_oracle(a, bb)
    a = np.ones((3, 3))
    with pytest.raises(PreconditionViolated):
        entrywise_dom_oracle(a, 0.5 * a)


# -- appendix experiment ----------------------------------------------------


def test_appendix_rows():
    r = appendix_row(3.0497, 2.0373, 0.2936, 0.0886)
    assert abs(r.f_trace / 13328 - 1) < 0.01
    assert abs(r.f_TRACE / 12855.2 - 1) < 0.01
    assert r.violation
    r = appendix_row(1.8096, 2.0235, 1.3414, 0.1429)
    assert abs(r.f_trace / 8837.83 - 1) < 0.01
    assert abs(r.f_TRACE / 6742.79 - 1) < 0.01
    assert r.violation
    r = appendix_row(1.7, 0.4, 0.0, 0.0)
    assert r.f_trace == r.f_TRACE and not r.violation


def test_appendix_tuples_bypass_rng():
    rows = appendix_experiment(tuples=[(3.0497, 2.0373, 0.2936, 0.0886)])
    assert len(rows) == 1 and rows[0].violation


def test_appendix_determinism_and_threads():
    a = appendix_experiment(samples=600, seed=11, threads=1)
    b = appendix_experiment(samples=600, seed=11, threads=4)
    assert a == b
    assert [r.index for r in a] == list(range(600))
    assert appendix_experiment(samples=600, seed=12, threads=1) != a
    for r in a:
        assert 0 < r.x < 5 and 0 < r.y < 5 and 0 < r.a < math.pi / 2 and 0 < r.b < math.pi / 2
    assert "PCG64" in RNG_ALGORITHM


def test_appendix_bad_config():
    for kw in ({"samples": 0}, {"xmax": 0.0}, {"amax": -1.0}, {"xmax": math.inf}):
        with pytest.raises(BadConfig):
            appendix_experiment(**kw)


def test_appendix_finds_violations():
    rows = appendix_experiment(samples=10_000, seed=0)
    assert sum(r.violation for r in rows) >= 1


def test_traces_consistent_with_eig(s11, rng):
    # holonomy traces agree with eigenvalue sums of the normalised matrix
    for _ in range(50):
        rep = BentRep.random(s11, rng)
        w = compile_word(s11, random_closed_walk(s11, 6, rng))
        h = holonomy(rep, w)
        e = eig3(h)
        assert np.all(charpoly_residual(e.roots, h.mat) <= 1e-10)
        n = su_normalize(h)
        assert abs(trace(n) - eig3(n).values().sum()) <= 1e-9 * max(1, abs(trace(n)))
