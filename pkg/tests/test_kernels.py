"""Both kernel backends must agree with each other and with numpy."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chdom import kernels
from chdom.errors import NonFinite, ZeroMatrix

BACKENDS = kernels.available_backends()


@pytest.fixture(params=sorted(BACKENDS))
def k(request):
    return BACKENDS[request.param]


def test_backend_selected():
    assert kernels.BACKEND in BACKENDS
    assert "python" in BACKENDS


def _rand(rng, n=3):
    return rng.normal(size=(n, 3, 3)) + 1j * rng.normal(size=(n, 3, 3))


def test_normalize_window(k, rng):
    for a in _rand(rng, 20) * 10.0 ** rng.uniform(-200, 200, size=(20, 1, 1)):
        m, e = k.normalize(a)
        assert 0.5 <= np.max(np.abs(m)) < 1.0
        np.testing.assert_allclose(m * 2.0**e, a, rtol=1e-15)


def test_normalize_errors(k):
    with pytest.raises(ZeroMatrix):
        k.normalize(np.zeros((3, 3), dtype=complex))
    bad = np.eye(3, dtype=complex)
    bad[1, 2] = np.nan
    with pytest.raises(NonFinite):
        k.normalize(bad)


def test_chain_product_order(k, rng):
    blocks = _rand(rng, 5)
    mat, e = k.chain_product(blocks)
    direct = blocks[4] @ blocks[3] @ blocks[2] @ blocks[1] @ blocks[0]
    np.testing.assert_allclose(mat * 2.0**e, direct, rtol=1e-12, atol=1e-12 * np.abs(direct).max())


def test_chain_product_empty(k):
    mat, e = k.chain_product(np.zeros((0, 3, 3), dtype=complex))
    assert e == 0
    np.testing.assert_array_equal(mat, np.eye(3))


def test_charpoly(k, rng):
    a = _rand(rng, 1)[0]
    tr, m, d = k.charpoly3(a)
    coeffs = np.poly(a)  # [1, -tr, m, -det]
    assert abs(tr + coeffs[1]) < 1e-12
    assert abs(m - coeffs[2]) < 1e-12
    assert abs(d + coeffs[3]) < 1e-12


def test_eigvals_match_numpy(k, rng):
    for a in _rand(rng, 200):
        got = np.sort_complex(k.eigvals3(a))
        want = np.sort_complex(np.linalg.eigvals(a))
        assert np.max(np.abs(got - want)) < 1e-11


def test_eigvals_triangular_exact(k):
    a = np.array([[3.0, 0, 0], [1e8, 1j, 0], [5, 7, 1e-9]], dtype=complex)
    np.testing.assert_array_equal(k.eigvals3(a), [3.0, 1j, 1e-9])


def test_cubic_wide_dynamic_range(k):
    # roots 4e8 e^{1.7i}, e^{-3.4i}, e^{1.7i}/4e8 in mantissa units
    ph = np.exp(1.7j)
    r = np.array([4e8 * ph, np.exp(-3.4j), ph / 4e8]) / 5e8
    c2 = -r.sum()
    c1 = r[0] * r[1] + r[0] * r[2] + r[1] * r[2]
    c0 = -r.prod()
    got = k.cubic_roots(c2, c1, c0)
    np.testing.assert_allclose(got, r, rtol=1e-12)


def test_backends_agree(rng):
    if len(BACKENDS) < 2:
        pytest.skip("compiled backend not built")
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    for a in _rand(rng, 100):
        np.testing.assert_allclose(py.eigvals3(a), cy.eigvals3(a), rtol=1e-13, atol=1e-14)
        m1, e1 = py.matmul_normalized(a, a.T)
        m2, e2 = cy.matmul_normalized(a, a.T)
        assert e1 == e2
        np.testing.assert_allclose(m1, m2, rtol=1e-14, atol=1e-15)
        assert abs(py.gelfand_log(a, 10) - cy.gelfand_log(a, 10)) < 1e-12


def test_gelfand_exact_cases(k):
    assert math.exp(k.gelfand_log(np.eye(3, dtype=complex), 10)) == 1.0
    d = np.diag([math.e, 1, 1 / math.e]).astype(complex)
    assert abs(math.exp(k.gelfand_log(d, 10)) - math.e) < 1e-12
    nil = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=complex)
    assert k.gelfand_log(nil, 8) == -math.inf


coef = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=300, deadline=None)
@given(coef, coef, coef)
def test_cubic_roots_are_roots(c2, c1, c0):
    for k in BACKENDS.values():
        roots = k.cubic_roots(c2, c1, c0)
        # Vieta checks, scaled by the coefficient sizes
        scale = max(1.0, abs(c2), abs(c1) ** 0.5, abs(c0) ** (1 / 3))
        assert abs(roots.sum() + c2) <= 1e-8 * scale
        assert abs(np.prod(roots) + c0) <= 1e-8 * scale**3
        # abs() is libm hypot, as in the kernels; np.abs can differ in the last bit
        mods = [abs(complex(r)) for r in roots]
        assert mods[0] >= mods[1] >= mods[2]
