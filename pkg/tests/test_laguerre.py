import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heisenberg_spectral.errors import DomainError
from heisenberg_spectral.laguerre import (
    basis_eval,
    basis_norm,
    basis_table,
    gauss_laguerre,
    laguerre_poly,
    laguerre_table,
    radial_gauss_rule,
    sphere_area,
)


def test_laguerre_low_order_closed_forms():
    assert laguerre_poly(0, 0, 3.7) == 1.0
    assert laguerre_poly(1, 2, 1.0) == 2.0
    x = 2.0
    assert laguerre_poly(2, 0, x) == pytest.approx((x * x - 4 * x + 2) / 2, abs=1e-15)
    assert laguerre_poly(2, 0, 2.0) == pytest.approx(-1.0, abs=1e-15)


def test_laguerre_matches_scipy():
    from scipy.special import eval_genlaguerre

    x = np.linspace(0, 60, 31)
    for k in (3, 17, 40):
        for alpha in (0, 2, 4.5):
            ref = eval_genlaguerre(k, alpha, x)
            assert np.allclose(laguerre_poly(k, alpha, x), ref, rtol=1e-9, atol=1e-9 * np.abs(ref).max())


def test_laguerre_table_consistent_with_poly():
    x = np.linspace(0, 10, 7)
    tab = laguerre_table(12, 1, x)
    for k in range(13):
        assert np.allclose(tab[k], laguerre_poly(k, 1, x))


def test_alpha_domain():
    with pytest.raises(DomainError):
        laguerre_poly(2, -1.0, 0.5)


@settings(max_examples=60, deadline=None)
@given(
    k=st.integers(1, 64),
    alpha=st.integers(0, 5),
    x=st.floats(0.5, 80.0),
)
def test_derivative_identity(k, alpha, x):
    h = 1e-5 * max(1.0, x)
    fd = (laguerre_poly(k, alpha, x + h) - laguerre_poly(k, alpha, x - h)) / (2 * h)
    exact = -laguerre_poly(k - 1, alpha + 1, x)
    scale = max(1.0, abs(exact), abs(laguerre_poly(k, alpha, x)))
    assert abs(fd - exact) <= 1e-6 * scale


def test_basis_norm_ground_state_d1():
    assert basis_norm(0, 1, 1.0) == pytest.approx((math.pi / 2) ** -0.5, rel=1e-14)


def test_basis_norm_by_independent_quadrature():
    from scipy.integrate import quad

    for k, d, lam in [(0, 1, 1.0), (3, 2, 0.7), (5, 3, -2.5)]:
        f = lambda r: (laguerre_poly(k, d - 1, 2 * abs(lam) * r * r) * math.exp(-abs(lam) * r * r)) ** 2
        val, _ = quad(lambda r: f(r) * sphere_area(d) * r ** (2 * d - 1), 0, np.inf, epsabs=0, epsrel=1e-13, limit=200)
        assert basis_norm(k, d, lam) ** 2 * val == pytest.approx(1.0, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(k=st.integers(0, 30), d=st.integers(1, 4), lam=st.floats(0.05, 20.0), c=st.floats(0.1, 10.0))
def test_basis_norm_scaling(k, d, lam, c):
    assert basis_norm(k, d, c * lam) == pytest.approx(c ** (d / 2) * basis_norm(k, d, lam), rel=1e-12)


def test_basis_eval_examples():
    assert basis_eval(0, 1, 1.0, 0.0) == pytest.approx(basis_norm(0, 1, 1.0))
    assert basis_eval(1, 1, 1.0, math.sqrt(0.5)) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        basis_eval(0, 1, 0.0, 1.0)


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("kmax", [16, 32])
def test_orthonormality(d, kmax):
    lam = 0.83
    rule = radial_gauss_rule(kmax + 32, d, lam)
    tab = basis_table(kmax, d, [lam], rule.nodes)[:, 0, :]
    gram = (tab * rule.weights) @ tab.T
    assert np.abs(gram - np.eye(kmax + 1)).max() < 1e-10


def test_orthonormality_128_nodes():
    rule = radial_gauss_rule(128, 1, 1.0)
    tab = basis_table(16, 1, [1.0], rule.nodes)[:, 0, :]
    gram = (tab * rule.weights) @ tab.T
    assert np.abs(gram - np.eye(17)).max() < 1e-10


def test_gauss_laguerre_examples():
    one = gauss_laguerre(1, 0)
    assert one.nodes[0] == pytest.approx(1.0) and one.weights[0] == pytest.approx(1.0)
    rule = gauss_laguerre(16, 0)
    assert rule.integrate(rule.nodes**3) == pytest.approx(6.0, abs=1e-12)
    rule1 = gauss_laguerre(16, 1)
    assert rule1.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(rule.nodes) > 0) and np.all(rule.weights > 0)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0, 3.0])
def test_gauss_laguerre_zeroth_moment(alpha):
    rule = gauss_laguerre(40, alpha)
    assert rule.weights.sum() == pytest.approx(math.gamma(alpha + 1), rel=1e-12)


def test_gauss_laguerre_exactness_degree():
    n = 10
    rule = gauss_laguerre(n, 2)
    for m in range(2 * n):
        assert rule.integrate(rule.nodes**m) == pytest.approx(math.gamma(m + 3), rel=1e-10)
