import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.special import dawsn

from heisenberg_spectral.constants import (
    KAPPA_CLOSED_LIMIT,
    KappaInput,
    dawson,
    general_bound,
    gronwall_envelope,
    kappa,
    kappa_for,
    radial_bound,
    remark27_bound,
    resolvent_bound,
    stability_threshold,
)
from heisenberg_spectral.errors import DomainError


# ----------------------------------------------------------------------------- Dawson


def test_dawson_zero_and_p1():
    for p in (1.0, 2.0, 7.5):
        assert dawson(p, 0.0) == 0.0
    assert dawson(1, 1) == pytest.approx(1 - math.exp(-1), abs=1e-15)
    xs = np.linspace(0, 20, 1000)
    err = max(abs(dawson(1, x) + math.expm1(-x)) for x in xs)
    assert err <= 1e-12


def test_dawson_classical_against_scipy():
    # scipy's dawsn is the classical Dawson function, an independent implementation
    assert dawson(2, 1) == pytest.approx(0.5380795069127684, abs=1e-10)
    for x in (0.1, 0.9, 1.0, 3.0, 12.0, 40.0):
        assert dawson(2, x) == pytest.approx(dawsn(x), abs=1e-12)


def test_dawson_series_matches_quadrature_branch():
    # x^p just below and just above 1 take different code paths
    for p in (2.0, 3.5):
        lo, hi = dawson(p, 1 - 1e-9), dawson(p, 1 + 1e-9)
        assert abs(lo - hi) < 1e-8


def test_dawson_large_argument_does_not_overflow():
    val = dawson(3.0, 30.0)  # x^p = 27000
    assert np.isfinite(val) and val == pytest.approx(1 / (3 * 30.0**2), rel=1e-3)


def test_dawson_domain():
    with pytest.raises(DomainError):
        dawson(0.5, 1.0)
    with pytest.raises(DomainError):
        dawson(2.0, -1.0)


def test_dawson_upper_bound_example():
    assert dawson(2, 2) < 0.5 * (1 - math.exp(-4))


def test_dawson_upper_bound_grid():
    # strict for p > 1; p = 1 is the equality case
    for p in np.linspace(1.0, 6.0, 101)[1:]:
        for x in np.linspace(0.01, 6.0, 100):
            assert dawson(p, x) < x ** (1 - p) * -math.expm1(-(x**p))


@settings(max_examples=50, deadline=None)
@given(p=st.floats(1.0, 8.0), x=st.floats(0.0, 10.0))
def test_dawson_nonnegative_and_below_x(p, x):
    val = dawson(p, x)
    assert 0.0 <= val <= x + 1e-15


# ----------------------------------------------------------------------------- kappa


def test_kappa_input_derived_constants():
    inp = KappaInput(1, 1, 1, 1)
    assert inp.K1 == pytest.approx(2**-0.5)
    assert inp.K2 == pytest.approx(math.sqrt(2) * max(1, 2 * math.exp(-1.5)))
    assert inp.K3 == pytest.approx(math.sqrt(2))
    with pytest.raises(DomainError):
        KappaInput(2, 1, 1, 1)
    with pytest.raises(DomainError):
        KappaInput(1, 1, 1, 0.5)


def test_kappa_golden_value():
    res = kappa(KappaInput(1, 1, 1, 1))
    assert res.kappa == pytest.approx(6.42686, abs=5e-4)
    assert res.kappa < KAPPA_CLOSED_LIMIT
    assert KAPPA_CLOSED_LIMIT == pytest.approx(6.86037, abs=1e-5)
    assert res.kappa <= res.closed_bound


def test_kappa_stable_under_tighter_tolerances():
    inp = KappaInput(1, 1, 1, 1)
    a = kappa(inp)
    b = kappa(inp, n_scan=1601, xtol=1e-11, epsabs=1e-14)
    assert abs(a.kappa - b.kappa) <= 1e-6


@pytest.mark.parametrize("s", [1, 0.9, 0.75, 0.6])
@pytest.mark.parametrize("mu", [1, 0.9, 0.75, 0.6])
def test_kappa_below_closed_bound(s, mu):
    res = kappa(KappaInput(1, 1, s, mu))
    assert 0 < res.kappa <= res.closed_bound
    assert res.b_star > 0


def test_kappa_grows_as_mu_decreases():
    vals = [kappa(KappaInput(1, 1, 1, mu)).kappa for mu in (1, 0.9, 0.75, 0.6)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_kappa_conformal_uses_comparability_constants():
    pure = kappa_for("pure", 0.75, 1)
    conf = kappa_for("conformal", 0.75, 1, d=1)
    assert conf.kappa != pure.kappa and conf.kappa > 0


# ----------------------------------------------------------------------------- bounds


def test_remark27_examples():
    assert remark27_bound("W1", 1) == pytest.approx(439.06, abs=0.01)
    assert remark27_bound("W4N", 2) == pytest.approx(27.44, abs=0.01)
    assert remark27_bound("W1", 10**9) == pytest.approx(KAPPA_CLOSED_LIMIT * 25, rel=1e-8)
    for which in ("W2", "W3N", "W4N"):
        with pytest.raises(DomainError):
            remark27_bound(which, 1)
    with pytest.raises(DomainError):
        remark27_bound("W5", 2)


@pytest.mark.parametrize("which", ["W1", "W2", "W3N", "W4N"])
def test_remark27_decreasing_in_d(which):
    vals = [remark27_bound(which, d) for d in range(2, 12)]
    assert all(v > 0 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_radial_examples():
    assert radial_bound("W4", 1, 1, 1) == pytest.approx(6.42686 * (1 + math.sqrt(2)) ** 2 * 25, rel=1e-5)
    assert radial_bound("W3", 1, 1, 1) == pytest.approx(160.67, abs=0.01)
    assert radial_bound("W4", 3, 1, 1) < radial_bound("W4", 2, 1, 1) < radial_bound("W4", 1, 1, 1)


def test_stability_thresholds():
    assert stability_threshold("I", 1) == pytest.approx(2.277e-3, rel=1e-3)
    assert stability_threshold("II", 2) == pytest.approx(0.5 * (3 * math.exp(0.25) - 2) ** -2 / 81, rel=1e-14)
    for d in (1, 2, 5):
        assert stability_threshold("I", d) * remark27_bound("W1", d) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(DomainError):
        stability_threshold("II", 1)


def test_general_bound_reduces_at_s1():
    assert general_bound("I", 1, 1.0) == pytest.approx(64 * kappa(KappaInput(1, 1, 1, 1)).kappa, rel=1e-12)
    assert general_bound("I", 1, 1.0) < remark27_bound("W1", 1)
    with pytest.raises(DomainError):
        general_bound("I", 1, 0.5)


def test_resolvent_bound_selection():
    assert resolvent_bound("I", 1, 1, 1) == remark27_bound("W1", 1)
    assert resolvent_bound("II", 2, 1, 1) == remark27_bound("W2", 2)
    assert resolvent_bound("IV", 1, 1, 1) == radial_bound("W4", 1, 1, 1)
    assert resolvent_bound("IV", 2, 1, 1) == remark27_bound("W4N", 2)
    assert resolvent_bound("III", 1, 1, 1) == radial_bound("W3", 1, 1, 1)
    assert resolvent_bound("I", 1, 0.75, 0.75) == general_bound("I", 1, 0.75)


# ----------------------------------------------------------------------------- Gronwall


def test_gronwall_degenerate_cases():
    assert gronwall_envelope(2.0, 0.3, lambda r: 0.0, 0.1, 2.0) == pytest.approx(2.0 * math.exp(0.3 * 1.9))
    assert gronwall_envelope(0.0, 0.0, lambda r: r, 1.0, 3.0) == pytest.approx((0.5 * 4.0) ** 2)
    with pytest.raises(DomainError):
        gronwall_envelope(1.0, 0.0, lambda r: 1.0, 2.0, 1.0)


def _ode_solution(A, u1, u2, eps, b, theta):
    """Solves f(e) = A + int_e^b (u1 f + theta u2 sqrt f) backwards from e = b."""

    def rhs(r, y):
        return [-(u1 * y[0] + theta * u2(r) * math.sqrt(max(y[0], 0.0)))]

    sol = solve_ivp(rhs, (b, eps), [A], method="DOP853", rtol=1e-11, atol=1e-13)
    assert sol.success
    return sol.y[0, -1]


def test_gronwall_envelope_dominates_ode_solutions():
    rng = np.random.default_rng(7)
    for i in range(100):
        A = rng.uniform(0, 3)
        u1 = rng.uniform(0, 2)
        c = rng.uniform(0.1, 3)
        mu = rng.uniform(0.55, 1.0)
        eps, b = rng.uniform(0.01, 0.3), rng.uniform(0.8, 3.0)
        u2 = lambda r, c=c, mu=mu: c * r ** (mu - 1.5)
        theta = 1.0 if i % 2 == 0 else rng.uniform(0, 1)
        f_eps = _ode_solution(A, u1, u2, eps, b, theta)
        env = gronwall_envelope(A, u1, u2, eps, b)
        assert f_eps <= env * (1 + 1e-8)
        if theta == 1.0:
            # the saturated inequality attains the envelope
            assert f_eps == pytest.approx(env, rel=1e-7)
