import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heisenberg_spectral.errors import DomainError
from heisenberg_spectral.weights import WeightBase, WeightSpec, koranyi, weight_eval

W1, W2, W3, W4 = (WeightSpec(b) for b in ("W1", "W2", "W3", "W4"))


@pytest.fixture(scope="module")
def cloud():
    rng = np.random.default_rng(1)
    n = 100_000
    # mix of scales so both the near-origin and far-field regimes are hit
    r = np.exp(rng.uniform(-8, 5, n))
    t = np.exp(rng.uniform(-8, 6, n)) * rng.choice([-1, 1], n)
    return r, t


def test_koranyi_examples():
    assert koranyi(1.0, 0.0) == 1.0
    assert koranyi(0.0, 4.0) == pytest.approx(2.0)


@settings(max_examples=50, deadline=None)
@given(r=st.floats(0, 50), t=st.floats(-50, 50), lam=st.floats(0.01, 100))
def test_koranyi_homogeneous(r, t, lam):
    assert koranyi(lam * r, lam**2 * t) == pytest.approx(lam * koranyi(r, t), rel=1e-12, abs=1e-300)


def test_weight_examples():
    assert W4(1.0, 0.0) == 1.0
    assert W2(0.0, 0.0) == 1.0
    assert W1(0.0, 3.0) == 0.0 and W3(0.0, -2.0) == 0.0
    assert WeightSpec("One")(2.0, 3.0) == 1.0
    assert WeightSpec("AbsZ")(2.5, 1.0) == 2.5
    assert WeightSpec("InvAbsZ")(4.0, 1.0) == 0.25
    assert WeightSpec("Koranyi")(0.0, 16.0) == pytest.approx(4.0)


def test_exponent_applied():
    assert WeightSpec("W2", 2.0)(1.0, 1.0) == pytest.approx(1 / 3)
    assert WeightSpec("W4", 0.5)(2.0, 0.0) == pytest.approx(0.5**0.5)


def test_singular_points_raise():
    with pytest.raises(DomainError):
        W4(0.0, 0.0)
    with pytest.raises(DomainError):
        WeightSpec("InvAbsZ")(0.0, 1.0)
    assert W4.singular and WeightSpec("InvAbsZ").singular and not W1.singular
    with pytest.raises(DomainError):
        WeightSpec("W1", float("nan"))


def test_base_accepts_strings():
    assert WeightSpec("Koranyi").base is WeightBase.KORANYI


def test_pointwise_order(cloud):
    r, t = cloud
    w1, w3, w4 = W1(r, t), W3(r, t), W4(r, t)
    assert np.all(w1 <= w3) and np.all(w3 <= w4)


def test_bounded_by_one(cloud):
    r, t = cloud
    for w in (W1, W2, W3):
        assert np.all(w(r, t) <= 1.0)
        assert np.all(w(r, t) >= 0.0)


def test_pointwise_product_bounds(cloud):
    r, t = cloud
    w1, w2, w3 = W1(r, t), W2(r, t), W3(r, t)
    at = np.abs(t)
    eps = 1e-14
    assert np.all(w1 * r <= 1 + eps)
    assert np.all(w1 * at <= 1 + eps)
    assert np.all(w3 * at <= r * (1 + eps))
    assert np.all(w2 * r <= 1 + eps)
    assert np.all(w2 * at <= 1 + eps)


@settings(max_examples=50, deadline=None)
@given(r=st.floats(1e-3, 50), t=st.floats(-50, 50), lam=st.floats(0.05, 20))
def test_w4_homogeneous_degree_minus_one(r, t, lam):
    assert W4(lam * r, lam**2 * t) == pytest.approx(W4(r, t) / lam, rel=1e-12)


def test_scalar_and_array_outputs():
    assert isinstance(W2(1.0, 2.0), float)
    out = W2(np.array([0.0, 1.0]), 0.0)
    assert out.shape == (2,)
