import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from perarfima import apply_seasonal, pi_coeffs, psi_coeffs


def gamma_ratio(j, d, sign):
    # Gamma(j + sign*d) / (Gamma(j + 1) Gamma(sign*d)), evaluated with signed log-gamma
    a = sign * d
    num_sign, num = special.gammasgn(j + a), special.gammaln(j + a)
    den_sign, den = special.gammasgn(a), special.gammaln(a)
    return num_sign * den_sign * np.exp(num - den - special.gammaln(j + 1))


def test_trivial_orders():
    assert np.array_equal(pi_coeffs(0, 5).coeffs, [1, 0, 0, 0, 0, 0])
    assert np.array_equal(psi_coeffs(0, 5).coeffs, [1, 0, 0, 0, 0, 0])
    assert np.array_equal(pi_coeffs(1, 3).coeffs, [1, -1, 0, 0])


def test_first_terms_and_metadata():
    c = pi_coeffs(0.4, 3)
    assert c.kind == "difference" and c.M == 3 and len(c) == 4
    assert c[1] == pytest.approx(-0.4)
    # by hand: c2 = -0.4 * 0.6 / 2, c3 = c2 * 1.6 / 3
    assert c[2] == pytest.approx(-0.12, rel=1e-14)
    assert c[3] == pytest.approx(-0.064, rel=1e-14)
    assert psi_coeffs(0.37, 3)[1] == pytest.approx(0.37)
    assert np.asarray(psi_coeffs(0.2, 4)).shape == (5,)


@pytest.mark.parametrize("d", [-0.49, -0.1, 0.1, 0.3, 0.49])
def test_recurrence_matches_gamma_ratio(d):
    j = np.arange(1, 51)
    np.testing.assert_allclose(pi_coeffs(d, 50).coeffs[1:], gamma_ratio(j, d, -1.0), rtol=1e-12)
    np.testing.assert_allclose(psi_coeffs(d, 50).coeffs[1:], gamma_ratio(j, d, +1.0), rtol=1e-12)


@settings(max_examples=50, deadline=None)
@given(d=st.floats(-0.49, 0.49), M=st.integers(1, 400))
def test_difference_and_integration_are_inverse(d, M):
    prod = np.convolve(pi_coeffs(d, M).coeffs, psi_coeffs(d, M).coeffs)[: M + 1]
    expected = np.zeros(M + 1)
    expected[0] = 1.0
    np.testing.assert_allclose(prod, expected, atol=1e-10)


@pytest.mark.parametrize("d", [0.1, 0.25, 0.4])
def test_square_sum_tail_rate(d):
    # sum_{j > M} psi_j^2 ~ C M^{2d-1}, so doubling M scales the tail by 2^{2d-1}
    w2 = psi_coeffs(d, 4_000_000).coeffs ** 2
    total = w2.sum()
    # the remainder beyond 4e6 follows the same power law; add it analytically
    c = 1.0 / special.gamma(d) ** 2
    total += c * 4_000_000 ** (2 * d - 1) / (1 - 2 * d)
    tail_1 = total - w2[: 10_001].sum()
    tail_2 = total - w2[: 20_001].sum()
    assert tail_2 / tail_1 == pytest.approx(2 ** (2 * d - 1), rel=0.2)


def test_negative_truncation_and_bad_order_rejected():
    with pytest.raises(ValueError):
        pi_coeffs(0.2, -1)
    with pytest.raises(ValueError):
        psi_coeffs(np.nan, 3)


def test_apply_seasonal_unit_lag_is_plain_filter(rng):
    x = rng.standard_normal(50)
    w = psi_coeffs(0.3, 49).coeffs
    expected = np.array([np.dot(w[: t + 1], x[t::-1]) for t in range(50)])
    np.testing.assert_allclose(apply_seasonal(x, 1, 0.3), expected, rtol=1e-12)


@pytest.mark.parametrize("kind", ["difference", "integration"])
def test_apply_seasonal_order_zero_is_identity(rng, kind):
    x = rng.standard_normal(37)
    np.testing.assert_array_equal(apply_seasonal(x, 4, 0.0, kind), x)


def test_apply_seasonal_definition(rng):
    x = rng.standard_normal(23)
    S, d = 4, 0.35
    c = pi_coeffs(d, 10).coeffs
    out = apply_seasonal(x, S, d, "difference")
    for t in range(23):
        assert out[t] == pytest.approx(sum(c[j] * x[t - S * j] for j in range(t // S + 1)))


@pytest.mark.parametrize("S", [1, 3, 4])
def test_difference_then_integration_recovers_impulse(S, backend):
    x = np.zeros(200)
    x[5] = 1.0
    y = apply_seasonal(apply_seasonal(x, S, 0.3, "difference"), S, 0.3, "integration")
    np.testing.assert_allclose(y, x, atol=1e-10)


def test_apply_seasonal_rejects_bad_input():
    with pytest.raises(ValueError):
        apply_seasonal([1.0, 2.0], 0, 0.2)
    with pytest.raises(ValueError):
        apply_seasonal([], 4, 0.2)
    with pytest.raises(ValueError):
        apply_seasonal([1.0], 4, 0.2, kind="both")
