import math
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointmoments.errors import DomainError
from jointmoments.limits import (
    JointMomentParams,
    cjbe_finite_f0,
    f0_growth_exponent,
    f0_limit,
    f_limit,
    forrester_joint_moment,
    jacobi_inverse_moment,
    laguerre_finite_moment,
    laguerre_inverse_power_moment,
    moments_connection,
    x_moment_limit,
    x_second_moment_closed,
    y_moment_limit,
)

# ----------------------------------------------------------------- X moments


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 8.0), st.floats(0.51, 6.0))
def test_second_moment_matches_closed_form(beta, tau):
    assert x_moment_limit(beta, tau, 1) == pytest.approx(x_second_moment_closed(beta, tau), rel=1e-12)


def test_exact_rationals():
    assert x_moment_limit(1, 2, 1, exact=True) == Fraction(1, 27)
    assert x_moment_limit(2, 3, 2, exact=True) == Fraction(1, 315)
    assert x_moment_limit(Fraction(1, 2), 1, 0, exact=True) == 1
    assert isinstance(x_moment_limit(2, 1, 1), float)


def test_x_moments_are_log_convex_in_h():
    # moments of a random variable: E[X^2]^2 <= E[X^4]
    beta, tau = 2.0, 3.0
    m2, m4 = x_moment_limit(beta, tau, 1), x_moment_limit(beta, tau, 2)
    assert m2 * m2 <= m4


def test_x_moment_domain():
    with pytest.raises(DomainError):
        x_moment_limit(2, 1.4, 2)  # needs tau > 3/2
    with pytest.raises(DomainError):
        x_moment_limit(2, 2, 1.5)
    with pytest.raises(DomainError):
        x_moment_limit(0, 2, 1)
    with pytest.raises(DomainError):
        x_second_moment_closed(2, 0.5)


# --------------------------------------------------------- moments connection


@given(st.integers(1, 4), st.lists(st.floats(-5, 5), min_size=9, max_size=9))
def test_moments_connection_extracts_leading_coefficient(h, coeffs):
    # a degree-2h polynomial in k: the 2h-th finite difference / (2h)! is the leading coefficient
    n = 2 * h
    c = coeffs[: n + 1]
    m = [sum(ci * k**i for i, ci in enumerate(c)) for k in range(1, n + 1)]
    # the k = 0 value is implicitly c[0] - subtract it so that m(0) = 0 holds
    m = [v - c[0] for v in m]
    assert moments_connection(m) == pytest.approx(c[n], abs=1e-7 * (1 + max(abs(x) for x in c)) * 10**h)


def test_moments_connection_edge_cases():
    assert moments_connection([]) == 1.0
    with pytest.raises(ValueError):
        moments_connection([1.0, 2.0, 3.0])


# ----------------------------------------------------------------- f0 / Morris


def _cue_f0(delta, s):
    d, c = mp.mpc(delta), mp.conj(mp.mpc(delta))
    g = mp.barnesg
    return float(mp.re(g(1 + d + s) * g(1 + c + s) * g(1 + d + c) / (g(1 + d + c + 2 * s) * g(1 + d) * g(1 + c))))


@pytest.mark.parametrize("delta,s", [(0.0, 1.0), (0.0, 2.0), (0.0, 0.37), (0.5, 1.0), (0.3 + 0.4j, 0.8)])
def test_f0_limit_beta2_is_barnes_ratio(delta, s):
    assert f0_limit(2.0, delta, s) == pytest.approx(_cue_f0(delta, s), rel=1e-9)


def test_f0_limit_trivial_and_forms():
    assert f0_limit(1.0, 0.0, 0.0) == 1.0
    with pytest.raises(ValueError):
        f0_limit(1.0, 0.0, 1.0, form="other")
    # the two forms differ once delta != 0
    assert f0_limit(1.0, 0.5, 1.0, form="as-printed") != pytest.approx(f0_limit(1.0, 0.5, 1.0), rel=1e-3)


def test_growth_exponent():
    assert f0_growth_exponent(2.0, 0.0, 1.0) == 1.0
    assert f0_growth_exponent(1.0, 0.5 + 0.2j, 1.0) == pytest.approx(2.0 + 2.0)


@pytest.mark.parametrize("s", [0.3, 1.0, 2.5])
def test_cjbe_finite_f0_cue_product(s):
    N = 6
    ref = math.exp(sum(math.lgamma(j) + math.lgamma(j + 2 * s) - 2 * math.lgamma(j + s) for j in range(1, N + 1)))
    assert cjbe_finite_f0(N, 2.0, 0.0, s) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("beta", [0.5, 1.0, 3.0])
def test_cjbe_finite_f0_one_point(beta):
    d, s = 0.4, 0.7
    ref = math.exp(
        math.lgamma(2 * d + 2 * s + 1) + 2 * math.lgamma(d + 1) - 2 * math.lgamma(d + s + 1) - math.lgamma(2 * d + 1)
    )
    assert cjbe_finite_f0(1, beta, d, s) == pytest.approx(ref, rel=1e-12)


def test_cjbe_finite_f0_growth_rate():
    beta, delta, s = 2.0, 0.0, 1.0
    # at beta = 2, s = 1 the exact value is N + 1
    assert cjbe_finite_f0(400, beta, delta, s) == pytest.approx(401.0, rel=1e-12)
    ratio = cjbe_finite_f0(8000, beta, delta, s) / cjbe_finite_f0(4000, beta, delta, s)
    assert math.log(ratio) / math.log(2) == pytest.approx(f0_growth_exponent(beta, delta, s), abs=1e-3)


# ------------------------------------------------------------ joint moments


def test_forrester_continuity_in_h():
    v = forrester_joint_moment(2, 2, 1)
    assert forrester_joint_moment(2, 2, 1 + 1e-6) == pytest.approx(v, rel=1e-4)
    assert forrester_joint_moment(2, 2, 1 - 1e-6) == pytest.approx(v, rel=1e-4)


def test_forrester_h0_is_f0():
    for beta in (1.0, 2.0, 4.0):
        assert forrester_joint_moment(beta, 2, 0) == pytest.approx(f0_limit(beta, 0.0, 2.0), rel=1e-9)


def test_forrester_domain():
    with pytest.raises(DomainError):
        forrester_joint_moment(2, 1, 1.5)
    with pytest.raises(DomainError):
        forrester_joint_moment(2, 1, 0.5)  # cos(pi h) = 0
    with pytest.raises(DomainError):
        forrester_joint_moment(2, 1.5, 0)


def test_f_limit_factorization_and_cue_value():
    p = JointMomentParams(2.0, 0.0, 1.0, 1)
    # CUE: F(1, 1) = 1/12
    assert f_limit(p) == pytest.approx(1 / 12, rel=1e-10)
    p = JointMomentParams(1.0, 0.5, 1.0, 1)
    expected = f0_limit(1.0, 0.5, 1.0) / 4 * x_moment_limit(1.0, 1.5, 1)
    assert f_limit(p) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(DomainError):
        f_limit(JointMomentParams(2.0, 0.0, 1.0, 0.5))


def test_joint_params_window():
    assert JointMomentParams(2.0, 0.0, 1.0, 1).in_theorem_window
    assert not JointMomentParams(2.0, 0.0, 1.0, 2).in_theorem_window
    assert JointMomentParams(2.0, 0.2 + 1j, 1.0, 0).tau == 1.2 + 1j
    with pytest.raises(DomainError):
        JointMomentParams(2.0, -0.6, 1.0, 0)


# ------------------------------------------------------- inverse moments


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0, 3.0, 4.0])
def test_y_mean_is_two_over_nu(beta):
    assert y_moment_limit(beta, 3.0, 1) == pytest.approx(2 / 3.0, rel=1e-14)
    assert y_moment_limit(beta, 3.0, 0) == 1


@pytest.mark.parametrize("beta", [1.0, 2.0, 4.0])
@pytest.mark.parametrize("r", [1, 2, 3])
def test_one_point_inverse_laguerre(beta, r):
    # N = 1: x = 2/lambda with lambda ~ Gamma(nu + 1)
    nu = 4.5
    ref = 2.0**r * math.exp(math.lgamma(nu + 1 - r) - math.lgamma(nu + 1))
    assert laguerre_finite_moment(beta, nu, 1, r) == pytest.approx(ref, rel=1e-13)
    assert laguerre_inverse_power_moment(beta, nu, 1, r) == pytest.approx(ref / 2**r, rel=1e-13)


@pytest.mark.parametrize("beta", [1.0, 2.0, 4.0])
def test_finite_laguerre_converges_to_limit(beta):
    N = 2000
    for r in (1, 2, 3):
        ratio = laguerre_finite_moment(beta, 3.0, N, r) / N**r / y_moment_limit(beta, 3.0, r)
        assert ratio == pytest.approx(1.0, abs=1e-3)


def test_as_printed_vs_calibrated_at_beta2():
    for r in (1, 2, 3):
        ratio = y_moment_limit(2.0, 3.0, r, "as-printed") / y_moment_limit(2.0, 3.0, r)
        assert ratio == pytest.approx(4.0**-r, rel=1e-13)
    with pytest.raises(ValueError):
        y_moment_limit(2.0, 3.0, 1, "bogus")


@given(st.floats(0.2, 5.0), st.floats(0.0, 5.0), st.sampled_from([1.0, 2.0, 4.0]))
def test_jacobi_one_point(nu, mu, beta):
    # N = 1: Beta(nu + 1, mu + 1) law, E[1/x] = (nu + mu + 1)/nu for every beta
    assert jacobi_inverse_moment(beta, nu, mu, 1, 1) == pytest.approx((nu + mu + 1) / nu, rel=1e-12)


def test_inverse_domain():
    with pytest.raises(DomainError):
        y_moment_limit(2.0, 0.5, 2)  # nu > r - 1
    with pytest.raises(DomainError):
        laguerre_finite_moment(2.0, 3.0, 0, 1)
    with pytest.raises(DomainError):
        jacobi_inverse_moment(2.0, 3.0, -1.0, 1, 1)
