import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from jointmoments.errors import DomainError, PoleError
from jointmoments.quadrature import de_quad
from jointmoments.specfun import (
    ZETA_PRIME_MINUS_ONE,
    QuadratureSpec,
    log_barnes_g,
    log_gamma,
    log_morris,
    upsilon,
    upsilon_integrand,
)

mp.mp.dps = 30


def mp_upsilon(beta, z):
    """Reference Upsilon_beta(z) evaluated entirely in mpmath."""
    beta, z = mp.mpf(beta), mp.mpmathify(z)

    def kernel(x):
        # Taylor series near 0 avoids cancellation at tanh-sinh nodes close to the origin
        if x < mp.mpf("1e-3"):
            return mp.mpf(1) / 12 - x**2 / 720 + x**4 / 30240
        return 1 / (2 * x) - 1 / x**2 + 1 / (x * mp.expm1(x))

    def f(x):
        return kernel(x) * mp.expm1(-x * z) / mp.expm1(x * beta / 2)

    integral = mp.quad(f, [0, 1, 10, mp.inf])
    w = 1 + 2 * z / beta
    return beta / 2 * mp.log(mp.barnesg(w)) - (z - mp.mpf(1) / 2) * mp.loggamma(w) + integral + z**2 / beta + z / 2


def test_zeta_prime_constant():
    assert ZETA_PRIME_MINUS_ONE == pytest.approx(float(mp.zeta(-1, derivative=1)), abs=1e-16)


@pytest.mark.parametrize("z", [0.5, 1.0, 3.7, 25.0, 1e-3 + 0j, 2 + 3j, -0.5 + 1j, 40 - 7j])
def test_log_gamma_matches_scipy(z):
    assert complex(log_gamma(z)) == pytest.approx(complex(special.loggamma(complex(z))), rel=1e-13, abs=1e-13)


@pytest.mark.parametrize("z", [1, 2, 3, 0.5, 1.5, 4.25, 12.0, 30.5, 0.3 + 0.4j, 2 - 1j, 5 + 6j, -0.5 + 0.1j])
def test_log_barnes_g_matches_mpmath(z):
    ref = complex(mp.log(mp.barnesg(z)))
    got = complex(log_barnes_g(z))
    # compare modulo 2 pi i (branches of the complex log)
    d = got - ref
    k = round(d.imag / (2 * math.pi))
    assert abs(d - 2j * math.pi * k) < 1e-11 * max(1.0, abs(ref))


@given(st.floats(0.05, 20.0))
def test_barnes_functional_equation(z):
    # G(z + 1) = Gamma(z) G(z)
    lhs = log_barnes_g(z + 1)
    rhs = special.gammaln(z) + log_barnes_g(z)
    assert lhs == pytest.approx(rhs, abs=1e-10 * max(1.0, abs(lhs)))


def test_poles():
    with pytest.raises(PoleError):
        log_gamma(0)
    with pytest.raises(PoleError):
        log_gamma(-3)
    with pytest.raises(PoleError):
        log_barnes_g(-1)


@pytest.mark.parametrize(
    "beta,z",
    [(2.0, 0.7), (1.0, 0.4), (4.0, 1.5), (0.5, 2.0), (1.0, -0.3), (3.0, 0.2 + 0.8j), (2.0, 5.0)],
)
def test_upsilon_matches_mpmath(beta, z):
    ref = complex(mp_upsilon(beta, z))
    got = complex(upsilon(beta, z))
    assert got == pytest.approx(ref, abs=1e-9, rel=1e-9)


@pytest.mark.parametrize("beta,z", [(1.0, 0.4), (4.0, 2.5), (2.5, 0.3 + 0.2j)])
def test_upsilon_methods_agree(beta, z):
    assert complex(upsilon(beta, z, method="de")) == pytest.approx(complex(upsilon(beta, z)), abs=1e-10)


def test_upsilon_real_type_and_domain():
    assert isinstance(upsilon(1.0, 0.5), float)
    with pytest.raises(DomainError):
        upsilon(1.0, -0.6)  # Re z must exceed -beta/2
    with pytest.raises(DomainError):
        upsilon(-1.0, 1.0)
    with pytest.raises(ValueError):
        upsilon(1.0, 1.0, method="nope")


def test_upsilon_integrand_small_x_limit():
    beta, z = 1.3, 0.9
    assert float(upsilon_integrand(np.array([0.0]), beta, z)[0]) == pytest.approx(-z / (6 * beta), rel=1e-12)
    # continuity across the series/direct switch
    a, b = upsilon_integrand(np.array([0.5 - 1e-9, 0.5 + 1e-9]), beta, z)
    assert a == pytest.approx(b, rel=1e-7)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_subdivisions=0)


def test_morris_one_point():
    # N = 1: (1/2pi) int (1 - e^{it})^a (1 - e^{-it})^b dt = Gamma(a+b+1) / (Gamma(a+1) Gamma(b+1))
    a, b = 0.7, 1.3
    assert log_morris(1, a, b, 1.0) == pytest.approx(
        math.lgamma(a + b + 1) - math.lgamma(a + 1) - math.lgamma(b + 1), rel=1e-13
    )


def test_morris_cue_selberg_case():
    # lam = 1, a = b = 0: (2 pi)^-N int |Delta|^2 = N!
    for N in (1, 2, 5):
        assert log_morris(N, 0.0, 0.0, 1.0) == pytest.approx(math.lgamma(N + 1), abs=1e-12)


def test_morris_two_point_by_quadrature():
    a = b = 0.5
    lam = 1.5

    def f(t1, t2):
        w = abs(2 * mp.sin(t1 / 2)) ** (2 * a) * abs(2 * mp.sin(t2 / 2)) ** (2 * a)
        return w * abs(2 * mp.sin((t1 - t2) / 2)) ** (2 * lam)

    mp.mp.dps = 15
    val = mp.quad(f, [0, mp.pi, 2 * mp.pi], [0, mp.pi, 2 * mp.pi]) / (2 * mp.pi) ** 2
    mp.mp.dps = 30
    assert log_morris(2, a, b, lam) == pytest.approx(float(mp.log(val)), abs=1e-6)


def test_morris_symmetry_and_domain():
    d = 0.3 + 0.4j
    assert isinstance(log_morris(3, d.conjugate(), d, 1.0), float)
    assert log_morris(3, 0.2, 0.9, 0.7) == log_morris(3, 0.9, 0.2, 0.7)
    with pytest.raises(DomainError):
        log_morris(2, -0.6, -0.6, 1.0)
    with pytest.raises(DomainError):
        log_morris(0, 0.0, 0.0, 1.0)


def test_de_quad_basic():
    r = de_quad(lambda x: np.exp(-x), 0.0)
    assert r.value == pytest.approx(1.0, abs=1e-12)
    r = de_quad(lambda x: 1 / np.sqrt(x), 0.0, 1.0)
    assert r.value == pytest.approx(2.0, abs=1e-10)
    r = de_quad(lambda x: x ** 2.5 * np.exp(-x), 0.0)
    assert r.value == pytest.approx(math.gamma(3.5), rel=1e-11)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.3, 6.0), st.floats(0.05, 4.0))
def test_upsilon_gk_vs_de_property(beta, z):
    assert upsilon(beta, z, method="de") == pytest.approx(upsilon(beta, z), abs=1e-9)
