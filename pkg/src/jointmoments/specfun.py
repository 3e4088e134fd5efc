"""Special functions for the limiting constants.

* :func:`log_gamma` -- thin wrapper around :func:`scipy.special.loggamma` with
  explicit pole detection.
* :func:`log_barnes_g` -- log of the Barnes G-function by upward recursion
  followed by the Stirling-type asymptotic series.
* :func:`upsilon` -- the function ``Upsilon_beta(z)`` combining Barnes G, Gamma
  and an exponential-kernel integral; it encodes the O(1) constant in the
  large-N asymptotics of the circular Jacobi normalization.
* :func:`log_morris` -- the Morris-integral normalization of the circular
  Jacobi weight.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import integrate, special

from .errors import DomainError, PoleError, QuadratureError
from .quadrature import de_quad

__all__ = [
    "QuadratureSpec",
    "ZETA_PRIME_MINUS_ONE",
    "log_barnes_g",
    "log_gamma",
    "log_morris",
    "upsilon",
    "upsilon_integrand",
]

#: zeta'(-1), the constant term of the Barnes G asymptotic expansion.
ZETA_PRIME_MINUS_ONE = -0.16542114370045092921391966024278

# B_{2k+2} / (4 k (k+1)) for k = 1..12
_BARNES_COEFFS = [
    float(special.bernoulli(2 * k + 2)[-1]) / (4 * k * (k + 1)) for k in range(1, 13)
]
# B_{2k} / (2k)! for k = 1..10, series of 1/(2x) - 1/x^2 + 1/(x(e^x-1)) at x=0
_KERNEL_SERIES = [
    float(special.bernoulli(2 * k)[-1]) / math.factorial(2 * k) for k in range(1, 11)
]
_KERNEL_SERIES_CUTOFF = 0.5
_BARNES_SHIFT = 20.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for adaptive quadrature.

    Parameters
    ----------
    abs_tol, rel_tol : float
        Absolute and relative error targets, both strictly positive.
    max_subdivisions : int
        Subinterval limit passed to QUADPACK.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be strictly positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")


DEFAULT_QUAD = QuadratureSpec()


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0 and z.real <= 0 and float(z.real).is_integer()


def log_gamma(z):
    """Principal branch of ``log Gamma(z)``.

    Parameters
    ----------
    z : float or complex

    Returns
    -------
    float or complex
        A float when ``z`` is real and positive, otherwise a complex number.
        For complex arguments the branch is the analytic continuation of the
        real function from the positive axis, with a cut along the negative
        real axis.

    Raises
    ------
    PoleError
        At nonpositive integers.
    """
    zc = complex(z)
    if _is_nonpositive_integer(zc):
        raise PoleError(f"log_gamma has a pole at {z}")
    if zc.imag == 0 and zc.real > 0 and not isinstance(z, complex):
        return float(special.gammaln(zc.real))
    return complex(special.loggamma(zc))


def _barnes_asymptotic(u: complex) -> complex:
    """``log G(u + 1)`` for large ``Re(u)``."""
    lu = np.log(u)
    out = 0.5 * u * u * lu - 0.75 * u * u + 0.5 * u * math.log(2 * math.pi)
    out += -lu / 12.0 + ZETA_PRIME_MINUS_ONE
    inv2 = 1.0 / (u * u)
    p = inv2
    for c in _BARNES_COEFFS:
        term = c * p
        out += term
        if abs(term) < 1e-17 * max(1.0, abs(out)):
            break
        p *= inv2
    return out


def log_barnes_g(z):
    """Logarithm of the Barnes G-function.

    Uses the recursion ``log G(z+1) = log Gamma(z) + log G(z)`` to shift the
    argument to ``Re(z) >= 20`` and then the asymptotic series

    ``log G(u+1) = u^2/2 log u - 3u^2/4 + u/2 log(2 pi) - log(u)/12
    + zeta'(-1) + sum_k B_{2k+2} / (4k(k+1) u^{2k})``.

    Parameters
    ----------
    z : float or complex

    Returns
    -------
    float or complex
        A float for real positive ``z``; otherwise the analytic branch that
        is real on the positive axis.

    Raises
    ------
    PoleError
        At nonpositive integers, where ``G`` vanishes.
    """
    zc = complex(z)
    if _is_nonpositive_integer(zc):
        raise PoleError(f"Barnes G vanishes at {z}; its logarithm is undefined")
    shift = max(0, math.ceil(_BARNES_SHIFT - zc.real))
    ks = zc + np.arange(shift)
    acc = complex(np.sum(special.loggamma(ks.astype(complex)))) if shift else 0j
    value = _barnes_asymptotic(zc + shift - 1.0) - acc
    if zc.imag == 0 and zc.real > 0 and not isinstance(z, complex):
        return float(value.real)
    return complex(value)


def upsilon_integrand(x, beta: float, z: complex):
    """Integrand of the exponential-kernel part of :func:`upsilon`.

    ``(1/(2x) - 1/x^2 + 1/(x(e^x - 1))) (e^{-xz} - 1) / (e^{x beta/2} - 1)``

    The first factor is replaced by its Bernoulli series for ``x < 0.5`` and
    the value at ``x = 0`` is the analytic limit ``-z/(6 beta)``.  For large
    ``x`` the second factor is rewritten as
    ``e^{-x(z+beta/2)} (1 - e^{xz}) / (1 - e^{-x beta/2})`` to avoid overflow.

    Parameters
    ----------
    x : array_like
        Nonnegative abscissae.
    beta : float
    z : complex

    Returns
    -------
    ndarray
        Real if ``z`` is real, else complex.
    """
    x = np.asarray(x, dtype=float)
    real = complex(z).imag == 0
    zz = complex(z).real if real else complex(z)
    with np.errstate(all="ignore"):
        x2 = x * x
        series = np.zeros_like(x)
        p = np.ones_like(x)
        for c in _KERNEL_SERIES:
            series = series + c * p
            p = p * x2
        direct = (0.5 - 1.0 / x + 1.0 / np.expm1(x)) / x
        kernel = np.where(x < _KERNEL_SERIES_CUTOFF, series, direct)

        half = 0.5 * beta * x
        small = np.expm1(-x * zz) / np.expm1(half)
        large = np.exp(-x * (zz + 0.5 * beta)) * (-np.expm1(x * zz)) / (-np.expm1(-half))
        ratio = np.where(half < 30.0, small, large)
        ratio = np.where(x == 0, -2.0 * zz / beta, ratio)
    return kernel * ratio


def _tail_cutoff(beta: float, z: complex, abs_tol: float) -> float:
    """Truncation point T with the neglected tail below ``abs_tol / 10``.

    For ``x >= 1`` the kernel is bounded by ``1/(2x) <= 1/2`` and
    ``|e^{-xz} - 1| / (e^{x beta/2} - 1) <= 2 (e^{-x c} + e^{-x beta/2})``
    with ``c = Re(z) + beta/2 > 0``; integrating gives the bound used here.
    """
    c = min(complex(z).real + 0.5 * beta, 0.5 * beta)
    target = abs_tol / 10.0
    # tail <= 2 e^{-cT}/c ; solve for T
    t = math.log(2.0 / (c * target)) / c
    return max(10.0, t)


def _quad_real(f, a: float, b: float, spec: QuadratureSpec) -> tuple[float, float, int]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info = integrate.quad(
            f, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=spec.max_subdivisions,
            full_output=1,
        )[:3]
    return float(val), float(err), int(info["neval"])


def _upsilon_integral_gk(beta: float, z: complex, spec: QuadratureSpec) -> tuple[complex, float]:
    tail = _tail_cutoff(beta, z, spec.abs_tol)
    breaks = [0.0, 1.0] + [b for b in (10.0, 40.0) if b < tail] + [tail]
    real = complex(z).imag == 0
    total = 0j
    err = 0.0
    parts = [("real", np.real)] if real else [("real", np.real), ("imag", np.imag)]
    for name, take in parts:
        acc = 0.0
        for lo, hi in zip(breaks[:-1], breaks[1:]):
            val, e, _ = _quad_real(
                lambda x, take=take: float(take(upsilon_integrand(x, beta, z))), lo, hi, spec
            )
            acc += val
            err += e
        total += acc if name == "real" else 1j * acc
    tol = max(spec.abs_tol, spec.rel_tol * abs(total)) * 100.0
    if not err <= tol:
        raise QuadratureError(
            f"Upsilon integral did not converge for beta={beta}, z={z}", estimate=total, error=err
        )
    return total, err


def _upsilon_integral_de(beta: float, z: complex, spec: QuadratureSpec) -> tuple[complex, float]:
    res = de_quad(
        lambda x: upsilon_integrand(x, beta, z), 0.0, math.inf,
        abs_tol=spec.abs_tol, rel_tol=spec.rel_tol,
    )
    return complex(res.value), res.error


def upsilon(
    beta: float,
    z,
    quad: QuadratureSpec | None = None,
    method: Literal["gk", "de"] = "gk",
):
    """The function ``Upsilon_beta(z)``.

    ``Upsilon_beta(z) = (beta/2) log G(1 + 2z/beta)
    - (z - 1/2) log Gamma(1 + 2z/beta) + I_beta(z) + z^2/beta + z/2``

    where ``I_beta(z)`` is the integral of :func:`upsilon_integrand` over
    ``(0, inf)``.

    Parameters
    ----------
    beta : float
        Positive.
    z : float or complex
        Must satisfy ``Re(z) > -beta/2``, the region where the integral
        converges (see Notes).
    quad : QuadratureSpec, optional
    method : {"gk", "de"}
        Adaptive Gauss--Kronrod (QUADPACK, split at ``x = 1``) or the
        double-exponential rule.  The two are independent and are used to
        cross-check each other.

    Returns
    -------
    float or complex
        A float when ``z`` is real.

    Raises
    ------
    DomainError
        If ``beta <= 0`` or ``Re(z) <= -beta/2``.
    PoleError
        If ``1 + 2z/beta`` is a nonpositive integer.
    QuadratureError
        If the integral does not reach the requested tolerance.

    Notes
    -----
    The integrand decays like ``exp(-x (Re z + beta/2))``, so the integral,
    and hence the function, is analytic on ``Re(z) > -beta/2``.  That
    half-plane contains every argument ``1 + delta - beta/2 + ...`` needed by
    the limiting constant under its hypotheses, including values such as
    ``Upsilon_4(-1)`` and ``Upsilon_2(0)``.
    """
    if not beta > 0:
        raise DomainError("beta must be positive")
    quad = quad or DEFAULT_QUAD
    zc = complex(z)
    if not zc.real > -0.5 * beta:
        raise DomainError(f"Upsilon_beta(z) requires Re(z) > -beta/2; got z={z}, beta={beta}")
    w = 1.0 + 2.0 * zc / beta
    if _is_nonpositive_integer(w):
        raise PoleError(f"1 + 2z/beta = {w} is a pole")
    if method == "gk":
        integral, _ = _upsilon_integral_gk(beta, zc, quad)
    elif method == "de":
        integral, _ = _upsilon_integral_de(beta, zc, quad)
    else:
        raise ValueError(f"unknown method {method!r}")
    value = (
        0.5 * beta * complex(log_barnes_g(w))
        - (zc - 0.5) * complex(special.loggamma(w))
        + integral
        + zc * zc / beta
        + 0.5 * zc
    )
    if zc.imag == 0:
        return float(value.real)
    return complex(value)


def log_morris(N: int, a, b, lam: float):
    """Logarithm of the Morris-integral normalization.

    ``M_N(a, b, lam) = prod_{j=0}^{N-1} Gamma(lam j + a + b + 1) Gamma(lam (j+1) + 1)
    / (Gamma(lam j + a + 1) Gamma(lam j + b + 1) Gamma(lam + 1))``

    which equals ``(2 pi)^{-N} int prod_j (1 - e^{i t_j})^a (1 - e^{-i t_j})^b
    prod_{j<k} |e^{i t_j} - e^{i t_k}|^{2 lam} dt``.

    Parameters
    ----------
    N : int
        Positive.
    a, b : float or complex
        ``Re(a + b) > -1``.
    lam : float
        Positive; ``beta/2`` for the circular ensembles.

    Returns
    -------
    float or complex
        Real when ``a`` and ``b`` are real or complex conjugates.  The result
        is exactly symmetric in ``(a, b)``.
    """
    if N < 1:
        raise DomainError("N must be a positive integer")
    if not lam > 0:
        raise DomainError("lambda must be positive")
    a = complex(a)
    b = complex(b)
    if not (a + b).real > -1:
        raise DomainError("Morris integral requires Re(a+b) > -1")
    j = np.arange(N, dtype=float)
    args = [lam * j + a + b + 1, lam * (j + 1) + 1, lam * j + a + 1, lam * j + b + 1]
    for arr in args:
        for v in np.atleast_1d(arr):
            if _is_nonpositive_integer(complex(v)):
                raise PoleError(f"Gamma pole at {v} in Morris integral")
    num = special.loggamma(args[0].astype(complex)) + special.loggamma(args[1].astype(complex))
    den = (special.loggamma(args[2]) + special.loggamma(args[3])) + special.loggamma(
        complex(lam + 1)
    )
    total = complex(np.sum(num - den))
    if a.imag == 0 and b.imag == 0 or a == b.conjugate():
        return float(total.real)
    return total
