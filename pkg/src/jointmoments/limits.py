"""Closed-form limits and finite-N moment formulas.

Every function here is a deterministic evaluation of an explicit formula:

* moments of the limiting random variable ``X_beta(tau)`` of the rescaled
  Hua-Pickrell trace (a partition sum over ``|kappa| <= 2h``) and their
  closed form at ``h = 1``;
* the limiting constant ``F_{beta,delta}(s, 0)`` of the circular Jacobi
  joint moments in terms of ``Upsilon_beta``;
* the Forrester-type evaluation of ``F_{beta,0}(s, h)`` for integer ``s``;
* the inverse-moment formulas for Laguerre and Jacobi beta-ensembles;
* finite-N circular Jacobi normalization ratios from the Morris integral.

Partition sums are evaluated in exact rational arithmetic whenever the real
parameters are dyadic rationals with small denominators (``0.5``, ``1.5``,
``3`` ...), which makes identities checkable to machine precision.

Conventions for the Laguerre/Jacobi formulas
--------------------------------------------
Two normalization modes are offered.  ``"as-printed"`` evaluates the
uncorrected expressions literally.  ``"oracle-calibrated"`` (the default) uses
the reconciled expressions, which agree with direct quadrature of the
densities.  The reconciled box factor is

``((2/beta) a' + N - l') / (((2/beta)(a+1) + l) ((2/beta) a + l + 1))``

with prefactor ``(2/beta)^r r!`` for the Laguerre expectation of
``(sum 1/x_i)^r`` and ``(4/beta)^r r!`` for the inverse-Laguerre expectation
of ``(sum x_i)^r``.  The Gamma-ratio factors are unchanged.  The difference
between the two modes is not a single constant; it depends on ``beta`` and
on the shape of each partition (see :mod:`jointmoments.verify`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Literal, Sequence

from .errors import DomainError, QuadratureError
from .partitions import Partition, enumerate_partitions, gen_pochhammer, partitions_of, pochhammer
from .specfun import QuadratureSpec, log_morris, upsilon

__all__ = [
    "Calibration",
    "DEFAULT_CALIBRATION",
    "JointMomentParams",
    "cjbe_finite_f0",
    "f0_growth_exponent",
    "f0_limit",
    "f_limit",
    "forrester_joint_moment",
    "jacobi_inverse_moment",
    "laguerre_finite_moment",
    "laguerre_inverse_power_moment",
    "moments_connection",
    "x_moment_limit",
    "x_second_moment_closed",
    "y_moment_limit",
]

Calibration = Literal["as-printed", "oracle-calibrated"]
DEFAULT_CALIBRATION: Calibration = "oracle-calibrated"
_CALIBRATIONS = ("as-printed", "oracle-calibrated")

_MAX_EXACT_DENOMINATOR = 1 << 12


# ---------------------------------------------------------------------------
# parameter record
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JointMomentParams:
    """Parameters of a circular Jacobi joint moment ``F(s, h)``.

    Parameters
    ----------
    beta : float
        Positive inverse temperature.
    delta : complex
        Singularity strength, ``Re(delta) > -1/2``.
    s : float
    h : float
    """

    beta: float
    delta: complex = 0.0
    s: float = 0.0
    h: float = 0.0

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise DomainError("beta must be positive")
        if not complex(self.delta).real > -0.5:
            raise DomainError("Re(delta) must exceed -1/2")

    @property
    def tau(self) -> complex:
        """``s + delta``, the Hua-Pickrell parameter."""
        return self.s + self.delta

    @property
    def in_theorem_window(self) -> bool:
        """Whether the parameters satisfy the hypotheses of the convergence theorem.

        ``Re(delta) > -1/3``, ``s > -1/3``, ``s + Re(delta) > 0`` and
        ``0 <= h < s + Re(delta) + 1/2``.
        """
        rd = complex(self.delta).real
        return (
            rd > -1.0 / 3.0
            and self.s > -1.0 / 3.0
            and self.s + rd > 0
            and 0 <= self.h < self.s + rd + 0.5
        )


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _exact(x):
    """Return a Fraction if ``x`` is a small-denominator rational, else None."""
    if isinstance(x, bool):
        return None
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float) and math.isfinite(x):
        f = Fraction(x)
        if f.denominator <= _MAX_EXACT_DENOMINATOR:
            return f
    return None


def _numbers(*xs, exact: bool | None):
    """Promote parameters to Fractions when possible (and permitted)."""
    if exact is False:
        return tuple(float(x) for x in xs), False
    conv = [_exact(x) for x in xs]
    if all(c is not None for c in conv):
        return tuple(conv), True
    if exact:
        raise ValueError("exact arithmetic requested for non-rational parameters")
    return tuple(float(x) for x in xs), False


def _finish(value, is_exact: bool, want_exact: bool | None):
    if is_exact and want_exact:
        return value
    return float(value)


def _falling(x, k: int):
    """``x (x-1) ... (x-k+1)``."""
    out = 1
    for j in range(k):
        out = out * (x - j)
    return out


def _is_integer(x: float) -> bool:
    return float(x).is_integer()


def _hp_box_product(kappa: Partition, half_beta, tau):
    """Box product of the X-moment formula with parameter ``tau``."""
    out = Fraction(1) if isinstance(half_beta, Fraction) else 1.0
    for _, (a, l, ac, lc) in kappa.box_stats():
        out = out * (half_beta * ac + tau - lc) / (
            (half_beta * (a + 1) + l) * (half_beta * a + l + 1)
        )
    return out


def _hp_series_term(kappa: Partition, beta, tau, h2):
    """``(-2h)_{|k|} 2^{|k|} / [4 tau/beta]_k^{(beta/2)} * box product``.

    ``h2`` is ``2h``; it may be a non-integer for the Forrester series.
    """
    half = beta / 2
    n = kappa.weight
    poch = pochhammer(-h2, n)
    if poch == 0:
        return 0
    denom = gen_pochhammer(4 * tau / beta, kappa, half)
    if denom == 0:
        raise DomainError(f"generalized Pochhammer vanishes for kappa={kappa}")
    return poch * 2**n * _hp_box_product(kappa, half, tau) / denom


# ---------------------------------------------------------------------------
# X_beta(tau) moments
# ---------------------------------------------------------------------------


def x_moment_limit(beta, tau, h: int, *, exact: bool | None = None):
    """``E[X_beta(tau)^{2h}]`` for integer ``h >= 0``.

    ``(-1)^h sum_{|kappa| <= 2h} (-2h)_{|kappa|} 2^{|kappa|}
    / [4 tau/beta]_kappa^{(beta/2)} prod_box ((beta/2) a' + tau - l')
    / (((beta/2)(a+1) + l) ((beta/2) a + l + 1))``

    Parameters
    ----------
    beta : float
        Positive.
    tau : float
        Real, ``tau > h - 1/2``.
    h : int
        Nonnegative integer.
    exact : bool, optional
        ``True`` returns a :class:`fractions.Fraction` (requires rational
        inputs), ``False`` forces floating point, ``None`` (default) uses
        exact arithmetic internally when possible and returns a float.

    Returns
    -------
    float or Fraction

    Examples
    --------
    >>> x_moment_limit(2, 1, 1)
    0.3333333333333333
    """
    if isinstance(h, float):
        if not h.is_integer():
            raise DomainError("x_moment_limit requires integer h; use the mc module otherwise")
        h = int(h)
    if h < 0:
        raise DomainError("h must be nonnegative")
    if not beta > 0:
        raise DomainError("beta must be positive")
    if not tau > h - 0.5:
        raise DomainError(f"moment of order {2 * h} requires tau > {h - 0.5}; got tau={tau}")
    (b, t), is_exact = _numbers(beta, tau, exact=exact)
    total = 0
    for kappa in enumerate_partitions(2 * h):
        total = total + _hp_series_term(kappa, b, t, 2 * h)
    total = total * (-1) ** h
    return _finish(total, is_exact, exact)


def x_second_moment_closed(beta: float, tau: float) -> float:
    """Closed form ``beta / ((2 tau - 1)(4 tau + beta))`` of ``E[X_beta(tau)^2]``."""
    if not beta > 0:
        raise DomainError("beta must be positive")
    if not tau > 0.5:
        raise DomainError("the second moment requires tau > 1/2")
    return beta / ((2 * tau - 1) * (4 * tau + beta))


def moments_connection(finite_moments: Sequence[float]) -> float:
    """Recover ``E[X^{2h}]`` from finite-row moments.

    ``E[X^{2h}] = (1/(2h)!) sum_{k=1}^{2h} (-1)^{2h-k} C(2h, k) m_k``

    where ``m_k = E_k[(x_1 + ... + x_k)^{2h}]`` is the moment of the row sum
    of the ``k``-point Hua-Pickrell ensemble.  This is pure arithmetic; the
    inputs are usually supplied by :mod:`jointmoments.oracle`.

    Parameters
    ----------
    finite_moments : sequence of float
        ``(m_1, ..., m_{2h})``.  The empty sequence gives ``h = 0`` and the
        value 1 by convention.

    Raises
    ------
    ValueError
        If the length is odd.
    """
    n = len(finite_moments)
    if n % 2:
        raise ValueError("need an even number 2h of finite moments")
    if n == 0:
        return 1.0
    total = 0
    for k, m in enumerate(finite_moments, start=1):
        total += (-1) ** (n - k) * comb(n, k) * m
    return total / factorial(n)


# ---------------------------------------------------------------------------
# circular Jacobi constants
# ---------------------------------------------------------------------------


def f0_growth_exponent(beta: float, delta, s: float) -> float:
    """Exponent of ``N`` in the growth of ``F_{N,beta,delta}(s, 0)``.

    ``2 s^2/beta + 2 s (delta + conj(delta))/beta``.  The second term is
    what the Morris-integral asymptotics produce; it vanishes at
    ``delta = 0``.
    """
    return 2 * s * s / beta + 4 * s * complex(delta).real / beta


def f0_limit(
    beta: float,
    delta,
    s: float,
    quad: QuadratureSpec | None = None,
    *,
    form: Literal["corrected", "as-printed"] = "corrected",
) -> float:
    """The limiting constant ``F_{beta,delta}(s, 0)``.

    With ``d = delta`` and ``c = conj(delta)``,

    ``log F = U(1+d-b/2) - U(1+d+s-b/2) + U(1+c-b/2) - U(1+d+c-b/2)
    - U(1+c+s-b/2) + U(1+d+c+2s-b/2)``

    where ``U = Upsilon_beta`` and ``b = beta``; this is the constant in
    ``log F_N(s, 0) = f0_growth_exponent * log N + log F + o(1)``.  It
    reproduces ``G(1+s)^2 / G(1+2s)`` at ``beta = 2``, ``delta = 0`` and the
    Gamma product of :func:`forrester_joint_moment` at ``h = 0``.

    Parameters
    ----------
    beta : float
    delta : complex
    s : float
    quad : QuadratureSpec, optional
        Tolerances for the ``Upsilon`` integrals.
    form : {"corrected", "as-printed"}
        ``"as-printed"`` evaluates the uncorrected variant, which has
        ``s/2`` and ``s`` in place of ``s`` and ``2s`` and an additional
        ``exp(2 s (delta + conj(delta))/beta)``.  It is kept only for the
        reconciliation report; it does not match the Morris asymptotics.

    Returns
    -------
    float
        Positive.
    """
    if not beta > 0:
        raise DomainError("beta must be positive")
    d = complex(delta)
    c = d.conjugate()
    sh = 1.0 - beta / 2
    if form == "corrected":
        s1, s2, extra = s, 2 * s, 0.0
    elif form == "as-printed":
        s1, s2, extra = s / 2, s, 4 * s * d.real / beta
    else:
        raise ValueError(f"unknown form {form!r}")
    if s == 0:
        return 1.0

    def u(z: complex) -> complex:
        z = complex(z)
        return complex(upsilon(beta, z.real if z.imag == 0 else z, quad))

    expo = (
        u(sh + d)
        - u(sh + d + s1)
        + u(sh + c)
        - u(sh + d + c)
        - u(sh + c + s1)
        + u(sh + d + c + s2)
    )
    return math.exp(expo.real + extra)


def cjbe_finite_f0(N: int, beta: float, delta, s: float) -> float:
    """``F_{N,beta,delta}(s, 0) = E_{CJbetaE_{N,delta}} |Psi(0)|^{2s}`` exactly.

    Ratio of Morris integrals ``M_N(conj(d)+s, d+s, beta/2) / M_N(conj(d), d, beta/2)``.
    """
    d = complex(delta)
    num = log_morris(N, d.conjugate() + s, d + s, beta / 2)
    den = log_morris(N, d.conjugate(), d, beta / 2)
    return math.exp(complex(num - den).real)


def forrester_joint_moment(beta, s: int, h, *, exact: bool | None = None, max_weight: int = 120):
    """``F_{beta,0}(s, h)`` for integer ``s >= 0`` and real ``h``.

    ``prod_{j=1}^s Gamma(2j/beta)/Gamma(2(s+j)/beta) / (2^{2h} cos(pi h))
    sum_{l(kappa) <= s} (-2h)_{|kappa|} 2^{|kappa|} / [4s/beta]_kappa^{(beta/2)}
    prod_box ((beta/2) a' + s - l') / (((beta/2)(a+1)+l)((beta/2)a+l+1))``

    For integer ``h`` the series terminates at ``|kappa| = 2h`` and
    ``1/cos(pi h)`` is replaced by its exact value ``(-1)^h``.  For other
    ``h`` the series is summed weight by weight until three consecutive
    weights contribute less than ``1e-17`` relative.

    Raises
    ------
    DomainError
        Outside ``-1/2 < h < s + 1/2`` or at half-odd-integer ``h``.
    """
    if not beta > 0:
        raise DomainError("beta must be positive")
    if int(s) != s or s < 0:
        raise DomainError("s must be a nonnegative integer")
    s = int(s)
    if not -0.5 < h < s + 0.5:
        raise DomainError(f"need -1/2 < h < s + 1/2; got h={h}, s={s}")
    if _is_integer(2 * h) and not _is_integer(h):
        raise DomainError("h is a half-odd integer: cos(pi h) vanishes")
    integer_h = _is_integer(h)
    log_pref = sum(
        math.lgamma(2 * j / beta) - math.lgamma(2 * (s + j) / beta) for j in range(1, s + 1)
    )
    if integer_h:
        hi = int(h)
        (b, ss), is_exact = _numbers(beta, s, exact=exact)
        total = 0
        for kappa in enumerate_partitions(2 * hi, s):
            total = total + _hp_series_term(kappa, b, ss, 2 * hi)
        series = total * (-1) ** hi
        value = float(series) * math.exp(log_pref) / 4**hi
        return value
    b = float(beta)
    total = 0.0
    quiet = 0
    for n in range(0, max_weight + 1):
        layer = sum(_hp_series_term(k, b, float(s), 2 * h) for k in partitions_of(n, s))
        total += layer
        if n > 2 * h + 2:
            quiet = quiet + 1 if abs(layer) <= 1e-17 * max(1.0, abs(total)) else 0
            if quiet >= 3:
                break
    else:
        raise QuadratureError("Forrester series did not converge", estimate=total)
    return math.exp(log_pref) / (4**h * math.cos(math.pi * h)) * total


def f_limit(params: JointMomentParams, quad: QuadratureSpec | None = None) -> float:
    """``F_{beta,delta}(s, h) = F_{beta,delta}(s, 0) 2^{-2h} E[X_beta(s+delta)^{2h}]``.

    Requires integer ``h >= 0`` and real ``delta``.  The normalization of
    ``F_N(s, h)`` implied by this limit is ``N^{f0_growth_exponent + 2h}``.
    """
    if complex(params.delta).imag != 0:
        raise DomainError("f_limit requires real delta")
    if not _is_integer(params.h) or params.h < 0:
        raise DomainError("f_limit requires integer h >= 0")
    delta = complex(params.delta).real
    f0 = f0_limit(params.beta, delta, params.s, quad)
    h = int(params.h)
    if h == 0:
        return f0
    return f0 * 4.0**-h * x_moment_limit(params.beta, params.s + delta, h)


# ---------------------------------------------------------------------------
# Laguerre / Jacobi inverse moments
# ---------------------------------------------------------------------------


def _check_calibration(calibration: str) -> None:
    if calibration not in _CALIBRATIONS:
        raise ValueError(f"calibration must be one of {_CALIBRATIONS}; got {calibration!r}")


def _lag_box(kappa: Partition, c, N, with_numerator: bool):
    """Box product with arm multiplier ``c`` (``beta/2`` printed, ``2/beta`` reconciled)."""
    out = 1
    for _, (a, l, ac, lc) in kappa.box_stats():
        num = (c * ac + N - lc) if with_numerator else 1
        out = out * num / ((c * (a + 1) + l) * (c * a + l + 1))
    return out


def _lag_gamma(kappa: Partition, half_beta, nu):
    """``prod_{j} Gamma(nu + (beta/2) j + 1 - kappa_{j+1}) / Gamma(nu + (beta/2) j + 1)``."""
    out = 1
    for j, k in enumerate(kappa.parts):
        x = nu + half_beta * j
        f = _falling(x, k)
        if f == 0:
            raise DomainError("Gamma pole in the inverse-moment formula")
        out = out / f
    return out


def _jac_gamma(kappa: Partition, half_beta, nu, mu, N):
    """``prod_j Gamma(c_j) / Gamma(c_j - kappa_{j+1})``, ``c_j = nu+mu+(beta/2)(N+j-1)+2``."""
    out = 1
    for j, k in enumerate(kappa.parts):
        c = nu + mu + half_beta * (N + j - 1) + 2
        out = out * _falling(c - 1, k)
    return out


def _inverse_moment_sum(beta, nu, r: int, N, calibration: str, mu=None, exact=None):
    (b, v), is_exact = _numbers(beta, nu, exact=exact)
    m = None
    if mu is not None:
        (b, v, m), is_exact = _numbers(beta, nu, mu, exact=exact)
    half = b / 2
    c = half if calibration == "as-printed" else 2 / b
    total = 0
    for kappa in partitions_of(r):
        term = _lag_box(kappa, c, N if N is not None else 0, N is not None)
        term = term * _lag_gamma(kappa, half, v)
        if m is not None:
            term = term * _jac_gamma(kappa, half, v, m, N)
        total = total + term
    return total, b, is_exact


def _check_inverse_domain(beta, nu, r) -> None:
    if not beta > 0:
        raise DomainError("beta must be positive")
    if int(r) != r or r < 0:
        raise DomainError("r must be a nonnegative integer")
    if not nu > r - 1:
        raise DomainError(f"need nu > r - 1; got nu={nu}, r={r}")


def y_moment_limit(
    beta, nu, r: int, calibration: Calibration = DEFAULT_CALIBRATION, *, exact: bool | None = None
):
    """``E[Y_beta(nu)^r]``, the limit of ``N^{-r} Ehat_N[(sum x_i)^r]`` (inverse Laguerre).

    ``"as-printed"``: ``(r!/beta^r) sum_{|kappa|=r} prod_box
    1/(((beta/2)(a+1)+l)((beta/2)a+l+1)) prod_j Gamma-ratio``.

    ``"oracle-calibrated"``: ``(4/beta)^r r! sum_{|kappa|=r} prod_box
    1/(((2/beta)(a+1)+l)((2/beta)a+l+1)) prod_j Gamma-ratio``, which gives
    ``E[Y] = 2/nu`` for every ``beta``, as it must.

    The Gamma ratio is ``prod_{j=0}^{l(kappa)-1} Gamma(nu + (beta/2) j + 1 - kappa_{j+1})
    / Gamma(nu + (beta/2) j + 1)``.
    """
    _check_calibration(calibration)
    _check_inverse_domain(beta, nu, r)
    r = int(r)
    total, b, is_exact = _inverse_moment_sum(beta, nu, r, None, calibration, exact=exact)
    pref = (1 / b) ** r if calibration == "as-printed" else (4 / b) ** r
    return _finish(total * pref * factorial(r), is_exact, exact)


def laguerre_finite_moment(
    beta,
    nu,
    N: int,
    r: int,
    calibration: Calibration = DEFAULT_CALIBRATION,
    *,
    exact: bool | None = None,
):
    """Inverse-Laguerre row-sum moment ``Ehat_{N,beta}^{(nu)}[(x_1 + ... + x_N)^r]``.

    The inverse-Laguerre ensemble is the image of the Laguerre ensemble
    (weight ``x^nu e^{-x}``) under ``x -> 2/x``.

    ``"as-printed"`` uses prefactor ``r!/beta^r`` and arm multiplier
    ``beta/2``; ``"oracle-calibrated"`` uses ``(4/beta)^r r!`` and arm
    multiplier ``2/beta`` (see module docstring).
    """
    _check_calibration(calibration)
    _check_inverse_domain(beta, nu, r)
    if int(N) != N or N < 1:
        raise DomainError("N must be a positive integer")
    r = int(r)
    total, b, is_exact = _inverse_moment_sum(beta, nu, r, int(N), calibration, exact=exact)
    pref = (1 / b) ** r if calibration == "as-printed" else (4 / b) ** r
    return _finish(total * pref * factorial(r), is_exact, exact)


def laguerre_inverse_power_moment(beta, nu, N: int, r: int, *, exact: bool | None = None):
    """Laguerre expectation ``E_{N,beta}^{(nu)}[(sum_i 1/x_i)^r]`` (reconciled form).

    Equal to ``2^{-r}`` times :func:`laguerre_finite_moment`; this is the
    quantity ``G_{N,beta}(nu, r)`` estimated by
    :func:`jointmoments.mc.estimate_g_laguerre`.
    """
    _check_inverse_domain(beta, nu, r)
    r = int(r)
    total, b, is_exact = _inverse_moment_sum(beta, nu, r, int(N), "oracle-calibrated", exact=exact)
    return _finish(total * (2 / b) ** r * factorial(r), is_exact, exact)


def jacobi_inverse_moment(
    beta,
    nu,
    mu,
    N: int,
    r: int,
    calibration: Calibration = DEFAULT_CALIBRATION,
    *,
    exact: bool | None = None,
):
    """Jacobi-ensemble expectation of ``(sum_i 1/x_i)^r``.

    The density on ``[0, 1]^N`` is proportional to
    ``prod_j x_j^nu (1 - x_j)^mu |Delta(x)|^beta``.  The value is

    ``(2/beta)^r r! sum_{|kappa| = r} prod_box B(kappa) prod_j Gamma(nu+(beta/2)j+1-kappa_{j+1})
    / Gamma(nu+(beta/2)j+1) * Gamma(c_j) / Gamma(c_j - kappa_{j+1})``

    with ``c_j = nu + mu + (beta/2)(N+j-1) + 2``.  The box factor ``B`` uses
    arm multiplier ``beta/2`` (``"as-printed"``) or ``2/beta``
    (``"oracle-calibrated"``).  The two agree at ``beta = 2``.
    """
    _check_calibration(calibration)
    _check_inverse_domain(beta, nu, r)
    if not mu > -1:
        raise DomainError("mu must exceed -1")
    if int(N) != N or N < 1:
        raise DomainError("N must be a positive integer")
    r = int(r)
    total, b, is_exact = _inverse_moment_sum(
        beta, nu, r, int(N), calibration, mu=mu, exact=exact
    )
    return _finish(total * (2 / b) ** r * factorial(r), is_exact, exact)
