"""Deterministic quadrature ground truth for small ensembles.

Everything here is computed directly from densities by adaptive quadrature
(QUADPACK through :func:`scipy.integrate.quad`).  Endpoint singularities of
the form ``(x - a)^p (b - x)^q`` are absorbed into QUADPACK's algebraic
weight, so the functions actually sampled are smooth.  No partition-sum
formula and no Monte Carlo output is consumed: this module is the root of
the trust chain.

Domain reductions
-----------------
* Hua-Pickrell: ``x = tan(u)`` compactifies the line.  With ``c = cos u`` the
  ``k``-point integrand of ``(x_1 + ... + x_k)^p`` becomes
  ``S^p prod_{i<j} |sin(u_i - u_j)|^beta prod_i c_i^(2 tau - p)`` where
  ``S = sum_i sin(u_i) prod_{j != i} c_j``; integration runs over the chamber
  ``u_1 > ... > u_k`` by nested adaptive rules.
* Laguerre type, two points: on the chamber ``lam_1 > lam_2`` put
  ``lam_2 = t lam_1``; the radial integral is a Gamma function, leaving a
  single integral over ``t`` in ``(0, 1)``.
* Consistency marginals: the factor ``y_1 - y_2`` in (two-point density) x
  (kernel) equals ``(y_1 - x) + (x - y_2)``, so the two-dimensional integral
  splits exactly into sums of products of one-dimensional integrals.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .errors import DomainError, QuadratureError

__all__ = [
    "QuadResult",
    "cauchy_moment_1d",
    "consistency_marginal",
    "da_normalization",
    "hp_partition_function",
    "hp_row_moment",
    "hp_row_moment_exact",
    "inv_laguerre_moment",
    "jacobi_moment_oracle",
    "report_json",
]

HALF_PI = 0.5 * math.pi
_EPSABS = 1e-15
_EPSREL = 1e-11
_LIMIT = 200


@dataclass(frozen=True)
class QuadResult:
    """A quadrature value with its a-posteriori error bound.

    Attributes
    ----------
    value : float
    error_bound : float
        QUADPACK error estimates propagated through nesting and ratios.
    evaluations : int
        Integrand evaluations, summed over all nested integrals.
    closed_form : float or None
        Independent closed-form value where one is available.
    """

    value: float
    error_bound: float
    evaluations: int
    closed_form: float | None = None

    def __post_init__(self) -> None:
        if not self.error_bound >= 0:
            raise ValueError("error_bound must be nonnegative")

    @property
    def agrees(self) -> bool | None:
        """Whether the closed form lies within the error bound (``None`` if absent)."""
        if self.closed_form is None:
            return None
        slack = 1e-13 * max(1.0, abs(self.closed_form))
        return abs(self.value - self.closed_form) <= self.error_bound + slack

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# quadrature plumbing
# ---------------------------------------------------------------------------


class _Tally:
    """Running totals of evaluations and of the largest nested error estimate."""

    def __init__(self) -> None:
        self.evaluations = 0
        self.max_inner_error = 0.0

    def quad(self, f, a, b, *, wvar=(0.0, 0.0), args=(), epsrel=_EPSREL, inner=False):
        kwargs = dict(args=args, epsabs=_EPSABS, epsrel=epsrel, limit=_LIMIT, full_output=1)
        if math.isfinite(a) and math.isfinite(b) and (wvar[0] != 0 or wvar[1] != 0):
            kwargs.update(weight="alg", wvar=tuple(float(w) for w in wvar))
        out = integrate.quad(f, a, b, **kwargs)
        value, err, info = out[0], out[1], out[2]
        self.evaluations += int(info.get("neval", 0))
        if len(out) > 3 and err > 1e3 * max(_EPSABS, epsrel * abs(value)):
            raise QuadratureError(f"adaptive quadrature failed: {out[3]}", estimate=value, error=err)
        if inner:
            self.max_inner_error = max(self.max_inner_error, err)
        return value, err


def _weight_mass(a: float, b: float, wvar) -> float:
    """``int_a^b (x-a)^p (b-x)^q dx``."""
    p, q = wvar
    return float(np.exp(gammaln(p + 1) + gammaln(q + 1) - gammaln(p + q + 2)) * (b - a) ** (p + q + 1))


def _ratio(num: tuple[float, float], den: tuple[float, float]) -> tuple[float, float]:
    """Quotient with first-order error propagation."""
    v = num[0] / den[0]
    return v, (num[1] + abs(v) * den[1]) / abs(den[0])


def _sinc(x: float) -> float:
    return math.sin(x) / x if x != 0.0 else 1.0


def _check_beta(beta: float) -> None:
    if not beta > 0:
        raise DomainError("beta must be positive")


# ---------------------------------------------------------------------------
# Cauchy / Hua-Pickrell
# ---------------------------------------------------------------------------


def cauchy_moment_1d(m: int, beta: float, N: int, tau: float) -> QuadResult:
    """``int x^(2m) (1 + x^2)^(-(beta(N-1)/2 + 1 + tau)) dx`` over the real line.

    Returns both the quadrature value and the closed form
    ``Gamma(m + 1/2) Gamma(a - m - 1/2) / Gamma(a)``.

    Raises
    ------
    DomainError
        If the integral diverges, i.e. ``beta(N-1)/2 + tau - m + 1/2 <= 0``.
    """
    _check_beta(beta)
    if m < 0:
        raise DomainError("m must be nonnegative")
    a = beta * (N - 1) / 2 + 1 + float(tau)
    q = 2 * a - 2 * m - 2  # exponent of cos u after x = tan u
    if not q > -1:
        raise DomainError("divergent Cauchy moment")
    tally = _Tally()

    def f(u):  # sin^{2m} u (cos u / (pi/2 - u))^q
        return math.sin(u) ** (2 * m) * _sinc(HALF_PI - u) ** q

    val, err = tally.quad(f, 0.0, HALF_PI, wvar=(0.0, q))
    closed = math.exp(math.lgamma(m + 0.5) + math.lgamma(a - m - 0.5) - math.lgamma(a))
    return QuadResult(2 * val, 2 * err, tally.evaluations, closed)


def _hp_integrand(u: Sequence[float], beta: float, q: float, power: int) -> float:
    """Smooth part of the mapped HP integrand on the chamber.

    The algebraic weights ``(pi/2 - u_1)^q``, ``(u_i - u_{i+1})^beta`` and
    ``(u_k + pi/2)^q`` are divided out (they are supplied to QUADPACK).
    """
    k = len(u)
    s = [math.sin(v) for v in u]
    c = [math.cos(v) for v in u]
    if power:
        total = 0.0
        for i in range(k):
            term = s[i]
            for j in range(k):
                if j != i:
                    term *= c[j]
            total += term
        val = total**power
    else:
        val = 1.0
    for i in range(k):
        for j in range(i + 1, k):
            d = u[i] - u[j]
            val *= (_sinc(d) if j == i + 1 else abs(math.sin(d))) ** beta
    for i in range(k):
        if i == 0 and i == k - 1:
            ci = c[0] / ((HALF_PI - u[0]) * (u[0] + HALF_PI)) if abs(u[0]) < HALF_PI else 1 / math.pi
        elif i == 0:
            ci = _sinc(HALF_PI - u[0])
        elif i == k - 1:
            ci = _sinc(u[i] + HALF_PI)
        else:
            ci = c[i]
        val *= ci**q
    return val


def _hp_raw(k: int, beta: float, tau: float, power: int, epsrel: float) -> tuple[float, float, int]:
    """Unordered ``int (sum x)^power prod (1 + x^2)^{-a} |Delta|^beta dx`` over ``R^k``."""
    q = 2 * tau - power
    tally = _Tally()
    if k == 1:
        v, e = tally.quad(lambda u: _hp_integrand((u,), beta, q, power), -HALF_PI, HALF_PI, wvar=(q, q), epsrel=epsrel)
        return v, e, tally.evaluations

    def level(prefix: tuple[float, ...]) -> float:
        i = len(prefix)  # index of the variable integrated here
        upper = prefix[-1]
        innermost = i == k - 1
        wvar = (q if innermost else 0.0, beta)
        if innermost:
            f = lambda v: _hp_integrand(prefix + (v,), beta, q, power)  # noqa: E731
        else:
            f = lambda v: level(prefix + (v,))  # noqa: E731
        if upper <= -HALF_PI:
            return 0.0
        return tally.quad(f, -HALF_PI, upper, wvar=wvar, epsrel=epsrel, inner=True)[0]

    outer_w = (0.0, q)
    val, err = tally.quad(lambda u1: level((u1,)), -HALF_PI, HALF_PI, wvar=outer_w, epsrel=epsrel)
    # inner errors integrate against the outer weights; bounded by their masses
    mass = _weight_mass(-HALF_PI, HALF_PI, outer_w)
    for _ in range(k - 2):  # middle levels carry the weight (u_{i-1} - u_i)^beta
        mass *= _weight_mass(0.0, math.pi, (0.0, beta))
    bound = err + tally.max_inner_error * mass
    sym = math.factorial(k)
    return sym * val, sym * bound, tally.evaluations


def _check_hp(k: int, beta: float, tau: float, power: int, slow: bool) -> None:
    _check_beta(beta)
    if k not in (1, 2, 3):
        raise DomainError("quadrature oracle supports k in {1, 2, 3}")
    if k == 3 and not slow:
        raise ValueError("the k = 3 oracle is slow; pass slow=True")
    if not power >= 0:
        raise DomainError("power must be nonnegative")
    if not power < 1 + 2 * tau:
        raise DomainError("moment diverges: need power < 1 + 2 tau")


def hp_partition_function(N: int, beta: float, tau: float, *, slow: bool = False) -> QuadResult:
    """Integral of the unnormalized real-``tau`` Hua-Pickrell density over ``R^N``.

    The closed form reported alongside is the product-of-Gammas constant.
    """
    from .ensembles import hp_log_norm_const

    _check_hp(N, beta, tau, 0, slow)
    epsrel = _EPSREL if N < 3 else 1e-6
    v, e, n = _hp_raw(N, beta, float(tau), 0, epsrel)
    return QuadResult(v, e, n, math.exp(hp_log_norm_const(N, beta, float(tau))))


def hp_row_moment(k: int, beta: float, tau: float, power: int, *, slow: bool = False) -> QuadResult:
    """``E_k[(x_1 + ... + x_k)^power]`` under the real-``tau`` Hua-Pickrell law.

    Parameters
    ----------
    k : {1, 2, 3}
        Number of points; ``k = 3`` requires ``slow=True`` and runs at
        relative tolerance ``1e-6`` per nested level.
    beta, tau : float
    power : int
        Must satisfy ``power < 1 + 2 tau``.

    Returns
    -------
    QuadResult
        ``closed_form`` is filled from the exact polynomial expansion when
        ``beta`` is an even integer.
    """
    _check_hp(k, beta, tau, power, slow)
    epsrel = _EPSREL if k < 3 else 1e-6
    tau = float(tau)
    num = _hp_raw(k, beta, tau, power, epsrel)
    den = _hp_raw(k, beta, tau, 0, epsrel)
    v, e = _ratio(num[:2], den[:2])
    closed = None
    if beta == int(beta) and int(beta) % 2 == 0 and k <= 3:
        closed = float(hp_row_moment_exact(k, int(beta), tau, power))
    return QuadResult(v, e, num[2] + den[2], closed)


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = defaultdict(int)
    for ea, ca in a.items():
        for eb, cb in b.items():
            out[tuple(x + y for x, y in zip(ea, eb))] += ca * cb
    return {e: c for e, c in out.items() if c}


def _poly_pow(a: dict, n: int, k: int) -> dict:
    out = {(0,) * k: 1}
    for _ in range(n):
        out = _poly_mul(out, a)
    return out


def hp_row_moment_exact(k: int, beta: int, tau, power: int):
    """Exact ``E_k[(x_1 + ... + x_k)^power]`` for even integer ``beta``.

    For even ``beta`` the Vandermonde factor is a polynomial, so the moment
    is a finite combination of one-dimensional Cauchy moment ratios
    ``int x^(2m) w / int w = prod_{i<m} (i + 1/2) / (a - 3/2 - i)``.
    Rational ``tau`` gives a :class:`~fractions.Fraction`.

    Raises
    ------
    DomainError
        If ``beta`` is not an even positive integer or a moment diverges.
    """
    if not (isinstance(beta, int) or float(beta).is_integer()) or int(beta) <= 0 or int(beta) % 2:
        raise DomainError("exact evaluation needs an even positive integer beta")
    beta = int(beta)
    t = Fraction(tau) if isinstance(tau, (int, Fraction)) else Fraction(float(tau)).limit_denominator(10**6)
    if float(t) != float(tau):
        t = float(tau)
    a = Fraction(beta * (k - 1), 2) + 1 + t
    if not power < 1 + 2 * t:
        raise DomainError("moment diverges: need power < 1 + 2 tau")

    def unit(i):
        e = [0] * k
        e[i] = 1
        return tuple(e)

    poly = {(0,) * k: 1}
    for i, j in itertools.combinations(range(k), 2):
        diff = {unit(i): 1, unit(j): -1}
        poly = _poly_mul(poly, _poly_pow(diff, beta, k))
    total = {unit(i): 1 for i in range(k)}
    cache: dict = {}

    def moment(e: int):
        if e % 2:
            return 0
        if e not in cache:
            m = e // 2
            val = Fraction(1) if isinstance(a, Fraction) else 1.0
            for i in range(m):
                if not a - Fraction(3, 2) - i > 0:
                    raise DomainError("Cauchy moment diverges")
                val = val * (Fraction(2 * i + 1, 2)) / (a - Fraction(3, 2) - i)
            cache[e] = val
        return cache[e]

    def expect(p: dict):
        acc = 0
        for exps, coef in p.items():
            term = coef
            for e in exps:
                term = term * moment(e)
                if term == 0:
                    break
            acc = acc + term
        return acc

    return expect(_poly_mul(poly, _poly_pow(total, power, k))) / expect(poly)


# ---------------------------------------------------------------------------
# Laguerre type
# ---------------------------------------------------------------------------


def _gamma_moment_1d(nu: float, r: int, tally: _Tally) -> tuple[float, float]:
    """``int_0^inf lam^(nu - r) e^(-lam) dlam``."""
    v1, e1 = tally.quad(lambda x: math.exp(-x), 0.0, 1.0, wvar=(nu - r, 0.0))
    v2, e2 = tally.quad(lambda x: x ** (nu - r) * math.exp(-x), 1.0, math.inf)
    return v1 + v2, e1 + e2


def _laguerre2_log(beta: float, nu: float, r: int, tally: _Tally) -> tuple[float, float]:
    """Log of the chamber integral of ``(l1+l2)^r |l1-l2|^beta (l1 l2)^(nu-r) e^(-l1-l2)``.

    Returns ``(log value, relative error)``.
    """
    A = 2 * nu - r + beta + 1
    v, e = tally.quad(lambda t: (1 + t) ** (r - A - 1), 0.0, 1.0, wvar=(nu - r, beta))
    return math.lgamma(A + 1) + math.log(v), e / v


def inv_laguerre_moment(N: int, beta: float, nu: float, r: int) -> QuadResult:
    """``E[(x_1 + ... + x_N)^r]`` under the inverse-Laguerre law, ``N in {1, 2}``.

    The inverse-Laguerre points are ``x = 2 / lam`` with ``lam`` Laguerre
    (weight ``lam^nu e^(-lam)``), so the moment equals
    ``2^r E_L[(sum 1/lam)^r]``.

    Raises
    ------
    DomainError
        Unless ``nu > r - 1``.
    """
    _check_beta(beta)
    if N not in (1, 2):
        raise DomainError("quadrature oracle supports N in {1, 2}")
    if r < 0:
        raise DomainError("r must be nonnegative")
    if not nu > r - 1:
        raise DomainError("moment diverges: need nu > r - 1")
    tally = _Tally()
    if N == 1:
        v, e = _ratio(_gamma_moment_1d(nu, r, tally), _gamma_moment_1d(nu, 0, tally))
        closed = 2.0**r * math.exp(math.lgamma(nu + 1 - r) - math.lgamma(nu + 1))
        return QuadResult(2.0**r * v, 2.0**r * e, tally.evaluations, closed)
    ln, rn = _laguerre2_log(beta, nu, r, tally)
    ld, rd = _laguerre2_log(beta, nu, 0, tally)
    v = 2.0**r * math.exp(ln - ld)
    return QuadResult(v, v * (rn + rd), tally.evaluations)


def jacobi_moment_oracle(N: int, beta: float, nu: float, mu: float, r: int) -> QuadResult:
    """``E[(sum_i 1/x_i)^r]`` under the Jacobi weight ``x^nu (1-x)^mu |Delta|^beta`` on ``[0,1]^N``.

    ``N in {1, 2}``.  For ``N = 1`` the closed form
    ``B(nu + 1 - r, mu + 1) / B(nu + 1, mu + 1)`` is attached.
    """
    _check_beta(beta)
    if N not in (1, 2):
        raise DomainError("quadrature oracle supports N in {1, 2}")
    if not nu > r - 1 or not mu > -1:
        raise DomainError("need nu > r - 1 and mu > -1")
    tally = _Tally()
    if N == 1:
        num = tally.quad(lambda x: 1.0, 0.0, 1.0, wvar=(nu - r, mu))
        den = tally.quad(lambda x: 1.0, 0.0, 1.0, wvar=(nu, mu))
        v, e = _ratio(num, den)
        closed = math.exp(
            math.lgamma(nu + 1 - r) + math.lgamma(nu + mu + 2) - math.lgamma(nu + 1) - math.lgamma(nu + mu + 2 - r)
        )
        return QuadResult(v, e, tally.evaluations, closed)

    def chamber(rr: int) -> tuple[float, float]:
        # x2 = t x1 ; x1^A (1-x1)^mu * int (1+t)^r (1-t)^beta t^(nu-r) (1 - x1 t)^mu dt
        A = 2 * nu - rr + beta + 1

        def inner(x1):
            return tally.quad(
                lambda t: (1 + t) ** rr * (1 - x1 * t) ** mu, 0.0, 1.0, wvar=(nu - rr, beta), inner=True
            )[0]

        v, e = tally.quad(inner, 0.0, 1.0, wvar=(A, mu))
        return v, e + tally.max_inner_error * _weight_mass(0.0, 1.0, (A, mu))

    v, e = _ratio(chamber(r), chamber(0))
    return QuadResult(v, e, tally.evaluations)


# ---------------------------------------------------------------------------
# Dixon-Anderson kernel
# ---------------------------------------------------------------------------


def da_normalization(beta: float, y: Sequence[float]) -> QuadResult:
    """Total mass of the Dixon-Anderson kernel ``Lambda(y, .)``; ``len(y) in {2, 3}``.

    Expected value 1; the closed form field is set to 1.
    """
    _check_beta(beta)
    y = [float(v) for v in y]
    n = len(y) - 1
    if n not in (1, 2):
        raise DomainError("quadrature oracle supports N in {1, 2}")
    if any(a <= b for a, b in zip(y[:-1], y[1:])):
        raise DomainError("y must be strictly decreasing")
    b = beta / 2 - 1
    log_const = math.lgamma(beta * (n + 1) / 2) - (n + 1) * math.lgamma(beta / 2)
    for i, j in itertools.combinations(range(n + 1), 2):
        log_const += (1 - beta) * math.log(y[i] - y[j])
    tally = _Tally()
    if n == 1:
        v, e = tally.quad(lambda x: 1.0, y[1], y[0], wvar=(b, b))
    else:

        def inner(x1):
            f = lambda x2: (x1 - x2) * (y[0] - x2) ** b  # noqa: E731
            return tally.quad(f, y[2], y[1], wvar=(b, b), inner=True)[0] * (x1 - y[2]) ** b

        v, e = tally.quad(inner, y[1], y[0], wvar=(b, b))
        e += tally.max_inner_error * _weight_mass(y[1], y[0], (b, b)) * (y[0] - y[2]) ** max(b, 0)
    c = math.exp(log_const)
    return QuadResult(c * v, c * e, tally.evaluations, 1.0)


# ---------------------------------------------------------------------------
# consistency of measure families
# ---------------------------------------------------------------------------


def _half_line(g: Callable[[float], float], x: float, p: float, tally: _Tally):
    """``int_x^inf (y - x)^p g(y) dy`` split at ``x + 1``."""
    v1, e1 = tally.quad(g, x, x + 1.0, wvar=(p, 0.0))
    v2, e2 = tally.quad(lambda y: (y - x) ** p * g(y), x + 1.0, math.inf)
    return v1 + v2, e1 + e2


def consistency_marginal(
    kind: str,
    beta: float,
    param: float,
    grid: Sequence[float],
    *,
    threads: int = 1,
    return_values: bool = False,
):
    """Sup-deviation between ``mu_2 Lambda_{2,1}`` and ``mu_1`` on a grid.

    Parameters
    ----------
    kind : {"hua-pickrell", "inverse-laguerre"}
    beta : float
    param : float
        ``tau`` (real) for Hua-Pickrell, ``nu`` for inverse Laguerre.
    grid : sequence of float
        Points ``x`` at which both one-point densities are compared.
    threads : int
        Grid points are evaluated concurrently; the reduction order is fixed.
    return_values : bool
        Also return the per-point ``(pushed, direct)`` densities.

    Returns
    -------
    float or (float, list of tuple)
    """
    _check_beta(beta)
    kind = str(kind)
    hb = beta / 2
    p = hb - 1
    tally0 = _Tally()
    if kind == "hua-pickrell":
        tau = float(param)
        if not tau > -0.5:
            raise DomainError("tau must exceed -1/2")
        a2 = hb + 1 + tau
        w2 = lambda y: (1 + y * y) ** (-a2)  # noqa: E731
        w1 = lambda y: (1 + y * y) ** (-(1 + tau))  # noqa: E731
        z1 = cauchy_moment_1d(0, beta, 1, tau).value
        z2 = _hp_raw(2, beta, tau, 0, _EPSREL)[0]

        def sides(x, k, tally):
            right = _half_line(w2, x, p + k, tally)[0]
            left = _half_line(w2, -x, p + k, tally)[0]  # reflect y -> -y
            return right, left

    elif kind == "inverse-laguerre":
        nu = float(param)
        if not nu > -1:
            raise DomainError("nu must exceed -1")
        w2 = lambda y: y ** (-nu - beta - 2) * math.exp(-2.0 / y) if y > 0 else 0.0  # noqa: E731
        w1 = lambda y: y ** (-nu - 2) * math.exp(-2.0 / y) if y > 0 else 0.0  # noqa: E731
        z1 = 2.0 ** (-nu - 1) * _gamma_moment_1d(nu, 0, tally0)[0]
        lz, _ = _laguerre2_log(beta, nu, 0, tally0)
        z2 = 2.0 * 2.0 ** (-2 * nu - beta - 2) * math.exp(lz)

        def sides(x, k, tally):
            if x <= 0:
                return 0.0, 0.0
            right = _half_line(w2, x, p + k, tally)[0]
            left = tally.quad(w2, 0.0, x, wvar=(0.0, p + k))[0]
            return right, left

    else:
        raise DomainError(f"unsupported kind {kind!r}")

    # chamber density of mu_2 is 2 w2 w2 |Delta|^beta / z2
    log_k = math.lgamma(beta) - 2 * math.lgamma(hb)
    const = 2.0 * math.exp(log_k) / z2

    def point(x: float) -> tuple[float, float]:
        tally = _Tally()
        r0, l0 = sides(x, 0, tally)
        r1, l1 = sides(x, 1, tally)
        pushed = const * (r1 * l0 + r0 * l1)
        return pushed, w1(x) / z1

    grid = [float(x) for x in grid]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(point, grid))
    else:
        values = [point(x) for x in grid]
    dev = max((abs(a - b) for a, b in values), default=0.0)
    return (dev, values) if return_values else dev


def report_json(results: Mapping[str, object], indent: int | None = 2) -> str:
    """Serialize oracle results (``QuadResult`` or plain numbers) to JSON.

    Exact rationals keep their numerator and denominator; non-finite floats
    become ``null``.
    """
    from .io import to_jsonable

    def conv(v):
        if isinstance(v, Fraction):
            return {"numerator": v.numerator, "denominator": v.denominator, "value": float(v)}
        if isinstance(v, QuadResult):
            return v.to_dict()
        if isinstance(v, Mapping):
            return {str(k): conv(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [conv(x) for x in v]
        return to_jsonable(v)

    return json.dumps(conv(results), indent=indent, sort_keys=True, allow_nan=False)
