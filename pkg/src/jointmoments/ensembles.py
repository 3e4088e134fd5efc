"""Ensembles, densities, samplers and interlacing arrays.

Four ensembles are supported:

``hua-pickrell``
    ``N`` real points with weight ``(1+ix)^{-tau-beta(N-1)/2-1}
    (1-ix)^{-conj(tau)-beta(N-1)/2-1}``, i.e. ``(1+x^2)^{-Re(tau)-beta(N-1)/2-1}
    exp(2 Im(tau) arctan x)``, and ``|Delta(x)|^beta`` repulsion.
``circular-jacobi``
    ``N`` angles in ``[0, 2pi)`` with ``prod_{j<k} |e^{it_j} - e^{it_k}|^beta``
    and weight ``(1-e^{-it})^delta (1-e^{it})^{conj(delta)} =
    |2 sin(t/2)|^{2 Re(delta)} exp(Im(delta)(t - pi))``.
``laguerre``
    ``N`` positive points with weight ``x^nu e^{-x}``.
``inverse-laguerre``
    Image of the Laguerre ensemble under ``x -> 2/x``; weight
    ``x^{-nu-beta(N-1)-2} e^{-2/x}``.

The Hua-Pickrell ensemble with parameter ``tau`` is the image of the
circular Jacobi ensemble with ``delta = conj(tau)`` under ``x = cot(t/2)``;
the MCMC sampler exploits this by running on the circle.

Normalized densities are densities on the Weyl chamber ``x_1 >= ... >= x_N``
(hence include ``N!``); unnormalized log-densities are the symmetric
functions without constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterator, Literal

import numpy as np
from scipy import special

from .errors import DegenerateConfigurationError, DomainError
from .specfun import log_morris

__all__ = [
    "ArrayBatch",
    "EnsembleSpec",
    "InterlacingArray",
    "Kind",
    "cjbe_log_norm_const",
    "da_kernel_log_density",
    "hp_log_norm_const",
    "inverse_laguerre_log_norm_const",
    "laguerre_log_norm_const",
    "log_density",
    "descend_rows",
    "make_rng",
    "sample_array",
    "sample_arrays",
    "sample_da",
    "sample_laguerre_tridiag",
    "spawn_rngs",
]


class Kind(str, Enum):
    """Ensemble family."""

    HUA_PICKRELL = "hua-pickrell"
    CIRCULAR_JACOBI = "circular-jacobi"
    LAGUERRE = "laguerre"
    INVERSE_LAGUERRE = "inverse-laguerre"

    def __str__(self) -> str:
        return self.value


def _complex_to_json(z) -> Any:
    if z is None:
        return None
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _complex_from_json(v) -> complex | None:
    if v is None:
        return None
    if isinstance(v, dict):
        return complex(float(v["re"]), float(v.get("im", 0.0)))
    return complex(v)


@dataclass(frozen=True)
class EnsembleSpec:
    """Tagged parameter record of an ensemble.

    Use the class-method constructors rather than the raw initializer.

    Parameters
    ----------
    kind : Kind
    beta : float
        Positive.
    N : int
        Positive number of points.
    tau : complex, optional
        Hua-Pickrell parameter, ``Re(tau) > -1/2``.
    delta : complex, optional
        Circular Jacobi parameter, ``Re(delta) > -1/2``.
    s : float
        Circular Jacobi tilt exponent carried for joint-moment estimators; it
        does not enter the density of the ensemble itself.
    nu : float, optional
        Laguerre parameter, ``nu > -1``.
    """

    kind: Kind
    beta: float
    N: int
    tau: complex | None = None
    delta: complex | None = None
    s: float = 0.0
    nu: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind(self.kind))
        if not self.beta > 0:
            raise DomainError("beta must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError("N must be a positive integer")
        object.__setattr__(self, "N", int(self.N))
        k = self.kind
        if k is Kind.HUA_PICKRELL:
            if self.tau is None or not complex(self.tau).real > -0.5:
                raise DomainError("Hua-Pickrell requires tau with Re(tau) > -1/2")
            object.__setattr__(self, "tau", complex(self.tau))
        elif k is Kind.CIRCULAR_JACOBI:
            if self.delta is None or not complex(self.delta).real > -0.5:
                raise DomainError("circular Jacobi requires delta with Re(delta) > -1/2")
            object.__setattr__(self, "delta", complex(self.delta))
        else:
            if self.nu is None or not self.nu > -1:
                raise DomainError("Laguerre kinds require nu > -1")
            object.__setattr__(self, "nu", float(self.nu))

    # -- constructors -----------------------------------------------------
    @classmethod
    def hua_pickrell(cls, N: int, beta: float, tau) -> "EnsembleSpec":
        return cls(Kind.HUA_PICKRELL, beta, N, tau=tau)

    @classmethod
    def circular_jacobi(cls, N: int, beta: float, delta=0.0, s: float = 0.0) -> "EnsembleSpec":
        return cls(Kind.CIRCULAR_JACOBI, beta, N, delta=delta, s=s)

    @classmethod
    def laguerre(cls, N: int, beta: float, nu: float) -> "EnsembleSpec":
        return cls(Kind.LAGUERRE, beta, N, nu=nu)

    @classmethod
    def inverse_laguerre(cls, N: int, beta: float, nu: float) -> "EnsembleSpec":
        return cls(Kind.INVERSE_LAGUERRE, beta, N, nu=nu)

    def with_N(self, N: int) -> "EnsembleSpec":
        return replace(self, N=N)

    # -- predicates -------------------------------------------------------
    @property
    def real_tau(self) -> bool:
        return self.kind is Kind.HUA_PICKRELL and complex(self.tau).imag == 0

    def joint_moment_window(self, h: float) -> bool:
        """``-1/2 < h < Re(delta) + s + 1/2`` (circular Jacobi only)."""
        if self.kind is not Kind.CIRCULAR_JACOBI:
            raise DomainError("joint-moment window is defined for circular Jacobi only")
        return -0.5 < h < complex(self.delta).real + self.s + 0.5

    def trace_moment_window(self, h: float) -> bool:
        """``0 <= h < Re(tau) + 1/2``: finiteness of ``E|x_1 + ... + x_N|^{2h}`` (Hua-Pickrell)."""
        if self.kind is not Kind.HUA_PICKRELL:
            raise DomainError("trace-moment window is defined for Hua-Pickrell only")
        return 0 <= h < complex(self.tau).real + 0.5

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        d: dict[str, Any] = {"kind": self.kind.value, "beta": self.beta, "N": self.N}
        if self.kind is Kind.HUA_PICKRELL:
            d["tau"] = _complex_to_json(self.tau)
        elif self.kind is Kind.CIRCULAR_JACOBI:
            d["delta"] = _complex_to_json(self.delta)
            d["s"] = self.s
        else:
            d["nu"] = self.nu
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleSpec":
        return cls(
            Kind(d["kind"]),
            float(d["beta"]),
            int(d["N"]),
            tau=_complex_from_json(d.get("tau")),
            delta=_complex_from_json(d.get("delta")),
            s=float(d.get("s", 0.0)),
            nu=None if d.get("nu") is None else float(d["nu"]),
        )


# ---------------------------------------------------------------------------
# normalization constants
# ---------------------------------------------------------------------------


def hp_log_norm_const(N: int, beta: float, tau: float) -> float:
    """``log C_{N,beta}^{(tau)}`` for real ``tau > -1/2``.

    ``C = 2^{-beta N(N-1)/2 - 2N tau} pi^N prod_{j=0}^{N-1}
    Gamma((beta/2) j + 2 tau + 1) Gamma((beta/2)(j+1) + 1)
    / (Gamma((beta/2) j + tau + 1)^2 Gamma(beta/2 + 1))``

    is the integral of the unnormalized density over all of ``R^N``.
    """
    if not tau > -0.5:
        raise DomainError("tau must exceed -1/2")
    j = np.arange(N, dtype=float)
    hb = beta / 2
    terms = (
        special.gammaln(hb * j + 2 * tau + 1)
        + special.gammaln(hb * (j + 1) + 1)
        - 2 * special.gammaln(hb * j + tau + 1)
        - special.gammaln(hb + 1)
    )
    return float(
        (-beta * N * (N - 1) / 2 - 2 * N * tau) * math.log(2) + N * math.log(math.pi) + terms.sum()
    )


def laguerre_log_norm_const(N: int, beta: float, nu: float) -> float:
    """``log l_{N,beta}^{(nu)} = sum_j log[Gamma(nu+1+(beta/2)j) Gamma(1+(beta/2)(j+1)) / Gamma(1+beta/2)]``."""
    if not nu > -1:
        raise DomainError("nu must exceed -1")
    j = np.arange(N, dtype=float)
    hb = beta / 2
    terms = (
        special.gammaln(nu + 1 + hb * j) + special.gammaln(1 + hb * (j + 1)) - special.gammaln(1 + hb)
    )
    return float(terms.sum())


def inverse_laguerre_log_norm_const(N: int, beta: float, nu: float) -> float:
    """Log of the integral over ``R_+^N`` of the unnormalized inverse-Laguerre density."""
    return laguerre_log_norm_const(N, beta, nu) - (nu * N + beta * N * (N - 1) / 2 + N) * math.log(2)


def cjbe_log_norm_const(N: int, beta: float, delta) -> float:
    """Log of the integral over ``[0, 2pi)^N`` of the unnormalized circular Jacobi density."""
    d = complex(delta)
    return N * math.log(2 * math.pi) + complex(log_morris(N, d.conjugate(), d, beta / 2)).real


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------


def _log_abs_vandermonde(x: np.ndarray) -> np.ndarray:
    """``sum_{j<k} log|x_j - x_k|`` over the last axis."""
    n = x.shape[-1]
    if n < 2:
        return np.zeros(x.shape[:-1])
    iu = np.triu_indices(n, 1)
    diff = x[..., iu[0]] - x[..., iu[1]]
    with np.errstate(divide="ignore"):
        return np.log(np.abs(diff)).sum(axis=-1)


def _log_abs_chord(t: np.ndarray) -> np.ndarray:
    """``sum_{j<k} log|e^{it_j} - e^{it_k}|`` over the last axis."""
    n = t.shape[-1]
    if n < 2:
        return np.zeros(t.shape[:-1])
    iu = np.triu_indices(n, 1)
    diff = t[..., iu[0]] - t[..., iu[1]]
    with np.errstate(divide="ignore"):
        return np.log(np.abs(2 * np.sin(0.5 * diff))).sum(axis=-1)


def hp_one_body(x: np.ndarray, N: int, beta: float, tau: complex) -> np.ndarray:
    """Log of the Hua-Pickrell one-point weight (real form)."""
    tau = complex(tau)
    return -(tau.real + beta * (N - 1) / 2 + 1) * np.log1p(x * x) + 2 * tau.imag * np.arctan(x)


def cjbe_one_body(t: np.ndarray, delta: complex) -> np.ndarray:
    """Log of ``|2 sin(t/2)|^{2 Re(delta)} exp(Im(delta)(t - pi))`` for ``t`` in ``[0, 2pi)``."""
    delta = complex(delta)
    t = np.mod(t, 2 * np.pi)
    with np.errstate(divide="ignore"):
        out = 2 * delta.real * np.log(np.abs(2 * np.sin(0.5 * t)))
    if delta.real == 0:
        out = np.where(np.isfinite(out), out, 0.0)
    return out + delta.imag * (t - np.pi)


def log_density(spec: EnsembleSpec, points, normalized: bool = False, check: bool = True):
    """Log-density of an ensemble, vectorized over leading axes.

    Parameters
    ----------
    spec : EnsembleSpec
    points : array_like, shape (..., N)
        Real points (Hua-Pickrell, Laguerre kinds) or angles in
        ``[0, 2pi)`` (circular Jacobi).  Order is irrelevant for the
        unnormalized density, which is symmetric.
    normalized : bool
        Include the normalization so that the result is the log-density of
        the probability measure on the Weyl chamber.  Available for real
        ``tau`` (Hua-Pickrell) and for all other kinds.
    check : bool
        Validate the support.

    Returns
    -------
    ndarray or float

    Raises
    ------
    DomainError
        On a support violation, or a normalized request for complex ``tau``.
    """
    x = np.asarray(points, dtype=float)
    if x.shape[-1] != spec.N:
        raise DomainError(f"expected points with last axis {spec.N}, got {x.shape}")
    N, beta = spec.N, spec.beta
    k = spec.kind
    if check:
        if not np.all(np.isfinite(x)):
            raise DomainError("points must be finite")
        if k in (Kind.LAGUERRE, Kind.INVERSE_LAGUERRE) and np.any(x <= 0):
            raise DomainError("Laguerre-type ensembles live on the positive half-line")
        if k is Kind.CIRCULAR_JACOBI and (np.any(x < 0) or np.any(x >= 2 * np.pi)):
            raise DomainError("angles must lie in [0, 2pi)")
    if k is Kind.HUA_PICKRELL:
        out = hp_one_body(x, N, beta, spec.tau).sum(axis=-1) + beta * _log_abs_vandermonde(x)
        if normalized:
            if complex(spec.tau).imag != 0:
                raise DomainError("normalized Hua-Pickrell density available for real tau only")
            out = out + math.lgamma(N + 1) - hp_log_norm_const(N, beta, complex(spec.tau).real)
    elif k is Kind.CIRCULAR_JACOBI:
        out = cjbe_one_body(x, spec.delta).sum(axis=-1) + beta * _log_abs_chord(x)
        if normalized:
            out = out + math.lgamma(N + 1) - cjbe_log_norm_const(N, beta, spec.delta)
    elif k is Kind.LAGUERRE:
        out = (spec.nu * np.log(x) - x).sum(axis=-1) + beta * _log_abs_vandermonde(x)
        if normalized:
            out = out + math.lgamma(N + 1) - laguerre_log_norm_const(N, beta, spec.nu)
    else:
        expo = -spec.nu - beta * (N - 1) - 2
        out = (expo * np.log(x) - 2.0 / x).sum(axis=-1) + beta * _log_abs_vandermonde(x)
        if normalized:
            out = out + math.lgamma(N + 1) - inverse_laguerre_log_norm_const(N, beta, spec.nu)
    return out[()] if isinstance(out, np.ndarray) and out.ndim == 0 else out


# ---------------------------------------------------------------------------
# random streams
# ---------------------------------------------------------------------------


def make_rng(seed) -> np.random.Generator:
    """A counter-based (Philox) generator from an int, SeedSequence or Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def spawn_rngs(seed, n: int) -> list[np.random.Generator]:
    """``n`` independent Philox streams derived from ``seed``."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(c)) for c in ss.spawn(n)]


# ---------------------------------------------------------------------------
# Dixon-Anderson kernel
# ---------------------------------------------------------------------------


def _check_y(y: np.ndarray) -> None:
    if y.shape[-1] < 2:
        raise DomainError("y must have at least two coordinates")
    gaps = y[..., :-1] - y[..., 1:]
    if not np.all(np.isfinite(y)):
        raise DomainError("y must be finite")
    if np.any(gaps <= 0):
        raise DegenerateConfigurationError("y must be strictly decreasing (coinciding coordinates)")


def da_kernel_log_density(beta: float, y, x) -> np.ndarray | float:
    """Log-density of the Dixon--Anderson kernel ``Lambda(y, dx)``.

    ``Gamma(beta(N+1)/2) / Gamma(beta/2)^{N+1} prod_{i<j}(y_i - y_j)^{1-beta}
    prod_{i<j}(x_i - x_j) prod_{i,j} |x_i - y_j|^{beta/2 - 1}``

    on ``y_1 >= x_1 >= y_2 >= ... >= x_N >= y_{N+1}``; ``-inf`` outside.

    Parameters
    ----------
    beta : float
    y : array_like, shape (..., N+1)
        Strictly decreasing.
    x : array_like, shape (..., N)

    Raises
    ------
    DegenerateConfigurationError
        When ``y`` has coinciding coordinates.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    _check_y(y)
    n = y.shape[-1] - 1
    if x.shape[-1] != n:
        raise DomainError("x must have one coordinate fewer than y")
    inside = np.all((x <= y[..., :-1]) & (x >= y[..., 1:]), axis=-1)
    if n > 1:
        inside &= np.all(x[..., :-1] > x[..., 1:], axis=-1)
    const = math.lgamma(beta * (n + 1) / 2) - (n + 1) * math.lgamma(beta / 2)
    a = beta / 2 - 1
    with np.errstate(divide="ignore", invalid="ignore"):
        cross = np.log(np.abs(x[..., :, None] - y[..., None, :])).sum(axis=(-1, -2))
        val = const + (1 - beta) * _log_abs_vandermonde(y) + _log_abs_vandermonde(x) + a * cross
    if a == 0:
        val = const + (1 - beta) * _log_abs_vandermonde(y) + _log_abs_vandermonde(x)
    val = np.where(inside, val, -np.inf)
    return val[()] if val.ndim == 0 else val


def _secular_roots(y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Roots of ``sum_j w_j / (t - y_j) = 0`` for each row, descending.

    The roots are the eigenvalues of ``diag(y)`` compressed to the orthogonal
    complement of ``u = sqrt(w)``; the matrix ``P D P + c u u^T`` with
    ``P = I - u u^T`` has those roots plus the eigenvalue ``c``, which is
    chosen above every ``y_j`` and discarded.
    """
    u = np.sqrt(w / w.sum(axis=-1, keepdims=True))
    yu = y * u
    span = y[..., :1] - y[..., -1:]
    c = y[..., :1] + span + 1.0
    m = (
        np.einsum("...i,...ij->...ij", y, np.broadcast_to(np.eye(y.shape[-1]), y.shape + y.shape[-1:]))
        - u[..., :, None] * yu[..., None, :]
        - yu[..., :, None] * u[..., None, :]
        + ((yu * u).sum(axis=-1, keepdims=True) + c)[..., None] * (u[..., :, None] * u[..., None, :])
    )
    ev = np.linalg.eigvalsh(m)[..., :-1][..., ::-1]
    return np.clip(ev, y[..., 1:], y[..., :-1])


def _gibbs_da(beta: float, y: np.ndarray, rng: np.random.Generator, sweeps: int, grid: int):
    """Systematic-scan Gibbs sampler for the Dixon--Anderson kernel.

    Each coordinate ``x_i`` lives in ``[y_{i+1}, y_i]``.  Its conditional
    density is ``(t - y_{i+1})^a (y_i - t)^a h(t)`` with ``a = beta/2 - 1``
    and ``h`` smooth on the interval.  On each of ``grid`` equal panels the
    singular factor is integrated exactly (regularized incomplete Beta) and
    ``h`` is frozen at the panel midpoint; the inverse CDF is then exact for
    this product rule.
    """
    n = y.shape[-1] - 1
    a = beta / 2 - 1
    x = 0.5 * (y[..., :-1] + y[..., 1:])
    edges_v = np.linspace(0.0, 1.0, grid + 1)
    mids_v = 0.5 * (edges_v[:-1] + edges_v[1:])
    ib = special.betainc(a + 1, a + 1, edges_v)  # singular-factor CDF on panels
    panel_mass = np.diff(ib)
    for _ in range(sweeps):
        for i in range(n):
            lo, hi = y[..., i + 1], y[..., i]
            width = hi - lo
            t = lo[..., None] + width[..., None] * mids_v  # (B, grid)
            logh = np.zeros_like(t)
            for k in range(n):
                if k != i:
                    logh += np.log(np.abs(t - x[..., k : k + 1]))
            if a != 0:
                for j in range(n + 1):
                    if j not in (i, i + 1):
                        logh += a * np.log(np.abs(t - y[..., j : j + 1]))
            logh -= logh.max(axis=-1, keepdims=True)
            mass = np.exp(logh) * panel_mass
            cdf = np.cumsum(mass, axis=-1)
            target = rng.random(cdf.shape[:-1]) * cdf[..., -1]
            p = np.minimum((cdf < target[..., None]).sum(axis=-1), grid - 1)
            before = np.where(p > 0, np.take_along_axis(cdf, np.maximum(p - 1, 0)[..., None], -1)[..., 0], 0.0)
            hp = np.take_along_axis(mass, p[..., None], -1)[..., 0] / panel_mass[p]
            level = ib[p] + (target - before) / hp
            level = np.clip(level, ib[p], ib[p + 1])
            v = special.betaincinv(a + 1, a + 1, level)
            x[..., i] = np.clip(lo + width * v, lo, hi)
    return x


def sample_da(
    beta: float,
    y,
    rng,
    method: Literal["dirichlet", "gibbs"] = "dirichlet",
    *,
    sweeps: int = 20,
    grid: int = 2048,
) -> np.ndarray:
    """Draw ``x ~ Lambda(y, .)`` from the Dixon--Anderson kernel.

    Parameters
    ----------
    beta : float
    y : array_like, shape (..., N+1)
        Strictly decreasing configurations; leading axes are a batch.
    rng : numpy Generator or seed
    method : {"dirichlet", "gibbs"}
        ``"dirichlet"`` (default) is exact: if ``w ~ Dirichlet(beta/2, ...,
        beta/2)`` then the roots of ``sum_j w_j / (t - y_j)`` have law
        ``Lambda(y, .)``.  For ``N = 1`` this is the Beta draw
        ``x = y_2 + (y_1 - y_2) B`` with ``B ~ Beta(beta/2, beta/2)``.
        ``"gibbs"`` runs ``sweeps`` systematic-scan Gibbs sweeps with a
        ``grid``-panel inverse CDF per coordinate, started from the interval
        midpoints; it is an independent cross-check of the exact sampler.

    Returns
    -------
    ndarray, shape (..., N)
        Descending, interlacing with ``y``.
    """
    rng = make_rng(rng)
    y = np.asarray(y, dtype=float)
    _check_y(y)
    if not beta > 0:
        raise DomainError("beta must be positive")
    n = y.shape[-1] - 1
    if method == "gibbs":
        batch = y.reshape(-1, n + 1)
        out = _gibbs_da(beta, batch, rng, sweeps, grid)
        return out.reshape(y.shape[:-1] + (n,))
    if method != "dirichlet":
        raise ValueError(f"unknown method {method!r}")
    g = rng.standard_gamma(beta / 2, size=y.shape)
    if n == 1:
        b = g[..., 1] / (g[..., 0] + g[..., 1])
        x = y[..., 1] + (y[..., 0] - y[..., 1]) * b
        return x[..., None]
    return _secular_roots(y, g)


# ---------------------------------------------------------------------------
# tridiagonal Laguerre sampler
# ---------------------------------------------------------------------------


def sample_laguerre_tridiag(N: int, beta: float, nu: float, rng, size: int | None = None) -> np.ndarray:
    """Exact Laguerre beta-ensemble draws from the bidiagonal chi model.

    ``B`` is lower bidiagonal with diagonal ``chi_{2 nu + 2 + beta(N - i)}``
    (``i = 1..N``) and subdiagonal ``chi_{beta(N - i)}`` (``i = 1..N-1``).
    The eigenvalues of ``B B^T`` have weight ``lambda^nu e^{-lambda/2}``;
    halving them gives the weight ``x^nu e^{-x}``.

    Parameters
    ----------
    N : int
    beta : float
    nu : float
        ``> -1``.
    rng : Generator or seed
    size : int, optional
        Number of independent draws; ``None`` returns a single vector.

    Returns
    -------
    ndarray, shape (N,) or (size, N)
        Descending positive eigenvalues.
    """
    if not nu > -1:
        raise DomainError("nu must exceed -1")
    if not beta > 0:
        raise DomainError("beta must be positive")
    rng = make_rng(rng)
    n = 1 if size is None else int(size)
    i = np.arange(1, N + 1)
    diag = np.sqrt(rng.chisquare(2 * nu + 2 + beta * (N - i), size=(n, N)))
    if N > 1:
        sub = np.sqrt(rng.chisquare(beta * (N - i[:-1]), size=(n, N - 1)))
    b = np.zeros((n, N, N))
    b[:, i - 1, i - 1] = diag
    if N > 1:
        b[:, i[1:] - 1, i[:-1] - 1] = sub
    sv = np.linalg.svd(b, compute_uv=False)  # descending
    out = 0.5 * sv * sv
    return out[0] if size is None else out


# ---------------------------------------------------------------------------
# interlacing arrays
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InterlacingArray:
    """Rows ``x^(1), ..., x^(N)`` with ``x^(k) < x^(k+1)`` (interlacing).

    ``rows[k-1]`` is the descending ``k``-vector ``x^(k)``.
    """

    rows: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        rows = tuple(np.asarray(r, dtype=float) for r in self.rows)
        for k, r in enumerate(rows, start=1):
            if r.shape != (k,):
                raise ValueError(f"row {k} must have length {k}")
        object.__setattr__(self, "rows", rows)

    @property
    def depth(self) -> int:
        return len(self.rows)

    def interlaces(self, tol: float = 0.0) -> bool:
        """Whether every adjacent pair satisfies ``y_1 >= x_1 >= y_2 >= ...``."""
        for lower, upper in zip(self.rows[:-1], self.rows[1:]):
            if np.any(lower > upper[:-1] + tol) or np.any(lower < upper[1:] - tol):
                return False
        return True

    def row_sums(self) -> np.ndarray:
        return np.array([r.sum() for r in self.rows])

    def diagonal(self) -> np.ndarray:
        """Diagonal entries ``d_1 = x^(1)``, ``d_{k+1} = sum x^(k+1) - sum x^(k)``."""
        return np.diff(self.row_sums(), prepend=0.0)

    def averages(self) -> np.ndarray:
        """Row averages ``T_k = sum x^(k) / k``."""
        return self.row_sums() / np.arange(1, self.depth + 1)


@dataclass
class ArrayBatch:
    """A batch of interlacing arrays stored row-wise.

    Attributes
    ----------
    rows : list of ndarray
        ``rows[k-1]`` has shape ``(n, k)``.
    spec : EnsembleSpec
        Spec of the top row.
    seed : int or None
    diagnostics : dict
    """

    rows: list[np.ndarray]
    spec: EnsembleSpec | None = None
    seed: int | None = None
    diagnostics: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.rows[0].shape[0]

    @property
    def depth(self) -> int:
        return len(self.rows)

    def __getitem__(self, i: int) -> InterlacingArray:
        return InterlacingArray(tuple(r[i] for r in self.rows))

    def __iter__(self) -> Iterator[InterlacingArray]:
        for i in range(len(self)):
            yield self[i]

    def row_sums(self) -> np.ndarray:
        """Shape ``(n, depth)``."""
        return np.stack([r.sum(axis=1) for r in self.rows], axis=1)

    def diagonals(self) -> np.ndarray:
        """Diagonal entries, shape ``(n, depth)``."""
        return np.diff(self.row_sums(), axis=1, prepend=0.0)

    def averages(self) -> np.ndarray:
        """Row averages ``T_k``, shape ``(n, depth)``."""
        return self.row_sums() / np.arange(1, self.depth + 1)

    def interlaces(self, tol: float = 0.0) -> bool:
        for lower, upper in zip(self.rows[:-1], self.rows[1:]):
            if np.any(lower > upper[:, :-1] + tol) or np.any(lower < upper[:, 1:] - tol):
                return False
        return True


def descend_rows(beta: float, top: np.ndarray, rng, *, jitter: float = 1e-12, method="dirichlet") -> list[np.ndarray]:
    """Generate all lower rows from a batch of top rows by repeated kernel draws.

    Coinciding coordinates (a probability-zero event that floating point can
    still produce) are separated by a relative jitter of ``jitter`` before
    each kernel draw.
    """
    rng = make_rng(rng)
    rows = [np.asarray(top, dtype=float)]
    y = rows[0]
    while y.shape[1] > 1:
        gaps = y[:, :-1] - y[:, 1:]
        scale = np.maximum(np.abs(y).max(axis=1, keepdims=True), 1.0)
        if np.any(gaps <= 0):
            y = y - jitter * scale * np.arange(y.shape[1])
            rows[-1] = y
        y = sample_da(beta, y, rng, method=method)
        rows.append(y)
    return rows[::-1]



def sample_arrays(
    spec: EnsembleSpec,
    n: int,
    seed: int = 0,
    *,
    config=None,
    da_method: str = "dirichlet",
) -> ArrayBatch:
    """Sample ``n`` interlacing arrays whose top row has law ``spec``.

    The top row (of size ``spec.N``) is drawn by Metropolis for Hua-Pickrell
    and exactly (tridiagonal model, then ``x = 2/lambda``) for inverse
    Laguerre; lower rows follow by repeated Dixon-Anderson kernel draws.
    Consistency of both families under the kernel makes every row ``k`` an
    exact-in-law sample of the size-``k`` ensemble.

    Parameters
    ----------
    spec : EnsembleSpec
        Hua-Pickrell or inverse-Laguerre spec; ``spec.N`` is the array depth.
    n : int
        Number of arrays.
    seed : int
    config : ChainConfig, optional
        Chain settings for the Hua-Pickrell top row.  ``n_chains * n_draws``
        must be at least ``n``; a default is derived from ``n`` otherwise.
    da_method : {"dirichlet", "gibbs"}

    Returns
    -------
    ArrayBatch
    """
    from .mcmc import ChainConfig, sample_mcmc

    if spec.kind not in (Kind.HUA_PICKRELL, Kind.INVERSE_LAGUERRE):
        raise ValueError("interlacing arrays are defined for hua-pickrell and inverse-laguerre")
    top_seq, kernel_seq = np.random.SeedSequence(seed).spawn(2)
    diagnostics: dict = {}
    if spec.kind is Kind.HUA_PICKRELL:
        if config is None:
            n_chains = min(n, 200)
            config = ChainConfig(n_chains=n_chains, n_draws=-(-n // n_chains), burn_in=400, thin=6)
        if config.n_chains * config.n_draws < n:
            raise ValueError("chain configuration yields fewer than n draws")
        res = sample_mcmc(spec, config, seed=int(top_seq.generate_state(1)[0]))
        # interleave chains so any prefix draws evenly from all chains
        top = np.swapaxes(res.points, 0, 1).reshape(-1, spec.N)[:n]
        diagnostics.update(res.diagnostics)
        diagnostics["chain_config"] = config.to_dict()
    else:
        g = np.random.Generator(np.random.Philox(top_seq))
        lam = sample_laguerre_tridiag(spec.N, spec.beta, spec.nu, g, size=n)
        top = -np.sort(-(2.0 / lam), axis=-1)
    kernel_rng = np.random.Generator(np.random.Philox(kernel_seq))
    rows = descend_rows(spec.beta, top, kernel_rng, method=da_method)
    return ArrayBatch(rows=rows, spec=spec, seed=seed, diagnostics=diagnostics)


def sample_array(spec: EnsembleSpec, seed: int = 0, **kwargs) -> InterlacingArray:
    """Sample a single interlacing array; see :func:`sample_arrays`."""
    return sample_arrays(spec, 1, seed, **kwargs)[0]
