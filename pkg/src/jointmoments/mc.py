"""Monte Carlo estimators that witness the limit theorems at finite ``N``.

Standard errors for Metropolis output are computed from per-chain means
(``n_chains`` independent replicates), which absorbs within-chain
autocorrelation; for exact samplers they are the usual ``std / sqrt(n)``.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from .ensembles import ArrayBatch, EnsembleSpec, Kind, make_rng, sample_laguerre_tridiag
from .errors import DomainError, EffectiveSampleSizeWarning
from .limits import JointMomentParams, cjbe_finite_f0, x_moment_limit, y_moment_limit
from .mcmc import ChainConfig, MCMCResult, sample_mcmc

__all__ = [
    "DEFAULT_MC_CONFIG",
    "MomentEstimate",
    "convergence_table",
    "estimate_g_laguerre",
    "estimate_joint_moment_cjbe",
    "estimate_sum_moment",
    "estimate_trace_moment",
    "exchangeability_test",
    "finite_trace_second_moment",
    "log_abs_psi",
    "log_derivative_psi",
    "martingale_check",
    "y_moment_reference",
]

#: 400 chains x 500 kept draws = 2e5 draws.
DEFAULT_MC_CONFIG = ChainConfig(n_chains=400, n_draws=500, burn_in=400, thin=4)

ESS_THRESHOLD = 0.10


@dataclass
class MomentEstimate:
    """A Monte Carlo moment estimate.

    Attributes
    ----------
    value, stderr : float
    n_samples : int
        Number of (post-burn-in, thinned) draws used.
    seed : int or None
    spec : EnsembleSpec or None
        Snapshot of the sampled ensemble.
    exploratory : bool
        ``True`` when parameters lie outside the window covered by the limit
        theorems (the estimate itself is still well defined).
    diagnostics : dict
    """

    value: float
    stderr: float
    n_samples: int
    seed: int | None
    spec: EnsembleSpec | None = None
    exploratory: bool = False
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.stderr >= 0:
            raise ValueError("stderr must be nonnegative")

    def within(self, target: float, k: float = 3.0) -> bool:
        """Whether ``target`` lies within ``k`` standard errors."""
        return abs(self.value - target) <= k * self.stderr

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "spec": None if self.spec is None else self.spec.to_dict(),
            "exploratory": self.exploratory,
            "diagnostics": self.diagnostics,
        }


def _chain_mean_estimate(values: np.ndarray) -> tuple[float, float]:
    """Mean and standard error of ``(n_chains, n_draws)`` values via chain means."""
    means = values.mean(axis=1)
    m = means.shape[0]
    se = float(means.std(ddof=1) / math.sqrt(m)) if m > 1 else float("nan")
    return float(values.mean()), se


def _diag(res: MCMCResult) -> dict:
    return dict(res.diagnostics, chain_config=res.config.to_dict())


# ---------------------------------------------------------------------------
# characteristic-polynomial observables on the circle
# ---------------------------------------------------------------------------


def log_abs_psi(theta: np.ndarray) -> np.ndarray:
    """``log |Psi(0)| = sum_j log |2 sin(theta_j / 2)|`` along the last axis."""
    with np.errstate(divide="ignore"):
        return np.log(np.abs(2 * np.sin(0.5 * np.asarray(theta)))).sum(axis=-1)


def log_derivative_psi(theta: np.ndarray) -> np.ndarray:
    """``Psi'(0) / Psi(0) = -(1/2) sum_j cot(theta_j / 2)`` along the last axis."""
    t = 0.5 * np.asarray(theta)
    return -0.5 * (np.cos(t) / np.sin(t)).sum(axis=-1)


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------


def _log_abs_power(x: np.ndarray, p: float) -> np.ndarray:
    """``|x|^p`` evaluated in log space (``0^0 = 1``)."""
    if p == 0:
        return np.ones_like(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.exp(p * np.log(np.abs(x)))


def finite_trace_second_moment(beta: float, tau: float, N: int) -> float:
    """Exact ``N^-2 E_N[(x_1 + ... + x_N)^2]`` under real-``tau`` Hua-Pickrell.

    By consistency the points have one-point second moment ``1/(2 tau - 1)``
    and pair correlation equal to the limiting second moment ``m2``, so the
    value is ``m2 + (1/(2 tau - 1) - m2) / N``.
    """
    if not tau > 0.5:
        raise DomainError("second moment needs tau > 1/2")
    m2 = x_moment_limit(beta, tau, 1)
    return m2 + (1.0 / (2 * tau - 1) - m2) / N


def estimate_trace_moment(
    spec: EnsembleSpec,
    h: float,
    config: ChainConfig | None = None,
    seed: int = 0,
) -> MomentEstimate:
    """Estimate ``N^(-2h) E[|x_1 + ... + x_N|^(2h)]`` under Hua-Pickrell.

    Parameters
    ----------
    spec : EnsembleSpec
        A Hua-Pickrell spec.
    h : float
        Nonnegative, with ``h < Re(tau) + 1/2``.
    config : ChainConfig, optional
        Defaults to :data:`DEFAULT_MC_CONFIG`.
    seed : int

    Raises
    ------
    DomainError
        Outside the integrability window.
    """
    if spec.kind is not Kind.HUA_PICKRELL:
        raise ValueError("trace moments are defined for hua-pickrell specs")
    if not spec.trace_moment_window(h):
        raise DomainError("h outside 0 <= h < Re(tau) + 1/2")
    if h == 0:
        return MomentEstimate(1.0, 0.0, 0, seed, spec)
    res = sample_mcmc(spec, config or DEFAULT_MC_CONFIG, seed=seed)
    vals = _log_abs_power(res.points.sum(axis=-1) / spec.N, 2 * h)
    v, se = _chain_mean_estimate(vals)
    return MomentEstimate(v, se, vals.size, seed, spec, diagnostics=_diag(res))


def estimate_sum_moment(
    spec: EnsembleSpec,
    power: int,
    config: ChainConfig | None = None,
    seed: int = 0,
) -> MomentEstimate:
    """Estimate the signed moment ``E[(x_1 + ... + x_N)^power]`` by Metropolis."""
    res = sample_mcmc(spec, config or DEFAULT_MC_CONFIG, seed=seed)
    vals = res.points.sum(axis=-1) ** power
    v, se = _chain_mean_estimate(vals)
    return MomentEstimate(v, se, vals.size, seed, spec, diagnostics=_diag(res))


def _ratio_estimate(num: np.ndarray, den: np.ndarray) -> tuple[float, float]:
    """Self-normalized ratio ``sum num / sum den`` with delta-method stderr over chains."""
    a = num.mean(axis=1)
    b = den.mean(axis=1)
    r = float(a.sum() / b.sum())
    m = a.shape[0]
    resid = a - r * b
    se = float(math.sqrt((resid**2).sum() / (m * (m - 1))) / abs(b.mean()))
    return r, se


def estimate_joint_moment_cjbe(
    N: int,
    beta: float,
    delta: float,
    s: float,
    h: float,
    config: ChainConfig | None = None,
    seed: int = 0,
    *,
    method: str = "reweight",
) -> MomentEstimate:
    """Estimate ``F_N(s, h) / F_N(s, 0)`` for the circular Jacobi ensemble.

    Uses ``|Psi(0)|^(2s - 2h) |Psi'(0)|^(2h) = |Psi(0)|^(2s) |Psi'/Psi(0)|^(2h)``:
    draws from the ensemble with parameter ``delta`` are importance-weighted
    by ``|Psi(0)|^(2s)``.  Since that tilt turns the ensemble with parameter
    ``delta`` into the one with ``delta + s``, a degenerate weight set
    (effective sample size below 10%) triggers a warning and a direct run on
    the tilted ensemble.

    Parameters
    ----------
    N, beta : int, float
    delta : float
        Real ``delta``.
    s, h : float
        ``-1/2 < h < delta + s + 1/2``.
    config : ChainConfig, optional
    seed : int
    method : {"reweight", "direct"}
        ``"direct"`` samples the tilted ensemble from the start.

    Returns
    -------
    MomentEstimate
        ``exploratory`` is set outside the convergence theorem's window
        (``Re(delta) > -1/3``, ``s > -1/3``, ``s + Re(delta) > 0``,
        ``0 <= h < s + Re(delta) + 1/2``).
        ``diagnostics["full_value"]`` / ``["full_stderr"]`` hold the estimate
        multiplied by the exact ``F_N(s, 0)``.
    """
    if not -0.5 < h < delta + s + 0.5:
        raise DomainError("h outside -1/2 < h < delta + s + 1/2")
    cfg = config or DEFAULT_MC_CONFIG
    diagnostics: dict = {"method": method}
    if method not in ("reweight", "direct"):
        raise ValueError("method must be 'reweight' or 'direct'")
    spec = EnsembleSpec.circular_jacobi(N, beta, delta, s)
    if method == "reweight":
        res = sample_mcmc(EnsembleSpec.circular_jacobi(N, beta, delta), cfg, seed=seed)
        logw = 2 * s * log_abs_psi(res.points)
        logw -= logw.max()
        w = np.exp(logw)
        ess = float(w.sum() ** 2 / (w**2).sum() / w.size)
        diagnostics.update(_diag(res), ess_fraction=ess)
        if ess < ESS_THRESHOLD:
            warnings.warn(
                f"importance weights degenerate (ESS fraction {ess:.3f}); sampling the tilted ensemble",
                EffectiveSampleSizeWarning,
                stacklevel=2,
            )
            method = "direct"
            diagnostics["fallback"] = True
        else:
            g = _log_abs_power(log_derivative_psi(res.points), 2 * h)
            v, se = _ratio_estimate(w * g, w)
    if method == "direct":
        res = sample_mcmc(EnsembleSpec.circular_jacobi(N, beta, delta + s), cfg, seed=seed)
        g = _log_abs_power(log_derivative_psi(res.points), 2 * h)
        v, se = _chain_mean_estimate(g)
        diagnostics.update(_diag(res))
    f0 = cjbe_finite_f0(N, beta, delta, s)
    diagnostics.update(f0=f0, full_value=v * f0, full_stderr=se * f0)
    # outside the hypotheses of the convergence theorem the estimate is still valid but labeled
    exploratory = not JointMomentParams(beta, delta, s, h).in_theorem_window
    return MomentEstimate(v, se, res.points.shape[0] * res.points.shape[1], seed, spec, exploratory, diagnostics)


def estimate_g_laguerre(
    N: int,
    beta: float,
    nu: float,
    r: float,
    n_samples: int = 200_000,
    seed: int = 0,
) -> MomentEstimate:
    """Estimate ``N^(-r) E[(sum_i 1/x_i)^r]`` under the Laguerre ensemble.

    Draws are exact (bidiagonal model), so the standard error is
    ``std / sqrt(n)``.  The limit as ``N`` grows is ``2^(-r) E[Y^r]``.
    """
    if not 0 <= r < nu + 1:
        raise DomainError("r outside 0 <= r < nu + 1")
    spec = EnsembleSpec.laguerre(N, beta, nu)
    if r == 0:
        return MomentEstimate(1.0, 0.0, 0, seed, spec)
    lam = sample_laguerre_tridiag(N, beta, nu, make_rng(seed), size=n_samples)
    vals = _log_abs_power((1.0 / lam).sum(axis=-1) / N, r)
    se = float(vals.std(ddof=1) / math.sqrt(vals.size))
    # second moment of the observable must exist for a meaningful stderr
    exploratory = not 2 * r < nu + 1
    return MomentEstimate(float(vals.mean()), se, vals.size, seed, spec, exploratory)


# ---------------------------------------------------------------------------
# interlacing-array statistics
# ---------------------------------------------------------------------------


def exchangeability_test(
    arrays: ArrayBatch,
    k: int,
    *,
    n_permutations: int = 20,
    seed: int = 0,
    alpha: float = 0.01,
) -> dict:
    """Kolmogorov-Smirnov checks that ``(d_1, ..., d_k)`` is exchangeable.

    For each permutation ``sigma`` the empirical law of ``d_sigma(i)`` is
    compared with that of ``d_i`` at every moved position ``i``; the
    permutation's p-value is the Bonferroni-adjusted minimum.  All ``k!``
    permutations are used for ``k <= 4``, otherwise ``n_permutations``
    random ones.  Both samples come from the same arrays, which makes the
    test conservative.

    Returns
    -------
    dict
        ``{"k", "n_arrays", "alpha", "passed", "permutations": [...]}``; each
        permutation entry lists ``statistics``, ``pvalues`` and ``pvalue``.
    """
    if arrays.depth < k:
        raise ValueError("arrays are shallower than k")
    n = len(arrays)
    if n < 20:
        raise ValueError("too few arrays for a KS test")
    d = arrays.diagonals()[:, :k]
    if k <= 4:
        perms = list(itertools.permutations(range(k)))
    else:
        rng = make_rng(seed)
        perms = [tuple(range(k))] + [tuple(rng.permutation(k)) for _ in range(n_permutations)]
    entries = []
    for sigma in perms:
        stat_list, p_list = [], []
        moved = [i for i in range(k) if sigma[i] != i]
        for i in range(k):
            if sigma[i] == i:
                stat_list.append(0.0)
                p_list.append(1.0)
            else:
                res = stats.ks_2samp(d[:, sigma[i]], d[:, i])
                stat_list.append(float(res.statistic))
                p_list.append(float(res.pvalue))
        p = min(1.0, min(p_list) * max(len(moved), 1))
        entries.append(
            {"permutation": [int(j) + 1 for j in sigma], "statistics": stat_list, "pvalues": p_list, "pvalue": p}
        )
    return {
        "k": k,
        "n_arrays": n,
        "alpha": alpha,
        "passed": all(e["pvalue"] >= alpha for e in entries),
        "permutations": entries,
    }


def martingale_check(
    arrays: ArrayBatch,
    N_list: Sequence[int] = (1, 2, 5, 10, 20),
    *,
    expected_mean: float | None = None,
    n_sigma: float = 3.0,
) -> dict:
    """Row-average statistics ``T_N`` along the arrays.

    Reports per-``N`` mean, variance and standard error of ``T_N``; the
    paired mean differences ``T_N - T_{N_1}`` with their standard errors;
    and per-path mean-square increments between consecutive listed ``N``.

    Returns
    -------
    dict
        With booleans ``mean_constant`` (every paired difference within
        ``n_sigma`` standard errors, and ``expected_mean`` if given),
        ``variance_nonincreasing`` (within ``n_sigma`` paired standard
        errors) and ``passed`` (the mean check).
    """
    N_list = sorted(int(v) for v in N_list)
    if N_list[-1] > arrays.depth:
        raise ValueError("arrays are shallower than max(N_list)")
    T = arrays.averages()
    n = T.shape[0]
    sq = math.sqrt(n)
    rows = []
    base = T[:, N_list[0] - 1]
    ok_mean = True
    ok_var = True
    for idx, N in enumerate(N_list):
        t = T[:, N - 1]
        diff = t - base
        row = {
            "N": N,
            "mean": float(t.mean()),
            "stderr": float(t.std(ddof=1) / sq),
            "variance": float(t.var(ddof=1)),
            "diff_from_first": float(diff.mean()),
            "diff_stderr": float(diff.std(ddof=1) / sq),
        }
        if idx > 0:
            ok_mean &= abs(row["diff_from_first"]) <= n_sigma * row["diff_stderr"]
            prev = T[:, N_list[idx - 1] - 1]
            row["mean_square_increment"] = float(((t - prev) ** 2).mean())
            dv = (prev - prev.mean()) ** 2 - (t - t.mean()) ** 2
            row["variance_drop"] = float(dv.mean())
            row["variance_drop_stderr"] = float(dv.std(ddof=1) / sq)
            ok_var &= row["variance_drop"] >= -n_sigma * row["variance_drop_stderr"]
        if expected_mean is not None:
            row["z_expected"] = (row["mean"] - expected_mean) / row["stderr"] if row["stderr"] > 0 else 0.0
            ok_mean &= abs(row["mean"] - expected_mean) <= n_sigma * row["stderr"]
        rows.append(row)
    return {
        "N_list": N_list,
        "n_arrays": n,
        "rows": rows,
        "mean_constant": bool(ok_mean),
        "variance_nonincreasing": bool(ok_var),
        "passed": bool(ok_mean),
    }


def convergence_table(
    beta: float,
    tau: float,
    N_list: Sequence[int] = (5, 10, 20),
    h: int = 1,
    config: ChainConfig | None = None,
    seed: int = 0,
) -> list[dict]:
    """MC trace moments ``N^(-2h) E|sum x|^(2h)`` across ``N`` next to the limit.

    Each row has ``N, estimate, stderr, limit`` and, for ``h = 1``, the exact
    finite-``N`` value ``reference``.  Seeds are derived per ``N``.
    """
    limit = x_moment_limit(beta, tau, h)
    out = []
    for i, N in enumerate(N_list):
        est = estimate_trace_moment(EnsembleSpec.hua_pickrell(N, beta, tau), h, config, seed=seed + 1000 * i)
        row = {"N": N, "estimate": est.value, "stderr": est.stderr, "limit": limit}
        if h == 1:
            row["reference"] = finite_trace_second_moment(beta, tau, N)
        row["rhat"] = est.diagnostics.get("rhat_log_target")
        out.append(row)
    return out


def y_moment_reference(beta: float, nu: float, r: int) -> float:
    """Limit of ``N^(-r) E[(sum 1/x_i)^r]``: ``2^(-r)`` times the ``Y`` moment."""
    return 2.0 ** (-r) * y_moment_limit(beta, nu, r)

