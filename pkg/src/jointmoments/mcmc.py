"""Random-walk Metropolis sampling of the ensembles.

The sampler updates one coordinate at a time with a Gaussian proposal and
interleaves a global move that shifts all coordinates together.  Chains run
in vectorized blocks, but every chain owns an independent Philox stream and
its own adaptively tuned step size, so results depend only on the seed and
the chain settings -- not on block size or thread count.

Coordinates
-----------
* circular Jacobi: angles on the circle (proposals wrap around);
* Hua-Pickrell: angles of the equivalent circular Jacobi ensemble with
  ``delta = conj(tau)``, mapped back by ``x = cot(t/2)``;
* Laguerre and inverse Laguerre: ``u = log x``, with the Jacobian included.

Since all targets are symmetric densities, chains move freely on the
unordered configuration space; outputs are sorted.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ensembles import EnsembleSpec, Kind, sample_laguerre_tridiag, spawn_rngs
from .errors import ConvergenceWarning

__all__ = ["ChainConfig", "MCMCResult", "sample_mcmc", "split_rhat"]

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class ChainConfig:
    """Chain settings.

    Parameters
    ----------
    n_chains : int
        Number of independent chains.
    n_draws : int
        Draws kept per chain after burn-in.
    burn_in : int
        Sweeps discarded (and used for step-size tuning).
    thin : int
        Sweeps between kept draws.
    proposal_scale : float, optional
        Initial single-site step size; a kind-dependent default otherwise.
    block_size : int
        Chains advanced together in one vectorized block.
    threads : int
        Worker threads for blocks.  Does not affect results.
    tune_interval : int
        Sweeps between step-size adjustments during burn-in.
    target_acceptance : tuple of float
        Acceptance window aimed at by the tuner.
    """

    n_chains: int = 64
    n_draws: int = 500
    burn_in: int = 400
    thin: int = 4
    proposal_scale: float | None = None
    block_size: int = 256
    threads: int = 1
    tune_interval: int = 10
    target_acceptance: tuple[float, float] = (0.30, 0.45)

    def __post_init__(self) -> None:
        for name in ("n_chains", "n_draws", "thin", "block_size", "threads", "tune_interval"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.burn_in < 0:
            raise ValueError("burn_in must be nonnegative")

    @property
    def total_draws(self) -> int:
        return self.n_chains * self.n_draws

    def to_dict(self) -> dict:
        return {
            "n_chains": self.n_chains,
            "n_draws": self.n_draws,
            "burn_in": self.burn_in,
            "thin": self.thin,
            "proposal_scale": self.proposal_scale,
            "block_size": self.block_size,
            "tune_interval": self.tune_interval,
            "target_acceptance": list(self.target_acceptance),
        }


@dataclass
class MCMCResult:
    """Output of :func:`sample_mcmc`.

    Attributes
    ----------
    points : ndarray, shape (n_chains, n_draws, N)
        Sorted draws in ensemble coordinates (descending for real-line and
        positive ensembles, ascending angles in ``[0, 2pi)`` for circular).
    log_target : ndarray, shape (n_chains, n_draws)
        Unnormalized log target at each kept draw (internal coordinates).
    acceptance : ndarray, shape (n_chains,)
        Post-burn-in single-site acceptance rate.
    proposal_scale : ndarray, shape (n_chains,)
        Tuned single-site step sizes.
    rhat : float
        Split-chain potential scale reduction of ``log_target``.
    """

    spec: EnsembleSpec
    config: ChainConfig
    seed: int | None
    points: np.ndarray
    log_target: np.ndarray
    acceptance: np.ndarray
    proposal_scale: np.ndarray
    rhat: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def flat(self) -> np.ndarray:
        """Draws as an array of shape ``(n_chains * n_draws, N)``."""
        return self.points.reshape(-1, self.points.shape[-1])


# ---------------------------------------------------------------------------
# targets in internal coordinates
# ---------------------------------------------------------------------------


class _CircleTarget:
    """Circular Jacobi density in angle coordinates."""

    periodic = True

    def __init__(self, beta: float, delta: complex):
        self.beta = beta
        self.a = 2 * complex(delta).real
        self.b = complex(delta).imag

    def one_body(self, t):
        t = np.mod(t, TWO_PI)
        with np.errstate(divide="ignore"):
            out = self.a * np.log(np.abs(np.sin(0.5 * t))) if self.a else np.zeros_like(t)
        return out + self.b * (t - math.pi)

    def pair_delta(self, new, old, others):
        """``beta sum_k [log|sin((new-o_k)/2)| - log|sin((old-o_k)/2)|]``."""
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.sin(0.5 * (new[:, None] - others)) / np.sin(0.5 * (old[:, None] - others))
            return self.beta * np.log(np.abs(r)).sum(axis=1)

    def global_pair_delta(self, shift, n):
        return 0.0

    def total(self, t):
        n = t.shape[-1]
        iu = np.triu_indices(n, 1)
        with np.errstate(divide="ignore"):
            pairs = np.log(np.abs(np.sin(0.5 * (t[..., iu[0]] - t[..., iu[1]])))).sum(axis=-1)
        return self.one_body(t).sum(axis=-1) + self.beta * pairs

    def wrap(self, t):
        return np.mod(t, TWO_PI)


class _LogTarget:
    """Laguerre-type density in ``u = log x`` coordinates (Jacobian included)."""

    periodic = False

    def __init__(self, beta: float, power: float, inverse: bool):
        # density x^power e^{-x} (or e^{-2/x}) |Delta|^beta dx ; dx = e^u du
        self.beta = beta
        self.c = power + 1.0
        self.inverse = inverse

    def one_body(self, u):
        with np.errstate(over="ignore"):
            return self.c * u - (2.0 * np.exp(-u) if self.inverse else np.exp(u))

    @staticmethod
    def _logdiff(a, b):
        d = np.abs(a - b)
        with np.errstate(divide="ignore"):
            return np.maximum(a, b) + np.log(-np.expm1(-d))

    def pair_delta(self, new, old, others):
        return self.beta * (
            self._logdiff(new[:, None], others) - self._logdiff(old[:, None], others)
        ).sum(axis=1)

    def global_pair_delta(self, shift, n):
        return self.beta * shift * n * (n - 1) / 2

    def total(self, u):
        n = u.shape[-1]
        iu = np.triu_indices(n, 1)
        pairs = self._logdiff(u[..., iu[0]], u[..., iu[1]]).sum(axis=-1)
        return self.one_body(u).sum(axis=-1) + self.beta * pairs

    def wrap(self, u):
        return u


def _target_for(spec: EnsembleSpec):
    if spec.kind is Kind.CIRCULAR_JACOBI:
        return _CircleTarget(spec.beta, spec.delta)
    if spec.kind is Kind.HUA_PICKRELL:
        return _CircleTarget(spec.beta, complex(spec.tau).conjugate())
    if spec.kind is Kind.LAGUERRE:
        return _LogTarget(spec.beta, spec.nu, inverse=False)
    return _LogTarget(spec.beta, -spec.nu - spec.beta * (spec.N - 1) - 2, inverse=True)


def _to_ensemble(spec: EnsembleSpec, z: np.ndarray) -> np.ndarray:
    if spec.kind is Kind.CIRCULAR_JACOBI:
        return np.sort(np.mod(z, TWO_PI), axis=-1)
    if spec.kind is Kind.HUA_PICKRELL:
        t = np.mod(z, TWO_PI)
        with np.errstate(divide="ignore"):
            x = 1.0 / np.tan(0.5 * t)
        return -np.sort(-x, axis=-1)
    return -np.sort(-np.exp(z), axis=-1)


def _initial_state(spec: EnsembleSpec, gens) -> np.ndarray:
    n = spec.N
    if spec.kind in (Kind.CIRCULAR_JACOBI, Kind.HUA_PICKRELL):
        base = TWO_PI * (np.arange(n) + 0.5) / n
        out = []
        for g in gens:
            jitter = g.uniform(-0.25, 0.25, n) * TWO_PI / n
            rot = g.uniform(-0.5, 0.5) * TWO_PI / n
            out.append(np.mod(base + jitter + rot, TWO_PI))
        return np.array(out)
    out = []
    for g in gens:
        lam = sample_laguerre_tridiag(n, spec.beta, spec.nu, g)
        x = lam if spec.kind is Kind.LAGUERRE else 2.0 / lam
        out.append(np.log(x))
    return np.array(out)


def _default_scale(spec: EnsembleSpec) -> float:
    if spec.kind in (Kind.CIRCULAR_JACOBI, Kind.HUA_PICKRELL):
        return 2.0 / max(spec.N, 1)
    return 0.5 / math.sqrt(spec.N)


# ---------------------------------------------------------------------------
# block runner
# ---------------------------------------------------------------------------

_SEGMENT = 32


def _run_block(target, state: np.ndarray, gens, cfg: ChainConfig, scale0: float):
    b, n = state.shape
    state = state.copy()
    scale = np.full(b, scale0)
    gscale = np.full(b, scale0)
    lo, hi = cfg.target_acceptance
    total = cfg.burn_in + cfg.n_draws * cfg.thin
    draws = np.empty((cfg.n_draws, b, n))
    logt = np.empty((cfg.n_draws, b))
    acc = np.zeros(b)
    acc_window = np.zeros(b)
    gacc_window = np.zeros(b)
    kept_acc = np.zeros(b)
    kept_moves = 0
    window = 0
    kept = 0
    idx = np.arange(n)
    sweep = 0
    while sweep < total:
        seg = min(_SEGMENT, total - sweep)
        z = np.stack([g.standard_normal((seg, n + 1)) for g in gens], axis=1)
        lu = np.log(np.stack([g.random((seg, n + 1)) for g in gens], axis=1))
        for s in range(seg):
            acc[:] = 0.0
            for i in range(n):
                old = state[:, i]
                new = target.wrap(old + scale * z[s, :, i])
                others = state[:, idx != i]
                d = target.one_body(new) - target.one_body(old) + target.pair_delta(new, old, others)
                ok = lu[s, :, i] < d
                state[ok, i] = new[ok]
                acc += ok
            shift = gscale * z[s, :, n]
            moved = target.wrap(state + shift[:, None])
            d = (
                target.one_body(moved).sum(axis=1)
                - target.one_body(state).sum(axis=1)
                + target.global_pair_delta(shift, n)
            )
            gok = lu[s, :, n] < d
            state[gok] = moved[gok]
            sweep += 1
            if sweep <= cfg.burn_in:
                acc_window += acc / n
                gacc_window += gok
                window += 1
                if window == cfg.tune_interval:
                    rate = acc_window / window
                    scale = np.where(rate < lo, scale * 0.7, np.where(rate > hi, scale * 1.35, scale))
                    grate = gacc_window / window
                    gscale = np.where(grate < lo, gscale * 0.7, np.where(grate > hi, gscale * 1.35, gscale))
                    if target.periodic:
                        scale = np.minimum(scale, math.pi)
                        gscale = np.minimum(gscale, math.pi)
                    acc_window[:] = 0
                    gacc_window[:] = 0
                    window = 0
            else:
                kept_acc += acc / n
                kept_moves += 1
                if (sweep - cfg.burn_in) % cfg.thin == 0:
                    draws[kept] = state
                    logt[kept] = target.total(state)
                    kept += 1
    return {
        "draws": np.swapaxes(draws, 0, 1),
        "log_target": logt.T,
        "acceptance": kept_acc / max(kept_moves, 1),
        "scale": scale,
    }


def split_rhat(trace: np.ndarray) -> float:
    """Split-chain potential scale reduction factor.

    Parameters
    ----------
    trace : ndarray, shape (n_chains, n_draws)

    Returns
    -------
    float
        ``nan`` if fewer than 4 draws per chain or zero within-chain variance.
    """
    trace = np.asarray(trace, dtype=float)
    m, n = trace.shape
    half = n // 2
    if half < 2:
        return float("nan")
    chains = np.concatenate([trace[:, :half], trace[:, n - half :]], axis=0)
    means = chains.mean(axis=1)
    w = chains.var(axis=1, ddof=1).mean()
    b = half * means.var(ddof=1)
    if not w > 0:
        return float("nan")
    var_plus = (half - 1) / half * w + b / half
    return float(math.sqrt(var_plus / w))


def sample_mcmc(spec: EnsembleSpec, config: ChainConfig | None = None, seed: int = 0) -> MCMCResult:
    """Sample an ensemble by random-walk Metropolis.

    Parameters
    ----------
    spec : EnsembleSpec
    config : ChainConfig, optional
    seed : int
        Root seed; chain ``c`` uses the ``c``-th spawned Philox stream.

    Returns
    -------
    MCMCResult

    Warns
    -----
    ConvergenceWarning
        If split-R-hat exceeds 1.05 or the mean acceptance rate falls outside
        ``[0.15, 0.7]``.
    """
    cfg = config or ChainConfig()
    gens = spawn_rngs(seed, cfg.n_chains)
    target = _target_for(spec)
    init = _initial_state(spec, gens)
    scale0 = cfg.proposal_scale or _default_scale(spec)
    blocks = [
        (slice(k, min(k + cfg.block_size, cfg.n_chains))) for k in range(0, cfg.n_chains, cfg.block_size)
    ]

    def work(sl):
        return _run_block(target, init[sl], gens[sl], cfg, scale0)

    if cfg.threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(work, blocks))
    else:
        parts = [work(sl) for sl in blocks]
    draws = np.concatenate([p["draws"] for p in parts], axis=0)
    logt = np.concatenate([p["log_target"] for p in parts], axis=0)
    acceptance = np.concatenate([p["acceptance"] for p in parts])
    scale = np.concatenate([p["scale"] for p in parts])
    rhat = split_rhat(logt)
    result = MCMCResult(
        spec=spec,
        config=cfg,
        seed=seed,
        points=_to_ensemble(spec, draws),
        log_target=logt,
        acceptance=acceptance,
        proposal_scale=scale,
        rhat=rhat,
    )
    mean_acc = float(acceptance.mean())
    result.diagnostics = {
        "acceptance_mean": mean_acc,
        "acceptance_min": float(acceptance.min()),
        "rhat_log_target": rhat,
        "proposal_scale_median": float(np.median(scale)),
    }
    if (math.isfinite(rhat) and rhat > 1.05) or not 0.15 <= mean_acc <= 0.7:
        warnings.warn(
            f"MCMC diagnostics out of range: rhat={rhat:.3f}, acceptance={mean_acc:.3f}",
            ConvergenceWarning,
            stacklevel=2,
        )
    return result
