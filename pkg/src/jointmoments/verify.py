"""Acceptance suites tying the closed forms to oracles and simulation.

Each check returns a :class:`CriterionResult`.  Checks that are stated in a
form the mathematics does not support are run exactly as stated (and fail);
the corrected statement is then reported as a separate supplementary entry
whose ``key`` carries a ``*`` suffix.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ensembles import EnsembleSpec, sample_arrays
from .limits import (
    cjbe_finite_f0,
    f0_growth_exponent,
    f0_limit,
    forrester_joint_moment,
    jacobi_inverse_moment,
    laguerre_finite_moment,
    moments_connection,
    x_moment_limit,
    x_second_moment_closed,
)
from .mc import convergence_table, exchangeability_test, martingale_check
from .mcmc import ChainConfig
from .oracle import (
    consistency_marginal,
    da_normalization,
    hp_row_moment,
    hp_row_moment_exact,
    inv_laguerre_moment,
    jacobi_moment_oracle,
)

__all__ = ["CriterionResult", "SUITES", "run_suite", "CHECKS"]


@dataclass
class CriterionResult:
    """Outcome of one acceptance check.

    Attributes
    ----------
    key : str
        Criterion number, with ``*`` for supplementary corrected checks.
    title : str
    passed : bool
    details : dict
        Per-cell values, tolerances and errors.
    elapsed : float
        Wall time in seconds.
    note : str
    """

    key: str
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" -- {self.note}" if self.note else ""
        return f"[{status}] criterion {self.key}: {self.title} ({self.elapsed:.2f}s){extra}"

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "title": self.title,
            "passed": self.passed,
            "details": self.details,
            "elapsed": self.elapsed,
            "note": self.note,
        }


def _timed(fn: Callable[..., CriterionResult]) -> Callable[..., CriterionResult]:
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.elapsed = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ---------------------------------------------------------------------------
# 1-5: identities and oracles
# ---------------------------------------------------------------------------


@_timed
def check_second_moment(tol: float = 1e-12) -> CriterionResult:
    """Partition-sum second moment against its closed form."""
    cells = []
    worst = 0.0
    for beta in (0.5, 1.0, 2.0, 4.0):
        for tau in (1.0, 1.5, 2.0, 3.0):
            a = x_moment_limit(beta, tau, 1)
            b = x_second_moment_closed(beta, tau)
            err = abs(float(a) - b)
            worst = max(worst, err)
            cells.append({"beta": beta, "tau": tau, "series": float(a), "closed": b, "abs_err": err})
    return CriterionResult("1", "second-moment identity", worst <= tol, {"tol": tol, "max_abs_err": worst, "cells": cells})


@_timed
def check_forrester(tol: float = 1e-8) -> CriterionResult:
    """Integer-``s`` evaluation against limit constant times trace moment."""
    cells = []
    worst = 0.0
    for beta in (1.0, 2.0, 4.0):
        for s in (1, 2, 3):
            f0 = f0_limit(beta, 0.0, s)
            for h in range(s + 1):
                lhs = float(forrester_joint_moment(beta, s, h))
                rhs = f0 * 2.0 ** (-2 * h) * float(x_moment_limit(beta, s, h))
                err = abs(lhs - rhs) / abs(rhs)
                worst = max(worst, err)
                cells.append({"beta": beta, "s": s, "h": h, "lhs": lhs, "rhs": rhs, "rel_err": err})
    return CriterionResult("2", "joint-moment formulas agree", worst <= tol, {"tol": tol, "max_rel_err": worst, "cells": cells})


@_timed
def check_moments_connection(tol: float = 1e-6, slow: bool = False, slow_tol: float = 1e-3) -> CriterionResult:
    """Row moments from quadrature, combined by the binomial formula, against the series."""
    cells = []
    ok = True
    for beta in (1.0, 2.0, 4.0):
        for tau in (1.0, 2.0):
            e = [hp_row_moment(k, beta, tau, 2) for k in (1, 2)]
            got = moments_connection([r.value for r in e])
            want = float(x_moment_limit(beta, tau, 1))
            err = abs(got - want)
            ok &= err <= tol
            cells.append(
                {"beta": beta, "tau": tau, "E1": e[0].value, "E2": e[1].value, "combined": got, "limit": want, "abs_err": err}
            )
    details: dict = {"tol": tol, "cells": cells}
    if slow:
        # h = 2 at beta = 2, tau = 3: k <= 3 by quadrature, k = 4 exactly
        quad = [hp_row_moment(k, 2.0, 3.0, 4, slow=True) for k in (1, 2, 3)]
        exact = [hp_row_moment_exact(k, 2, 3, 4) for k in (1, 2, 3, 4)]
        mixed = [r.value for r in quad] + [float(exact[3])]
        got = moments_connection(mixed)
        want = float(x_moment_limit(2, 3, 2))
        err = abs(got - want) / abs(want)
        exact_err = abs(float(moments_connection(exact)) - want) / abs(want)
        ok &= err <= slow_tol and exact_err <= 1e-12
        details["h2"] = {
            "tol": slow_tol,
            "quadrature_rows": [r.value for r in quad],
            "exact_rows": [str(x) for x in exact],
            "combined": got,
            "combined_exact": str(moments_connection(exact)),
            "limit": want,
            "rel_err": err,
        }
    return CriterionResult("3", "binomial moment connection vs quadrature", ok, details)


@_timed
def check_da_normalization(tol1: float = 1e-8, tol2: float = 1e-6) -> CriterionResult:
    """Total mass of the Dixon-Anderson kernel."""
    cells = []
    ok = True
    configs = {1: [(1.0, 0.0), (2.5, -1.0)], 2: [(2.0, 1.0, 0.0), (3.0, 0.5, -1.0)]}
    for beta in (1.0, 2.0, 4.0):
        for n, ys in configs.items():
            for y in ys:
                r = da_normalization(beta, y)
                tol = tol1 if n == 1 else tol2
                err = abs(r.value - 1.0)
                ok &= err <= tol
                cells.append({"beta": beta, "N": n, "y": list(y), "value": r.value, "bound": r.error_bound, "abs_err": err})
    return CriterionResult("4", "Dixon-Anderson normalization", ok, {"cells": cells})


@_timed
def check_consistency(tol: float = 1e-5, threads: int = 1) -> CriterionResult:
    """Push-forward of the two-point law equals the one-point law."""
    cells = []
    ok = True
    hp_grid = np.linspace(-3.0, 3.0, 21)
    il_grid = 6.0 * np.arange(1, 22) / 21
    for beta in (1.0, 2.0):
        for tau in (1.0, 2.0):
            dev = consistency_marginal("hua-pickrell", beta, tau, hp_grid, threads=threads)
            ok &= dev < tol
            cells.append({"kind": "hua-pickrell", "beta": beta, "tau": tau, "sup_dev": dev})
    dev = consistency_marginal("inverse-laguerre", 2.0, 2.0, il_grid, threads=threads)
    ok &= dev < tol
    cells.append({"kind": "inverse-laguerre", "beta": 2.0, "nu": 2.0, "sup_dev": dev})
    return CriterionResult("5", "consistency of measure families", ok, {"tol": tol, "cells": cells})


# ---------------------------------------------------------------------------
# 6: convergence witness
# ---------------------------------------------------------------------------


@_timed
def check_convergence(seed: int = 0, threads: int = 1, draws: int = 200_000, n_sigma: float = 3.0) -> CriterionResult:
    """MC trace second moments at N = 5, 10, 20 (tau = 2) against exact finite-N values."""
    n_chains = 400
    cfg = ChainConfig(n_chains=n_chains, n_draws=max(1, draws // n_chains), burn_in=400, thin=4, threads=threads)
    tables = {}
    ok = True
    for i, beta in enumerate((1.0, 2.0, 4.0)):
        rows = convergence_table(beta, 2.0, (5, 10, 20), 1, cfg, seed=seed + 17 * i)
        dist = [abs(r["reference"] - r["limit"]) for r in rows]
        monotone = all(b < a for a, b in zip(dist[:-1], dist[1:]))
        inside = all(abs(r["estimate"] - r["reference"]) <= n_sigma * r["stderr"] for r in rows)
        ok &= monotone and inside
        tables[str(beta)] = {"rows": rows, "distance_to_limit": dist, "monotone": monotone, "within_band": inside}
    return CriterionResult(
        "6",
        "convergence witness for trace moments",
        ok,
        {"tables": tables, "draws_per_N": cfg.total_draws},
        note="bands are around exact finite-N values; the limit itself is not asserted",
    )


# ---------------------------------------------------------------------------
# 7: asymptotic constant
# ---------------------------------------------------------------------------

_F0_CELLS = ((2.0, 0.0, 1.0), (2.0, 0.0, 2.0), (1.0, 0.5, 1.0), (4.0, 0.0, 1.0))


def _richardson(beta: float, delta: float, s: float, exponent: float, Ns=(100, 200, 400)) -> float:
    L = [math.log(cjbe_finite_f0(N, beta, delta, s)) - exponent * math.log(N) for N in Ns]
    r1 = [2 * L[1] - L[0], 2 * L[2] - L[1]]
    return (4 * r1[1] - r1[0]) / 3


def _asymptotic(corrected: bool, tol: float) -> CriterionResult:
    cells = []
    ok = True
    for beta, delta, s in _F0_CELLS:
        expo = f0_growth_exponent(beta, delta, s) if corrected else 2 * s * s / beta
        extrap = _richardson(beta, delta, s, expo)
        target = math.log(f0_limit(beta, delta, s))
        err = abs(extrap - target)
        ok &= err <= tol
        cells.append(
            {"beta": beta, "delta": delta, "s": s, "exponent": expo, "extrapolated": extrap, "log_f0_limit": target, "abs_err": err}
        )
    return CriterionResult("", "", ok, {"tol": tol, "cells": cells})


@_timed
def check_asymptotic_constant(tol: float = 1e-2) -> CriterionResult:
    """Morris-ratio asymptotics with exponent ``2 s^2 / beta`` (as stated)."""
    r = _asymptotic(False, tol)
    r.key, r.title = "7", "asymptotic constant, exponent 2s^2/beta"
    if not r.passed:
        r.note = "nonzero delta adds 4 s Re(delta)/beta to the exponent; see criterion 7*"
    return r


@_timed
def check_asymptotic_constant_corrected(tol: float = 1e-2) -> CriterionResult:
    """Morris-ratio asymptotics with the full exponent ``2s^2/beta + 4 s Re(delta)/beta``."""
    r = _asymptotic(True, tol)
    r.key, r.title = "7*", "asymptotic constant, exponent 2s^2/beta + 4s Re(delta)/beta"
    return r


# ---------------------------------------------------------------------------
# 8, 10: Laguerre and Jacobi calibration
# ---------------------------------------------------------------------------

_CAL_NU = 3.0


def _calibration_cells(nu: float = _CAL_NU) -> list[dict]:
    cells = []
    for N in (1, 2):
        for r in (1, 2):
            for beta in (1.0, 2.0, 3.0, 4.0):
                o = inv_laguerre_moment(N, beta, nu, r)
                printed = float(laguerre_finite_moment(beta, nu, N, r, "as-printed"))
                calibrated = float(laguerre_finite_moment(beta, nu, N, r, "oracle-calibrated"))
                cells.append(
                    {
                        "N": N,
                        "r": r,
                        "beta": beta,
                        "nu": nu,
                        "oracle": o.value,
                        "oracle_bound": o.error_bound,
                        "as_printed": printed,
                        "calibrated": calibrated,
                        "ratio_oracle_over_printed": o.value / printed,
                    }
                )
    return cells


@_timed
def check_laguerre_calibration(tol: float = 1e-6) -> CriterionResult:
    """Fit one global constant relating oracle values to the printed formula."""
    cells = _calibration_cells()
    ratios = np.array([c["ratio_oracle_over_printed"] for c in cells])
    const = float(np.exp(np.log(ratios).mean()))
    resid = float(np.abs(ratios / const - 1).max())
    return CriterionResult(
        "8",
        "single global constant, oracle vs printed inverse-Laguerre moments",
        resid < tol,
        {"tol": tol, "fitted_constant": const, "max_rel_residual": resid, "cells": cells},
        note="" if resid < tol else "ratios depend on (N, r, beta); no single constant exists, see criterion 8*",
    )


@_timed
def check_laguerre_reconciled(tol: float = 1e-6) -> CriterionResult:
    """Reconciled formula (prefactor ``(4/beta)^r r!``, arm multiplier ``2/beta``) vs oracle."""
    cells = _calibration_cells()
    errs = [abs(c["calibrated"] / c["oracle"] - 1) for c in cells]
    worst = max(errs)
    return CriterionResult(
        "8*",
        "reconciled inverse-Laguerre formula vs oracle",
        worst < tol,
        {"tol": tol, "max_rel_err": worst, "cells": cells},
    )


@_timed
def check_jacobi(tol: float = 1e-10, const_tol: float = 1e-8) -> CriterionResult:
    """Jacobi inverse moment: beta = 2 closed form and formula/oracle ratios at beta = 1, 4."""
    grid = [(nu, mu) for nu in (1.5, 2.0, 3.0) for mu in (0.0, 0.5, 1.0)]
    cells = []
    ok = True
    for nu, mu in grid:
        f = float(jacobi_inverse_moment(2, nu, mu, 1, 1, "as-printed"))
        want = (nu + mu + 1) / nu
        err = abs(f - want)
        ok &= err <= tol
        cells.append({"beta": 2.0, "nu": nu, "mu": mu, "formula": f, "closed": want, "abs_err": err})
    ratios = {}
    for beta in (1.0, 4.0):
        rs = []
        for nu, mu in grid:
            o = jacobi_moment_oracle(1, beta, nu, mu, 1)
            rs.append(float(jacobi_inverse_moment(beta, nu, mu, 1, 1, "as-printed")) / o.value)
        spread = max(rs) / min(rs) - 1
        ok &= spread <= const_tol
        ratios[str(beta)] = {"ratios": rs, "constant": float(np.mean(rs)), "spread": spread}
    return CriterionResult("10", "Jacobi inverse moment", ok, {"cells": cells, "ratios_printed_over_oracle": ratios})


# ---------------------------------------------------------------------------
# 9: exchangeability and martingale
# ---------------------------------------------------------------------------


@_timed
def check_arrays(seed: int = 0, n_arrays: int = 10_000, depth: int = 20, alpha: float = 0.01) -> CriterionResult:
    """Exchangeable diagonal entries and constant-mean row averages."""
    runs = [
        ("hua-pickrell", EnsembleSpec.hua_pickrell(depth, 2.0, 1.0), 2, 0.0),
        ("inverse-laguerre", EnsembleSpec.inverse_laguerre(depth, 4.0, 2.0), 3, 1.0),
    ]
    ok = True
    details = {}
    for i, (name, spec, k, mean) in enumerate(runs):
        batch = sample_arrays(spec, n_arrays, seed=seed + 101 * i)
        ex = exchangeability_test(batch, k, alpha=alpha)
        mart = martingale_check(batch, (1, 2, 5, 10, depth), expected_mean=mean)
        inter = batch.interlaces(1e-9)
        ok &= ex["passed"] and mart["passed"] and inter
        details[name] = {
            "exchangeability": ex,
            "martingale": mart,
            "interlaces": inter,
            "sampler": batch.diagnostics,
        }
    return CriterionResult("9", "exchangeability and martingale suites", ok, details)


CHECKS: dict[str, Callable[..., CriterionResult]] = {
    "1": check_second_moment,
    "2": check_forrester,
    "3": check_moments_connection,
    "4": check_da_normalization,
    "5": check_consistency,
    "6": check_convergence,
    "7": check_asymptotic_constant,
    "7*": check_asymptotic_constant_corrected,
    "8": check_laguerre_calibration,
    "8*": check_laguerre_reconciled,
    "9": check_arrays,
    "10": check_jacobi,
}

SUITES: dict[str, tuple[str, ...]] = {
    "identities": ("1", "2", "3", "4", "5", "7", "7*", "10"),
    "convergence": ("6", "7", "7*"),
    "exchangeability": ("9",),
    "laguerre-calibration": ("8", "8*", "10"),
    "all": ("1", "2", "3", "4", "5", "6", "7", "7*", "8", "8*", "9", "10"),
}

_USES_SEED = {"6", "9"}
_USES_THREADS = {"5", "6"}


def run_suite(name: str, *, seed: int = 0, threads: int = 1, slow: bool = False, echo=None) -> list[CriterionResult]:
    """Run a named suite; ``echo`` (if given) receives each result line as it completes."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    out = []
    for key in SUITES[name]:
        kwargs: dict = {}
        if key in _USES_SEED:
            kwargs["seed"] = seed
        if key in _USES_THREADS:
            kwargs["threads"] = threads
        if key == "3":
            kwargs["slow"] = slow
        res = CHECKS[key](**kwargs)
        out.append(res)
        if echo is not None:
            echo(res.line())
    return out
