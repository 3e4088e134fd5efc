"""Command-line interface.

Usage::

    jointmoments limits second-moment --beta 2 --tau 1
    jointmoments oracle da-norm --beta 2 --y 1,0
    jointmoments sample hp --N 8 --beta 2 --tau 1 --output draws.csv
    jointmoments verify all --seed 0

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
domain error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import Sequence

import numpy as np

from . import io as jio
from . import limits, oracle, verify
from .ensembles import EnsembleSpec, make_rng, sample_arrays, sample_da, sample_laguerre_tridiag
from .errors import DomainError, JointMomentsError, QuadratureError
from .mcmc import ChainConfig, sample_mcmc

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _grid(text: str) -> list[float]:
    """``a:b:n`` (inclusive linspace) or a comma-separated list."""
    if ":" in text:
        try:
            a, b, n = text.split(":")
            return list(np.linspace(float(a), float(b), int(n)))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad grid {text!r}; use a:b:n") from exc
    return _floats(text)


def _complex_arg(p: argparse.ArgumentParser, name: str, default: float | None = None, required: bool = False) -> None:
    p.add_argument(f"--{name}", f"--{name}-re", dest=f"{name}_re", type=float, default=default, required=required,
                   help=f"real part of {name}")
    p.add_argument(f"--{name}-im", dest=f"{name}_im", type=float, default=0.0, help=f"imaginary part of {name}")


def _cplx(ns, name: str) -> complex | float:
    re, im = getattr(ns, f"{name}_re"), getattr(ns, f"{name}_im")
    return re if im == 0 else complex(re, im)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)


def _chain_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--chains", type=int, default=64)
    p.add_argument("--draws", type=int, default=500, help="kept draws per chain")
    p.add_argument("--burn-in", type=int, default=400)
    p.add_argument("--thin", type=int, default=4)
    p.add_argument("--scale", type=float, default=None, help="initial proposal scale")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="jointmoments", description=__doc__.split("\n\n")[0])
    groups = top.add_subparsers(dest="group", required=True)

    # limits -------------------------------------------------------------
    g = groups.add_parser("limits", help="limiting moment formulas").add_subparsers(dest="cmd", required=True)
    p = g.add_parser("x-moment", help="E[X^(2h)] partition sum")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--exact", action="store_true", help="exact rational arithmetic")
    _common(p)
    p = g.add_parser("second-moment", help="closed-form E[X^2]")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--tau", type=float, required=True)
    _common(p)
    p = g.add_parser("f0", help="limiting constant F(s, 0)")
    p.add_argument("--beta", type=float, required=True)
    _complex_arg(p, "delta", 0.0)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--form", choices=("corrected", "as-printed"), default="corrected")
    _common(p)
    p = g.add_parser("forrester", help="integer-s joint moment")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--h", type=float, required=True)
    _common(p)
    p = g.add_parser("f", help="joint moment F(s, h) for integer h")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--h", type=int, required=True)
    _common(p)
    p = g.add_parser("y-moment", help="E[Y^r] inverse-Laguerre limit")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--calibration", choices=limits._CALIBRATIONS, default=limits.DEFAULT_CALIBRATION)
    _common(p)

    # finite -------------------------------------------------------------
    g = groups.add_parser("finite", help="finite-N exact formulas").add_subparsers(dest="cmd", required=True)
    p = g.add_parser("cjbe-f0", help="F_N(s, 0) from Morris integrals")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    _complex_arg(p, "delta", 0.0)
    p.add_argument("--s", type=float, required=True)
    _common(p)
    p = g.add_parser("laguerre", help="inverse-Laguerre row-sum moment")
    for name, typ in (("beta", float), ("nu", float), ("N", int), ("r", int)):
        p.add_argument(f"--{name}", type=typ, required=True)
    p.add_argument("--calibration", choices=limits._CALIBRATIONS, default=limits.DEFAULT_CALIBRATION)
    _common(p)
    p = g.add_parser("jacobi", help="Jacobi inverse moment")
    for name, typ in (("beta", float), ("nu", float), ("mu", float), ("N", int), ("r", int)):
        p.add_argument(f"--{name}", type=typ, required=True)
    p.add_argument("--calibration", choices=limits._CALIBRATIONS, default=limits.DEFAULT_CALIBRATION)
    _common(p)

    # sample -------------------------------------------------------------
    g = groups.add_parser("sample", help="draw samples").add_subparsers(dest="cmd", required=True)
    p = g.add_parser("hp", help="Hua-Pickrell ensemble (Metropolis)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    _complex_arg(p, "tau", required=True)
    _chain_args(p)
    _common(p)
    p = g.add_parser("cjbe", help="circular Jacobi ensemble angles (Metropolis)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    _complex_arg(p, "delta", 0.0)
    _chain_args(p)
    _common(p)
    p = g.add_parser("laguerre", help="Laguerre ensemble (bidiagonal model)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--n", type=int, default=10_000, help="number of draws")
    _common(p)
    p = g.add_parser("array", help="interlacing arrays")
    p.add_argument("--kind", choices=("hua-pickrell", "inverse-laguerre"), required=True)
    p.add_argument("--N", type=int, required=True, help="depth")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--n", type=int, default=1000, help="number of arrays")
    p.add_argument("--summary", choices=("diagonal", "averages", "top"), default="diagonal",
                   help="per-array quantity written out")
    _common(p)
    p = g.add_parser("da", help="Dixon-Anderson kernel draws")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--y", type=_floats, required=True, help="comma-separated decreasing points")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--method", choices=("dirichlet", "gibbs"), default="dirichlet")
    _common(p)

    # oracle -------------------------------------------------------------
    g = groups.add_parser("oracle", help="quadrature ground truth").add_subparsers(dest="cmd", required=True)
    p = g.add_parser("cauchy", help="1-d Cauchy moment")
    for name, typ in (("m", int), ("beta", float), ("N", int), ("tau", float)):
        p.add_argument(f"--{name}", type=typ, required=True)
    _common(p)
    p = g.add_parser("hp-moment", help="E_k[(sum x)^power] by quadrature")
    for name, typ in (("k", int), ("beta", float), ("tau", float), ("power", int)):
        p.add_argument(f"--{name}", type=typ, required=True)
    p.add_argument("--slow", action="store_true", help="allow k = 3")
    _common(p)
    p = g.add_parser("invlag-moment", help="inverse-Laguerre moment by quadrature")
    for name, typ in (("N", int), ("beta", float), ("nu", float), ("r", int)):
        p.add_argument(f"--{name}", type=typ, required=True)
    _common(p)
    p = g.add_parser("da-norm", help="Dixon-Anderson kernel mass")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--y", type=_floats, required=True)
    _common(p)
    p = g.add_parser("consistency", help="push-forward vs one-point density")
    p.add_argument("--kind", choices=("hua-pickrell", "inverse-laguerre"), required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--param", type=float, required=True, help="tau or nu")
    p.add_argument("--grid", type=_grid, default=None, help="a:b:n or comma list")
    _common(p)

    # verify -------------------------------------------------------------
    p = groups.add_parser("verify", help="acceptance suites")
    p.add_argument("suite", choices=tuple(verify.SUITES))
    p.add_argument("--slow", action="store_true", help="include the gated slow checks")
    _common(p)
    return top


def _spec_echo(ns: argparse.Namespace) -> dict:
    skip = {"format", "output", "threads", "group", "cmd"}
    return {k: (v if not isinstance(v, float) or np.isfinite(v) else None) for k, v in vars(ns).items() if k not in skip}


def _emit(ns, rows: list[dict], result, diagnostics=None, spec=None) -> None:
    spec = spec if spec is not None else _spec_echo(ns)
    command = f"{ns.group} {getattr(ns, 'cmd', None) or getattr(ns, 'suite', '')}".strip()
    if ns.format == "json":
        diag = dict(diagnostics or {}, provenance=jio.provenance(ns.seed, None, command))
        jio.write_json(spec, result, diag, ns.output)
    else:
        jio.write_csv(rows, ns.output, jio.provenance(ns.seed, spec, command))


def _scalar(ns, value, **extra) -> int:
    row = dict(extra, value=value)
    _emit(ns, [row], row)
    return EXIT_OK


def _chain_config(ns) -> ChainConfig:
    return ChainConfig(n_chains=ns.chains, n_draws=ns.draws, burn_in=ns.burn_in, thin=ns.thin,
                       proposal_scale=ns.scale, threads=ns.threads)


def _run_limits(ns) -> int:
    c = ns.cmd
    if c == "x-moment":
        v = limits.x_moment_limit(ns.beta, ns.tau, ns.h, exact=True if ns.exact else None)
        return _scalar(ns, float(v), exact=str(v) if ns.exact else None)
    if c == "second-moment":
        return _scalar(ns, limits.x_second_moment_closed(ns.beta, ns.tau))
    if c == "f0":
        return _scalar(ns, limits.f0_limit(ns.beta, _cplx(ns, "delta"), ns.s, form=ns.form))
    if c == "forrester":
        return _scalar(ns, float(limits.forrester_joint_moment(ns.beta, ns.s, ns.h)))
    if c == "f":
        params = limits.JointMomentParams(ns.beta, ns.delta, ns.s, ns.h)
        return _scalar(ns, limits.f_limit(params))
    if c == "y-moment":
        return _scalar(ns, float(limits.y_moment_limit(ns.beta, ns.nu, ns.r, ns.calibration)))
    raise UsageError(c)


def _run_finite(ns) -> int:
    c = ns.cmd
    if c == "cjbe-f0":
        return _scalar(ns, limits.cjbe_finite_f0(ns.N, ns.beta, _cplx(ns, "delta"), ns.s))
    if c == "laguerre":
        return _scalar(ns, float(limits.laguerre_finite_moment(ns.beta, ns.nu, ns.N, ns.r, ns.calibration)))
    if c == "jacobi":
        return _scalar(ns, float(limits.jacobi_inverse_moment(ns.beta, ns.nu, ns.mu, ns.N, ns.r, ns.calibration)))
    raise UsageError(c)


def _write_points(ns, points: np.ndarray, spec, diagnostics) -> int:
    points = np.atleast_2d(points)
    if ns.format == "json":
        jio.write_json(spec, {"points": points}, dict(diagnostics, provenance=jio.provenance(ns.seed)), ns.output)
    elif ns.output:
        jio.write_samples(points, ns.output, spec, ns.seed, diagnostics)
    else:
        names = [f"x{i + 1}" for i in range(points.shape[1])]
        jio.write_csv(({k: v for k, v in zip(names, r)} for r in points), None,
                      jio.provenance(ns.seed, jio.to_jsonable(spec)))
    return EXIT_OK


def _run_sample(ns) -> int:
    c = ns.cmd
    if c in ("hp", "cjbe"):
        spec = (EnsembleSpec.hua_pickrell(ns.N, ns.beta, _cplx(ns, "tau")) if c == "hp"
                else EnsembleSpec.circular_jacobi(ns.N, ns.beta, _cplx(ns, "delta")))
        res = sample_mcmc(spec, _chain_config(ns), seed=ns.seed)
        diag = dict(res.diagnostics, chain_config=res.config.to_dict())
        return _write_points(ns, res.flat, spec, diag)
    if c == "laguerre":
        spec = EnsembleSpec.laguerre(ns.N, ns.beta, ns.nu)
        pts = sample_laguerre_tridiag(ns.N, ns.beta, ns.nu, make_rng(ns.seed), size=ns.n)
        return _write_points(ns, pts, spec, {"sampler": "bidiagonal"})
    if c == "array":
        if ns.kind == "hua-pickrell":
            if ns.tau is None:
                raise UsageError("--tau is required for hua-pickrell arrays")
            spec = EnsembleSpec.hua_pickrell(ns.N, ns.beta, ns.tau)
        else:
            if ns.nu is None:
                raise UsageError("--nu is required for inverse-laguerre arrays")
            spec = EnsembleSpec.inverse_laguerre(ns.N, ns.beta, ns.nu)
        batch = sample_arrays(spec, ns.n, seed=ns.seed)
        pts = {"diagonal": batch.diagonals, "averages": batch.averages}.get(ns.summary, lambda: batch.rows[-1])()
        return _write_points(ns, pts, spec, dict(batch.diagnostics, summary=ns.summary))
    if c == "da":
        y = np.asarray(ns.y, dtype=float)
        pts = sample_da(ns.beta, np.broadcast_to(y, (ns.n, y.size)), make_rng(ns.seed), method=ns.method)
        return _write_points(ns, pts, {"kernel": "dixon-anderson", "beta": ns.beta, "y": ns.y}, {"method": ns.method})
    raise UsageError(c)


def _quad(ns, r: oracle.QuadResult) -> int:
    row = {"value": r.value, "error_bound": r.error_bound, "evaluations": r.evaluations, "closed_form": r.closed_form}
    _emit(ns, [row], row)
    return EXIT_OK


def _run_oracle(ns) -> int:
    c = ns.cmd
    if c == "cauchy":
        return _quad(ns, oracle.cauchy_moment_1d(ns.m, ns.beta, ns.N, ns.tau))
    if c == "hp-moment":
        return _quad(ns, oracle.hp_row_moment(ns.k, ns.beta, ns.tau, ns.power, slow=ns.slow))
    if c == "invlag-moment":
        return _quad(ns, oracle.inv_laguerre_moment(ns.N, ns.beta, ns.nu, ns.r))
    if c == "da-norm":
        return _quad(ns, oracle.da_normalization(ns.beta, ns.y))
    if c == "consistency":
        grid = ns.grid
        if grid is None:
            grid = list(np.linspace(-3, 3, 21)) if ns.kind == "hua-pickrell" else list(6.0 * np.arange(1, 22) / 21)
        dev, vals = oracle.consistency_marginal(ns.kind, ns.beta, ns.param, grid, threads=ns.threads,
                                                return_values=True)
        rows = [{"x": x, "pushed": a, "direct": b, "abs_diff": abs(a - b)} for x, (a, b) in zip(grid, vals)]
        if ns.format == "json":
            _emit(ns, rows, {"sup_deviation": dev, "points": rows})
        else:
            _emit(ns, rows, None)
        return EXIT_OK
    raise UsageError(c)


def _run_verify(ns) -> int:
    t0 = time.perf_counter()
    results = verify.run_suite(ns.suite, seed=ns.seed, threads=ns.threads, slow=ns.slow,
                               echo=lambda line: print(line, file=sys.stderr, flush=True))
    ok = all(r.passed for r in results)
    summary = {"suite": ns.suite, "passed": ok, "elapsed": time.perf_counter() - t0}
    if ns.format == "json":
        _emit(ns, [], {"summary": summary, "criteria": results})
    else:
        rows = [{"criterion": r.key, "title": r.title, "passed": r.passed, "elapsed": r.elapsed, "note": r.note}
                for r in results]
        _emit(ns, rows, None)
    return EXIT_OK if ok else EXIT_FAIL


_DISPATCH = {
    "limits": _run_limits,
    "finite": _run_finite,
    "sample": _run_sample,
    "oracle": _run_oracle,
    "verify": _run_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors itself
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if getattr(ns, "threads", 1) < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _DISPATCH[ns.group](ns)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, QuadratureError, ArithmeticError) as exc:
        print(f"numerical domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, JointMomentsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
