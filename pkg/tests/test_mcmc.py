import warnings

import numpy as np
import pytest

from jointmoments.ensembles import EnsembleSpec, make_rng
from jointmoments.errors import ConvergenceWarning
from jointmoments.mcmc import ChainConfig, MCMCResult, sample_mcmc, split_rhat

SMALL = ChainConfig(n_chains=32, n_draws=200, burn_in=200, thin=4)


def test_config_validation():
    with pytest.raises(ValueError):
        ChainConfig(n_chains=0)
    with pytest.raises(ValueError):
        ChainConfig(burn_in=-1)
    assert ChainConfig(n_chains=4, n_draws=5).total_draws == 20
    assert ChainConfig().to_dict()["thin"] == 4


def test_split_rhat():
    rng = make_rng(0)
    assert split_rhat(rng.standard_normal((8, 1000))) == pytest.approx(1.0, abs=0.01)
    shifted = rng.standard_normal((8, 1000)) + np.arange(8)[:, None]
    assert split_rhat(shifted) > 1.5
    assert np.isnan(split_rhat(np.zeros((4, 3))))


def test_deterministic_given_seed_and_thread_invariant():
    spec = EnsembleSpec.hua_pickrell(3, 2.0, 1.0)
    a = sample_mcmc(spec, SMALL, seed=11)
    b = sample_mcmc(spec, ChainConfig(n_chains=32, n_draws=200, burn_in=200, thin=4, block_size=8, threads=3), seed=11)
    np.testing.assert_array_equal(a.points, b.points)
    c = sample_mcmc(spec, SMALL, seed=12)
    assert not np.array_equal(a.points, c.points)


def test_result_layout():
    spec = EnsembleSpec.laguerre(4, 2.0, 1.0)
    res = sample_mcmc(spec, SMALL, seed=0)
    assert isinstance(res, MCMCResult)
    assert res.points.shape == (32, 200, 4)
    assert res.flat.shape == (6400, 4)
    assert np.all(np.diff(res.points, axis=-1) <= 0)  # sorted descending
    assert np.all(res.points > 0)
    assert 0.15 < float(np.mean(res.acceptance)) < 0.7


def test_hp_one_point_second_moment():
    # N = 1, tau = 1: density proportional to (1 + x^2)^-2, so E[x^2] = 1
    res = sample_mcmc(EnsembleSpec.hua_pickrell(1, 2.0, 1.0), ChainConfig(n_chains=64, n_draws=500), seed=1)
    x2 = res.points[..., 0] ** 2
    means = x2.mean(axis=1)
    se = means.std(ddof=1) / np.sqrt(means.size)
    assert abs(x2.mean() - 1.0) < 4 * se


@pytest.mark.parametrize("beta", [1.0, 4.0])
def test_laguerre_mcmc_matches_exact_mean(beta):
    N, nu = 3, 2.0
    res = sample_mcmc(EnsembleSpec.laguerre(N, beta, nu), ChainConfig(n_chains=64, n_draws=400), seed=2)
    s = res.points.sum(axis=-1)
    means = s.mean(axis=1)
    se = means.std(ddof=1) / np.sqrt(means.size)
    expected = N * (nu + 1) + beta * N * (N - 1) / 2
    assert abs(s.mean() - expected) < 4 * se


def test_inverse_laguerre_mean():
    # E[sum x] = 2 E[sum 1/lambda]; for N = 1, 2 / nu
    nu = 3.0
    res = sample_mcmc(EnsembleSpec.inverse_laguerre(1, 2.0, nu), ChainConfig(n_chains=64, n_draws=400), seed=3)
    x = res.points[..., 0]
    means = x.mean(axis=1)
    assert abs(x.mean() - 2 / nu) < 4 * means.std(ddof=1) / np.sqrt(means.size)


def test_cjbe_angles_in_range():
    res = sample_mcmc(EnsembleSpec.circular_jacobi(4, 2.0, 0.5), SMALL, seed=4)
    assert np.all((res.points >= 0) & (res.points < 2 * np.pi))


def test_convergence_warning_for_starved_chains():
    cfg = ChainConfig(n_chains=4, n_draws=8, burn_in=0, thin=1, proposal_scale=50.0)
    with pytest.warns(ConvergenceWarning):
        sample_mcmc(EnsembleSpec.laguerre(6, 2.0, 1.0), cfg, seed=0)


def test_no_warning_for_default_run():
    with warnings.catch_warnings():
        warnings.simplefilter("error", ConvergenceWarning)
        sample_mcmc(EnsembleSpec.hua_pickrell(4, 2.0, 2.0), SMALL, seed=5)
