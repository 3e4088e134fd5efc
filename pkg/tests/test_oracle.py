"""Quadrature oracles against frozen values and independent closed forms.

The frozen numbers were produced by these oracles and cross-checked
against exact rational expansions (even beta), Gamma-function closed
forms, or the limit formulas; they pin regressions in the quadrature
plumbing.
"""

import json
import math
from fractions import Fraction

import pytest

from jointmoments.ensembles import hp_log_norm_const
from jointmoments.errors import DomainError
from jointmoments.limits import jacobi_inverse_moment, laguerre_finite_moment, moments_connection, x_moment_limit
from jointmoments.oracle import (
    QuadResult,
    cauchy_moment_1d,
    consistency_marginal,
    da_normalization,
    hp_partition_function,
    hp_row_moment,
    hp_row_moment_exact,
    inv_laguerre_moment,
    jacobi_moment_oracle,
    report_json,
)

# (k, beta, tau, power) -> E_k[(x_1 + ... + x_k)^power]
FROZEN_HP = {
    (1, 2.0, 1.0, 2): 1.0,
    (2, 2.0, 1.0, 2): 2.666666666666666,  # 8/3
    (2, 1.0, 2.0, 2): 0.7407407407407409,  # 20/27
    (2, 4.0, 2.0, 4): 6.400000000000001,  # 32/5
    (1, 1.0, 2.0, 0): 1.0,
}

# (N, beta, nu, r) -> inverse-Laguerre E[(x_1 + ... + x_N)^r]
FROZEN_IL = {
    (1, 2.0, 3.0, 1): 0.6666666666666666,
    (2, 2.0, 3.0, 2): 2.333333333333339,
    (2, 1.0, 3.0, 2): 2.28571428571429,
    (2, 4.0, 3.0, 1): 1.333333333333332,
}

# (N, beta, nu, mu, r) -> Jacobi E[(sum 1/x_i)^r]
FROZEN_JACOBI = {
    (2, 1.0, 2.0, 1.0, 1): 4.500000000000002,
    (2, 4.0, 1.5, 0.5, 2): 93.33333333333337,
}


@pytest.mark.parametrize("args,value", FROZEN_HP.items(), ids=str)
def test_hp_row_moment_frozen(args, value):
    r = hp_row_moment(*args)
    assert r.value == pytest.approx(value, rel=1e-12, abs=1e-14)
    assert r.error_bound < 1e-6
    if r.closed_form is not None:
        assert r.agrees


@pytest.mark.parametrize("args,value", FROZEN_IL.items(), ids=str)
def test_inverse_laguerre_frozen(args, value):
    r = inv_laguerre_moment(*args)
    assert r.value == pytest.approx(value, rel=1e-12)
    N, beta, nu, rr = args
    # the reconciled formula reproduces the oracle
    assert laguerre_finite_moment(beta, nu, N, rr) == pytest.approx(r.value, rel=1e-10)


@pytest.mark.parametrize("args,value", FROZEN_JACOBI.items(), ids=str)
def test_jacobi_frozen(args, value):
    N, beta, nu, mu, r = args
    q = jacobi_moment_oracle(*args)
    assert q.value == pytest.approx(value, rel=1e-12)
    assert jacobi_inverse_moment(beta, nu, mu, N, r) == pytest.approx(q.value, rel=1e-9)


def test_hp_partition_function_matches_normalization():
    for N, beta, tau in [(1, 2.0, 1.0), (2, 2.0, 1.0), (2, 1.0, 0.5), (2, 4.0, 2.0)]:
        assert hp_partition_function(N, beta, tau).value == pytest.approx(
            math.exp(hp_log_norm_const(N, beta, tau)), rel=1e-12
        )


def test_cauchy_closed_form():
    r = cauchy_moment_1d(1, 2.0, 3, 1.0)
    assert r.value == pytest.approx(math.pi / 16, rel=1e-13)
    assert r.agrees
    with pytest.raises(DomainError):
        cauchy_moment_1d(3, 1.0, 1, 0.5)


def test_exact_expansion():
    assert hp_row_moment_exact(2, 2, 1, 2) == Fraction(8, 3)
    assert hp_row_moment_exact(1, 4, 2, 2) == Fraction(1, 3)
    with pytest.raises(DomainError):
        hp_row_moment_exact(2, 3, 1, 2)


def test_exact_moments_connection_h2():
    # beta = 2, tau = 3: the k = 1..4 row moments recover E[X^4] = 1/315 exactly
    m = [hp_row_moment_exact(k, 2, 3, 4) for k in range(1, 5)]
    assert m[2] == Fraction(87, 35) and m[3] == Fraction(16, 3)
    assert moments_connection(m) == Fraction(1, 315) == x_moment_limit(2, 3, 2, exact=True)


def test_moments_connection_with_quadrature_inputs():
    for beta in (1.0, 2.0, 4.0):
        m = [hp_row_moment(k, beta, 2.0, 2).value for k in (1, 2)]
        assert moments_connection(m) == pytest.approx(x_moment_limit(beta, 2.0, 1), abs=1e-10)


def test_k3_requires_slow_flag():
    with pytest.raises(ValueError):
        hp_row_moment(3, 2.0, 3.0, 4)
    with pytest.raises(DomainError):
        hp_row_moment(1, 2.0, 1.0, 4)  # E[x^4] diverges at tau = 1


@pytest.mark.slow
def test_k3_quadrature_against_exact():
    r = hp_row_moment(3, 2.0, 3.0, 4, slow=True)
    assert r.value == pytest.approx(87 / 35, rel=1e-6)
    assert r.agrees


@pytest.mark.parametrize("beta,y", [(1.0, [1.0, 0.0]), (2.0, [3.0, -1.0]), (4.0, [2.0, 0.5, -1.0]), (1.0, [1.0, 0.2, 0.0])])
def test_da_normalization(beta, y):
    r = da_normalization(beta, y)
    assert r.value == pytest.approx(1.0, abs=1e-10)
    assert r.closed_form == 1.0


def test_consistency_hp_values():
    dev, vals = consistency_marginal("hua-pickrell", 2.0, 1.0, [0.0, 0.5, 1.0], return_values=True)
    assert dev < 1e-12
    # one-point density at tau = 1 is (2/pi)(1 + x^2)^-2
    for x, (_, direct) in zip([0.0, 0.5, 1.0], vals):
        assert direct == pytest.approx(2 / math.pi / (1 + x * x) ** 2, rel=1e-13)


def test_consistency_inverse_laguerre():
    assert consistency_marginal("inverse-laguerre", 2.0, 2.0, [0.5, 1.0, 3.0], threads=2) < 1e-12


def test_consistency_negative_control():
    # pushing forward the tau = 1 two-point law does NOT give the tau = 1.2 one-point law
    _, pushed = consistency_marginal("hua-pickrell", 2.0, 1.0, [0.0, 0.5, 1.0], return_values=True)
    _, direct = consistency_marginal("hua-pickrell", 2.0, 1.2, [0.0, 0.5, 1.0], return_values=True)
    assert max(abs(p[0] - d[1]) for p, d in zip(pushed, direct)) > 1e-2
    with pytest.raises(DomainError):
        consistency_marginal("gaussian", 2.0, 1.0, [0.0])


def test_quad_result_and_report():
    r = QuadResult(1.0, 1e-12, 10, closed_form=1.0 + 1e-13)
    assert r.agrees
    assert QuadResult(1.0, 1e-12, 10).agrees is None
    assert not QuadResult(1.0, 1e-12, 10, closed_form=1.1).agrees
    with pytest.raises(ValueError):
        QuadResult(1.0, -1.0, 1)
    doc = json.loads(report_json({"r": r, "bad": float("nan")}))
    assert doc["r"]["value"] == 1.0 and doc["bad"] is None
