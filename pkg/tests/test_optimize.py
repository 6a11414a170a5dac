#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Unit tests for :mod:`bispecar.optimize`."""


import json
import math

import numpy as np
import pytest

from bispecar.model import CAUSAL, MIXED, NONCAUSAL, ModelSpec
from bispecar.objective import build_context
from bispecar.optimize import (
    EstimationResult,
    asymptotic_se,
    bfgs,
    eta_integral,
    log_transfer_gradient,
    minimize_rt,
    numerical_gradient,
)
from bispecar.util import ConfigError, DataError, DomainError, EstimationError, ModelError


def _quadratic(x):
    return (x[0] - 1.0) ** 2 + 10.0 * (x[1] + 2.0) ** 2


def test_numerical_gradient():
    """Central and one-sided differences."""
    g = numerical_gradient(_quadratic, np.array([0.0, 0.0]))
    assert g == pytest.approx([-2.0, 40.0], rel=1e-6)

    def wall(x):
        return math.inf if x[0] > 0.0 else float(x[0] ** 2 - x[0])

    g = numerical_gradient(wall, np.array([0.0]))
    assert g[0] == pytest.approx(-1.0, rel=1e-3)


def test_bfgs_quadratic():
    """Minimum of a separable quadratic."""
    trace = []
    outcome = bfgs(_quadratic, [0.0, 0.0], callback=trace.append)
    assert outcome.converged
    assert outcome.x == pytest.approx([1.0, -2.0], abs=1e-5)
    assert outcome.fun == pytest.approx(0.0, abs=1e-9)
    assert outcome.iterations == len(trace)
    assert set(trace[0]) == {"iteration", "rt", "grad_norm"}


def test_bfgs_large_objective():
    """Tolerance scales with the objective, so large values still converge."""

    def fun(x):
        return 1e6 * (1.0 + (x[0] - 0.3) ** 2 + (x[1] + 0.1) ** 2)

    outcome = bfgs(fun, [0.0, 0.0])
    assert outcome.converged
    assert outcome.message == "gradient tolerance reached"
    assert outcome.x == pytest.approx([0.3, -0.1], abs=1e-4)
    assert outcome.grad_norm <= 1e-6 * outcome.fun


def test_bfgs_converged_minimum_not_rejected(mar11_series):
    """A start at the minimum of R_T is reported as converged."""
    ctx = build_context(mar11_series.y, 2)
    first = minimize_rt(ctx, MIXED, [0.5, 0.1], r=1, standard_errors=False)
    assert first.converged
    again = minimize_rt(ctx, MIXED, first.spec.theta, r=1, standard_errors=False)
    assert again.converged
    assert again.spec.theta == pytest.approx(first.spec.theta, abs=1e-4)
    assert again.rt <= first.rt + 1e-9 * first.rt


def test_bfgs_infeasible_start():
    """An infeasible start is reported, not searched from."""
    outcome = bfgs(lambda x: math.inf, [0.5])
    assert not outcome.converged
    assert outcome.iterations == 0
    assert outcome.message == "infeasible start"


def test_bfgs_stays_feasible():
    """Steps never land on infeasible points."""

    def fun(x):
        if x[0] >= 1.0:
            return math.inf
        return float((x[0] - 2.0) ** 2)

    outcome = bfgs(fun, [0.0], maxiter=50)
    assert math.isfinite(outcome.fun)
    assert outcome.x[0] < 1.0
    assert outcome.fun < 4.0


def test_bfgs_iteration_limit():
    """maxiter caps the iterations."""
    outcome = bfgs(_quadratic, [50.0, 50.0], maxiter=1)
    assert outcome.iterations == 1
    assert not outcome.converged
    assert outcome.message == "iteration limit reached"


@pytest.mark.parametrize("phi", [0.5, -0.3, 0.9])
def test_eta_ar1(phi):
    """AR(1) integral is 1 / (1 - phi^2) in either direction."""
    expected = 1.0 / (1.0 - phi ** 2)
    for spec in (ModelSpec.causal([phi]), ModelSpec.noncausal([phi])):
        assert eta_integral(spec)[0, 0] == pytest.approx(expected, rel=1e-6)


def test_eta_mixed():
    """Mixed models give a symmetric positive-definite matrix."""
    eta = eta_integral(ModelSpec.mixed([0.7], [0.2]))
    assert eta.shape == (2, 2)
    assert eta == pytest.approx(eta.T)
    assert np.all(np.linalg.eigvalsh(eta) > 0)
    with pytest.raises(DomainError):
        eta_integral(ModelSpec.causal([1.5]))


def test_log_transfer_gradient():
    """Gradient at zero frequency."""
    d = log_transfer_gradient(ModelSpec.mixed([0.5], [0.2]), 0.0)
    assert d.real == pytest.approx([2.0, 1.25])
    assert d.imag == pytest.approx([0.0, 0.0], abs=1e-12)


def test_asymptotic_se_gaussian():
    """Gaussian innovations reduce to sqrt((1 - phi^2) / T)."""
    se = asymptotic_se(ModelSpec.causal([0.7]), 0.0, 0.0, 0.5, 0.5, 200)
    assert se[0] == pytest.approx(math.sqrt((1 - 0.49) / 200), rel=1e-6)


def test_asymptotic_se_skewed():
    """Closed form with skewness and kurtosis."""
    se = asymptotic_se(
        ModelSpec.causal([0.7]), 1.0, 2.0, 0.5, 0.5, 100, eta=np.array([[2.0]])
    )
    assert se[0] == pytest.approx(math.sqrt(0.48 / 100))


def test_asymptotic_se_errors():
    """Invalid inputs."""
    spec = ModelSpec.causal([0.7])
    with pytest.raises(EstimationError):
        asymptotic_se(spec, 0.0, 0.0, 0.0, 1.0, 100)
    with pytest.raises(DataError):
        asymptotic_se(spec, 0.0, 0.0, 0.5, 0.5, 0)
    with pytest.raises(ConfigError):
        asymptotic_se(spec, 0.0, 0.0, 1.5, 0.5, 100)


def test_minimize_rt(mar11_series):
    """Estimation improves on its start and stays stationary."""
    ctx = build_context(mar11_series.y, 2)
    start = ModelSpec.mixed([0.5], [0.1])
    trace = []
    result = minimize_rt(ctx, MIXED, start.theta, r=1, trace=trace.append)
    assert isinstance(result, EstimationResult)
    assert result.spec.family == MIXED
    assert result.spec.stationary
    assert result.rt <= ctx.value(start)
    assert result.iterations == len(trace)
    assert result.sse > 0
    if result.se is not None:
        assert result.se.shape == (2,)

    data = json.loads(json.dumps(result.to_dict()))
    assert data["label"] == "MAR(1,1)"
    assert data["model"]["r"] == 1


def test_minimize_rt_families(mar11_series):
    """Causal and noncausal candidates."""
    ctx = build_context(mar11_series.y, 2)
    for family in (CAUSAL, NONCAUSAL):
        result = minimize_rt(ctx, family, [0.5, 0.1], standard_errors=False)
        assert result.spec.family == family
        assert result.se is None
        assert math.isfinite(result.rt)


def test_minimize_rt_errors(mar11_series):
    """Bad starts and orders."""
    ctx = build_context(mar11_series.y, 2)
    with pytest.raises(DomainError):
        minimize_rt(ctx, CAUSAL, [1.2, 0.0])
    with pytest.raises(ModelError):
        minimize_rt(ctx, MIXED, [0.5, 0.1])
    with pytest.raises(ModelError):
        minimize_rt(ctx, "bogus", [0.5])


def test_result_to_dict_non_finite():
    """Non-finite numbers become null."""
    result = EstimationResult(
        ModelSpec.causal([0.5]), math.inf, None, 1.0, False, 0, math.inf, "x"
    )
    data = result.to_dict()
    assert data["rt"] is None
    assert data["grad_norm"] is None
    assert data["se"] is None


if __name__ == "__main__":  # pragma: no cover
    pytest.main([__file__])
