#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Unit tests for :mod:`bispecar.strategy`."""


import json

import numpy as np
import pytest
from joblib import Parallel, delayed

from bispecar.model import CAUSAL, MIXED, NONCAUSAL, ModelSpec, OrderError
from bispecar.objective import build_context
from bispecar.optimize import EstimationResult, minimize_rt
from bispecar.simulate import StableParams, replication_seed, simulate
from bispecar.strategy import (
    START_AR,
    Candidate,
    IdentificationReport,
    candidate_orders,
    estimate_candidates,
    identify,
    initial_values,
    partition_starts,
    select,
    shrink_to_stationary,
)
from bispecar.util import ConfigError, EstimationError, ModelError

#: Gaussian-looking causal fit with roots 1/0.7 and 5
THETA_BAR = [0.9, -0.14]

MAR11 = ModelSpec.mixed([0.7], [0.2])


def _candidate(r, s, rt, converged=True):
    spec = ModelSpec.from_theta(r, s, [0.1] * (r + s))
    result = EstimationResult(spec, rt, None, 1.0, converged, 3, 0.0, "ok")
    return Candidate(spec.family, r, s, np.zeros(r + s), "ar", result, None)


def test_candidate_orders():
    """Splits run from causal to noncausal."""
    assert candidate_orders(1) == [(1, 0), (0, 1)]
    assert candidate_orders(2) == [(2, 0), (1, 1), (0, 2)]
    assert len(candidate_orders(4)) == 5
    with pytest.raises(ConfigError):
        candidate_orders(0)


def test_initial_values_causal():
    """Causal candidates start at theta_bar."""
    assert initial_values(CAUSAL, 2, 0, THETA_BAR) == pytest.approx(THETA_BAR)


def test_initial_values_noncausal():
    """Noncausal starts come from the inverse mapping or a partition."""
    start = initial_values(NONCAUSAL, 0, 2, [-3.5, 5.0])
    assert start == pytest.approx([0.7, 0.2])

    start = initial_values(NONCAUSAL, 0, 2, THETA_BAR)
    assert ModelSpec.noncausal(start).stationary
    assert start == pytest.approx(THETA_BAR)


def test_initial_values_mixed():
    """Mixed starts come from root factorisation or a partition."""
    start = initial_values(MIXED, 1, 1, [5.7, -3.5])
    assert start == pytest.approx([0.7, 0.2])

    start = initial_values(MIXED, 1, 1, THETA_BAR)
    assert start == pytest.approx([0.2, 0.7])
    assert ModelSpec.mixed(start[:1], start[1:]).stationary


def test_initial_values_scored():
    """An objective picks between partitions."""

    def objective(spec):
        return abs(spec.phi[0] - 0.7)

    start = initial_values(MIXED, 1, 1, THETA_BAR, objective=objective)
    assert start == pytest.approx([0.7, 0.2])


def test_initial_values_ar():
    """AR starts reuse theta_bar, shrunk if needed."""
    start = initial_values(MIXED, 1, 1, THETA_BAR, method=START_AR)
    assert start == pytest.approx(THETA_BAR)
    start = initial_values(CAUSAL, 1, 0, [1.5], method=START_AR)
    assert start == pytest.approx([1 / 1.5])


def test_initial_values_errors():
    """Size, family and method mismatches."""
    with pytest.raises(OrderError):
        initial_values(CAUSAL, 3, 0, THETA_BAR)
    with pytest.raises(ModelError):
        initial_values(MIXED, 2, 0, THETA_BAR)
    with pytest.raises(ConfigError):
        initial_values(CAUSAL, 2, 0, THETA_BAR, method="bogus")


def test_shrink_to_stationary():
    """Roots are pushed to modulus 1.05 or beyond."""
    assert shrink_to_stationary([0.99]) == pytest.approx([1 / 1.05])
    assert shrink_to_stationary([0.5]) == pytest.approx([0.5])
    assert shrink_to_stationary([2.0]) == pytest.approx([0.5])


def test_partition_starts():
    """One start per admissible root assignment."""
    starts = partition_starts(THETA_BAR, 1, 1)
    assert len(starts) == 2
    assert all(spec.stationary for spec in starts)
    assert {round(float(spec.phi[0]), 6) for spec in starts} == {0.2, 0.7}

    # complex pair cannot be split
    assert partition_starts([1.0, -0.5], 1, 1) == []
    starts = partition_starts([1.0, -0.5], 0, 2)
    assert len(starts) == 1
    assert starts[0].family == NONCAUSAL


def test_select_smallest():
    """Smallest converged R_T wins."""
    candidates = [_candidate(2, 0, 3.0), _candidate(1, 1, 1.0), _candidate(0, 2, 2.0)]
    assert select(candidates) == 1


def test_select_skips_unconverged():
    """Unconverged candidates never win."""
    candidates = [
        _candidate(2, 0, 3.0),
        _candidate(1, 1, 0.5, converged=False),
        _candidate(0, 2, 2.0),
    ]
    assert select(candidates) == 2


def test_select_tie():
    """Ties go to the larger causal order."""
    candidates = [_candidate(0, 2, 1.0), _candidate(2, 0, 1.0), _candidate(1, 1, 1.0)]
    assert select(candidates) == 1


def test_select_none_converged():
    """No converged candidate is an error."""
    failed = Candidate(MIXED, 1, 1, np.zeros(2), "factor", None, "boom")
    with pytest.raises(EstimationError) as excinfo:
        select([_candidate(2, 0, 1.0, converged=False), failed])
    assert "boom" in str(excinfo.value)


def test_report():
    """Margins, selection and JSON form."""
    candidates = [_candidate(2, 0, 3.0), _candidate(1, 1, 1.0), _candidate(0, 2, 2.0)]
    report = IdentificationReport(2, candidates)
    assert report.selected == 1
    assert report.margins == pytest.approx([2.0, 0.0, 1.0])
    assert report.selected_spec.family == MIXED
    assert identify(report) == report.selected_spec

    data = json.loads(json.dumps(report.to_dict()))
    assert data["selected"] == "MAR(1,1)"
    assert len(data["candidates"]) == 3
    assert data["candidates"][0]["start_source"] == "ar"


def test_estimate_candidates(mar11_series):
    """All splits are estimated and one is selected."""
    report = estimate_candidates(mar11_series.y, 2, gtol=1e-5)
    assert [(c.r, c.s) for c in report.candidates] == [(2, 0), (1, 1), (0, 2)]
    assert 0 <= report.selected < 3
    assert report.margins[report.selected] == 0.0
    for cand in report.candidates:
        if cand.result is not None:
            assert cand.result.spec.stationary

    data = json.loads(json.dumps(report.to_dict()))
    assert data["T"] == 200
    assert data["m"] == 0.5


@pytest.fixture(scope="module")
def skewed_ar1():
    """Causal AR(1) 0.7 with strongly skewed heavy-tailed innovations."""
    return simulate(ModelSpec.causal([0.7]), StableParams(1.5, 1.0), 400, seed=3).y


def test_estimate_candidates_selects_causal(skewed_ar1):
    """The causal DGP is selected, its time reversal as noncausal."""
    report = estimate_candidates(skewed_ar1, 1)
    assert report.selected_spec.label == "AR(1,0)"
    assert report.selected_spec.phi[0] == pytest.approx(0.7, abs=0.1)
    assert report.margins[1] > 0.0

    reverse = estimate_candidates(skewed_ar1[::-1], 1)
    assert reverse.selected_spec.label == "AR(0,1)"
    assert reverse.selected_spec.varphi[0] == pytest.approx(
        report.selected_spec.phi[0], abs=0.02
    )


def test_estimate_candidates_threads(mar11_series):
    """Thread count does not change the outcome."""
    ctx = build_context(mar11_series.y, 2)
    one = estimate_candidates(mar11_series.y, 2, threads=1, ctx=ctx, gtol=1e-5)
    many = estimate_candidates(mar11_series.y, 2, threads=3, ctx=ctx, gtol=1e-5)
    assert one.selected == many.selected
    for a, b in zip(one.candidates, many.candidates):
        assert (a.result is None) == (b.result is None)
        if a.result is not None:
            assert a.result.rt == b.result.rt


def _grid_check(rep):
    """Return whether grid search and the started BFGS agree for one draw."""
    sim = simulate(MAR11, StableParams(1.5, 0.25), 200, replication_seed(17, 0, rep))
    ctx = build_context(sim.y, 2)
    start = initial_values(MIXED, 1, 1, ctx.theta_bar, objective=ctx.value)
    fit = minimize_rt(ctx, MIXED, start, r=1, standard_errors=False)

    axis = np.linspace(0.0, 0.95, 101)
    grid = np.array(
        [[ctx.value(ModelSpec.from_theta(1, 1, [a, b])) for b in axis] for a in axis]
    )
    i, j = np.unravel_index(int(np.argmin(grid)), grid.shape)
    return bool(np.all(np.abs(fit.spec.theta - [axis[i], axis[j]]) <= 0.05))


@pytest.mark.slow
def test_grid_search_agrees():
    """Brute-force grid minimum matches the started BFGS fit."""
    jobs = Parallel(n_jobs=-1, prefer="threads")
    hits = jobs(delayed(_grid_check)(rep) for rep in range(50))
    assert sum(hits) >= 48


if __name__ == "__main__":  # pragma: no cover
    pytest.main([__file__])
