#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Starting values, candidate estimation and identification.

For a chosen order ``p`` every split ``r + s = p`` is estimated from a
start tailored to its family, and the candidate with the smallest
``R_T`` is selected.

Two start methods are available:

``roots`` (default)
    Map the preliminary causal fit ``theta_bar`` into the candidate's
    parameter space: identity for causal models, the inverse causal
    representation for noncausal models and a root factorisation for
    mixed models. When that mapping is not stationary (the usual case,
    because a Gaussian fit puts every root outside the unit circle) every
    assignment of ``theta_bar``'s roots to the causal and noncausal
    factors is tried and the one with the lowest ``R_T`` kept.

``ar``
    Use ``theta_bar`` directly as the candidate's coefficients.
"""


import itertools
import logging
import math
from collections import namedtuple
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from bispecar.model import (
    CAUSAL,
    NONCAUSAL,
    BoundaryError,
    ModelSpec,
    OrderError,
    PartitionError,
    causal_to_noncausal,
    factor_initial_values,
    family_for,
    lag_roots,
    polynomial_from_roots,
)
from bispecar.objective import WEIGHT_MODULUS, ObjectiveContext, build_context
from bispecar.optimize import GTOL, MAXITER, EstimationResult, minimize_rt
from bispecar.util import BispecarError, ConfigError, EstimationError, ModelError

log = logging.getLogger(__name__)

#: Start methods
START_ROOTS = "roots"
START_AR = "ar"
START_METHODS = (START_ROOTS, START_AR)

#: Smallest root modulus of a fallback start
MIN_START_MODULUS = 1.05

#: R_T differences below this count as ties
TIE_TOL = 1e-9


Candidate = namedtuple(
    "Candidate", ["family", "r", "s", "start", "start_source", "result", "error"]
)
"""One estimated ``(r, s)`` split.

.. py:attribute:: start

    Starting coefficients used.

.. py:attribute:: start_source

    How the start was obtained: ``"theta_bar"``, ``"inverse"``,
    ``"factor"``, ``"partition"``, ``"ar"`` or ``"white-noise"``.

.. py:attribute:: result

    :class:`~bispecar.optimize.EstimationResult` or ``None`` if the
    candidate failed with ``error``.

"""


def candidate_orders(p: int) -> List[Tuple[int, int]]:
    """Return all ``(r, s)`` with ``r + s = p``, most causal first."""
    if p < 1:
        raise ConfigError("candidate order p must be >= 1, got {}".format(p))
    return [(r, p - r) for r in range(p, -1, -1)]


# Starting values ------------------------------------------------------


def _root_units(roots: np.ndarray) -> List[np.ndarray]:
    """Group roots into real singletons and conjugate pairs."""
    units: List[np.ndarray] = []
    remaining = sorted(roots, key=lambda z: (abs(z), z.real, z.imag))
    while remaining:
        z = remaining.pop(0)
        if abs(z.imag) <= 1e-10 * max(1.0, abs(z)):
            units.append(np.array([z.real + 0j]))
            continue
        partner = min(
            range(len(remaining)), key=lambda i: abs(remaining[i] - z.conjugate())
        )
        units.append(np.array([z, remaining.pop(partner)]))
    return units


def _push_out(roots: np.ndarray) -> np.ndarray:
    """Clip root moduli radially to at least :data:`MIN_START_MODULUS`."""
    out = np.array(roots, dtype=complex)
    mod = np.abs(out)
    small = mod < MIN_START_MODULUS
    out[small] = out[small] / mod[small] * MIN_START_MODULUS
    return out


def shrink_to_stationary(coeffs: Sequence[float]) -> np.ndarray:
    """Return coefficients whose roots are those of ``coeffs`` pushed outside.

    Roots inside the unit circle are reflected outside and every modulus
    is clipped to at least 1.05.
    """
    c = np.asarray(coeffs, dtype=float)
    roots = lag_roots(c)
    inside = np.abs(roots) < 1.0
    roots[inside] = 1.0 / np.conj(roots[inside])
    return polynomial_from_roots(_push_out(roots), c.size)


def partition_starts(theta_bar: Sequence[float], r: int, s: int) -> List[ModelSpec]:
    """Return one stationary start per assignment of ``theta_bar``'s roots.

    Conjugate pairs stay together. Roots given to the causal factor are
    reflected outside the unit circle if needed; roots given to the
    noncausal factor are reciprocated if they lie inside it. All moduli
    are then clipped to at least 1.05. Assignments are ordered with the
    smallest-modulus roots going to the noncausal factor first.
    """
    units = _root_units(lag_roots(theta_bar))
    starts = []
    for size in range(len(units) + 1):
        for chosen in itertools.combinations(range(len(units)), size):
            lead = [units[i] for i in chosen]
            lag = [units[i] for i in range(len(units)) if i not in chosen]
            n_lead = sum(u.size for u in lead)
            n_lag = sum(u.size for u in lag)
            if n_lead > s or n_lag > r:
                continue
            lag_roots_ = np.concatenate(lag) if lag else np.zeros(0, dtype=complex)
            lead_roots = np.concatenate(lead) if lead else np.zeros(0, dtype=complex)

            inside = np.abs(lag_roots_) < 1.0
            lag_roots_[inside] = 1.0 / np.conj(lag_roots_[inside])
            inside = np.abs(lead_roots) < 1.0
            lead_roots[inside] = 1.0 / lead_roots[inside]

            phi = polynomial_from_roots(_push_out(lag_roots_), r)
            varphi = polynomial_from_roots(_push_out(lead_roots), s)
            starts.append(ModelSpec(family_for(r, s), phi=phi, varphi=varphi))
    return starts


def _best(
    starts: List[ModelSpec], objective: Optional[Callable[[ModelSpec], float]]
) -> ModelSpec:
    if objective is None or len(starts) == 1:
        return starts[0]
    values = [objective(spec) for spec in starts]
    best = int(np.argmin(values))
    log.debug("partition starts R_T=%s, using #%d", values, best)
    return starts[best]


def _fallback(
    theta_bar: np.ndarray,
    r: int,
    s: int,
    objective: Optional[Callable[[ModelSpec], float]],
) -> Tuple[np.ndarray, str]:
    starts = partition_starts(theta_bar, r, s)
    if starts:
        return _best(starts, objective).theta, "partition"
    log.warning(
        "no root partition of %s fits (%d, %d); starting at zero", theta_bar, r, s
    )
    return np.zeros(r + s), "white-noise"


def _start(
    family: str,
    r: int,
    s: int,
    theta_bar: Sequence[float],
    method: str = START_ROOTS,
    objective: Optional[Callable[[ModelSpec], float]] = None,
) -> Tuple[np.ndarray, str]:
    theta_bar = np.asarray(theta_bar, dtype=float).ravel()
    if theta_bar.size != r + s:
        raise OrderError(
            "theta_bar has {} coefficients, expected r+s={}".format(
                theta_bar.size, r + s
            )
        )
    if family_for(r, s) != family:
        raise ModelError("orders ({}, {}) do not match family {}".format(r, s, family))
    if method not in START_METHODS:
        raise ConfigError("unknown start method {!r}".format(method))

    if method == START_AR:
        spec = ModelSpec.from_theta(r, s, theta_bar)
        if spec.stationary:
            return spec.theta, "ar"
        phi = shrink_to_stationary(theta_bar[:r]) if r else []
        varphi = shrink_to_stationary(theta_bar[r:]) if s else []
        return ModelSpec(family, phi=phi, varphi=varphi).theta, "ar"

    if family == CAUSAL:
        return theta_bar, "theta_bar"

    if family == NONCAUSAL:
        spec = causal_to_noncausal(theta_bar, s) if theta_bar[-1] else None
        if spec is not None and spec.stationary:
            return spec.theta, "inverse"
        log.debug("inverse of %s is not stationary; trying root partitions", theta_bar)
        return _fallback(theta_bar, r, s, objective)

    try:
        spec = factor_initial_values(theta_bar, r, s)
        if spec.stationary:
            return spec.theta, "factor"
    except (PartitionError, BoundaryError) as err:
        log.debug("factoring %s into (%d, %d) failed: %s", theta_bar, r, s, err)
    return _fallback(theta_bar, r, s, objective)


def initial_values(
    family: str,
    r: int,
    s: int,
    theta_bar: Sequence[float],
    method: str = START_ROOTS,
    objective: Optional[Callable[[ModelSpec], float]] = None,
) -> np.ndarray:
    """Return starting coefficients ``(phi, varphi)`` for one candidate.

    Args:
        family (str): Candidate family.
        r (int): Causal order.
        s (int): Noncausal order.
        theta_bar (sequence): Preliminary causal AR(r+s) coefficients.
        method (str, optional): ``"roots"`` or ``"ar"``.
        objective (callable, optional): Scores fallback starts; usually
            :meth:`ObjectiveContext.value`.

    Returns:
        numpy.ndarray: stationary starting coefficients.

    """
    return _start(family, r, s, theta_bar, method, objective)[0]


# Candidates -----------------------------------------------------------


class IdentificationReport(object):
    """Estimated candidates for one order ``p`` and the selected model.

    Attributes:
        p (int): Total order.
        candidates (list): :class:`Candidate` per ``(r, s)``.
        selected (int): Index of the selected candidate.
        margins (list): ``R_T`` minus the winner's ``R_T`` per candidate
            (``None`` for failed candidates).
        context (ObjectiveContext): Shared evaluation context.

    """

    def __init__(
        self,
        p: int,
        candidates: List[Candidate],
        context: Optional[ObjectiveContext] = None,
        start_method: str = START_ROOTS,
    ) -> None:
        """Create report and select the winning candidate."""
        self.p = p
        self.candidates = candidates
        self.context = context
        self.start_method = start_method
        self.selected = select(candidates)
        best = candidates[self.selected].result.rt
        self.margins = [
            None if c.result is None else c.result.rt - best for c in candidates
        ]

    @property
    def selected_candidate(self) -> Candidate:
        """The winning :class:`Candidate`."""
        return self.candidates[self.selected]

    @property
    def selected_spec(self) -> ModelSpec:
        """Estimated model of the winning candidate."""
        return self.selected_candidate.result.spec

    def to_dict(self) -> Dict[str, Any]:
        """Return JSON-serializable representation."""
        ctx = self.context
        data: Dict[str, Any] = {
            "p": self.p,
            "start_method": self.start_method,
            "selected": self.selected_spec.label,
            "selected_index": self.selected,
            "margins": self.margins,
            "candidates": [],
        }
        if ctx is not None:
            data.update(
                T=ctx.T,
                m=ctx.m,
                n=ctx.n,
                theta_bar=[float(v) for v in ctx.theta_bar],
                k2_bar=float(ctx.k2_bar),
                skipped=ctx.skipped,
            )
        for cand in self.candidates:
            entry: Dict[str, Any] = {
                "family": cand.family,
                "r": cand.r,
                "s": cand.s,
                "start": [float(v) for v in cand.start],
                "start_source": cand.start_source,
                "error": cand.error,
            }
            if cand.result is not None:
                entry.update(cand.result.to_dict())
            data["candidates"].append(entry)
        return data


def select(candidates: Sequence[Candidate]) -> int:
    """Return index of the converged candidate with the smallest ``R_T``.

    Differences below ``1e-9`` are ties, won by the larger causal order.

    Raises:
        EstimationError: if no candidate converged.

    """
    usable = [
        i
        for i, c in enumerate(candidates)
        if c.result is not None and c.result.converged and math.isfinite(c.result.rt)
    ]
    if not usable:
        summary = ", ".join(
            "({},{}): {}".format(
                c.r, c.s, c.error or (c.result.message if c.result else "failed")
            )
            for c in candidates
        )
        raise EstimationError("no candidate converged: " + summary)

    best = usable[0]
    for i in usable[1:]:
        delta = candidates[i].result.rt - candidates[best].result.rt
        tie = abs(delta) <= TIE_TOL and candidates[i].r > candidates[best].r
        if delta < -TIE_TOL or tie:
            best = i
    return best


def identify(report: IdentificationReport) -> ModelSpec:
    """Return the converged candidate model with the smallest ``R_T``."""
    return report.candidates[select(report.candidates)].result.spec


def _fit_candidate(
    ctx: ObjectiveContext,
    r: int,
    s: int,
    method: str,
    gtol: float,
    maxiter: int,
    standard_errors: bool,
) -> Candidate:
    family = family_for(r, s)
    start, source = np.zeros(r + s), "none"
    try:
        start, source = _start(family, r, s, ctx.theta_bar, method, ctx.value)
        result: Optional[EstimationResult] = minimize_rt(
            ctx,
            family,
            start,
            r=r,
            gtol=gtol,
            maxiter=maxiter,
            standard_errors=standard_errors,
        )
        error = None
    except BispecarError as err:
        log.warning("candidate (%d, %d) failed: %s", r, s, err)
        result, error = None, str(err)
    return Candidate(family, r, s, start, source, result, error)


def estimate_candidates(
    y: Sequence[float],
    p: int,
    m: float = 0.5,
    n: Optional[float] = None,
    method: str = START_ROOTS,
    weight: str = WEIGHT_MODULUS,
    threads: int = 1,
    gtol: float = GTOL,
    maxiter: int = MAXITER,
    standard_errors: bool = True,
    ctx: Optional[ObjectiveContext] = None,
) -> IdentificationReport:
    """Estimate every ``(r, s)`` split of ``p`` and select by ``R_T``.

    The preliminary fit and spectral grids are computed once and shared
    by all candidates, which run on up to ``threads`` threads.

    Raises:
        EstimationError: if no candidate converged.

    """
    orders = candidate_orders(p)
    if ctx is None:
        ctx = build_context(y, p, m=m, n=n, weight=weight)

    jobs = Parallel(n_jobs=max(1, min(threads, len(orders))), prefer="threads")
    candidates = jobs(
        delayed(_fit_candidate)(ctx, r, s, method, gtol, maxiter, standard_errors)
        for r, s in orders
    )
    report = IdentificationReport(p, list(candidates), ctx, method)
    log.info(
        "p=%d selected %s (R_T=%.6g)",
        p,
        report.selected_spec.label,
        report.selected_candidate.result.rt,
    )
    return report
