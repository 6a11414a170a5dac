#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Quasi-Newton minimisation of ``R_T`` and asymptotic standard errors.

:func:`bfgs` is a plain BFGS with central-difference gradients and an
Armijo backtracking line search. Trial points where the objective is
``+inf`` (non-stationary models) are rejected by backtracking, so the
iterates never leave the stationary region.
"""


import logging
import math
from collections import namedtuple
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np
from scipy import integrate

from bispecar.model import CAUSAL, MIXED, NONCAUSAL, ModelSpec, family_for, residuals
from bispecar.spectral import sample_cumulants
from bispecar.util import (
    BispecarError,
    ConfigError,
    DataError,
    DomainError,
    EstimationError,
    ModelError,
    json_float,
)

log = logging.getLogger(__name__)

#: Stop when the gradient norm falls below this times max(1, |f|)
GTOL = 1e-6

#: Iteration cap
MAXITER = 500

#: Relative central-difference step
STEP = 1e-5

#: Armijo sufficient-decrease constant and backtracking limits
ARMIJO_C1 = 1e-4
BACKTRACK = 0.5
MAX_BACKTRACKS = 60

#: Tolerances for the eta quadrature
QUAD_EPSREL = 1e-8
QUAD_EPSABS = 1e-10


class QuadratureError(EstimationError):
    """Raised if the eta integral does not converge."""


TraceCallback = Callable[[Dict[str, Any]], None]


OptimizeOutcome = namedtuple(
    "OptimizeOutcome", ["x", "fun", "converged", "iterations", "grad_norm", "message"]
)
"""Result of :func:`bfgs`."""


class EstimationResult(
    namedtuple(
        "EstimationResult",
        ["spec", "rt", "se", "sse", "converged", "iterations", "grad_norm", "message"],
    )
):
    """Estimated model from :func:`minimize_rt`.

    .. py:attribute:: spec

        Estimated :class:`~bispecar.model.ModelSpec`.

    .. py:attribute:: rt

        ``R_T`` at the estimate.

    .. py:attribute:: se

        Standard error per coefficient, or ``None`` if unavailable.

    .. py:attribute:: sse

        Residual sum of squares.

    .. py:attribute:: converged

        ``True`` if the gradient norm fell below tolerance.

    """

    __slots__ = ()

    def to_dict(self) -> Dict[str, Any]:
        """Return JSON-serializable representation."""
        return {
            "model": self.spec.to_dict(),
            "label": self.spec.label,
            "rt": json_float(self.rt),
            "se": None if self.se is None else [json_float(v) for v in self.se],
            "sse": json_float(self.sse),
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "grad_norm": json_float(self.grad_norm),
            "message": self.message,
        }


def numerical_gradient(
    fun: Callable[[np.ndarray], float], x: np.ndarray, fx: Optional[float] = None
) -> np.ndarray:
    """Central-difference gradient with step ``1e-5 * max(1, |x_k|)``.

    Falls back to a one-sided difference where one neighbour is
    infeasible (``inf``) and to zero where both are.
    """
    grad = np.zeros(x.size)
    for k in range(x.size):
        h = STEP * max(1.0, abs(x[k]))
        step = np.zeros(x.size)
        step[k] = h
        up, down = fun(x + step), fun(x - step)
        if math.isfinite(up) and math.isfinite(down):
            grad[k] = (up - down) / (2.0 * h)
            continue

        if fx is None:
            fx = fun(x)
        if math.isfinite(up):
            grad[k] = (up - fx) / h
        elif math.isfinite(down):
            grad[k] = (fx - down) / h
    return grad


def _armijo(
    fun: Callable[[np.ndarray], float],
    x: np.ndarray,
    fx: float,
    direction: np.ndarray,
    slope: float,
) -> Optional[float]:
    """Return an acceptable step length or ``None``."""
    alpha = 1.0
    for _ in range(MAX_BACKTRACKS):
        value = fun(x + alpha * direction)
        if math.isfinite(value) and value <= fx + ARMIJO_C1 * alpha * slope:
            return alpha
        alpha *= BACKTRACK
    return None


def _tolerance(gtol: float, fx: float) -> float:
    """Gradient-norm tolerance at objective value ``fx``."""
    return gtol * max(1.0, abs(fx))


def bfgs(
    fun: Callable[[np.ndarray], float],
    x0: Sequence[float],
    gtol: float = GTOL,
    maxiter: int = MAXITER,
    callback: Optional[TraceCallback] = None,
) -> OptimizeOutcome:
    """Minimise ``fun`` from ``x0`` with BFGS.

    The inverse Hessian starts at the identity scaled by
    ``1 / max(1, fun(x0))``. The gradient tolerance is relative: the
    search stops once ``|g| <= gtol * max(1, |fun(x)|)``. If the line
    search fails along the BFGS direction, the inverse Hessian is reset
    and steepest descent is tried once before giving up.

    Args:
        fun (callable): Objective; ``inf`` marks infeasible points.
        x0 (sequence): Feasible starting point.
        gtol (float, optional): Relative gradient-norm tolerance.
        maxiter (int, optional): Iteration cap.
        callback (callable, optional): Called after every iteration with
            ``{"iteration", "rt", "grad_norm"}``.

    Returns:
        OptimizeOutcome: best point found; ``converged`` is ``False`` if
            the line search failed or ``maxiter`` was reached.

    """
    x = np.asarray(x0, dtype=float).ravel().copy()
    fx = fun(x)
    if not math.isfinite(fx):
        return OptimizeOutcome(x, fx, False, 0, math.inf, "infeasible start")
    if not x.size:
        return OptimizeOutcome(x, fx, True, 0, 0.0, "no free parameters")

    eye = np.eye(x.size)
    H = eye / max(1.0, fx)
    g = numerical_gradient(fun, x, fx)
    gnorm = float(np.linalg.norm(g))
    message = "iteration limit reached"
    reset = False

    k = 0
    while k < maxiter:
        if gnorm <= _tolerance(gtol, fx):
            break

        direction = -H @ g
        slope = float(g @ direction)
        if slope >= 0.0:
            # lost positive definiteness
            H = eye / max(1.0, fx)
            direction = -H @ g
            slope = float(g @ direction)

        alpha = _armijo(fun, x, fx, direction, slope)
        if alpha is None:
            if reset:
                message = "line search found no feasible descent step"
                break
            log.debug("line search failed at f=%.8g; trying steepest descent", fx)
            H = eye / max(1.0, fx)
            reset = True
            continue
        reset = False

        s = alpha * direction
        x_new = x + s
        f_new = fun(x_new)
        g_new = numerical_gradient(fun, x_new, f_new)
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-12 * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
            rho = 1.0 / sy
            V = eye - rho * np.outer(s, y)
            H = V @ H @ V.T + rho * np.outer(s, s)

        x, fx, g = x_new, f_new, g_new
        gnorm = float(np.linalg.norm(g))
        k += 1
        if callback is not None:
            callback({"iteration": k, "rt": fx, "grad_norm": gnorm})

    converged = gnorm <= _tolerance(gtol, fx)
    if converged:
        message = "gradient tolerance reached"
    log.debug("bfgs: %s after %d iterations (f=%.8g, |g|=%.3g)", message, k, fx, gnorm)
    return OptimizeOutcome(x, fx, converged, k, gnorm, message)


def _orders(family: str, size: int, r: Optional[int]) -> tuple:
    if family == CAUSAL:
        return size, 0
    if family == NONCAUSAL:
        return 0, size
    if family == MIXED:
        if r is None or not 1 <= r < size:
            raise ModelError(
                "mixed model needs 1 <= r < {}; got r={!r}".format(size, r)
            )
        return r, size - r
    raise ModelError("unknown model family: {!r}".format(family))


def minimize_rt(
    ctx: Any,
    family: str,
    theta0: Sequence[float],
    r: Optional[int] = None,
    gtol: float = GTOL,
    maxiter: int = MAXITER,
    trace: Optional[TraceCallback] = None,
    standard_errors: bool = True,
) -> EstimationResult:
    """Estimate a model of ``family`` by minimising ``R_T`` from ``theta0``.

    Args:
        ctx (ObjectiveContext): Evaluation context; anything with a
            ``value(spec)`` method and ``y``, ``m``, ``n`` attributes works.
        family (str): Model family.
        theta0 (sequence): Stationary starting coefficients
            ``(phi, varphi)``.
        r (int, optional): Causal order; required for mixed models.
        gtol (float, optional): Relative gradient-norm tolerance.
        maxiter (int, optional): Iteration cap.
        trace (callable, optional): Receives one dict per iteration.
        standard_errors (bool, optional): Compute asymptotic standard
            errors from the residual cumulants.

    Raises:
        DomainError: if ``theta0`` is not stationary.

    """
    theta0 = np.asarray(theta0, dtype=float).ravel()
    r, s = _orders(family, theta0.size, r)
    if family_for(r, s) != family:
        raise ModelError("orders ({}, {}) do not match family {}".format(r, s, family))
    start = ModelSpec.from_theta(r, s, theta0).require_stationary()

    def objective(theta: np.ndarray) -> float:
        try:
            return ctx.value(ModelSpec.from_theta(r, s, theta))
        except ModelError:
            return math.inf

    outcome = bfgs(objective, start.theta, gtol=gtol, maxiter=maxiter, callback=trace)
    spec = ModelSpec.from_theta(r, s, outcome.x)

    eps, sse = residuals(spec, ctx.y)
    se = None
    if standard_errors and spec.theta.size:
        try:
            zeta, kappa = sample_cumulants(eps)
            se = asymptotic_se(spec, zeta, kappa, ctx.m, ctx.n, len(ctx.y))
        except BispecarError as err:
            log.warning("no standard errors for %s: %s", spec.label, err)

    if not outcome.converged:
        log.info("%s did not converge: %s", spec.label, outcome.message)
    return EstimationResult(
        spec,
        outcome.fun,
        se,
        sse,
        outcome.converged,
        outcome.iterations,
        outcome.grad_norm,
        outcome.message,
    )


def log_transfer_gradient(spec: ModelSpec, omega: float) -> np.ndarray:
    """Return ``d log psi(w) / d theta`` for every coefficient of ``spec``.

    ``d/d phi_k = z^k / phi(z)`` and ``d/d varphi_k = z^-k / varphi(1/z)``
    with ``z = exp(-i w)``.
    """
    z = complex(math.cos(omega), -math.sin(omega))
    k_r = np.arange(1, spec.r + 1)
    k_s = np.arange(1, spec.s + 1)
    causal = 1.0 - np.sum(spec.phi * z ** k_r)
    lead = 1.0 - np.sum(spec.varphi * z ** (-k_s))
    return np.concatenate([z ** k_r / causal, z ** (-k_s) / lead])


def eta_integral(spec: ModelSpec) -> np.ndarray:
    """Return the matrix of integrated log-transfer derivative products.

    Entry ``(a, b)`` is the integral over normalised frequency
    ``u in [0, 1]`` (``w = 2 pi u``) of ``Re[D_a(w) conj(D_b(w))]`` where
    ``D`` is :func:`log_transfer_gradient`. For a causal AR(1) this is
    ``1 / (1 - phi^2)``.

    Raises:
        DomainError: if ``spec`` is not stationary.
        QuadratureError: if adaptive quadrature does not converge.

    """
    spec.require_stationary()
    size = spec.theta.size
    eta = np.zeros((size, size))

    for a in range(size):
        for b in range(a, size):

            def integrand(u: float, a: int = a, b: int = b) -> float:
                d = log_transfer_gradient(spec, 2.0 * math.pi * u)
                return float((d[a] * np.conj(d[b])).real)

            result = integrate.quad(
                integrand,
                0.0,
                1.0,
                epsabs=QUAD_EPSABS,
                epsrel=QUAD_EPSREL,
                limit=200,
                full_output=1,
            )
            value, abserr = result[0], result[1]
            if len(result) > 3 or not math.isfinite(value):
                raise QuadratureError(
                    "eta[{},{}] for {} did not converge: value={!r} abserr={:g} "
                    "evaluations={} ({})".format(
                        a, b, spec.label, value, abserr,
                        result[2].get("neval"), result[3] if len(result) > 3 else "",
                    )
                )
            eta[a, b] = eta[b, a] = value

    return eta


def asymptotic_se(
    spec: ModelSpec,
    zeta: float,
    kappa: float,
    m: float,
    n: float,
    T: int,
    eta: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Return asymptotic standard errors of the ``R_T`` estimator.

    Per coefficient with diagonal ``eta``::

        T var = (4 m^2 + [m^2 kappa / 4 + n^2 / 2 + m n] zeta^2) eta
                / ((2 m + n zeta^2 / 2)^2 eta^2)

    which is ``1 / eta`` when ``zeta = 0``.

    Args:
        spec (ModelSpec): Estimated model.
        zeta (float): Innovation skewness.
        kappa (float): Innovation excess kurtosis.
        m (float): Second-order weight.
        n (float): Third-order weight.
        T (int): Sample size.
        eta (numpy.ndarray, optional): Precomputed :func:`eta_integral`.

    Raises:
        EstimationError: if ``2 m + n zeta^2 / 2`` vanishes.

    """
    if T <= 0:
        raise DataError("sample size must be positive, got {}".format(T))
    if not (0.0 <= m <= 1.0 and 0.0 <= n <= 1.0):
        raise ConfigError("weights must lie in [0, 1]: m={} n={}".format(m, n))

    denom = 2.0 * m + 0.5 * n * zeta ** 2
    if abs(denom) < 1e-12:
        raise EstimationError(
            "variance denominator vanishes (m={}, zeta={})".format(m, zeta)
        )
    numer = 4.0 * m ** 2 + (m ** 2 * kappa / 4.0 + n ** 2 / 2.0 + m * n) * zeta ** 2

    if eta is None:
        eta = eta_integral(spec)
    diag = np.diag(np.atleast_2d(eta)).astype(float)
    if np.any(diag <= 0.0) or numer <= 0.0:
        raise DomainError("non-positive variance components for {}".format(spec.label))

    t_var = numer * diag / (denom ** 2 * diag ** 2)
    return np.sqrt(t_var / T)
