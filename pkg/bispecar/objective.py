#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""The spectrum/bispectrum minimum-distance criterion ``R_T``.

``R_T`` compares the periodogram and biperiodogram of a series with the
spectrum and bispectrum implied by a candidate model::

    R_T = A2T sum_j [(I2_j - S2*_j) / d2_j]^2
        + A3T sum_j sum_i |I3_ji - S3*_ji|^2 w3_ji

where ``S2*`` and ``S3*`` use the cumulants ``k2*`` and ``k3*`` the
candidate implies for the data, and the denominators ``d2`` and ``w3``
come from a preliminary causal AR(p) fit and stay fixed. Bifrequencies
with ``w_j + w_i = 0 (mod 2 pi)`` carry no information once the series
is centred and get zero weight.

Build an :class:`ObjectiveContext` once per series with
:func:`build_context`, then evaluate candidates with :func:`rt_value`.
"""


import logging
import math
from collections import namedtuple
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from bispecar.model import ModelSpec, check_stationary
from bispecar.spectral import center, frequencies, sum_index, summarize
from bispecar.theory import bispectrum_weights, k2_star, k3_star, transfer_grid
from bispecar.util import ConfigError, DataError, DegenerateError, EstimationError

log = logging.getLogger(__name__)

#: Third-order weight conventions
WEIGHT_MODULUS = "modulus"
WEIGHT_REAL = "real"
WEIGHTS = (WEIGHT_MODULUS, WEIGHT_REAL)

#: Denominators below this are skipped
DENOM_TOL = 1e-12

PreliminaryFit = namedtuple("PreliminaryFit", ["theta_bar", "k2_bar"])
"""Result of :func:`preliminary_fit`.

.. py:attribute:: theta_bar

    Causal AR(p) coefficients (:class:`numpy.ndarray`).

.. py:attribute:: k2_bar

    Innovation variance implied by ``theta_bar`` and the periodogram.

"""


def lagged(
    y: np.ndarray, p: int, start: Optional[int] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Return regressand and lag matrix for an AR(p) regression.

    Rows cover ``t = start .. T-1`` (``start`` defaults to ``p``) and
    column ``k`` holds ``y_{t-k-1}``.
    """
    start = p if start is None else start
    T = y.size
    X = np.zeros((T - start, p))
    for k in range(p):
        X[:, k] = y[start - k - 1 : T - k - 1]
    return y[start:], X


def fit_ar_ols(
    y: Sequence[float], p: int, start: Optional[int] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Least-squares AR(p) fit without intercept.

    Returns:
        tuple: ``(coefficients, residuals)``.

    """
    arr = np.asarray(y, dtype=float)
    target, X = lagged(arr, p, start)
    if not p:
        return np.zeros(0), target.copy()
    coef = np.linalg.lstsq(X, target, rcond=None)[0]
    return coef, target - X @ coef


def fit_ar_yule_walker(y: Sequence[float], p: int) -> np.ndarray:
    """Yule-Walker AR(p) fit from the biased sample autocovariances."""
    arr = np.asarray(y, dtype=float)
    T = arr.size
    gamma = np.array([np.dot(arr[: T - k], arr[k:]) / T for k in range(p + 1)])
    return linalg.solve_toeplitz(gamma[:p], gamma[1:])


def _prelim(y: np.ndarray, p: int, I2: np.ndarray) -> PreliminaryFit:
    if p < 0:
        raise ConfigError("order p must be non-negative, got {}".format(p))
    if y.size <= 10 * p:
        raise DataError(
            "preliminary AR({}) fit needs T > {}, got T={}".format(p, 10 * p, y.size)
        )

    theta, method = fit_ar_ols(y, p)[0], "ols"
    if p and not check_stationary(theta)[0]:
        log.warning("OLS AR(%d) fit %s is not stationary; using Yule-Walker", p, theta)
        theta, method = fit_ar_yule_walker(y, p), "yule-walker"
        if not check_stationary(theta)[0]:
            raise EstimationError(
                "preliminary AR({}) fit is not stationary: {}".format(p, theta)
            )

    k2_bar = k2_star(ModelSpec.causal(theta), I2)
    log.debug("preliminary %s AR(%d): theta=%s k2=%.6g", method, p, theta, k2_bar)
    return PreliminaryFit(theta, k2_bar)


def preliminary_fit(y: Sequence[float], p: int) -> PreliminaryFit:
    """Gaussian (least-squares) causal AR(p) fit used to normalise ``R_T``.

    Falls back to Yule-Walker when least squares is not stationary.

    Args:
        y (sequence): Series; centred here if it is not already.
        p (int): Autoregressive order.

    Raises:
        DataError: if ``T <= 10 p``.
        EstimationError: if no stationary fit is found.

    """
    summaries = summarize(y)
    return _prelim(center(np.asarray(y, dtype=float)), p, summaries.I2)


class ObjectiveContext(object):
    """Everything ``R_T`` needs that does not depend on the candidate.

    Instances are built by :func:`build_context`, are read-only and may
    be shared between threads.

    Attributes:
        y (numpy.ndarray): Centred series.
        p (int): Order of the preliminary fit.
        I2 (numpy.ndarray): Periodogram.
        I3 (numpy.ndarray): Biperiodogram.
        theta_bar (numpy.ndarray): Preliminary causal coefficients.
        k2_bar (float): Preliminary innovation variance.
        m (float): Weight of the second-order term.
        n (float): Weight of the third-order term.
        weight (str): Third-order weight convention.
        denom2 (numpy.ndarray): ``|psi(theta_bar, w_j)|^2``; skipped
            points hold ``inf``.
        w3 (numpy.ndarray): Third-order weight grid; skipped points and
            bifrequencies summing to zero hold 0.
        A2T (float): Second-order normalising constant.
        A3T (float): Third-order normalising constant.
        skipped (int): Grid points dropped for tiny denominators.

    """

    def __init__(
        self,
        y: np.ndarray,
        p: int,
        I2: np.ndarray,
        I3: np.ndarray,
        theta_bar: np.ndarray,
        k2_bar: float,
        m: float,
        n: float,
        weight: str,
        denom2: np.ndarray,
        w3: np.ndarray,
        A2T: float,
        A3T: float,
        skipped: int = 0,
    ) -> None:
        """Create new context; arrays are made read-only."""
        for arr in (y, I2, I3, theta_bar, denom2, w3):
            arr.flags.writeable = False
        self.y = y
        self.p = p
        self.I2 = I2
        self.I3 = I3
        self.theta_bar = theta_bar
        self.k2_bar = k2_bar
        self.m = m
        self.n = n
        self.weight = weight
        self.denom2 = denom2
        self.w3 = w3
        self.A2T = A2T
        self.A3T = A3T
        self.skipped = skipped

    @property
    def T(self) -> int:
        """Sample size."""
        return int(self.y.size)

    @property
    def freqs(self) -> np.ndarray:
        """Fourier frequencies of the grid."""
        return frequencies(self.T)

    @property
    def whittle_only(self) -> bool:
        """``True`` if the third-order term is disabled (``n == 0``)."""
        return self.n == 0.0

    def value(self, spec: ModelSpec) -> float:
        """Return ``R_T`` for ``spec``; see :func:`rt_value`."""
        return rt_value(spec, self)


def _weights(m: float, n: Optional[float]) -> Tuple[float, float]:
    if n is None:
        n = 1.0 - m
    if not (0.0 <= m <= 1.0 and 0.0 <= n <= 1.0) or abs(m + n - 1.0) > 1e-12:
        raise ConfigError(
            "weights must satisfy m + n = 1 in [0, 1]: m={} n={}".format(m, n)
        )
    return float(m), float(n)


def normalising_constants(
    k2_bar: float, T: int, m: float, n: float
) -> Tuple[float, float]:
    """Return ``(A2T, A3T)`` for preliminary variance ``k2_bar``.

    ``A2T = m (2 pi)^2 / (4 k2_bar^2 T)`` and
    ``A3T = n (2 pi)^4 / (6 k2_bar^3 T^2)``.

    Raises:
        DegenerateError: if ``k2_bar`` is not positive.

    """
    if not k2_bar > 0:
        raise DegenerateError(
            "preliminary variance must be positive, got {!r}".format(k2_bar)
        )
    A2T = m * (2.0 * math.pi) ** 2 / (4.0 * k2_bar ** 2 * T)
    A3T = n * (2.0 * math.pi) ** 4 / (6.0 * k2_bar ** 3 * T ** 2)
    return A2T, A3T


def build_context(
    y: Sequence[float],
    p: int,
    m: float = 0.5,
    n: Optional[float] = None,
    weight: str = WEIGHT_MODULUS,
) -> ObjectiveContext:
    """Precompute the spectral grids, preliminary fit and weights of ``R_T``.

    Args:
        y (sequence): Observed series (centred here).
        p (int): Order of the preliminary causal fit.
        m (float, optional): Second-order weight.
        n (float, optional): Third-order weight, ``1 - m`` by default.
        weight (str, optional): ``"modulus"`` divides the third-order
            misfit by ``|Q(theta_bar)|^2``; ``"real"`` by ``Re Q(theta_bar)``.

    Returns:
        ObjectiveContext: shared, read-only evaluation context.

    """
    m, n = _weights(m, n)
    if weight not in WEIGHTS:
        raise ConfigError("unknown third-order weight {!r}".format(weight))

    summaries = summarize(y)
    T = summaries.T
    yc = center(np.asarray(y, dtype=float))
    prelim = _prelim(yc, p, summaries.I2)
    k2_bar = prelim.k2_bar

    grid = transfer_grid(ModelSpec.causal(prelim.theta_bar), T)
    denom2 = grid.psi.real ** 2 + grid.psi.imag ** 2
    q = bispectrum_weights(grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        if weight == WEIGHT_MODULUS:
            raw3 = q.real ** 2 + q.imag ** 2
        else:
            raw3 = q.real
        w3 = np.where(np.abs(raw3) >= DENOM_TOL, 1.0 / raw3, 0.0)

    mask2 = denom2 >= DENOM_TOL
    skipped = int(np.count_nonzero(~mask2) + np.count_nonzero(np.abs(raw3) < DENOM_TOL))
    if skipped:
        log.warning(
            "skipping %d grid points with denominators below %g", skipped, DENOM_TOL
        )
    # d(0) = 0 after centring, so I3 vanishes where w_j + w_i = 0
    w3[sum_index(T) == 0] = 0.0

    A2T, A3T = normalising_constants(k2_bar, T, m, n)

    log.debug(
        "objective context T=%d p=%d m=%.3g n=%.3g A2T=%.6g A3T=%.6g",
        T, p, m, n, A2T, A3T,
    )
    return ObjectiveContext(
        y=yc,
        p=p,
        I2=summaries.I2,
        I3=summaries.I3,
        theta_bar=prelim.theta_bar,
        k2_bar=k2_bar,
        m=m,
        n=n,
        weight=weight,
        denom2=np.where(mask2, denom2, np.inf),
        w3=w3,
        A2T=A2T,
        A3T=A3T,
        skipped=skipped,
    )


def rt_value(spec: ModelSpec, ctx: ObjectiveContext) -> float:
    """Return the minimum-distance criterion ``R_T`` of ``spec``.

    Non-stationary specs evaluate to ``+inf`` so that optimisers reject
    them. Summation runs in a fixed row-major order, so identical inputs
    give identical results.
    """
    if not spec.stationary:
        return math.inf

    T = ctx.T
    grid = transfer_grid(spec, T)
    psi2 = grid.psi.real ** 2 + grid.psi.imag ** 2

    I2 = ctx.I2
    k2 = 2.0 * math.pi / T * float(np.sum(I2 / psi2))
    s2 = k2 / (2.0 * math.pi) * psi2
    term2 = float(np.sum(((I2 - s2) / ctx.denom2) ** 2))
    value = ctx.A2T * term2

    if ctx.n > 0.0:
        I3 = ctx.I3
        q = bispectrum_weights(grid)
        k3 = 4.0 * math.pi ** 2 / T ** 2 * float(np.sum((I3 / q).real))
        diff = I3 - k3 / (2.0 * math.pi) ** 2 * q
        term3 = float(np.sum((diff.real ** 2 + diff.imag ** 2) * ctx.w3))
        value += ctx.A3T * term3

    if not math.isfinite(value):
        return math.inf
    return value


def implied_cumulants(spec: ModelSpec, ctx: ObjectiveContext) -> Tuple[float, float]:
    """Return ``(k2*, k3*)`` that ``spec`` implies for the context's data."""
    return k2_star(spec, ctx.I2), k3_star(spec, ctx.I3)
