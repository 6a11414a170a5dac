#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Raw periodogram and biperiodogram on the Fourier grid.

Frequencies are ``w_j = 2 pi j / T`` for ``j = 1 .. T-1``. The
biperiodogram is kept on the full ``(T-1) x (T-1)`` grid and the sum
frequency ``w_j + w_i`` wraps to grid index ``(j + i) mod T``.
"""


import logging
import math
import warnings
from collections import namedtuple
from typing import Sequence, Tuple

import numpy as np
import scipy.fft as sp_fft
from scipy import stats

from bispecar.util import DataError, DegenerateError

log = logging.getLogger(__name__)

#: Relative size of the sample mean above which input counts as uncentred
CENTRED_TOL = 1e-8


SpectralSummaries = namedtuple("SpectralSummaries", ["T", "freqs", "I2", "I3"])
"""Periodogram and biperiodogram of one series.

.. py:attribute:: T

    Sample size.

.. py:attribute:: freqs

    Frequencies ``2 pi j / T``, ``j = 1..T-1``.

.. py:attribute:: I2

    Periodogram at :attr:`freqs`.

.. py:attribute:: I3

    Complex biperiodogram, ``I3[j-1, i-1]`` at ``(w_j, w_i)``.

"""


def _series(y: Sequence[float], minimum: int) -> np.ndarray:
    arr = np.asarray(y, dtype=float).ravel()
    if arr.size < minimum:
        raise DataError("need at least {} observations, got {}".format(minimum, arr.size))
    if not np.all(np.isfinite(arr)):
        raise DataError("series contains non-finite values")
    return arr


def frequencies(T: int) -> np.ndarray:
    """Return Fourier frequencies ``2 pi j / T`` for ``j = 1..T-1``."""
    return 2.0 * math.pi * np.arange(1, T) / T


def sum_index(T: int) -> np.ndarray:
    """Return the grid index ``(j + i) mod T`` for ``j, i = 1..T-1``."""
    j = np.arange(1, T)
    return (j[:, None] + j[None, :]) % T


def center(y: Sequence[float]) -> np.ndarray:
    """Return ``y`` minus its sample mean."""
    arr = np.asarray(y, dtype=float)
    return arr - arr.mean()


def dft(y: Sequence[float]) -> np.ndarray:
    """Return ``d(w_j) = sum_t y_t exp(-i t w_j)`` for ``j = 0..T-1``.

    Raises:
        DataError: if ``y`` has fewer than 4 points or non-finite values.

    """
    return sp_fft.fft(_series(y, 4))


def _warn_uncentred(y: np.ndarray) -> None:
    mean = abs(float(y.mean()))
    scale = float(y.std())
    if mean > CENTRED_TOL * scale or (scale == 0.0 and mean > 0.0):
        msg = "series is not centred (mean {:g}, sd {:g})".format(mean, scale)
        log.warning(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=3)


def periodogram(y: Sequence[float]) -> np.ndarray:
    """Return ``I2(w_j) = |d(w_j)|^2 / (2 pi T)`` for ``j = 1..T-1``.

    ``y`` should already be centred; a :class:`RuntimeWarning` is issued
    otherwise.
    """
    arr = _series(y, 4)
    _warn_uncentred(arr)
    d = sp_fft.fft(arr)[1:]
    return (d.real ** 2 + d.imag ** 2) / (2.0 * math.pi * arr.size)


def biperiodogram(y: Sequence[float]) -> np.ndarray:
    """Return the ``(T-1) x (T-1)`` biperiodogram.

    ``I3(w_j, w_i) = d(w_j) d(w_i) conj(d(w_j + w_i)) / ((2 pi)^2 T)``.
    """
    arr = _series(y, 8)
    _warn_uncentred(arr)
    T = arr.size
    d = sp_fft.fft(arr)
    inner = d[1:]
    return (inner[:, None] * inner[None, :]) * np.conj(d[sum_index(T)]) / (
        (2.0 * math.pi) ** 2 * T
    )


def summarize(y: Sequence[float]) -> SpectralSummaries:
    """Centre ``y`` and return its :class:`SpectralSummaries`."""
    arr = center(_series(y, 8))
    T = arr.size
    log.debug("spectral summaries for T=%d (%d bifrequencies)", T, (T - 1) ** 2)
    return SpectralSummaries(T, frequencies(T), periodogram(arr), biperiodogram(arr))


def sample_cumulants(e: Sequence[float]) -> Tuple[float, float]:
    """Return standardised third and fourth cumulants of ``e``.

    ``zeta = m3 / m2^1.5`` and ``kappa = m4 / m2^2 - 3`` from central
    sample moments (excess kurtosis).

    Raises:
        DataError: if fewer than 10 values.
        DegenerateError: if ``e`` has zero variance.

    """
    arr = _series(e, 10)
    if float(np.ptp(arr)) == 0.0:
        raise DegenerateError("zero variance; cumulants undefined")
    zeta = float(stats.skew(arr, bias=True))
    kappa = float(stats.kurtosis(arr, fisher=True, bias=True))
    return zeta, kappa
