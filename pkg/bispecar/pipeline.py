#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Empirical workflow: ingestion, detrending, order selection and diagnostics.

A typical session::

    frame = load_csv("brent.csv", "value")
    trend, cycle = hp_filter(frame)
    summary = diagnostics(cycle, pmax=4)
    report = analyze(cycle, p=summary["p"])

"""


import logging
import math
from collections import namedtuple
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import linalg, stats

from bispecar.objective import WEIGHT_MODULUS, fit_ar_ols
from bispecar.spectral import center
from bispecar.strategy import START_ROOTS, estimate_candidates
from bispecar.util import ConfigError, DataError, DegenerateError, DomainError

log = logging.getLogger(__name__)

#: Transform labels recorded on :class:`SeriesFrame`
TRANSFORM_NONE = "none"
TRANSFORM_HP = "hp_cycle"
TRANSFORM_TREND = "hp_trend"
TRANSFORM_LOGRET = "log_returns"

#: Penalty for monthly data
HP_LAMBDA = 129600.0

#: Accepted date formats, tried in order
DATE_FORMATS = ("%Y-%m-%d", "%Y-%m")

#: Minimum length for estimation paths
MIN_ESTIMATION_T = 50

#: Ljung-Box lags reported by :func:`diagnostics`
DIAGNOSTIC_LAGS = 2


class SeriesFrame(object):
    """A named, dated series and the transform that produced it.

    Attributes:
        name (str): Series label, usually the CSV column.
        timestamps (pandas.DatetimeIndex): Strictly increasing dates, or
            ``None`` for undated input.
        values (numpy.ndarray): Finite values.
        transform_applied (str): One of ``none``, ``hp_cycle``,
            ``hp_trend`` or ``log_returns``.

    """

    def __init__(
        self,
        name: str,
        values: Sequence[float],
        timestamps: Optional[pd.DatetimeIndex] = None,
        transform_applied: str = TRANSFORM_NONE,
    ) -> None:
        """Create new frame, validating values and dates."""
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1:
            raise DataError("series {!r} must be one-dimensional".format(name))
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise DataError("series {!r} has non-finite value at {}".format(name, bad))
        if timestamps is not None:
            if len(timestamps) != arr.size:
                raise DataError(
                    "series {!r}: {} dates for {} values".format(
                        name, len(timestamps), arr.size
                    )
                )
            if not timestamps.is_monotonic_increasing or not timestamps.is_unique:
                raise DataError("series {!r}: dates not strictly increasing".format(name))
        arr.flags.writeable = False
        self.name = name
        self.values = arr
        self.timestamps = timestamps
        self.transform_applied = transform_applied

    def __len__(self) -> int:
        """Number of observations."""
        return int(self.values.size)

    def __repr__(self) -> str:
        """Format frame as string."""
        return "SeriesFrame({!r}, T={}, transform={!r})".format(
            self.name, len(self), self.transform_applied
        )

    def derive(
        self,
        values: Sequence[float],
        transform: str,
        timestamps: Optional[pd.DatetimeIndex] = None,
    ) -> "SeriesFrame":
        """Return a new frame with the same name."""
        if timestamps is None and self.timestamps is not None:
            timestamps = self.timestamps[-len(values):] if len(values) else None
        return SeriesFrame(self.name, values, timestamps, transform)

    def require_length(self, minimum: int = MIN_ESTIMATION_T) -> None:
        """Raise :class:`DataError` if the frame is shorter than ``minimum``."""
        if len(self) < minimum:
            raise DataError(
                "series {!r} has {} observations, need at least {}".format(
                    self.name, len(self), minimum
                )
            )

    def to_frame(self) -> pd.DataFrame:
        """Return a ``date,value`` (or ``t,value``) :class:`pandas.DataFrame`."""
        if self.timestamps is None:
            return pd.DataFrame({"t": np.arange(len(self)), self.name: self.values})
        return pd.DataFrame(
            {"date": self.timestamps.strftime("%Y-%m-%d"), self.name: self.values}
        )


# Ingestion ------------------------------------------------------------


def _parse_dates(raw: pd.Series) -> pd.DatetimeIndex:
    for fmt in DATE_FORMATS:
        parsed = pd.to_datetime(raw, format=fmt, errors="coerce")
        if not parsed.isna().any():
            return pd.DatetimeIndex(parsed)
    bad = raw[pd.to_datetime(raw, format=DATE_FORMATS[0], errors="coerce").isna()]
    raise DataError(
        "unparsable date {!r} at row {} (expected YYYY-MM-DD or YYYY-MM)".format(
            bad.iloc[0], int(bad.index[0]) + 1
        )
    )


def load_csv(path: str, column: str, date_column: Optional[str] = None) -> SeriesFrame:
    """Read one numeric column of a headered CSV file.

    Dates are taken from ``date_column``, or from a ``date`` column when
    present. Rows are numbered from 1, not counting the header.

    Raises:
        DataError: if the file cannot be read, ``column`` is missing, a
            row is empty or unparsable, dates are not strictly increasing
            or fewer than 2 rows remain.

    """
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=True)
    except (OSError, ValueError, pd.errors.ParserError) as err:
        raise DataError("cannot read {}: {}".format(path, err))

    if column not in df.columns:
        raise DataError(
            "column {!r} not in {} (have: {})".format(
                column, path, ", ".join(map(str, df.columns))
            )
        )
    if len(df) < 2:
        raise DataError("{} has {} rows, need at least 2".format(path, len(df)))

    raw = df[column]
    missing = raw.isna()
    if missing.any():
        raise DataError(
            "NA value in column {!r} at row {}".format(
                column, int(missing.to_numpy().nonzero()[0][0]) + 1
            )
        )
    values = pd.to_numeric(raw.str.strip(), errors="coerce")
    bad = values.isna()
    if bad.any():
        row = int(bad.to_numpy().nonzero()[0][0])
        raise DataError(
            "unparsable value {!r} in column {!r} at row {}".format(
                raw.iloc[row], column, row + 1
            )
        )

    if date_column is None and "date" in df.columns and column != "date":
        date_column = "date"
    timestamps = None
    if date_column is not None:
        if date_column not in df.columns:
            raise DataError("date column {!r} not in {}".format(date_column, path))
        dates = df[date_column]
        if dates.isna().any():
            row = int(dates.isna().to_numpy().nonzero()[0][0])
            raise DataError("NA date at row {}".format(row + 1))
        timestamps = _parse_dates(dates.str.strip())

    frame = SeriesFrame(column, values.to_numpy(dtype=float), timestamps)
    log.debug("loaded %r from %s: %d rows", column, path, len(frame))
    return frame


# Transforms -----------------------------------------------------------


def log_returns(frame: SeriesFrame) -> SeriesFrame:
    """Return ``log(y_t) - log(y_{t-1})``; one observation shorter.

    Raises:
        DomainError: if any value is not positive.

    """
    y = frame.values
    if np.any(y <= 0):
        bad = int(np.flatnonzero(y <= 0)[0])
        raise DomainError(
            "log returns need positive values; {!r} has {} at row {}".format(
                frame.name, y[bad], bad + 1
            )
        )
    if y.size < 2:
        raise DataError("log returns need at least 2 observations")
    returns = np.diff(np.log(y))
    ts = frame.timestamps[1:] if frame.timestamps is not None else None
    return frame.derive(returns, TRANSFORM_LOGRET, ts)


def _hp_banded(T: int, lam: float) -> np.ndarray:
    """Upper banded form of ``I + lam D'D`` for :func:`scipy.linalg.solveh_banded`."""
    main = np.full(T, 6.0)
    main[[0, -1]] = 1.0
    main[[1, -2]] = 5.0
    off1 = np.full(T - 1, -4.0)
    off1[[0, -1]] = -2.0

    ab = np.zeros((3, T))
    ab[0, 2:] = lam
    ab[1, 1:] = lam * off1
    ab[2, :] = 1.0 + lam * main
    return ab


def hp_filter(
    frame: SeriesFrame, lam: float = HP_LAMBDA
) -> Tuple[SeriesFrame, SeriesFrame]:
    """Hodrick-Prescott decomposition of ``frame`` into trend and cycle.

    The trend minimises ``sum (y - tau)^2 + lam sum (second difference of tau)^2``
    and solves the symmetric pentadiagonal system ``(I + lam D'D) tau = y``.

    Args:
        frame (SeriesFrame): Input series, at least 4 observations.
        lam (float, optional): Smoothing penalty; 129600 suits monthly data.

    Returns:
        tuple: ``(trend, cycle)`` frames; ``trend + cycle == y``.

    """
    if lam < 0 or not math.isfinite(lam):
        raise ConfigError("HP penalty must be finite and >= 0, got {!r}".format(lam))
    y = frame.values
    T = y.size
    if T < 4:
        raise DataError("HP filter needs at least 4 observations, got {}".format(T))

    if lam == 0:
        trend = y.copy()
    else:
        try:
            trend = linalg.solveh_banded(_hp_banded(T, lam), y)
        except linalg.LinAlgError as err:
            raise DataError("HP system is singular: {}".format(err))
    cycle = y - trend
    log.debug("HP filter %r: T=%d lambda=%g", frame.name, T, lam)
    return (
        frame.derive(trend, TRANSFORM_TREND, frame.timestamps),
        frame.derive(cycle, TRANSFORM_HP, frame.timestamps),
    )


TRANSFORMS = {
    "none": lambda frame, lam: frame,
    "hp": lambda frame, lam: hp_filter(frame, lam)[1],
    "logret": lambda frame, lam: log_returns(frame),
}


def transform(frame: SeriesFrame, name: str, lam: float = HP_LAMBDA) -> SeriesFrame:
    """Apply the named transform (``none``, ``hp`` or ``logret``)."""
    try:
        func = TRANSFORMS[name]
    except KeyError:
        raise ConfigError(
            "unknown transform {!r}; choose from {}".format(name, ", ".join(TRANSFORMS))
        )
    return func(frame, lam)


# Order selection and diagnostics ----------------------------------------


OrderSelection = namedtuple("OrderSelection", ["p", "bic", "aic", "coefficients"])
"""Result of :func:`select_order`.

.. py:attribute:: p

    Order with the smallest BIC.

.. py:attribute:: bic

    BIC for ``k = 1..pmax``.

.. py:attribute:: aic

    AIC for ``k = 1..pmax``.

.. py:attribute:: coefficients

    Fitted AR(k) coefficients for ``k = 1..pmax``.

"""


def select_order(y: Sequence[float], pmax: int) -> OrderSelection:
    """Choose the causal AR order by BIC from Gaussian fits of order 1..pmax.

    All fits use the common sample ``t = pmax .. T-1`` so criteria are
    comparable.
    """
    if pmax < 1:
        raise ConfigError("pmax must be >= 1, got {}".format(pmax))
    arr = center(np.asarray(y, dtype=float))
    n = arr.size - pmax
    if n <= pmax + 1:
        raise DataError("series too short for order selection up to {}".format(pmax))

    bic: List[float] = []
    aic: List[float] = []
    coefs: List[List[float]] = []
    for k in range(1, pmax + 1):
        coef, resid = fit_ar_ols(arr, k, start=pmax)
        sigma2 = float(np.dot(resid, resid)) / n
        if sigma2 <= 0:
            raise DegenerateError("AR({}) fit leaves zero residual variance".format(k))
        loglik = -0.5 * n * (math.log(2.0 * math.pi * sigma2) + 1.0)
        aic.append(-2.0 * loglik + 2.0 * k)
        bic.append(-2.0 * loglik + k * math.log(n))
        coefs.append([float(c) for c in coef])

    p = int(np.argmin(bic)) + 1
    log.debug("order selection: p=%d bic=%s aic=%s", p, bic, aic)
    return OrderSelection(p, bic, aic, coefs)


def sample_acf(y: Sequence[float], nlags: int) -> np.ndarray:
    """Sample autocorrelations ``rho_0 .. rho_nlags`` (biased estimator)."""
    arr = np.asarray(y, dtype=float)
    if nlags < 0 or nlags >= arr.size:
        raise DataError("nlags must be in [0, {}), got {}".format(arr.size, nlags))
    dev = arr - arr.mean()
    denom = float(np.dot(dev, dev))
    if denom == 0:
        raise DegenerateError("autocorrelation of a constant series")
    T = arr.size
    return np.array([np.dot(dev[: T - k], dev[k:]) / denom for k in range(nlags + 1)])


LjungBox = namedtuple("LjungBox", ["lags", "q", "pvalue"])
"""Ljung-Box statistics for lags ``1..h``.

.. py:attribute:: lags
.. py:attribute:: q
.. py:attribute:: pvalue

"""


def ljung_box(resid: Sequence[float], lags: int) -> LjungBox:
    """Ljung-Box portmanteau test of ``resid`` for lags ``1..lags``.

    ``Q(h) = T (T + 2) sum_{k<=h} rho_k^2 / (T - k)`` with a chi-square
    p-value on ``h`` degrees of freedom.

    Raises:
        DataError: if ``lags`` is not below the length, or the series is
            not longer than ``lags + 5``.

    """
    arr = np.asarray(resid, dtype=float)
    T = arr.size
    if lags < 1:
        raise ConfigError("lags must be >= 1, got {}".format(lags))
    if lags >= T:
        raise DataError("lags ({}) must be below series length ({})".format(lags, T))
    if T <= lags + 5:
        raise DataError("Ljung-Box needs more than {} observations".format(lags + 5))

    rho = sample_acf(arr, lags)[1:]
    k = np.arange(1, lags + 1)
    q = T * (T + 2) * np.cumsum(rho ** 2 / (T - k))
    return LjungBox(k, q, stats.chi2.sf(q, k))


Descriptive = namedtuple("Descriptive", ["mean", "sd", "skewness", "kurtosis"])
"""Sample moments; ``kurtosis`` is the raw fourth standardised moment."""


def descriptive_stats(frame: Union[SeriesFrame, Sequence[float]]) -> Descriptive:
    """Return mean, sample sd, skewness and raw (non-excess) kurtosis.

    Raises:
        DegenerateError: for a constant series.

    """
    y = frame.values if isinstance(frame, SeriesFrame) else np.asarray(frame, float)
    if y.size < 4:
        raise DataError("descriptive statistics need at least 4 observations")
    if np.ptp(y) == 0:
        raise DegenerateError("series has zero variance")
    return Descriptive(
        float(np.mean(y)),
        float(np.std(y, ddof=1)),
        float(stats.skew(y, bias=True)),
        float(stats.kurtosis(y, fisher=False, bias=True)),
    )


def diagnostics(
    frame: SeriesFrame, pmax: int = 4, lags: int = DIAGNOSTIC_LAGS
) -> Dict[str, Any]:
    """Descriptive statistics, BIC order and AR(p) residual Ljung-Box p-values.

    Returns:
        dict: JSON-serializable summary with keys ``name``, ``transform``,
        ``T``, ``mean``, ``sd``, ``skewness``, ``kurtosis``, ``p``,
        ``bic``, ``aic``, ``coefficients`` and ``ljung_box``.

    """
    desc = descriptive_stats(frame)
    order = select_order(frame.values, pmax)
    resid = fit_ar_ols(center(frame.values), order.p)[1]
    lb = ljung_box(resid, lags)
    return {
        "name": frame.name,
        "transform": frame.transform_applied,
        "T": len(frame),
        "mean": desc.mean,
        "sd": desc.sd,
        "skewness": desc.skewness,
        "kurtosis": desc.kurtosis,
        "p": order.p,
        "bic": order.bic,
        "aic": order.aic,
        "coefficients": order.coefficients[order.p - 1],
        "ljung_box": [
            {"lag": int(h), "q": float(q), "pvalue": float(pv)}
            for h, q, pv in zip(*lb)
        ],
    }


def analyze(
    frame: SeriesFrame,
    p: Optional[int] = None,
    pmax: int = 4,
    m: float = 0.5,
    method: str = START_ROOTS,
    weight: str = WEIGHT_MODULUS,
    threads: int = 1,
) -> Dict[str, Any]:
    """Diagnostics plus identification across every split of ``p``.

    ``p`` defaults to the BIC choice from :func:`diagnostics`.
    """
    frame.require_length()
    summary = diagnostics(frame, pmax)
    order = summary["p"] if p is None else p
    report = estimate_candidates(
        frame.values, order, m=m, method=method, weight=weight, threads=threads
    )
    summary["identification"] = report.to_dict()
    log.info("%s: %s selected", frame.name, report.selected_spec.label)
    return summary
