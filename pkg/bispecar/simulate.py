#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Alpha-stable innovations, model simulation and Monte Carlo campaigns.

Innovations are drawn with :data:`scipy.stats.levy_stable`, whose
default S1 parametrisation gives a Gaussian with variance ``2 gamma^2``
at ``alpha = 2``. Causal filters run forward with
:func:`scipy.signal.lfilter`; noncausal filters run the same recursion
on the time-reversed stream.

Monte Carlo replications draw from independent streams derived from
``(seed, cell, replication)``, so results do not depend on how many
workers run them.
"""


import logging
import math
import time
from collections import namedtuple
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import signal, stats

from bispecar.model import CAUSAL, MIXED, NONCAUSAL, ModelSpec, min_root_modulus
from bispecar.objective import build_context
from bispecar.strategy import START_METHODS, START_ROOTS, estimate_candidates, identify
from bispecar.util import (
    BispecarError,
    ConfigError,
    ModelError,
    json_float,
    resolve_threads,
)

log = logging.getLogger(__name__)

#: Shortest burn-in per filter pass
MIN_BURN_IN = 200

#: Smallest sample size a Monte Carlo cell may use
MIN_MC_T = 50

Seed = Union[None, int, np.random.SeedSequence, np.random.Generator]


class ParameterError(ConfigError):
    """Raised if stable-law or campaign parameters are out of range."""


class StableParams(namedtuple("StableParams", ["alpha", "beta", "gamma", "delta"])):
    """Parameters of an alpha-stable law (S1 parametrisation).

    .. py:attribute:: alpha

        Stability index in ``(0, 2]``.

    .. py:attribute:: beta

        Skewness in ``[-1, 1]``.

    .. py:attribute:: gamma

        Scale, ``> 0``.

    .. py:attribute:: delta

        Location.

    """

    __slots__ = ()

    def __new__(
        cls, alpha: float, beta: float = 0.0, gamma: float = 1.0, delta: float = 0.0
    ) -> "StableParams":
        """Validate and create parameters."""
        values = [float(v) for v in (alpha, beta, gamma, delta)]
        if not all(math.isfinite(v) for v in values):
            raise ParameterError("stable parameters must be finite: {}".format(values))
        alpha, beta, gamma, delta = values
        if not 0.0 < alpha <= 2.0:
            raise ParameterError("alpha must lie in (0, 2], got {}".format(alpha))
        if not -1.0 <= beta <= 1.0:
            raise ParameterError("beta must lie in [-1, 1], got {}".format(beta))
        if not gamma > 0.0:
            raise ParameterError("gamma must be positive, got {}".format(gamma))
        return super(StableParams, cls).__new__(cls, alpha, beta, gamma, delta)


def stable_sample(params: StableParams, T: int, seed: Seed = None) -> np.ndarray:
    """Draw ``T`` i.i.d. alpha-stable variates.

    Draws use the Chambers-Mallows-Stuck transform behind
    :data:`scipy.stats.levy_stable` and are identical for identical
    ``seed``.
    """
    if T < 1:
        raise ParameterError("sample size must be positive, got {}".format(T))
    rng = np.random.default_rng(seed)
    draws = stats.levy_stable.rvs(
        params.alpha,
        params.beta,
        loc=params.delta,
        scale=params.gamma,
        size=T,
        random_state=rng,
    )
    return np.asarray(draws, dtype=float)


def _lag_filter(coeffs: np.ndarray, eps: np.ndarray) -> np.ndarray:
    if not coeffs.size:
        return eps.copy()
    return signal.lfilter([1.0], np.concatenate([[1.0], -coeffs]), eps)


def gen_causal(spec: ModelSpec, eps: Sequence[float], burn_in: int = 0) -> np.ndarray:
    """Return ``y_t = sum_j phi_j y_{t-j} + e_t`` started from zero.

    The first ``burn_in`` values are discarded.
    """
    if spec.family != CAUSAL:
        raise ModelError("expected a causal model, got {}".format(spec.label))
    spec.require_stationary()
    return _lag_filter(spec.phi, np.asarray(eps, dtype=float))[burn_in:]


def gen_noncausal(spec: ModelSpec, eps: Sequence[float], burn_in: int = 0) -> np.ndarray:
    """Return ``y_t = sum_j varphi_j y_{t+j} + e_t`` started from the end.

    The last ``burn_in`` values are discarded.
    """
    if spec.family != NONCAUSAL:
        raise ModelError("expected a noncausal model, got {}".format(spec.label))
    spec.require_stationary()
    y = _lag_filter(spec.varphi, np.asarray(eps, dtype=float)[::-1])[::-1]
    return y[: y.size - burn_in]


def gen_mar(spec: ModelSpec, eps: Sequence[float], burn_in: int = 0) -> np.ndarray:
    """Simulate a mixed model with a backward then a forward pass.

    ``u`` solves ``varphi(L^-1) u = e`` backwards (last ``burn_in`` values
    dropped), then ``y`` solves ``phi(L) y = u`` forwards (first
    ``burn_in`` values dropped).
    """
    if spec.family != MIXED:
        raise ModelError("expected a mixed model, got {}".format(spec.label))
    spec.require_stationary()
    u = _lag_filter(spec.varphi, np.asarray(eps, dtype=float)[::-1])[::-1]
    u = u[: u.size - burn_in]
    return _lag_filter(spec.phi, u)[burn_in:]


GENERATORS = {CAUSAL: gen_causal, NONCAUSAL: gen_noncausal, MIXED: gen_mar}


def burn_in_length(spec: ModelSpec) -> int:
    """Return ``max(200, 10 / log(min root modulus))``."""
    rho = min_root_modulus(spec)
    if not math.isfinite(rho):
        return MIN_BURN_IN
    return max(MIN_BURN_IN, int(math.ceil(10.0 / math.log(rho))))


Simulation = namedtuple("Simulation", ["y", "eps", "burn_in"])
"""A simulated series with the innovations aligned to it."""


def simulate(
    spec: ModelSpec,
    params: StableParams,
    T: int,
    seed: Seed = None,
    burn_in: Optional[int] = None,
) -> Simulation:
    """Simulate ``T`` observations of ``spec`` with alpha-stable innovations.

    ``eps[t]`` is the innovation entering ``y[t]``, so
    :func:`~bispecar.model.residuals` of ``y`` reproduces ``eps`` on
    the interior.
    """
    spec.require_stationary()
    B = burn_in_length(spec) if burn_in is None else int(burn_in)
    passes = 2 if spec.family == MIXED else 1
    eps = stable_sample(params, T + passes * B, seed)
    y = GENERATORS[spec.family](spec, eps, B)

    if spec.family == NONCAUSAL:
        aligned = eps[:T]
    else:
        aligned = eps[B : B + T]
    return Simulation(y, aligned, B)


# Monte Carlo ----------------------------------------------------------


class MonteCarloConfig(object):
    """Settings of a Monte Carlo campaign.

    Cells are all ``(T, alpha)`` combinations; every cell runs ``M``
    replications and every replication is estimated with each start
    method in ``start``.

    Args:
        dgp (ModelSpec): Data-generating model.
        alphas (sequence): Stability indices.
        T (sequence): Sample sizes, each ``>= 50``.
        M (int): Replications per cell.
        seed (int): Master seed.
        p (int, optional): Candidate order, ``r + s`` of ``dgp`` by default.
        beta, gamma, delta (float): Remaining stable parameters.
        m (float): Second-order weight (``n = 1 - m``).
        start (sequence): Start methods to compare.

    """

    def __init__(
        self,
        dgp: ModelSpec,
        alphas: Sequence[float],
        T: Sequence[int],
        M: int,
        seed: int = 0,
        p: Optional[int] = None,
        beta: float = 0.0,
        gamma: float = 1.0,
        delta: float = 0.0,
        m: float = 0.5,
        start: Sequence[str] = (START_ROOTS,),
    ) -> None:
        """Validate and create config."""
        if not dgp.stationary:
            raise ParameterError("DGP {} is not stationary".format(dgp))
        self.dgp = dgp
        self.stable = [StableParams(a, beta, gamma, delta) for a in alphas]
        if not self.stable:
            raise ParameterError("at least one alpha is required")
        self.T = [int(t) for t in T]
        if not self.T or min(self.T) < MIN_MC_T:
            raise ParameterError(
                "sample sizes must be >= {}: {}".format(MIN_MC_T, self.T)
            )
        self.M = int(M)
        if self.M < 1:
            raise ParameterError("M must be >= 1, got {}".format(M))
        self.seed = int(seed)
        self.p = int(p) if p else dgp.r + dgp.s
        if self.p < 1:
            raise ParameterError("candidate order p must be >= 1")
        if not 0.0 <= m <= 1.0:
            raise ParameterError("m must lie in [0, 1], got {}".format(m))
        self.m = float(m)
        self.start = [start] if isinstance(start, str) else list(start)
        unknown = set(self.start) - set(START_METHODS)
        if unknown or not self.start:
            raise ParameterError("unknown start methods: {}".format(sorted(unknown)))

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "MonteCarloConfig":
        """Build config from a settings mapping (see :mod:`bispecar.config`)."""
        try:
            dgp = ModelSpec.from_dict(data["dgp"])
            alphas = data["alpha"]
            if isinstance(alphas, (int, float)):
                alphas = [alphas]
            sizes = data["T"]
            if isinstance(sizes, int):
                sizes = [sizes]
            return cls(
                dgp,
                alphas,
                sizes,
                data["M"],
                seed=data.get("seed", 0),
                p=data.get("p"),
                beta=data.get("beta", 0.0),
                gamma=data.get("gamma", 1.0),
                delta=data.get("delta", 0.0),
                m=data.get("m", 0.5),
                start=data.get("start", START_ROOTS),
            )
        except KeyError as err:
            raise ConfigError("Monte Carlo config lacks key {}".format(err)) from err
        except ModelError as err:
            raise ConfigError("invalid DGP in config: {}".format(err)) from err
        except (TypeError, ValueError) as err:
            raise ConfigError("invalid Monte Carlo config: {}".format(err)) from err

    @property
    def cells(self) -> List[tuple]:
        """``(T, StableParams)`` per cell, sample size outermost."""
        return [(t, params) for t in self.T for params in self.stable]

    def to_dict(self) -> Dict[str, Any]:
        """Return JSON-serializable representation."""
        base = self.stable[0]
        return {
            "dgp": self.dgp.to_dict(),
            "alpha": [p.alpha for p in self.stable],
            "beta": base.beta,
            "gamma": base.gamma,
            "delta": base.delta,
            "T": list(self.T),
            "M": self.M,
            "seed": self.seed,
            "p": self.p,
            "m": self.m,
            "start": list(self.start),
        }


def replication_seed(seed: int, cell: int, rep: int) -> np.random.SeedSequence:
    """Return the independent stream of replication ``rep`` in ``cell``."""
    return np.random.SeedSequence(seed, spawn_key=(cell, rep))


def _replicate(
    config: MonteCarloConfig, cell: int, T: int, params: StableParams, rep: int
) -> Dict[str, Any]:
    """Run one replication and return its log record."""
    dgp = config.dgp
    record: Dict[str, Any] = {
        "cell": cell,
        "T": T,
        "alpha": params.alpha,
        "rep": rep,
        "status": "ok",
        "error": None,
        "results": {},
    }
    try:
        sim = simulate(dgp, params, T, replication_seed(config.seed, cell, rep))
        ctx = build_context(sim.y, config.p, m=config.m)
        for method in config.start:
            report = estimate_candidates(
                sim.y, config.p, method=method, ctx=ctx, standard_errors=False
            )
            chosen = identify(report)
            record["results"][method] = {
                "selected": chosen.label,
                "identified": chosen.family == dgp.family
                and (chosen.r, chosen.s) == (dgp.r, dgp.s),
                "theta": [float(v) for v in chosen.theta],
                "rt": {
                    c.result.spec.label: json_float(c.result.rt)
                    for c in report.candidates
                    if c.result is not None
                },
            }
    except BispecarError as err:
        log.warning("replication %d of cell %d failed: %s", rep, cell, err)
        record.update(status="failed", error=str(err), results={})
    return record


class MonteCarloReport(object):
    """Aggregated results of :func:`mc_run`.

    Attributes:
        config (MonteCarloConfig): Campaign settings.
        replications (list): One record per replication, in cell order.

    """

    def __init__(
        self, config: MonteCarloConfig, replications: List[Dict[str, Any]]
    ) -> None:
        """Create new report."""
        self.config = config
        self.replications = replications

    def _records(self, cell: int) -> List[Dict[str, Any]]:
        return [rec for rec in self.replications if rec["cell"] == cell]

    def rates_frame(self) -> pd.DataFrame:
        """Identification rate per cell and start method.

        ``rate`` is the fraction of completed replications whose selected
        model matches the DGP; failed replications are counted apart.
        """
        rows = []
        for cell, (T, params) in enumerate(self.config.cells):
            records = self._records(cell)
            done = [rec for rec in records if rec["status"] == "ok"]
            for method in self.config.start:
                hits = sum(1 for rec in done if rec["results"][method]["identified"])
                rows.append(
                    {
                        "model": self.config.dgp.label,
                        "T": T,
                        "alpha": params.alpha,
                        "start": method,
                        "M": len(records),
                        "completed": len(done),
                        "failed": len(records) - len(done),
                        "identified": hits,
                        "rate": hits / len(done) if done else float("nan"),
                    }
                )
        return pd.DataFrame(rows)

    def estimates_frame(self) -> pd.DataFrame:
        """Mean and sd of coefficients over correctly identified replications."""
        names = self.config.dgp.coefficient_names
        truth = self.config.dgp.theta
        rows = []
        for cell, (T, params) in enumerate(self.config.cells):
            done = [rec for rec in self._records(cell) if rec["status"] == "ok"]
            for method in self.config.start:
                hits = np.array(
                    [
                        rec["results"][method]["theta"]
                        for rec in done
                        if rec["results"][method]["identified"]
                    ]
                ).reshape(-1, len(names))
                for k, name in enumerate(names):
                    column = hits[:, k]
                    rows.append(
                        {
                            "model": self.config.dgp.label,
                            "T": T,
                            "alpha": params.alpha,
                            "start": method,
                            "coefficient": name,
                            "true": float(truth[k]),
                            "count": int(column.size),
                            "mean": float(column.mean()) if column.size else float("nan"),
                            "sd": float(column.std(ddof=1))
                            if column.size > 1
                            else float("nan"),
                        }
                    )
        return pd.DataFrame(rows)

    @property
    def failures(self) -> int:
        """Number of failed replications."""
        return sum(1 for rec in self.replications if rec["status"] != "ok")

    def to_dict(self) -> Dict[str, Any]:
        """Return JSON-serializable replication log."""
        return {"config": self.config.to_dict(), "replications": self.replications}


def mc_run(config: MonteCarloConfig, threads: Optional[int] = 1) -> MonteCarloReport:
    """Run a Monte Carlo campaign.

    Replications run on up to ``threads`` worker processes; the report
    is identical for any worker count.
    """
    tasks = [
        (cell, T, params, rep)
        for cell, (T, params) in enumerate(config.cells)
        for rep in range(config.M)
    ]
    workers = resolve_threads(threads)
    log.info(
        "Monte Carlo: %s, %d cells x %d replications on %d workers",
        config.dgp.label,
        len(config.cells),
        config.M,
        workers,
    )
    start = time.time()
    if workers == 1:
        records = [_replicate(config, *task) for task in tasks]
    else:
        records = Parallel(n_jobs=workers)(
            delayed(_replicate)(config, *task) for task in tasks
        )
    report = MonteCarloReport(config, list(records))
    log.info(
        "Monte Carlo finished in %0.1fs with %d failed replications",
        time.time() - start,
        report.failures,
    )
    return report
