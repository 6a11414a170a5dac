#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Estimation and identification of causal, noncausal and mixed autoregressions.

Models are fitted by minimising a joint distance between the periodogram
and biperiodogram of the data and the spectrum and bispectrum a
candidate model implies.
"""

# Errors
# Models
# Spectral estimates
# Estimation and identification
# Simulation
# Empirical pipeline
from .model import (
    CAUSAL,
    MIXED,
    NONCAUSAL,
    CausalRepresentation,
    ModelSpec,
    causal_to_noncausal,
    check_stationary,
    factor_initial_values,
    mixed_to_causal,
    noncausal_to_causal,
    residuals,
)
from .objective import ObjectiveContext, build_context, rt_value
from .optimize import EstimationResult, asymptotic_se, minimize_rt
from .pipeline import (
    SeriesFrame,
    descriptive_stats,
    hp_filter,
    ljung_box,
    load_csv,
    log_returns,
    select_order,
)
from .serializers import RunManifest, manager
from .simulate import (
    MonteCarloConfig,
    MonteCarloReport,
    StableParams,
    mc_run,
    simulate,
)
from .spectral import SpectralSummaries, biperiodogram, dft, periodogram, summarize
from .strategy import IdentificationReport, estimate_candidates, identify, initial_values
from .theory import bispectrum, k2_star, k3_star, spectrum, transfer
from .util import (
    BispecarError,
    ConfigError,
    DataError,
    DomainError,
    EstimationError,
    ModelError,
    library_version,
)

__title__ = "bispecar"
__version__ = library_version()
__licence__ = "MIT"

__all__ = [
    "CAUSAL",
    "MIXED",
    "NONCAUSAL",
    "BispecarError",
    "CausalRepresentation",
    "ConfigError",
    "DataError",
    "DomainError",
    "EstimationError",
    "EstimationResult",
    "IdentificationReport",
    "ModelError",
    "ModelSpec",
    "MonteCarloConfig",
    "MonteCarloReport",
    "ObjectiveContext",
    "RunManifest",
    "SeriesFrame",
    "SpectralSummaries",
    "StableParams",
    "asymptotic_se",
    "biperiodogram",
    "bispectrum",
    "build_context",
    "causal_to_noncausal",
    "check_stationary",
    "descriptive_stats",
    "dft",
    "estimate_candidates",
    "factor_initial_values",
    "hp_filter",
    "identify",
    "initial_values",
    "k2_star",
    "k3_star",
    "ljung_box",
    "load_csv",
    "log_returns",
    "manager",
    "mc_run",
    "minimize_rt",
    "mixed_to_causal",
    "noncausal_to_causal",
    "periodogram",
    "residuals",
    "rt_value",
    "select_order",
    "simulate",
    "spectrum",
    "summarize",
    "transfer",
]
