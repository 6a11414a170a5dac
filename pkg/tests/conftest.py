#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Common pytest fixtures."""


import os
from contextlib import contextmanager
from shutil import rmtree
from tempfile import mkdtemp

import numpy as np
import pytest

from bispecar.model import ModelSpec
from bispecar.simulate import StableParams, simulate

#: Set to 1 to run the long Monte Carlo checks
SLOW_ENV = "BISPECAR_SLOW_TESTS"


def pytest_collection_modifyitems(config, items):
    """Skip tests marked ``slow`` unless ``BISPECAR_SLOW_TESTS=1``."""
    if os.getenv(SLOW_ENV) == "1":
        return
    skip = pytest.mark.skip(reason="set {}=1 to run".format(SLOW_ENV))
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@contextmanager
def env(**kwargs):
    """Context manager to alter and restore system environment."""
    prev = os.environ.copy()
    for k, v in list(kwargs.items()):
        if v is None:
            if k in os.environ:
                del os.environ[k]
        else:
            os.environ[k] = str(v)

    yield

    os.environ.clear()
    os.environ.update(prev)


@pytest.fixture(scope="function")
def tempdir():
    """Create (and delete) a temporary directory."""
    path = mkdtemp()
    yield path
    if os.path.exists(path):
        rmtree(path)


@pytest.fixture(scope="function")
def rng():
    """Seeded random generator."""
    return np.random.default_rng(20261018)


@pytest.fixture(scope="session")
def mar11_series():
    """MAR(1,1) (0.7; 0.2) series, alpha 1.5, beta 0.25, T=200."""
    spec = ModelSpec.mixed([0.7], [0.2])
    return simulate(spec, StableParams(1.5, 0.25), 200, seed=11)


@pytest.fixture(scope="session")
def ar1_series():
    """Causal AR(1) 0.7 with skewed stable innovations, T=300."""
    spec = ModelSpec.causal([0.7])
    return simulate(spec, StableParams(1.8, 0.5), 300, seed=7)
