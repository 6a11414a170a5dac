#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Model-implied transfer functions, spectra and bispectra.

With ``z = exp(-i w)`` the transfer function of a model is::

    psi(w) = 1 / (phi(z) varphi(1/z))

and::

    S2(w)      = k2 / (2 pi)   |psi(w)|^2
    S3(w1, w2) = k3 / (2 pi)^2 psi(w1) psi(w2) psi(-w1 - w2)

The grid versions use the same frequency and wrapping conventions as
:mod:`bispecar.spectral`, so theoretical and empirical grids can be
compared entry by entry.
"""


import logging
import math
from collections import namedtuple
from typing import Sequence, Union

import numpy as np

from bispecar.model import ModelSpec
from bispecar.spectral import sum_index
from bispecar.util import DomainError

log = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

#: Smallest |phi(z) varphi(1/z)| accepted before declaring a pole
POLE_TOL = 1e-300


TransferGrid = namedtuple("TransferGrid", ["psi", "psi_sum"])
"""Transfer function sampled on the Fourier grid of a sample of size T.

.. py:attribute:: psi

    ``psi(w_j)`` for ``j = 1..T-1``.

.. py:attribute:: psi_sum

    ``psi(-w_j - w_i)`` on the ``(T-1) x (T-1)`` bifrequency grid.

"""


def _lag_poly(coeffs: np.ndarray, omega: np.ndarray, sign: float) -> np.ndarray:
    """Evaluate ``1 - sum_k c_k exp(sign * i k w)``."""
    if not coeffs.size:
        return np.ones(omega.shape, dtype=complex)
    k = np.arange(1, coeffs.size + 1)
    powers = np.exp(sign * 1j * omega[..., None] * k)
    return 1.0 - powers @ coeffs


def transfer_values(spec: ModelSpec, omega: ArrayLike) -> np.ndarray:
    """Vectorised :func:`transfer`; returns an array shaped like ``omega``."""
    spec.require_stationary()
    w = np.asarray(omega, dtype=float)
    denom = _lag_poly(spec.phi, w, -1.0) * _lag_poly(spec.varphi, w, 1.0)
    if np.any(np.abs(denom) < POLE_TOL):
        raise DomainError("{} has a pole on the frequency grid".format(spec.label))
    return 1.0 / denom


def transfer(spec: ModelSpec, omega: float) -> complex:
    """Return ``psi(w)`` for a stationary ``spec``.

    Raises:
        DomainError: if ``spec`` is not stationary.

    """
    return complex(transfer_values(spec, np.array([omega]))[0])


def transfer_grid(spec: ModelSpec, T: int) -> TransferGrid:
    """Return :class:`TransferGrid` for sample size ``T``."""
    full = transfer_values(spec, 2.0 * math.pi * np.arange(T) / T)
    return TransferGrid(full[1:], np.conj(full[sum_index(T)]))


def _positive(k2e: float) -> None:
    if not k2e > 0:
        raise DomainError("innovation variance must be positive, got {!r}".format(k2e))


def spectrum(spec: ModelSpec, k2e: float, omega: ArrayLike) -> Union[float, np.ndarray]:
    """Return ``S2(w) = k2e / (2 pi) |psi(w)|^2``."""
    _positive(k2e)
    psi = transfer_values(spec, omega)
    out = k2e / (2.0 * math.pi) * (psi.real ** 2 + psi.imag ** 2)
    return float(out) if out.ndim == 0 else out


def bispectrum(
    spec: ModelSpec, k3e: float, omega1: ArrayLike, omega2: ArrayLike
) -> Union[complex, np.ndarray]:
    """Return ``S3(w1, w2) = k3e / (2 pi)^2 psi(w1) psi(w2) psi(-w1 - w2)``."""
    w1 = np.asarray(omega1, dtype=float)
    w2 = np.asarray(omega2, dtype=float)
    out = (
        k3e
        / (2.0 * math.pi) ** 2
        * transfer_values(spec, w1)
        * transfer_values(spec, w2)
        * transfer_values(spec, -w1 - w2)
    )
    return complex(out) if out.ndim == 0 else out


def bispectrum_weights(grid: TransferGrid) -> np.ndarray:
    """Return ``psi(w_j) psi(w_i) psi(-w_j - w_i)`` on the bifrequency grid."""
    return grid.psi[:, None] * grid.psi[None, :] * grid.psi_sum


def spectrum_grid(spec: ModelSpec, k2e: float, T: int) -> np.ndarray:
    """Return ``S2`` at ``w_j``, ``j = 1..T-1``."""
    _positive(k2e)
    psi = transfer_grid(spec, T).psi
    return k2e / (2.0 * math.pi) * (psi.real ** 2 + psi.imag ** 2)


def bispectrum_grid(spec: ModelSpec, k3e: float, T: int) -> np.ndarray:
    """Return ``S3`` on the ``(T-1) x (T-1)`` bifrequency grid."""
    return k3e / (2.0 * math.pi) ** 2 * bispectrum_weights(transfer_grid(spec, T))


def _finite(value: float, what: str, spec: ModelSpec) -> float:
    if not math.isfinite(value):
        raise DomainError("{} is not finite for {}".format(what, spec.label))
    return value


def k2_star(spec: ModelSpec, I2: Sequence[float]) -> float:
    """Return the innovation variance implied by ``spec`` and periodogram ``I2``.

    ``k2* = (2 pi / T) sum_j I2(w_j) / |psi(w_j)|^2``.
    """
    I2 = np.asarray(I2, dtype=float)
    T = I2.size + 1
    psi = transfer_grid(spec, T).psi
    total = float(np.sum(I2 * (psi.real ** 2 + psi.imag ** 2) ** -1))
    return _finite(2.0 * math.pi / T * total, "k2*", spec)


def k3_star(spec: ModelSpec, I3: np.ndarray) -> float:
    """Return the third innovation cumulant implied by ``spec`` and ``I3``.

    ``k3* = (4 pi^2 / T^2) sum_j sum_i Re[I3(w_j, w_i) / Q(w_j, w_i)]``
    with ``Q`` from :func:`bispectrum_weights`.
    """
    I3 = np.asarray(I3)
    T = I3.shape[0] + 1
    q = bispectrum_weights(transfer_grid(spec, T))
    total = float(np.sum((I3 / q).real))
    return _finite(4.0 * math.pi ** 2 / T ** 2 * total, "k3*", spec)
