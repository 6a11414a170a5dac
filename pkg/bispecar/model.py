#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Model specifications and the algebra of their lag polynomials.

A model is a pair of lag polynomials::

    phi(L)       = 1 - phi_1 L - ... - phi_r L^r          (causal part)
    varphi(L^-1) = 1 - varphi_1 L^-1 - ... - varphi_s L^-s (noncausal part)

with ``varphi(L^-1) phi(L) y_t = e_t``. :class:`ModelSpec` holds the
coefficients; the functions in this module map noncausal and mixed
models to and from their purely causal AR(r+s) representation.

All polynomial roots are found as eigenvalues of the companion matrix.
"""


import logging
import math
from collections import namedtuple
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from bispecar.util import DataError, DomainError, ModelError

log = logging.getLogger(__name__)

#: Model families
CAUSAL = "causal"
NONCAUSAL = "noncausal"
MIXED = "mixed"
FAMILIES = (CAUSAL, NONCAUSAL, MIXED)

#: Largest supported r + s. Companion factoring loses accuracy beyond it.
MAX_ORDER = 10

#: |varphi_s| below this means the model really has order s - 1
DEGENERATE_TOL = 1e-6

#: Roots closer than this to the unit circle cannot be partitioned
BOUNDARY_TOL = 1e-8

#: Largest imaginary residue tolerated in a reconstructed real polynomial
IMAG_TOL = 1e-10


class OrderError(ModelError):
    """Raised if orders and coefficient vectors are inconsistent."""


class DegenerateOrderError(ModelError):
    """Raised if the leading noncausal coefficient is (numerically) zero.

    The model is then really of lower noncausal order.
    """


class InversionError(ModelError):
    """Raised if a causal representation cannot be inverted."""


class PartitionError(ModelError):
    """Raised if the roots of a causal representation do not split r/s."""


class BoundaryError(ModelError):
    """Raised if a causal representation has a root on the unit circle."""


CausalRepresentation = namedtuple("CausalRepresentation", ["coeffs", "scale"])
"""Purely causal AR(r+s) rewrite of a model.

.. py:attribute:: coeffs

    :class:`numpy.ndarray` of length r + s, the lag coefficients of
    ``1 - c_1 z - ... - c_{r+s} z^{r+s}``.

.. py:attribute:: scale

    Scaling of the error term, ``-1/varphi_s`` (``1.0`` for causal models).

"""


def family_for(r: int, s: int) -> str:
    """Return the model family implied by orders ``r`` and ``s``.

    White noise (``r = s = 0``) is treated as a causal model of order 0.
    """
    if r < 0 or s < 0:
        raise OrderError("orders must be non-negative: r={} s={}".format(r, s))
    if r and s:
        return MIXED
    if s:
        return NONCAUSAL
    return CAUSAL


def _vector(values: Optional[Iterable[float]], name: str) -> np.ndarray:
    arr = np.array([] if values is None else list(values), dtype=float)
    if arr.ndim != 1:
        raise OrderError("{} must be a flat vector".format(name))
    if not np.all(np.isfinite(arr)):
        raise ModelError("{} contains non-finite values: {!r}".format(name, arr))
    arr.flags.writeable = False
    return arr


class ModelSpec(object):
    """An immutable causal, noncausal or mixed AR model.

    Orders are taken from the coefficient vectors, so a spec always has
    ``r == len(phi)`` and ``s == len(varphi)``. Stationarity is not
    required at construction; use :attr:`stationary` or
    :meth:`require_stationary`.

    Args:
        family (str): One of :data:`CAUSAL`, :data:`NONCAUSAL`, :data:`MIXED`.
        phi (sequence, optional): Causal coefficients ``phi_1..phi_r``.
        varphi (sequence, optional): Noncausal coefficients
            ``varphi_1..varphi_s``.

    Raises:
        OrderError: if the family does not match the orders.

    """

    __slots__ = ("_family", "_phi", "_varphi")

    def __init__(
        self,
        family: str,
        phi: Optional[Sequence[float]] = None,
        varphi: Optional[Sequence[float]] = None,
    ) -> None:
        """Create a new :class:`ModelSpec`."""
        if family not in FAMILIES:
            raise OrderError("unknown model family: {!r}".format(family))

        self._phi = _vector(phi, "phi")
        self._varphi = _vector(varphi, "varphi")
        self._family = family

        r, s = self.r, self.s
        if family == CAUSAL and s:
            raise OrderError("causal model cannot have noncausal coefficients")
        if family == NONCAUSAL and r:
            raise OrderError("noncausal model cannot have causal coefficients")
        if family == MIXED and not (r and s):
            raise OrderError(
                "mixed model needs r >= 1 and s >= 1, got r={} s={}".format(r, s)
            )
        if r + s > MAX_ORDER:
            raise OrderError(
                "r + s = {} exceeds supported maximum {}".format(r + s, MAX_ORDER)
            )

    # Constructors -----------------------------------------------------

    @classmethod
    def causal(cls, phi: Sequence[float]) -> "ModelSpec":
        """Return an AR(r,0) model."""
        return cls(CAUSAL, phi=phi)

    @classmethod
    def noncausal(cls, varphi: Sequence[float]) -> "ModelSpec":
        """Return an AR(0,s) model."""
        return cls(NONCAUSAL, varphi=varphi)

    @classmethod
    def mixed(cls, phi: Sequence[float], varphi: Sequence[float]) -> "ModelSpec":
        """Return a MAR(r,s) model."""
        return cls(MIXED, phi=phi, varphi=varphi)

    @classmethod
    def from_theta(cls, r: int, s: int, theta: Sequence[float]) -> "ModelSpec":
        """Build a spec from a stacked coefficient vector.

        ``theta`` holds ``phi_1..phi_r`` followed by ``varphi_1..varphi_s``.
        """
        theta = np.asarray(theta, dtype=float).ravel()
        if theta.size != r + s:
            raise OrderError(
                "expected {} coefficients for ({}, {}), got {}".format(
                    r + s, r, s, theta.size
                )
            )
        return cls(family_for(r, s), phi=theta[:r], varphi=theta[r:])

    # Attributes -------------------------------------------------------

    @property
    def family(self) -> str:
        """Model family."""
        return self._family

    @property
    def phi(self) -> np.ndarray:
        """Causal coefficients (read-only array)."""
        return self._phi

    @property
    def varphi(self) -> np.ndarray:
        """Noncausal coefficients (read-only array)."""
        return self._varphi

    @property
    def r(self) -> int:
        """Causal order."""
        return int(self._phi.size)

    @property
    def s(self) -> int:
        """Noncausal order."""
        return int(self._varphi.size)

    @property
    def theta(self) -> np.ndarray:
        """Stacked coefficient vector ``(phi, varphi)``."""
        return np.concatenate([self._phi, self._varphi])

    @property
    def label(self) -> str:
        """Short name, e.g. ``AR(2,0)`` or ``MAR(1,1)``."""
        prefix = "MAR" if self._family == MIXED else "AR"
        return "{}({},{})".format(prefix, self.r, self.s)

    @property
    def coefficient_names(self) -> List[str]:
        """Names of the entries of :attr:`theta`."""
        return ["phi_{}".format(i + 1) for i in range(self.r)] + [
            "varphi_{}".format(i + 1) for i in range(self.s)
        ]

    def with_theta(self, theta: Sequence[float]) -> "ModelSpec":
        """Return a spec of the same orders with coefficients ``theta``."""
        return ModelSpec.from_theta(self.r, self.s, theta)

    # Stationarity -----------------------------------------------------

    @property
    def stationary(self) -> bool:
        """``True`` if both lag polynomials have all roots outside the unit circle."""
        for coeffs in (self._phi, self._varphi):
            if coeffs.size and not check_stationary(coeffs)[0]:
                return False
        return True

    def require_stationary(self) -> "ModelSpec":
        """Return ``self`` or raise :class:`DomainError` if not stationary."""
        if not self.stationary:
            raise DomainError("{} is not stationary: {}".format(self.label, self))
        return self

    # Serialization ----------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        """Return JSON-serializable representation."""
        return {
            "family": self._family,
            "r": self.r,
            "s": self.s,
            "phi": [float(v) for v in self._phi],
            "varphi": [float(v) for v in self._varphi],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ModelSpec":
        """Inverse of :meth:`to_dict`.

        ``r`` and ``s`` are optional but must agree with the vectors
        when present.
        """
        try:
            spec = cls(
                data["family"], phi=data.get("phi") or [], varphi=data.get("varphi") or []
            )
        except KeyError as err:
            raise ModelError("model JSON lacks key {}".format(err)) from err
        except (TypeError, ValueError) as err:
            raise ModelError("invalid model JSON: {}".format(err)) from err

        for key in ("r", "s"):
            if key in data and int(data[key]) != getattr(spec, key):
                raise OrderError(
                    "{}={} does not match coefficient vector length {}".format(
                        key, data[key], getattr(spec, key)
                    )
                )
        return spec

    # Python API -------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        """Compare family and coefficients exactly."""
        if not isinstance(other, ModelSpec):
            return NotImplemented
        return (
            self._family == other._family
            and np.array_equal(self._phi, other._phi)
            and np.array_equal(self._varphi, other._varphi)
        )

    def __hash__(self) -> int:
        """Hash on family and coefficients."""
        return hash((self._family, tuple(self._phi), tuple(self._varphi)))

    def __repr__(self) -> str:
        """Return readable representation."""
        return "ModelSpec({!r}, phi={}, varphi={})".format(
            self._family, list(self._phi), list(self._varphi)
        )


WHITE_NOISE = ModelSpec(CAUSAL)


# Polynomial algebra ---------------------------------------------------


def companion(coeffs: Sequence[float]) -> np.ndarray:
    """Return the companion matrix of ``1 - c_1 z - ... - c_k z^k``.

    Its eigenvalues are the reciprocals of the polynomial's roots.
    """
    c = np.asarray(coeffs, dtype=float)
    k = c.size
    mat = np.zeros((k, k))
    mat[0, :] = c
    if k > 1:
        mat[1:, :-1] = np.eye(k - 1)
    return mat


def _trim(coeffs: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(coeffs)
    if not nz.size:
        return coeffs[:0]
    return coeffs[: nz[-1] + 1]


def lag_roots(coeffs: Sequence[float]) -> np.ndarray:
    """Return the roots of ``1 - c_1 z - ... - c_k z^k``.

    Trailing zero coefficients lower the degree, so fewer than ``k``
    roots may be returned.
    """
    c = _trim(np.asarray(coeffs, dtype=float))
    if not c.size:
        return np.zeros(0, dtype=complex)
    return 1.0 / np.linalg.eigvals(companion(c))


def check_stationary(coeffs: Sequence[float]) -> Tuple[bool, np.ndarray]:
    """Check whether ``1 - c_1 z - ... - c_k z^k`` has all roots outside |z| = 1.

    Args:
        coeffs (sequence): Lag coefficients ``c_1..c_k``, ``k >= 1``.

    Returns:
        tuple: ``(stationary, moduli)`` where ``moduli`` are the root
            moduli in ascending order.

    Raises:
        OrderError: if ``coeffs`` is empty.

    """
    c = np.asarray(coeffs, dtype=float).ravel()
    if not c.size:
        raise OrderError("cannot check stationarity of an empty polynomial")
    if not np.all(np.isfinite(c)):
        raise ModelError("non-finite coefficients: {!r}".format(c))

    moduli = np.sort(np.abs(lag_roots(c)))
    if not moduli.size:
        return True, moduli
    return bool(moduli[0] > 1.0), moduli


def min_root_modulus(spec: ModelSpec) -> float:
    """Return the smallest root modulus over both polynomials of ``spec``."""
    smallest = math.inf
    for coeffs in (spec.phi, spec.varphi):
        if coeffs.size:
            moduli = check_stationary(coeffs)[1]
            if moduli.size:
                smallest = min(smallest, float(moduli[0]))
    return smallest


def operator_coefficients(spec: ModelSpec) -> np.ndarray:
    """Coefficients of ``L^s varphi(L^-1) phi(L)`` in ascending powers of L.

    The combined filter applied to ``y_{t+s}`` gives ``e_t``; entry ``i``
    multiplies ``y_{t+s-i}``.
    """
    lead = np.concatenate([-spec.varphi[::-1], [1.0]])
    lag = np.concatenate([[1.0], -spec.phi])
    return np.convolve(lead, lag)


def _check_degenerate(s: int, varphi_s: float) -> None:
    if abs(varphi_s) < DEGENERATE_TOL:
        raise DegenerateOrderError(
            "|varphi_{}| = {:g} is below {:g}; model has lower order".format(
                s, abs(varphi_s), DEGENERATE_TOL
            )
        )


def _normalised(c: np.ndarray, s: int, varphi_s: float) -> CausalRepresentation:
    if s:
        _check_degenerate(s, varphi_s)
    coeffs = -c[1:] / c[0]
    scale = -1.0 / varphi_s if s else 1.0
    return CausalRepresentation(coeffs, scale)


def noncausal_to_causal(spec: ModelSpec) -> CausalRepresentation:
    """Rewrite an AR(0,s) model as an AR(s,0) with roots inside the unit circle.

    The lag-``k`` coefficient is ``-varphi_{s-k}/varphi_s`` for ``k < s``
    and ``1/varphi_s`` for ``k = s``; the error is scaled by
    ``-1/varphi_s``.

    Raises:
        OrderError: if ``spec`` is not a noncausal model of order >= 1.
        DegenerateOrderError: if ``|varphi_s| < 1e-6``.

    """
    if spec.family != NONCAUSAL or not spec.s:
        raise OrderError("expected a noncausal model, got {}".format(spec.label))
    varphi = spec.varphi
    last = float(varphi[-1])
    _check_degenerate(spec.s, last)

    coeffs = np.empty(spec.s)
    coeffs[:-1] = -varphi[:-1][::-1] / last
    coeffs[-1] = 1.0 / last
    return CausalRepresentation(coeffs, -1.0 / last)


def causal_to_noncausal(rep: Any, s: int) -> ModelSpec:
    """Invert :func:`noncausal_to_causal`.

    Args:
        rep (CausalRepresentation or sequence): Causal coefficients.
        s (int): Noncausal order; must equal ``len(rep)``.

    Raises:
        OrderError: if lengths disagree.
        InversionError: if the last coefficient is zero.

    """
    coeffs = np.asarray(getattr(rep, "coeffs", rep), dtype=float).ravel()
    if coeffs.size != s or s < 1:
        raise OrderError(
            "causal representation has {} coefficients, expected s={}".format(
                coeffs.size, s
            )
        )
    if coeffs[-1] == 0.0 or not np.isfinite(coeffs[-1]):
        raise InversionError("last causal coefficient is zero; cannot invert")

    last = 1.0 / coeffs[-1]
    varphi = np.empty(s)
    varphi[-1] = last
    varphi[:-1] = -(coeffs[:-1] * last)[::-1]
    return ModelSpec.noncausal(varphi)


def mixed_to_causal(spec: ModelSpec) -> CausalRepresentation:
    """Return the AR(r+s,0) closed form of a MAR(r,s) model.

    Convolves ``phi(L)`` with ``L^s varphi(L^-1)`` and normalises by
    ``-1/varphi_s``. For r = s = 1 this gives
    ``((1 + phi_1 varphi_1)/varphi_1, -phi_1/varphi_1)``.

    Raises:
        OrderError: if ``spec`` is not mixed.
        DegenerateOrderError: if ``|varphi_s| < 1e-6``.

    """
    if spec.family != MIXED:
        raise OrderError("expected a mixed model, got {}".format(spec.label))
    return _normalised(operator_coefficients(spec), spec.s, float(spec.varphi[-1]))


def causal_representation(spec: ModelSpec) -> CausalRepresentation:
    """Return the causal representation of any model."""
    if spec.family == MIXED:
        return mixed_to_causal(spec)
    if spec.family == NONCAUSAL:
        return noncausal_to_causal(spec)
    return CausalRepresentation(np.array(spec.phi), 1.0)


def polynomial_from_roots(roots: Sequence[complex], order: int) -> np.ndarray:
    """Return lag coefficients of ``prod_j (1 - z/roots_j)`` padded to ``order``.

    Conjugate roots must come in pairs; an imaginary residue larger than
    ``1e-10`` in the result raises :class:`ModelError`.
    """
    roots = np.asarray(roots, dtype=complex)
    out = np.zeros(order)
    if not roots.size:
        return out

    poly = np.poly(1.0 / roots)
    if np.iscomplexobj(poly):
        residue = float(np.max(np.abs(poly.imag)))
        if residue > IMAG_TOL:
            raise ModelError(
                "roots are not closed under conjugation (residue {:g})".format(residue)
            )
        poly = poly.real
    out[: roots.size] = -poly[1:]
    return out


def factor_initial_values(rep: Any, r: int, s: int) -> ModelSpec:
    """Split a causal representation into causal and noncausal factors.

    The roots of ``1 - c_1 z - ... - c_{r+s} z^{r+s}`` outside the unit
    circle build ``phi``; the roots inside it are reciprocated to build
    ``varphi``. Missing roots (a zero leading coefficient) count as roots
    at infinity and belong to the causal factor.

    Args:
        rep (CausalRepresentation or sequence): Causal coefficients.
        r (int): Causal order of the target model.
        s (int): Noncausal order of the target model.

    Returns:
        ModelSpec: Causal, noncausal or mixed model with orders (r, s).

    Raises:
        OrderError: if ``len(rep) != r + s``.
        BoundaryError: if a root lies within 1e-8 of the unit circle.
        PartitionError: if the root moduli do not split into r outside
            and s inside.

    """
    coeffs = np.asarray(getattr(rep, "coeffs", rep), dtype=float).ravel()
    if coeffs.size != r + s:
        raise OrderError(
            "causal representation has {} coefficients, expected r+s={}".format(
                coeffs.size, r + s
            )
        )
    family = family_for(r, s)
    if not coeffs.size:
        return ModelSpec(family)

    roots = lag_roots(coeffs)
    moduli = np.abs(roots)
    if np.any(np.abs(moduli - 1.0) < BOUNDARY_TOL):
        raise BoundaryError("causal representation has a unit root: {}".format(roots))

    outside = roots[moduli > 1.0]
    inside = roots[moduli < 1.0]
    at_infinity = coeffs.size - roots.size
    if outside.size + at_infinity != r or inside.size > s:
        raise PartitionError(
            "{} roots outside and {} inside the unit circle; need ({}, {})".format(
                outside.size + at_infinity, inside.size, r, s
            )
        )

    phi = polynomial_from_roots(outside, r)
    varphi = polynomial_from_roots(1.0 / inside, s)
    log.debug("factored %s into phi=%s varphi=%s", coeffs, phi, varphi)
    return ModelSpec(family, phi=phi, varphi=varphi)


def residuals(spec: ModelSpec, y: Sequence[float]) -> Tuple[np.ndarray, float]:
    """Return ``varphi(L^-1) phi(L) y_t`` and its sum of squares.

    Residuals are defined for ``t = r .. T-s-1`` (zero-based), so
    ``T - r - s`` values are returned.

    Raises:
        DataError: if ``y`` has fewer than ``r + s + 1`` points or
            contains non-finite values.

    """
    y = np.asarray(y, dtype=float).ravel()
    if y.size < spec.r + spec.s + 1:
        raise DataError(
            "series of length {} too short for {}".format(y.size, spec.label)
        )
    if not np.all(np.isfinite(y)):
        raise DataError("series contains non-finite values")

    eps = np.convolve(y, operator_coefficients(spec), mode="valid")
    return eps, float(np.dot(eps, eps))
