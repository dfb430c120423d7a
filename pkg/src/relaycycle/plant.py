"""Second-order plant description, validation and observer realization.

A plant is the transfer function ``(b1 s + b0) / (s^2 + a1 s + a2)`` placed
in negative feedback with an ideal relay, so that the closed loop reads
``dx/dt = A x - B sign(C x)``.  Internally the numerator is handled in the
``(-kappa s + gamma)`` form, i.e. ``kappa = -b1`` and ``gamma = b0``; a
positive ``kappa`` is a right half-plane (nonminimum phase) zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import NonMonicDenominator, NonPositiveGain, NotHurwitz, PlantError

__all__ = [
    "PlantSpec", "DistinctReal", "RepeatedReal", "ComplexConjugate",
    "PoleStructure", "PositiveZero", "NoFiniteZero", "NegativeZero",
    "ZeroClass", "Realization", "validate_plant", "classify_poles",
    "classify_zero", "realize", "sink_point", "plant_from_json",
    "plant_to_json", "default_pole_tol",
]


@dataclass(frozen=True)
class PlantSpec:
    """Coefficients of ``(b1 s + b0) / (s^2 + a1 s + a2)``.

    Instances are immutable and hashable, so derived quantities can be
    cached per plant.
    """

    b1: float
    b0: float
    a1: float
    a2: float

    @property
    def kappa(self) -> float:
        return -float(self.b1)

    @property
    def gamma(self) -> float:
        return float(self.b0)

    @property
    def dc_gain(self) -> float:
        return self.b0 / self.a2

    @classmethod
    def from_kappa(cls, kappa, gamma, a1, a2) -> "PlantSpec":
        """Build a plant from the ``(-kappa s + gamma)`` numerator form."""
        return cls(b1=-float(kappa), b0=float(gamma), a1=float(a1), a2=float(a2))

    def with_kappa(self, kappa) -> "PlantSpec":
        """Same denominator and gamma, numerator s-coefficient ``-kappa``."""
        return PlantSpec(-float(kappa), self.b0, self.a1, self.a2)

    def __str__(self):
        return f"({self.b1:g}s + {self.b0:g})/(s^2 + {self.a1:g}s + {self.a2:g})"


@dataclass(frozen=True)
class DistinctReal:
    """Poles at ``-alpha`` and ``-beta`` with ``alpha > beta > 0``."""

    alpha: float
    beta: float


@dataclass(frozen=True)
class RepeatedReal:
    """Double pole at ``-alpha``."""

    alpha: float


@dataclass(frozen=True)
class ComplexConjugate:
    """Poles at ``-sigma +/- i omega``."""

    sigma: float
    omega: float


PoleStructure = Union[DistinctReal, RepeatedReal, ComplexConjugate]


@dataclass(frozen=True)
class PositiveZero:
    """Zero at ``gamma / kappa > 0`` (nonminimum phase)."""

    kappa: float


@dataclass(frozen=True)
class NoFiniteZero:
    """Numerator is the constant ``gamma``."""


@dataclass(frozen=True)
class NegativeZero:
    """Zero at ``-gamma / kappa_hat < 0``; ``kappa_hat = |kappa|``."""

    kappa_hat: float


ZeroClass = Union[PositiveZero, NoFiniteZero, NegativeZero]


@dataclass(frozen=True)
class Realization:
    """Observer-canonical ``(A, B, C)`` with ``C = (0, 1)``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    @property
    def markov_parameters(self):
        """``(C B, C A B)``."""
        return float(self.C @ self.B), float(self.C @ self.A @ self.B)


def validate_plant(spec: PlantSpec) -> PlantSpec:
    """Check stability and DC-gain sign; return `spec` unchanged.

    Raises
    ------
    NotHurwitz
        If ``a1 <= 0`` or ``a2 <= 0``.
    NonPositiveGain
        If ``b0 <= 0``.
    """
    vals = (spec.b1, spec.b0, spec.a1, spec.a2)
    if not all(math.isfinite(v) for v in vals):
        raise PlantError(f"non-finite plant coefficient in {vals!r}")
    if spec.a1 <= 0 or spec.a2 <= 0:
        raise NotHurwitz(
            f"denominator s^2 + {spec.a1:g}s + {spec.a2:g} is not Hurwitz")
    if spec.b0 <= 0:
        raise NonPositiveGain(f"b0 = {spec.b0:g} gives a non-positive DC gain")
    return spec


def default_pole_tol(spec: PlantSpec) -> float:
    """Discriminant band inside which the poles are snapped to a double pole."""
    return 1e-9 * max(1.0, spec.a1 ** 2)


def classify_poles(spec: PlantSpec, tol: float | None = None) -> PoleStructure:
    """Return the pole regime of the (validated) plant.

    The discriminant ``a1^2 - 4 a2`` is compared against ``+/- tol``; inside
    the band the poles are treated as repeated.
    """
    if tol is None:
        tol = default_pole_tol(spec)
    a1, a2 = float(spec.a1), float(spec.a2)
    disc = a1 * a1 - 4.0 * a2
    if disc > tol:
        alpha = 0.5 * (a1 + math.sqrt(disc))
        # product form keeps the small root accurate
        return DistinctReal(alpha=alpha, beta=a2 / alpha)
    if disc < -tol:
        return ComplexConjugate(sigma=0.5 * a1, omega=0.5 * math.sqrt(-disc))
    return RepeatedReal(alpha=0.5 * a1)


def denominator_from_poles(poles: PoleStructure) -> tuple[float, float]:
    """Inverse of :func:`classify_poles`: ``(a1, a2)``."""
    if isinstance(poles, DistinctReal):
        return poles.alpha + poles.beta, poles.alpha * poles.beta
    if isinstance(poles, RepeatedReal):
        return 2.0 * poles.alpha, poles.alpha ** 2
    return 2.0 * poles.sigma, poles.sigma ** 2 + poles.omega ** 2


def classify_zero(spec: PlantSpec) -> ZeroClass:
    kappa = spec.kappa
    if kappa > 0:
        return PositiveZero(kappa=kappa)
    if kappa < 0:
        return NegativeZero(kappa_hat=-kappa)
    return NoFiniteZero()


def realize(spec: PlantSpec) -> Realization:
    """Observer realization ``A = [[0, -a2], [1, -a1]]``, ``B = (gamma, -kappa)``."""
    A = np.array([[0.0, -float(spec.a2)], [1.0, -float(spec.a1)]])
    B = np.array([spec.gamma, -spec.kappa])
    C = np.array([0.0, 1.0])
    return Realization(A=A, B=B, C=C)


def sink_point(real: Realization) -> np.ndarray:
    """Equilibrium ``A^{-1} B`` of the field active under relay sign +1."""
    return np.linalg.solve(real.A, real.B)


def plant_from_json(obj) -> PlantSpec:
    """Parse ``{"num": [b1, b0], "den": [1.0, a1, a2]}`` and validate it."""
    try:
        num = [float(v) for v in obj["num"]]
        den = [float(v) for v in obj["den"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise PlantError(f"malformed plant object: {exc}") from exc
    if len(num) != 2:
        raise PlantError(f"'num' must have two entries [b1, b0], got {len(num)}")
    if len(den) != 3:
        raise NonMonicDenominator(
            f"'den' must have three entries [1.0, a1, a2], got {len(den)}")
    if den[0] != 1.0:
        raise NonMonicDenominator(
            f"leading denominator coefficient must be 1.0, got {den[0]!r}")
    return validate_plant(PlantSpec(b1=num[0], b0=num[1], a1=den[1], a2=den[2]))


def plant_to_json(spec: PlantSpec) -> dict:
    return {"num": [float(spec.b1), float(spec.b0)],
            "den": [1.0, float(spec.a1), float(spec.a2)]}
