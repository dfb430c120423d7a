"""Closed-form trajectories of ``dx/dt = A x - B`` from the switching line.

Each pole regime gets a small branch object holding the explicit flow
``(p(t), q(t))`` started at ``(xi, 0)``, its time derivative, the critical
time of ``q`` and the derivative formulas evaluated at the exit time.  The
expressions are written with ``expm1`` and with the constant terms cancelled
analytically, so they stay accurate both for ``xi`` close to ``-kappa``
(short excursions) and for very large ``xi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import BelowSwitchOnset
from .plant import (ComplexConjugate, DistinctReal, PlantSpec, RepeatedReal,
                    classify_poles, realize, sink_point)

__all__ = [
    "DistinctCoefficients", "RepeatedCoefficients", "ComplexCoefficients",
    "FlowCoefficients", "FlowState", "coefficients", "flow_positive",
    "q_rate", "critical_time", "matrix_exp", "flow_from", "branch_for",
]

# Below this pole gap the 1/(alpha - beta) factors are replaced by the
# double-pole formulas at the mean pole.
NEAR_REPEATED_GAP = 1e-6


@dataclass(frozen=True)
class DistinctCoefficients:
    mu_alpha: float
    nu_beta: float


@dataclass(frozen=True)
class RepeatedCoefficients:
    mu_tilde: float


@dataclass(frozen=True)
class ComplexCoefficients:
    mu1: float
    nu0: float
    chi4: float


FlowCoefficients = Union[DistinctCoefficients, RepeatedCoefficients,
                         ComplexCoefficients]


@dataclass(frozen=True)
class FlowState:
    p: float
    q: float
    t: float


class _Branch:
    """Shared plumbing; subclasses supply the pole-specific formulas."""

    t_cap = None  # hard upper bound on the first exit time, if any

    def __init__(self, kappa, gamma, a1, a2):
        self.kappa = kappa
        self.gamma = gamma
        self.a1 = a1
        self.a2 = a2

    def scale(self, xi):
        return max(1.0, abs(xi) + abs(self.kappa) + self.gamma / self.slow_rate)

    def p_rate(self, q):
        # first row of A x - B
        return -self.a2 * q - self.gamma


class _Distinct(_Branch):
    kind = "distinct"

    def __init__(self, kappa, gamma, alpha, beta):
        super().__init__(kappa, gamma, alpha + beta, alpha * beta)
        self.alpha = alpha
        self.beta = beta
        self.gap = alpha - beta
        self.slow_rate = beta

    def _mn(self, xi):
        e = xi + self.kappa
        return e + self.gamma / self.alpha, e + self.gamma / self.beta

    def coefficients(self, xi):
        mu, nu = self._mn(xi)
        return DistinctCoefficients(mu_alpha=mu, nu_beta=nu)

    def q(self, xi, t):
        mu, nu = self._mn(xi)
        return (nu * math.expm1(-self.beta * t)
                - mu * math.expm1(-self.alpha * t)) / self.gap

    def dq(self, xi, t):
        mu, nu = self._mn(xi)
        return (self.alpha * mu * math.exp(-self.alpha * t)
                - self.beta * nu * math.exp(-self.beta * t)) / self.gap

    def p(self, xi, t):
        mu, nu = self._mn(xi)
        a, b = self.alpha, self.beta
        return xi + (a * nu * math.expm1(-b * t)
                     - b * mu * math.expm1(-a * t)) / self.gap

    def tau_star(self, xi):
        mu, nu = self._mn(xi)
        # ln(alpha mu / (beta nu)) with alpha mu - beta nu = gap (xi + kappa)
        return math.log1p(self.gap * (xi + self.kappa) / (self.beta * nu)) / self.gap

    def exit_x1(self, xi, tau):
        # p at a root of q, with the O(xi) terms cancelled
        mu, _ = self._mn(xi)
        return -self.kappa - self.gamma / self.alpha + mu * math.exp(-self.alpha * tau)

    def _E(self, xi, tau):
        # E = e^{-alpha tau} (alpha mu e^{beta tau} - beta nu e^{alpha tau})
        # written as alpha mu expm1(-gap tau) + (alpha mu - beta nu)
        mu, _ = self._mn(xi)
        return (self.alpha * mu * math.expm1(-self.gap * tau)
                + self.gap * (xi + self.kappa))

    def fprime(self, xi, tau):
        e = xi + self.kappa
        return self.gap * e * math.exp(-self.alpha * tau) / self._E(xi, tau)

    def tprime(self, xi, tau):
        # numerator and denominator share the factor e^{-beta tau}
        return math.expm1(-self.gap * tau) / self._E(xi, tau)

    def fsecond(self, xi, tau):
        a, b, g, d = self.alpha, self.beta, self.gamma, self.gap
        e = xi + self.kappa
        g0 = 2.0 * d * (a * b * e * e - g * g)
        gp = d * (a * b * e * e + g * d * e - g * g)
        gm = d * (a * b * e * e - g * d * e - g * g)
        x = math.exp(-d * tau)
        # numerator and denominator both rescaled by exp(-(alpha-beta) tau)
        num = g0 * x - gp - gm * x * x
        return num * math.exp(-a * tau) / self._E(xi, tau) ** 3

    def expm(self, t):
        a, b = self.alpha, self.beta
        V = np.array([[1.0, -a], [1.0, -b]])
        Vinv = np.array([[-b, a], [-1.0, 1.0]]) / (a - b)
        return Vinv @ np.diag([math.exp(-a * t), math.exp(-b * t)]) @ V


class _Repeated(_Branch):
    kind = "repeated"

    def __init__(self, kappa, gamma, alpha):
        super().__init__(kappa, gamma, 2.0 * alpha, alpha * alpha)
        self.alpha = alpha
        self.slow_rate = alpha

    def _mt(self, xi):
        return xi + self.kappa + self.gamma / self.alpha

    def coefficients(self, xi):
        return RepeatedCoefficients(mu_tilde=self._mt(xi))

    def q(self, xi, t):
        a = self.alpha
        return (self._mt(xi) * t * math.exp(-a * t)
                + self.gamma / a ** 2 * math.expm1(-a * t))

    def dq(self, xi, t):
        a = self.alpha
        return math.exp(-a * t) * (xi + self.kappa - a * self._mt(xi) * t)

    def p(self, xi, t):
        a = self.alpha
        mt = self._mt(xi)
        return (xi + (mt + self.gamma / a) * math.expm1(-a * t)
                + a * mt * t * math.exp(-a * t))

    def tau_star(self, xi):
        return (xi + self.kappa) / (self.alpha * self._mt(xi))

    def exit_x1(self, xi, tau):
        return (-self.kappa - self.gamma / self.alpha
                + self._mt(xi) * math.exp(-self.alpha * tau))

    def _L(self, xi, tau):
        return xi + self.kappa - self.alpha * tau * self._mt(xi)

    def fprime(self, xi, tau):
        return math.exp(-self.alpha * tau) * (xi + self.kappa) / self._L(xi, tau)

    def tprime(self, xi, tau):
        return -tau / self._L(xi, tau)

    def fsecond(self, xi, tau):
        a, g = self.alpha, self.gamma
        e = xi + self.kappa
        num = -a * a * (e * e - g * g / (a * a)) * tau * tau - 2.0 * g * e * tau
        return num * math.exp(-a * tau) / self._L(xi, tau) ** 3

    def expm(self, t):
        a = self.alpha
        Vt = np.array([[1.0, -a], [0.0, 1.0]])
        Vtinv = np.array([[1.0, a], [0.0, 1.0]])
        J = math.exp(-a * t) * np.array([[1.0, 0.0], [t, 1.0]])
        return Vtinv @ J @ Vt


class _Complex(_Branch):
    kind = "complex"

    def __init__(self, kappa, gamma, sigma, omega):
        super().__init__(kappa, gamma, 2.0 * sigma, sigma ** 2 + omega ** 2)
        self.sigma = sigma
        self.omega = omega
        self.slow_rate = math.sqrt(self.a2)
        self.nu0 = gamma * omega / self.a2
        self.t_cap = math.pi / omega

    def _mu1(self, xi):
        return xi + self.kappa + self.gamma * self.sigma / self.a2

    def _c12(self, xi):
        # omega mu1 - sigma nu0 reduces exactly to omega (xi + kappa)
        mu1 = self._mu1(xi)
        s, w, n0 = self.sigma, self.omega, self.nu0
        return w * (xi + self.kappa), s * mu1 + w * n0

    def coefficients(self, xi):
        c1, c2 = self._c12(xi)
        return ComplexCoefficients(mu1=self._mu1(xi), nu0=self.nu0,
                                   chi4=math.hypot(c1, c2))

    def _cm1(self, t):
        # e^{-sigma t} cos(omega t) - 1
        return (math.expm1(-self.sigma * t) * math.cos(self.omega * t)
                - 2.0 * math.sin(0.5 * self.omega * t) ** 2)

    def q(self, xi, t):
        w = self.omega
        return (self.nu0 * self._cm1(t)
                + self._mu1(xi) * math.exp(-self.sigma * t) * math.sin(w * t)) / w

    def dq(self, xi, t):
        c1, c2 = self._c12(xi)
        w = self.omega
        return (math.exp(-self.sigma * t) / w
                * (c1 * math.cos(w * t) - c2 * math.sin(w * t)))

    def p(self, xi, t):
        s, w, n0 = self.sigma, self.omega, self.nu0
        mu1 = self._mu1(xi)
        return (xi + (w * mu1 + s * n0) / w * self._cm1(t)
                + (s * mu1 - w * n0) / w * math.exp(-s * t) * math.sin(w * t))

    def tau_star(self, xi):
        c1, c2 = self._c12(xi)
        return math.atan2(c1, c2) / self.omega

    def exit_x1(self, xi, tau):
        s, w = self.sigma, self.omega
        return (-self.kappa - s * self.gamma / self.a2
                + math.exp(-s * tau) * (self._mu1(xi) * math.cos(w * tau)
                                        - self.nu0 * math.sin(w * tau)))

    def _den(self, xi, tau):
        c1, c2 = self._c12(xi)
        w = self.omega
        return c1 * math.cos(w * tau) - c2 * math.sin(w * tau)

    def fprime(self, xi, tau):
        c1, _ = self._c12(xi)
        return c1 * math.exp(-self.sigma * tau) / self._den(xi, tau)

    def tprime(self, xi, tau):
        return -math.sin(self.omega * tau) / self._den(xi, tau)

    def fsecond(self, xi, tau):
        return None

    def expm(self, t):
        s, w = self.sigma, self.omega
        r = 1.0 / math.sqrt(w)
        T = r * np.array([[1.0, -s], [0.0, w]])
        Tinv = r * np.array([[w, s], [0.0, 1.0]])
        c, sn = math.cos(w * t), math.sin(w * t)
        R = math.exp(-s * t) * np.array([[c, -sn], [sn, c]])
        return Tinv @ R @ T


@lru_cache(maxsize=256)
def branch_for(plant: PlantSpec) -> _Branch:
    """Formula branch for `plant` (cached; plants are immutable)."""
    poles = classify_poles(plant)
    kappa, gamma = plant.kappa, plant.gamma
    if isinstance(poles, DistinctReal):
        if poles.alpha - poles.beta < NEAR_REPEATED_GAP:
            return _Repeated(kappa, gamma, 0.5 * (poles.alpha + poles.beta))
        return _Distinct(kappa, gamma, poles.alpha, poles.beta)
    if isinstance(poles, RepeatedReal):
        return _Repeated(kappa, gamma, poles.alpha)
    assert isinstance(poles, ComplexConjugate)
    return _Complex(kappa, gamma, poles.sigma, poles.omega)


def coefficients(plant: PlantSpec, xi: float) -> FlowCoefficients:
    """Auxiliary constants of the flow from ``(xi, 0)``."""
    return branch_for(plant).coefficients(float(xi))


def flow_positive(plant: PlantSpec, xi: float, t: float) -> FlowState:
    """State reached after `t` seconds under relay sign +1 from ``(xi, 0)``."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t!r}")
    br = branch_for(plant)
    xi, t = float(xi), float(t)
    return FlowState(p=br.p(xi, t), q=br.q(xi, t), t=t)


def q_rate(plant: PlantSpec, xi: float, t: float) -> float:
    """Time derivative of the ``x2`` coordinate along the same trajectory."""
    return branch_for(plant).dq(float(xi), float(t))


def critical_time(plant: PlantSpec, xi: float) -> float:
    """Unique time in the first excursion at which ``q`` peaks.

    Raises
    ------
    BelowSwitchOnset
        If ``xi <= -kappa`` (the trajectory leaves immediately).
    """
    xi = float(xi)
    if xi <= -plant.kappa:
        raise BelowSwitchOnset(f"xi = {xi!r} <= -kappa = {-plant.kappa!r}")
    return branch_for(plant).tau_star(xi)


def matrix_exp(plant: PlantSpec, t: float) -> np.ndarray:
    """``exp(A t)`` assembled from the Jordan/rotation similarity forms."""
    return branch_for(plant).expm(float(t))


def flow_from(plant: PlantSpec, x0, relay_sign: int, t: float) -> np.ndarray:
    """General affine flow ``s A^{-1}B + e^{At} (x0 - s A^{-1}B)``, ``s = relay_sign``."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t!r}")
    if relay_sign not in (1, -1):
        raise ValueError(f"relay_sign must be +1 or -1, got {relay_sign!r}")
    centre = relay_sign * sink_point(realize(plant))
    x0 = np.asarray(x0, dtype=float)
    return centre + matrix_exp(plant, t) @ (x0 - centre)
