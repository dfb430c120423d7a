"""Fixed-point iteration of the half return map and behaviour certificates.

A symmetric unimodal cycle crosses the switching line at ``(xi, 0)`` and
``(-xi, 0)``, so its abscissa is a fixed point of ``xi -> -f_plus(xi)``.
For a positive (nonminimum phase) zero this map is a contraction on any
self-mapped interval ``[0, theta]``; with no finite zero the iterates decay
to the origin, and with a negative zero they drop into the chattering set
``[-|kappa|, |kappa|]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import MaxIterExceeded, NotContractive
from .flow import branch_for
from .plant import (NegativeZero, NoFiniteZero, PlantSpec, classify_zero,
                    plant_to_json)
from .switching import DEFAULT_TOL, f_plus, f_plus_prime, tau_plus

__all__ = [
    "Classification", "IterationTrace", "LimitCycleCertificate",
    "iterate_half_map", "contraction_bound", "self_mapping_threshold",
    "certify", "kappa_shift_check",
]

ITER_TOL = 1e-12
MAX_ITER = 10_000


class Classification(str, enum.Enum):
    SelfOscillation = "SelfOscillation"
    ConvergesToOrigin = "ConvergesToOrigin"
    ConvergesToChatteringSet = "ConvergesToChatteringSet"


@dataclass(frozen=True)
class IterationTrace:
    """Sequence ``xi0, -f_plus(xi0), -f_plus(-f_plus(xi0)), ...``.

    Attributes
    ----------
    xi0 : float
    iterates : tuple of float
        Includes the seed as entry 0.
    converged : bool
    residual : float
        ``|xi_{k+1} - xi_k|`` at the last step.
    """

    xi0: float
    iterates: tuple
    converged: bool
    residual: float

    @property
    def final(self) -> float:
        return self.iterates[-1]


@dataclass(frozen=True)
class LimitCycleCertificate:
    """Outcome of :func:`certify`; fields not applicable to the class are None.

    ``contraction_bound`` is a sampled grid estimate, not a rigorous bound.
    """

    classification: Classification
    plant: PlantSpec
    xi_cycle: float | None = None
    half_period: float | None = None
    output_amplitude: float | None = None
    half_map_multiplier: float | None = None
    full_return_multiplier: float | None = None
    contraction_bound: float | None = None
    certified_interval_theta: float | None = None
    chattering_set: tuple | None = None
    evidence: IterationTrace | None = field(default=None, repr=False)

    @property
    def period(self):
        return None if self.half_period is None else 2.0 * self.half_period

    def to_dict(self, tolerances: dict | None = None) -> dict:
        """JSON-ready mapping with a fixed key set (None for n/a fields)."""
        cs = self.chattering_set
        return {
            "classification": self.classification.value,
            "xi_cycle": self.xi_cycle,
            "half_period": self.half_period,
            "period": self.period,
            "output_amplitude": self.output_amplitude,
            "half_map_multiplier": self.half_map_multiplier,
            "full_return_multiplier": self.full_return_multiplier,
            "contraction_bound": self.contraction_bound,
            "certified_interval_theta": self.certified_interval_theta,
            "chattering_set": None if cs is None else [cs[0], cs[1]],
            "plant_echo": plant_to_json(self.plant),
            "tolerances": dict(tolerances or {}),
        }


def iterate_half_map(plant: PlantSpec, xi0: float, tol: float = ITER_TOL,
                     max_iter: int = MAX_ITER,
                     exit_tol: float = DEFAULT_TOL) -> IterationTrace:
    """Iterate ``xi <- -f_plus(xi)`` from `xi0`.

    Stops when ``|dxi| <= tol * max(1, |xi|)``.  For a negative zero the
    chattering set is terminal, so the run also stops (converged) as soon
    as ``|xi| <= |kappa|``.

    Raises
    ------
    MaxIterExceeded
        After `max_iter` steps; the exception carries the partial trace.
    """
    xi = float(xi0)
    seq = [xi]
    kappa = plant.kappa
    residual = math.inf
    for _ in range(max_iter):
        if kappa < 0 and abs(xi) <= -kappa:
            return IterationTrace(float(xi0), tuple(seq), True,
                                  0.0 if len(seq) == 1 else residual)
        nxt = -f_plus(plant, xi, exit_tol)
        residual = abs(nxt - xi)
        seq.append(nxt)
        xi = nxt
        if residual <= tol * max(1.0, abs(xi)):
            return IterationTrace(float(xi0), tuple(seq), True, residual)
    trace = IterationTrace(float(xi0), tuple(seq), False, residual)
    raise MaxIterExceeded(
        f"no convergence after {max_iter} iterations (residual {residual:.3e})",
        trace=trace)


def contraction_bound(plant: PlantSpec, theta: float, n: int = 1000) -> float:
    """Sampled maximum of ``|f_plus'|`` on ``[0, theta]``.

    The max over an `n`-point uniform grid is refined by a bounded scalar
    search in the two cells around the grid arg-max.

    Raises
    ------
    NotContractive
        If the estimate is ``>= 1``.
    """
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta!r}")
    if plant.kappa <= 0:
        raise ValueError("contraction_bound needs a positive zero (kappa > 0)")
    grid = np.linspace(0.0, float(theta), int(n))
    vals = np.array([abs(f_plus_prime(plant, x)) for x in grid])
    k = int(np.argmax(vals))
    best = float(vals[k])
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    if hi > lo:
        res = minimize_scalar(lambda x: -abs(f_plus_prime(plant, x)),
                              bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-10 * max(1.0, theta)})
        best = max(best, -float(res.fun))
    if best >= 1.0:
        raise NotContractive(f"sampled |f_plus'| reaches {best!r} on [0, {theta!r}]")
    return best


def _maps_into(plant, theta):
    # -f_plus is increasing, so [0, theta] is self-mapped iff -f_plus(theta) <= theta
    return -f_plus(plant, theta) <= theta


def self_mapping_threshold(plant: PlantSpec, rel_tol: float = 1e-6) -> float:
    """Smallest ``theta`` (to `rel_tol`) with ``-f_plus([0, theta])`` inside ``[0, theta]``.

    Scans ``theta = 1, 2, 4, ...`` and then bisects down.  Because
    ``xi + f_plus(xi)`` is increasing, the result sits just above the cycle
    abscissa.
    """
    if plant.kappa <= 0:
        raise ValueError("self_mapping_threshold needs a positive zero (kappa > 0)")
    br = branch_for(plant)
    lo, hi = 0.0, 1.0
    for _ in range(64):
        if _maps_into(plant, hi):
            break
        lo, hi = hi, 2.0 * hi
    else:
        # distinct poles: kappa + gamma/beta always works
        if br.kind == "distinct":
            return plant.kappa + plant.gamma / br.beta
        raise RuntimeError("no self-mapped interval found")  # pragma: no cover
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if _maps_into(plant, mid):
            hi = mid
        else:
            lo = mid
    return hi


def _newton_polish(plant, xi, steps=4):
    # g(xi) = f_plus(xi) + xi, g' = f_plus' + 1 in (0, 1)
    for _ in range(steps):
        g = f_plus(plant, xi) + xi
        if g == 0.0:
            break
        xi = xi - g / (f_plus_prime(plant, xi) + 1.0)
    return xi


def certify(plant: PlantSpec, tol: float = ITER_TOL, max_iter: int = MAX_ITER,
            n_grid: int = 1000) -> LimitCycleCertificate:
    """Classify the asymptotic behaviour of the relay loop around `plant`.

    Parameters
    ----------
    plant : PlantSpec
        Validated plant.
    tol, max_iter : optional
        Stopping rule of :func:`iterate_half_map`.
    n_grid : int, optional
        Grid size for :func:`contraction_bound`.

    Returns
    -------
    LimitCycleCertificate
    """
    zc = classify_zero(plant)
    if isinstance(zc, NoFiniteZero):
        try:
            trace = iterate_half_map(plant, 1.0, tol, max_iter)
        except MaxIterExceeded as exc:
            # slow algebraic decay; the partial run is still the evidence
            trace = exc.trace
        return LimitCycleCertificate(Classification.ConvergesToOrigin, plant,
                                     evidence=trace)
    if isinstance(zc, NegativeZero):
        kh = zc.kappa_hat
        trace = iterate_half_map(plant, max(1.0, 4.0 * kh), tol, max_iter)
        return LimitCycleCertificate(Classification.ConvergesToChatteringSet, plant,
                                     chattering_set=(-kh, kh), evidence=trace)

    eta = self_mapping_threshold(plant)
    theta = max(1.0, eta)
    trace = iterate_half_map(plant, theta, tol, max_iter)
    xi_c = _newton_polish(plant, trace.final)
    br = branch_for(plant)
    fp = f_plus_prime(plant, xi_c)
    return LimitCycleCertificate(
        Classification.SelfOscillation, plant,
        xi_cycle=xi_c,
        half_period=tau_plus(plant, xi_c),
        output_amplitude=br.q(xi_c, br.tau_star(xi_c)),
        half_map_multiplier=fp,
        full_return_multiplier=fp * fp,
        contraction_bound=contraction_bound(plant, theta, n_grid),
        certified_interval_theta=theta,
        evidence=trace,
    )


def kappa_shift_check(plant: PlantSpec, l: float, kappa_hat: float, xi: float):
    """Residuals of the translation identities between two zero placements.

    With ``F_k`` the map of `plant` re-zeroed to ``kappa = k``::

        F_l(xi)  = F_kh(xi + l - kh) - l + kh
        F_l'(xi) = F_kh'(xi + l - kh)

    Returns
    -------
    (float, float)
        Absolute residuals of the map and derivative identities; the
        derivative residual is NaN when ``xi <= -l``.
    """
    pl, pk = plant.with_kappa(l), plant.with_kappa(kappa_hat)
    shifted = xi + l - kappa_hat
    r_f = abs(f_plus(pl, xi) - (f_plus(pk, shifted) - l + kappa_hat))
    if xi <= -l:
        return r_f, math.nan
    r_d = abs(f_plus_prime(pl, xi) - f_plus_prime(pk, shifted))
    return r_f, r_d
