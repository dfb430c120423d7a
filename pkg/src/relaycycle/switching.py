"""First exit times and the switching point transformation.

``tau_plus(xi)`` is the time a trajectory started at ``(xi, 0)`` with relay
output +1 needs to return to the switching line ``x2 = 0``, and
``f_plus(xi)`` is the abscissa where it lands.  The negative-sign versions
are obtained only through the odd symmetry of the loop::

    tau_minus(x) = tau_plus(-x),   psi_minus(x) = -psi_plus(-x)

Examples
--------
>>> from relaycycle import PlantSpec
>>> from relaycycle.switching import tau_plus, f_plus
>>> plant = PlantSpec(-1.0, 3.0, 3.0, 2.0)
>>> round(tau_plus(plant, 2.0), 12), round(f_plus(plant, 2.0), 12)
(1.098612288668, -2.0)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BelowSwitchOnset, NoConvergence, UnsupportedPoleClass
from .flow import branch_for, flow_from
from .plant import PlantSpec

__all__ = [
    "DEFAULT_TOL", "ExitResult", "tau_plus", "f_plus", "f_plus_prime",
    "tau_plus_prime", "f_plus_second", "exit_plus", "tau_minus", "f_minus",
    "psi_plus", "psi_minus", "exit_time_plus", "exit_time_minus",
]

DEFAULT_TOL = 1e-12
_MAX_DOUBLINGS = 200
_NEWTON_POLISH = 3


@dataclass(frozen=True)
class ExitResult:
    """First exit from ``(xi, 0)`` under relay output +1.

    Attributes
    ----------
    tau : float
        First exit time, 0 when ``xi <= -kappa``.
    xi_next : float
        ``f_plus(xi)``.
    derivative : float
        ``f_plus'(xi)``; NaN below the switch onset.
    tau_derivative : float
        ``d tau_plus / d xi``; NaN below the switch onset.
    """

    tau: float
    xi_next: float
    derivative: float
    tau_derivative: float


def _solve_tau(br, xi: float, tol: float) -> float:
    """Root of ``q`` beyond the critical time; assumes ``xi > -kappa``."""
    q = lambda t: br.q(xi, t)  # noqa: E731
    lo = br.tau_star(xi)
    q_lo = q(lo)
    if not q_lo > 0.0:
        # excursion so short that q(tau*) is lost in roundoff; use the
        # second-order expansion q ~ e t - (gamma + a1 e) t^2 / 2
        e = xi + br.kappa
        return 2.0 * e / (br.gamma + br.a1 * e)

    hi = 2.0 * lo
    cap = br.t_cap
    if cap is not None:
        hi = min(hi, cap)
    for _ in range(_MAX_DOUBLINGS):
        if q(hi) < 0.0:
            break
        if cap is not None and hi >= cap:
            raise NoConvergence(f"q stays non-negative up to pi/omega for xi={xi!r}")
        hi = 2.0 * hi if cap is None else min(2.0 * hi, cap)
    else:
        raise NoConvergence(f"could not bracket the exit time for xi={xi!r}")

    # xtol relative to hi, so sub-unit exit times near the onset stay resolved
    t = brentq(q, lo, hi, xtol=1e-14 * hi, rtol=4 * np.finfo(float).eps,
               maxiter=500)
    # Newton polish with the closed-form q'; reject steps leaving the bracket
    for _ in range(_NEWTON_POLISH):
        dq = br.dq(xi, t)
        if dq == 0.0:
            break
        t_new = t - q(t) / dq
        if not lo < t_new < hi:
            break
        t = t_new
    if abs(q(t)) > tol * br.scale(xi):
        raise NoConvergence(
            f"|q(tau)| = {abs(q(t)):.3e} exceeds tolerance at xi={xi!r}")
    return t


def tau_plus(plant: PlantSpec, xi: float, tol: float = DEFAULT_TOL) -> float:
    """First exit time from ``(xi, 0)`` under relay output +1.

    Parameters
    ----------
    plant : PlantSpec
        Validated plant.
    xi : float
        Abscissa of the start point on the switching line.
    tol : float, optional
        Relative tolerance on ``|q(tau)|``, scaled by ``|xi| + kappa + gamma/beta``.

    Returns
    -------
    float
        0 for ``xi <= -kappa``, otherwise the smallest positive root of ``q``.

    Raises
    ------
    NoConvergence
        If the bracketed refinement cannot meet `tol`.
    """
    xi = float(xi)
    if xi <= -plant.kappa:
        return 0.0
    return _solve_tau(branch_for(plant), xi, tol)


def _check_onset(plant, xi):
    if xi <= -plant.kappa:
        raise BelowSwitchOnset(
            f"derivative undefined for xi = {xi!r} <= -kappa = {-plant.kappa!r}")


def f_plus(plant: PlantSpec, xi: float, tol: float = DEFAULT_TOL) -> float:
    """Switching point transformation: ``x1`` at the first exit from ``(xi, 0)``."""
    xi = float(xi)
    if xi <= -plant.kappa:
        return xi
    br = branch_for(plant)
    return br.exit_x1(xi, _solve_tau(br, xi, tol))


def f_plus_prime(plant: PlantSpec, xi: float, tol: float = DEFAULT_TOL) -> float:
    """Closed-form derivative of :func:`f_plus` for ``xi > -kappa``."""
    xi = float(xi)
    _check_onset(plant, xi)
    br = branch_for(plant)
    return br.fprime(xi, _solve_tau(br, xi, tol))


def tau_plus_prime(plant: PlantSpec, xi: float, tol: float = DEFAULT_TOL) -> float:
    """Closed-form derivative of :func:`tau_plus` for ``xi > -kappa``."""
    xi = float(xi)
    _check_onset(plant, xi)
    br = branch_for(plant)
    return br.tprime(xi, _solve_tau(br, xi, tol))


def f_plus_second(plant: PlantSpec, xi: float, tol: float = DEFAULT_TOL) -> float:
    """Closed-form second derivative of :func:`f_plus` (real poles only).

    Raises
    ------
    UnsupportedPoleClass
        For complex poles, where no closed form is available.
    BelowSwitchOnset
        For ``xi <= -kappa``.
    """
    xi = float(xi)
    br = branch_for(plant)
    if br.kind == "complex":
        raise UnsupportedPoleClass("no closed-form f_plus'' for complex poles")
    _check_onset(plant, xi)
    return br.fsecond(xi, _solve_tau(br, xi, tol))


def exit_plus(plant: PlantSpec, xi: float, tol: float = DEFAULT_TOL) -> ExitResult:
    """All first-exit quantities from one root solve."""
    xi = float(xi)
    if xi <= -plant.kappa:
        return ExitResult(0.0, xi, math.nan, math.nan)
    br = branch_for(plant)
    t = _solve_tau(br, xi, tol)
    return ExitResult(tau=t, xi_next=br.exit_x1(xi, t),
                      derivative=br.fprime(xi, t), tau_derivative=br.tprime(xi, t))


def tau_minus(plant: PlantSpec, xi: float, tol: float = DEFAULT_TOL) -> float:
    """First exit time from ``(xi, 0)`` under relay output -1."""
    return tau_plus(plant, -float(xi), tol)


def f_minus(plant: PlantSpec, xi: float, tol: float = DEFAULT_TOL) -> float:
    return -f_plus(plant, -float(xi), tol)


def _grid_step(br):
    rate = max(br.a1, math.sqrt(br.a2))
    h = 0.05 / rate
    if br.t_cap is not None:
        h = min(h, br.t_cap / 64)
    return h


def _exit_general(plant: PlantSpec, x, tol: float):
    x = np.asarray(x, dtype=float)
    if x.shape != (2,):
        raise ValueError(f"state must be a 2-vector, got shape {x.shape}")
    x1, x2 = float(x[0]), float(x[1])
    if x2 < 0.0:
        return 0.0, x.copy()
    if x2 == 0.0:
        t = tau_plus(plant, x1, tol)
        return t, np.array([f_plus(plant, x1, tol), 0.0])

    # off the line: march on a coarse grid until x2 changes sign, then refine
    br = branch_for(plant)
    def x2_at(t):
        # exact at t = 0, where the affine round trip could flip a tiny x2
        return x2 if t == 0.0 else flow_from(plant, x, 1, t)[1]

    h = h_max = _grid_step(br)
    if br.t_cap is None:
        h_max = 20.0 * h
    lo = 0.0
    for _ in range(1_000_000):
        hi = lo + h
        if x2_at(hi) < 0.0:
            break
        lo = hi
        h = min(1.05 * h, h_max)
    else:
        raise NoConvergence(f"no exit found from {x!r}")
    t = brentq(x2_at, lo, hi, xtol=1e-14 * max(1.0, hi),
               rtol=4 * np.finfo(float).eps, maxiter=500)
    end = flow_from(plant, x, 1, t)
    scale = max(1.0, float(np.max(np.abs(x))) + abs(br.kappa) + br.gamma / br.slow_rate)
    if abs(end[1]) > 1e3 * tol * scale:
        raise NoConvergence(f"|x2| = {abs(end[1]):.3e} at the located exit from {x!r}")
    end[1] = 0.0
    return t, end


def exit_time_plus(plant: PlantSpec, x, tol: float = DEFAULT_TOL) -> float:
    """First exit time from an arbitrary state under relay output +1.

    States already below the switching line exit at ``t = 0``.
    """
    return _exit_general(plant, x, tol)[0]


def exit_time_minus(plant: PlantSpec, x, tol: float = DEFAULT_TOL) -> float:
    return exit_time_plus(plant, -np.asarray(x, dtype=float), tol)


def psi_plus(plant: PlantSpec, x, tol: float = DEFAULT_TOL) -> np.ndarray:
    """First exit map under relay output +1 (state at the first exit)."""
    return _exit_general(plant, x, tol)[1]


def psi_minus(plant: PlantSpec, x, tol: float = DEFAULT_TOL) -> np.ndarray:
    return -psi_plus(plant, -np.asarray(x, dtype=float), tol)
