"""Reference simulator for ``dx/dt = A x - B sign(x2)`` with Filippov sliding.

Fixed-step classical RK4 between switches, a bracketed root solve to localize each
crossing of ``x2 = 0``, and the equivalent-control sliding motion on the
chattering segment ``|x1| <= |kappa|`` when the two limiting fields both
point at the line (negative zero).  It shares no code with the closed-form
modules apart from the plant container, so it can serve as their oracle.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import (NoConvergence, NoCrossings, NoSlidingSegment,
                     OutsideSlidingSegment)
from .plant import ComplexConjugate, PlantSpec, classify_poles

__all__ = [
    "SimConfig", "Event", "SimTrace", "default_dt", "step", "locate_crossing",
    "sliding_dynamics", "simulate", "switching_sequence", "write_trace_csv",
    "write_events_json",
]

SEGMENT_SHRINK = 1e-9  # sliding starts only strictly inside the segment
_BISECT_MAX = 200
_BISECT_WIDTH = 2.0 ** -52


def default_dt(plant: PlantSpec) -> float:
    """``1e-3 * min(1, 1/|fastest pole|)``."""
    poles = classify_poles(plant)
    if isinstance(poles, ComplexConjugate):
        fast = math.hypot(poles.sigma, poles.omega)
    else:
        fast = poles.alpha
    return 1e-3 * min(1.0, 1.0 / fast)


@dataclass(frozen=True)
class SimConfig:
    """Integration settings.

    Attributes
    ----------
    dt : float or None
        Base step; None picks :func:`default_dt` for the plant.
    event_tol : float
        Crossing localization tolerance on ``|x2|``.
    t_max : float
    min_switch_gap : float
        Consecutive crossings closer than this end the run (Zeno guard).
    sliding_enabled : bool
    forced_sign : {+1, -1} or None
        Diagnostic mode: hold the relay at this value and never switch.
    initial_sign : {+1, -1} or None
        Relay value at ``t = 0``; None infers it from ``x0``.
    max_crossings : int or None
        Stop quietly after this many crossings.
    """

    dt: Optional[float] = None
    event_tol: float = 1e-10
    t_max: float = 100.0
    min_switch_gap: float = 1e-6
    sliding_enabled: bool = True
    forced_sign: Optional[int] = None
    initial_sign: Optional[int] = None
    max_crossings: Optional[int] = None

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not self.event_tol > 0:
            raise ValueError(f"event_tol must be positive, got {self.event_tol!r}")
        if not self.min_switch_gap > 0:
            raise ValueError(f"min_switch_gap must be positive, got {self.min_switch_gap!r}")
        if not self.t_max >= 0:
            raise ValueError(f"t_max must be non-negative, got {self.t_max!r}")
        for name in ("forced_sign", "initial_sign"):
            v = getattr(self, name)
            if v is not None and v not in (1, -1):
                raise ValueError(f"{name} must be +1, -1 or None, got {v!r}")


@dataclass(frozen=True)
class Event:
    """One entry of the event log; `sign` is the relay value just before it."""

    kind: str
    t: float
    x1: Optional[float] = None
    sign: int = 0

    def to_dict(self):
        d = {"type": self.kind, "t": self.t}
        if self.x1 is not None:
            d["x1"] = self.x1
        return d


@dataclass(frozen=True)
class SimTrace:
    """Samples ``(t, x1, x2, u)`` as an ``(N, 4)`` array plus the event log."""

    samples: np.ndarray
    events: tuple
    notes: tuple = ()

    @property
    def t(self):
        return self.samples[:, 0]

    @property
    def x1(self):
        return self.samples[:, 1]

    @property
    def x2(self):
        return self.samples[:, 2]

    @property
    def u(self):
        return self.samples[:, 3]

    @property
    def crossings(self):
        return [e for e in self.events if e.kind == "Crossing"]

    def kinds(self):
        return [e.kind for e in self.events]


def _rk4(a1, a2, g, k, x1, x2, s, h):
    # field: dx1 = -a2 x2 - s g, dx2 = x1 - a1 x2 + s k
    sg, sk = s * g, s * k
    k11 = -a2 * x2 - sg
    k12 = x1 - a1 * x2 + sk
    y1, y2 = x1 + 0.5 * h * k11, x2 + 0.5 * h * k12
    k21 = -a2 * y2 - sg
    k22 = y1 - a1 * y2 + sk
    y1, y2 = x1 + 0.5 * h * k21, x2 + 0.5 * h * k22
    k31 = -a2 * y2 - sg
    k32 = y1 - a1 * y2 + sk
    y1, y2 = x1 + h * k31, x2 + h * k32
    k41 = -a2 * y2 - sg
    k42 = y1 - a1 * y2 + sk
    return (x1 + h / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41),
            x2 + h / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42))


def _coeffs(plant):
    return float(plant.a1), float(plant.a2), plant.gamma, plant.kappa


def step(plant: PlantSpec, x, relay_sign: int, dt: float) -> np.ndarray:
    """One classical RK4 step of ``A x - B relay_sign``."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    a1, a2, g, k = _coeffs(plant)
    return np.array(_rk4(a1, a2, g, k, float(x[0]), float(x[1]), relay_sign, dt))


def locate_crossing(plant: PlantSpec, x_before, t_before: float, dt: float,
                    relay_sign: int, event_tol: float = 1e-10,
                    advance: Callable | None = None):
    """Refine the sub-step length that brings ``x2`` back to the line.

    Brent's bracketed method (bisection safeguarded) on ``x2(h)``, with
    every trial state re-integrated from `x_before`.  The bracket is shrunk
    to roundoff width rather than stopping at the first ``|x2| <= event_tol``:
    tiny excursions near the origin can have an amplitude below `event_tol`
    altogether.

    Parameters
    ----------
    x_before : 2-vector
        State at `t_before`, on the ``relay_sign`` side of the line.
    dt : float
        Step over which ``relay_sign * x2`` became negative.
    event_tol : float
        Upper bound on ``|x2|`` at the returned state.
    advance : callable, optional
        ``advance(x, h) -> 2-vector``; defaults to one RK4 sub-step of
        length ``h`` under `relay_sign`.

    Returns
    -------
    (float, ndarray)
        Event time in ``[t_before, t_before + dt]`` and the state there.
    """
    if advance is None:
        a1, a2, g, k = _coeffs(plant)

        def advance(x, h):
            return _rk4(a1, a2, g, k, x[0], x[1], relay_sign, h)

    x0 = (float(x_before[0]), float(x_before[1]))
    x_hi = advance(x0, float(dt))
    if x0[1] == 0.0 and x_hi[1] == 0.0:
        return t_before, np.array(x0)
    if relay_sign * x0[1] <= 0.0:
        # already on the line (a fresh switch); nudge the bracket off h = 0
        lo = _first_positive(advance, x0, float(dt), relay_sign)
    else:
        lo = 0.0
    x2_of = lambda h: advance(x0, h)[1]  # noqa: E731
    h = brentq(x2_of, lo, float(dt), xtol=_BISECT_WIDTH * dt, rtol=4 * np.finfo(float).eps,
               maxiter=_BISECT_MAX)
    xe = advance(x0, h)
    if abs(xe[1]) > event_tol:  # pragma: no cover - needs |dx2/dt| ~ 1e14
        raise NoConvergence(f"crossing not resolved to |x2| <= {event_tol!r}")
    return t_before + h, np.array([float(xe[0]), float(xe[1])])


def _first_positive(advance, x0, dt, s):
    # largest power-of-two fraction of dt on the correct side of the line
    h = 0.5 * dt
    while h > _BISECT_WIDTH * dt:
        if s * advance(x0, h)[1] > 0.0:
            return h
        h *= 0.5
    return 0.0


def sliding_dynamics(plant: PlantSpec, x1: float):
    """Equivalent-control motion on the line ``x2 = 0``.

    Holding ``x2 = 0`` requires the relay value ``w = -x1/kappa``, which
    gives ``dx1/dt = gamma x1 / kappa``.

    Returns
    -------
    (float, float)
        ``(dx1/dt, w)``.

    Raises
    ------
    NoSlidingSegment
        For ``kappa = 0``.
    OutsideSlidingSegment
        For ``|x1| > |kappa|``.
    """
    kappa = plant.kappa
    if kappa == 0:
        raise NoSlidingSegment("kappa = 0: the only sliding point is the origin")
    if abs(x1) > abs(kappa):
        raise OutsideSlidingSegment(f"|x1| = {abs(x1)!r} > |kappa| = {abs(kappa)!r}")
    return plant.gamma * x1 / kappa, -x1 / kappa


def _initial_sign(plant, x1, x2, notes):
    if x2 > 0:
        return 1
    if x2 < 0:
        return -1
    k = plant.kappa
    up = x1 + k > 0      # +1 field lifts the state above the line
    down = x1 - k < 0    # -1 field pushes it below
    if up and down:
        notes.append(f"start ({x1!r}, 0) on the repelling segment; "
                     "both continuations exist, +1 chosen")
        return 1
    if up:
        return 1
    if down:
        return -1
    return 0  # attracting segment or the origin with kappa = 0


def simulate(plant: PlantSpec, x0, cfg: SimConfig | None = None) -> SimTrace:
    """Integrate the relay loop from `x0`.

    Parameters
    ----------
    plant : PlantSpec
        Validated plant.
    x0 : 2-vector
    cfg : SimConfig, optional

    Returns
    -------
    SimTrace
        The run ends with a ``Timeout`` (``t_max`` reached outside sliding),
        a ``ChatteringStop`` (Zeno switching, or sliding that has reached
        the origin or ``t_max``), or silently after ``cfg.max_crossings``.
    """
    cfg = cfg or SimConfig()
    dt = cfg.dt if cfg.dt is not None else default_dt(plant)
    a1, a2, g, k = _coeffs(plant)
    x1, x2 = float(x0[0]), float(x0[1])
    t = 0.0
    notes: list = []
    events: list = []
    rows = []

    if cfg.forced_sign is not None:
        s = cfg.forced_sign
        rows.append((t, x1, x2, float(s)))
        while t < cfg.t_max:
            h = min(dt, cfg.t_max - t)
            x1, x2 = _rk4(a1, a2, g, k, x1, x2, s, h)
            t = t + h if h < dt else t + dt
            rows.append((t, x1, x2, float(s)))
        events.append(Event("Timeout", t, x1, s))
        notes.append(f"relay forced to {s:+d}")
        return SimTrace(np.array(rows), tuple(events), tuple(notes))

    s = cfg.initial_sign or _initial_sign(plant, x1, x2, notes)
    sliding = False
    if s == 0:
        if k == 0:
            rows.append((t, x1, x2, 0.0))
            events.append(Event("ChatteringStop", t, x1, 0))
            return SimTrace(np.array(rows), tuple(events), tuple(notes))
        if cfg.sliding_enabled:
            sliding = True
            events.append(Event("SlidingEnter", t, x1, 0))
        else:
            s = 1
    rows.append((t, x1, x2, float(s) if not sliding else -x1 / k))

    last_cross = -math.inf
    n_cross = 0
    kh = abs(k)
    while True:
        if sliding:
            # exact solution of dx1/dt = gamma x1 / kappa, sampled every dt
            x2 = 0.0
            rate = g / k
            while abs(x1) > cfg.event_tol and t < cfg.t_max:
                h = min(dt, cfg.t_max - t)
                x1 *= math.exp(rate * h)
                t += h
                rows.append((t, x1, 0.0, -x1 / k))
            events.append(Event("ChatteringStop", t, x1, s))
            break

        if t >= cfg.t_max:
            events.append(Event("Timeout", t, x1, s))
            break
        h = min(dt, cfg.t_max - t)
        n1, n2 = _rk4(a1, a2, g, k, x1, x2, s, h)
        if s * n2 >= 0.0:
            t += h
            x1, x2 = n1, n2
            rows.append((t, x1, x2, float(s)))
            continue

        te, xe = locate_crossing(plant, (x1, x2), t, h, s, cfg.event_tol)
        x1, x2 = float(xe[0]), 0.0
        t = te
        events.append(Event("Crossing", t, x1, s))
        rows.append((t, x1, x2, float(s)))
        n_cross += 1
        if t - last_cross < cfg.min_switch_gap:
            events.append(Event("ChatteringStop", t, x1, s))
            break
        last_cross = t
        s_new = -s
        if s_new * x1 + k > 0 or not cfg.sliding_enabled:
            s = s_new
        elif k < 0 and abs(x1) <= kh * (1.0 - SEGMENT_SHRINK):
            events.append(Event("SlidingEnter", t, x1, s))
            sliding = True
            s = s_new
            continue
        else:
            s = s_new
        if cfg.max_crossings is not None and n_cross >= cfg.max_crossings:
            break

    return SimTrace(np.array(rows), tuple(events), tuple(notes))


def switching_sequence(trace: SimTrace) -> list:
    """Crossing abscissae in the half-map convention ``xi_k = -s_k x1_k``.

    Entry ``k`` is comparable to ``iterate_half_map(...).iterates[k + 1]``.

    Raises
    ------
    NoCrossings
    """
    cr = trace.crossings
    if not cr:
        raise NoCrossings("trace has no switching-line crossings")
    return [-e.sign * e.x1 for e in cr]


def write_trace_csv(trace: SimTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x1", "x2", "u"])
        for row in trace.samples:
            w.writerow([repr(float(v)) for v in row])


def write_events_json(trace: SimTrace, path) -> None:
    with open(path, "w") as fh:
        json.dump([e.to_dict() for e in trace.events], fh, indent=1)
        fh.write("\n")
