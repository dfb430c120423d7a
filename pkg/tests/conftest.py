import math

import numpy as np
import pytest

from relaycycle.plant import (ComplexConjugate, DistinctReal, PlantSpec,
                              RepeatedReal, denominator_from_poles)

BASE = PlantSpec(-1.0, 3.0, 3.0, 2.0)          # (-s+3)/(s^2+3s+2)
BASE_NOZERO = PlantSpec(0.0, 3.0, 3.0, 2.0)    # 3/(s^2+3s+2)
BASE_NEGZERO = PlantSpec(1.0, 3.0, 3.0, 2.0)   # (s+3)/(s^2+3s+2)
COMPLEX = PlantSpec(-1.0, 1.0, 2.0, 2.0)       # (-s+1)/(s^2+2s+2)
REPEATED = PlantSpec(-1.0, 1.0, 2.0, 1.0)      # (-s+1)/(s+1)^2

POLE_KINDS = ("distinct", "repeated", "complex")


def random_plant(rng, kind, kappa=None, gamma=None):
    """Random valid plant of the given pole class (kappa > 0 by default)."""
    if kind == "distinct":
        beta = rng.uniform(0.3, 2.0)
        poles = DistinctReal(alpha=beta + rng.uniform(0.3, 3.0), beta=beta)
    elif kind == "repeated":
        poles = RepeatedReal(alpha=rng.uniform(0.3, 3.0))
    else:
        poles = ComplexConjugate(sigma=rng.uniform(0.2, 1.5), omega=rng.uniform(0.3, 3.0))
    a1, a2 = denominator_from_poles(poles)
    if kappa is None:
        kappa = rng.uniform(0.2, 3.0)
    if gamma is None:
        gamma = rng.uniform(0.5, 3.0)
    return PlantSpec.from_kappa(kappa, gamma, a1, a2)


def expm_taylor(M, t):
    """Scaling-and-squaring Taylor series for exp(M t); test oracle only."""
    X = np.asarray(M, dtype=float) * t
    norm = np.abs(X).sum(axis=1).max()
    k = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0 else 0
    Y = X / 2.0 ** k
    out = np.eye(2)
    term = np.eye(2)
    for j in range(1, 30):
        term = term @ Y / j
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


def rk4_affine(A, c, x0, t, n):
    """n classical RK4 steps of dx/dt = A x + c over [0, t]; test oracle only."""
    x = np.array(x0, dtype=float)
    h = t / n
    for _ in range(n):
        k1 = A @ x + c
        k2 = A @ (x + 0.5 * h * k1) + c
        k3 = A @ (x + 0.5 * h * k2) + c
        k4 = A @ (x + h * k3) + c
        x = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def rk4_doubling(A, c, x0, t, n):
    """Richardson combination of RK4 runs with n and 2n steps."""
    coarse = rk4_affine(A, c, x0, t, n)
    fine = rk4_affine(A, c, x0, t, 2 * n)
    return fine + (fine - coarse) / 15.0


def central_diff(f, x, h):
    return (f(x + h) - f(x - h)) / (2.0 * h)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
