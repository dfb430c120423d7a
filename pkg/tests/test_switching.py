import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relaycycle.errors import BelowSwitchOnset, UnsupportedPoleClass
from relaycycle.flow import branch_for, critical_time, flow_positive
from relaycycle.plant import PlantSpec, realize
from relaycycle.switching import (exit_plus, exit_time_minus, exit_time_plus,
                                  f_minus, f_plus, f_plus_prime, f_plus_second,
                                  psi_minus, psi_plus, tau_minus, tau_plus,
                                  tau_plus_prime)

from conftest import (COMPLEX, BASE, POLE_KINDS, REPEATED, central_diff,
                      random_plant, rk4_affine)


def base_tau(xi):
    return math.log((2 * xi + 5) / 3)


def base_f(xi):
    return -11 / 2 + 6 * (xi + 4) / (2 * xi + 5) - (9 / 2) / (2 * xi + 5)


# --- worked examples -------------------------------------------------------

@pytest.mark.parametrize("xi", [-0.9, 0.0, 0.5, 1.0, 2.0, 5.0, 40.0])
def test_base_closed_forms(xi):
    assert tau_plus(BASE, xi) == pytest.approx(base_tau(xi), abs=1e-12)
    assert f_plus(BASE, xi) == pytest.approx(base_f(xi), abs=1e-12)


def test_base_points():
    assert tau_plus(BASE, 2.0) == pytest.approx(math.log(3), abs=1e-13)
    assert f_plus(BASE, 2.0) == pytest.approx(-2.0, abs=1e-13)
    assert f_plus(BASE, 0.0) == pytest.approx(-1.6, abs=1e-13)
    assert f_plus_prime(BASE, 2.0) == pytest.approx(-1 / 9, abs=1e-13)
    assert tau_plus_prime(BASE, 2.0) == pytest.approx(2 / 9, abs=1e-13)
    # slow-mode limit -kappa - gamma/alpha
    assert f_plus(BASE, 1e6) == pytest.approx(-2.5, abs=1e-5)


def test_boundary_values():
    for plant in (BASE, REPEATED, COMPLEX):
        k = plant.kappa
        assert tau_plus(plant, -k) == 0.0
        assert f_plus(plant, -k) == -k
        assert f_plus(plant, -k - 3.0) == -k - 3.0
        with pytest.raises(BelowSwitchOnset):
            f_plus_prime(plant, -k)
        with pytest.raises(BelowSwitchOnset):
            tau_plus_prime(plant, -k - 1)
    ex = exit_plus(BASE, -2.0)
    assert ex.tau == 0.0 and ex.xi_next == -2.0 and math.isnan(ex.derivative)


def _first_root_dense(plant, xi, t_end, n=20000):
    # independent oracle: dense sampling of the explicit q then bisection
    ts = np.linspace(0.0, t_end, n)
    qs = np.array([flow_positive(plant, xi, t).q for t in ts])
    k = int(np.argmax(qs[1:] < 0)) + 1
    lo, hi = ts[k - 1], ts[k]
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if flow_positive(plant, xi, mid).q > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_complex_exit_time_bounds():
    t = tau_plus(COMPLEX, 100.0)
    assert critical_time(COMPLEX, 100.0) < t < math.pi
    assert t == pytest.approx(_first_root_dense(COMPLEX, 100.0, math.pi), abs=1e-10)


def test_complex_large_xi_multiplier():
    assert f_plus_prime(COMPLEX, 1e6) == pytest.approx(-math.exp(-math.pi), abs=1e-3)
    assert tau_plus_prime(COMPLEX, 5.0) > 0


@pytest.mark.parametrize("xi", [0.0, 0.7, 3.0])
def test_base_derivatives_vs_differences(xi):
    h = 1e-6
    fd_f = central_diff(lambda x: f_plus(BASE, x), xi, h)
    fd_t = central_diff(lambda x: tau_plus(BASE, x), xi, h)
    assert f_plus_prime(BASE, xi) == pytest.approx(fd_f, rel=1e-6)
    assert tau_plus_prime(BASE, xi) == pytest.approx(fd_t, rel=1e-6)


def test_second_derivative():
    h = 1e-4
    fd2 = (f_plus(BASE, 3 + h) - 2 * f_plus(BASE, 3) + f_plus(BASE, 3 - h)) / h ** 2
    assert f_plus_second(BASE, 3.0) == pytest.approx(fd2, rel=1e-4)
    assert f_plus_second(BASE, 3.0) > 0
    # the declared base plant map simplifies to -5/2 + 9/2 / (2x+5)
    assert f_plus_second(BASE, 3.0) == pytest.approx(36 / 11 ** 3, rel=1e-12)
    assert f_plus_second(REPEATED, 1.0) > 0
    with pytest.raises(UnsupportedPoleClass):
        f_plus_second(COMPLEX, 1.0)
    with pytest.raises(BelowSwitchOnset):
        f_plus_second(BASE, -1.0)


@pytest.mark.parametrize("kind", ["distinct", "repeated"])
def test_second_derivative_vs_differences_random(rng, kind):
    for _ in range(20):
        plant = random_plant(rng, kind)
        xi = -plant.kappa + rng.uniform(0.2, 10.0)
        h = 1e-3 * max(1.0, xi)
        fd2 = (f_plus(plant, xi + h) - 2 * f_plus(plant, xi) + f_plus(plant, xi - h)) / h ** 2
        assert f_plus_second(plant, xi) == pytest.approx(fd2, rel=2e-3, abs=1e-7)


def test_symmetry_examples():
    assert tau_minus(BASE, -2.0) == tau_plus(BASE, 2.0)
    assert f_minus(BASE, -2.0) == pytest.approx(2.0, abs=1e-13)
    np.testing.assert_array_equal(psi_minus(BASE, [0.0, 0.0]), -psi_plus(BASE, [0.0, 0.0]))


def test_psi_plus_examples():
    np.testing.assert_allclose(psi_plus(BASE, [2.0, 0.0]), [-2.0, 0.0], atol=1e-12)
    np.testing.assert_array_equal(psi_plus(BASE, [1.0, -0.5]), [1.0, -0.5])
    assert exit_time_plus(BASE, [1.0, -0.5]) == 0.0


@pytest.mark.parametrize("plant", [BASE, REPEATED, COMPLEX])
def test_psi_plus_off_line_vs_rk4_events(plant):
    # oracle: RK4 march with step h, then bisection on a partial step
    real = realize(plant)
    x0 = np.array([0.0, 1.0])
    h = 1e-3
    x, t = x0, 0.0
    while True:
        nxt = rk4_affine(real.A, -real.B, x, h, 1)
        if nxt[1] < 0:
            break
        x, t = nxt, t + h
    lo, hi = 0.0, h
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if rk4_affine(real.A, -real.B, x, mid, 1)[1] >= 0:
            lo = mid
        else:
            hi = mid
    ref = rk4_affine(real.A, -real.B, x, lo, 1)
    got = psi_plus(plant, x0)
    assert got[0] == pytest.approx(ref[0], abs=1e-6)
    assert got[1] == 0.0
    assert exit_time_plus(plant, x0) == pytest.approx(t + lo, abs=1e-6)


# --- properties -------------------------------------------------------------

def _samples(rng, kind, n):
    out = []
    for _ in range(n):
        plant = random_plant(rng, kind)
        xi = -plant.kappa + 10 ** rng.uniform(-6, 3)
        out.append((plant, xi))
    return out


@pytest.mark.parametrize("kind", POLE_KINDS)
def test_properties_random(rng, kind):
    for plant, xi in _samples(rng, kind, 200):
        ex = exit_plus(plant, xi)
        assert -1.0 < ex.derivative < 0.0
        ts = critical_time(plant, xi)
        assert ex.tau > 2 * ts
        assert flow_positive(plant, xi, 2 * ts).q > 0
        xi2 = xi + 10 ** rng.uniform(-3, 2)
        assert f_plus(plant, xi) > f_plus(plant, xi2)
        if kind == "complex":
            assert ex.tau < math.pi / branch_for(plant).omega


@pytest.mark.parametrize("kind", POLE_KINDS)
def test_derivatives_match_differences_random(rng, kind):
    for _ in range(30):
        plant = random_plant(rng, kind)
        xi = -plant.kappa + rng.uniform(0.05, 50.0)
        h = 1e-6 * max(1.0, abs(xi))
        fd_f = central_diff(lambda x: f_plus(plant, x), xi, h)
        fd_t = central_diff(lambda x: tau_plus(plant, x), xi, h)
        assert f_plus_prime(plant, xi) == pytest.approx(fd_f, rel=1e-5)
        assert tau_plus_prime(plant, xi) == pytest.approx(fd_t, rel=1e-5)


def test_complex_tau_monotone_on_grid():
    grid = np.linspace(-COMPLEX.kappa + 1e-3, 200.0, 400)
    taus = [tau_plus(COMPLEX, x) for x in grid]
    assert np.all(np.diff(taus) >= 0)
    assert max(taus) < math.pi


def test_distinct_image_interval(rng):
    plants = [BASE] + [random_plant(rng, "distinct") for _ in range(5)]
    for plant in plants:
        br = branch_for(plant)
        k, g = plant.kappa, plant.gamma
        for e in np.logspace(-8, 8, 161):
            f = f_plus(plant, -k + e)
            assert f > -k - g / br.alpha - 1e-9
            assert f < -k + 1e-9
            # looser superset also holds
            assert f > -k - g / br.beta


@settings(max_examples=60, deadline=None)
@given(kind=st.sampled_from(POLE_KINDS), seed=st.integers(0, 2 ** 31),
       x1=st.floats(-20, 20), x2=st.floats(-5, 5))
def test_symmetry_identities(kind, seed, x1, x2):
    plant = random_plant(np.random.default_rng(seed), kind)
    x = np.array([x1, x2])
    assert exit_time_minus(plant, x) == exit_time_plus(plant, -x)
    np.testing.assert_array_equal(psi_minus(plant, x), -psi_plus(plant, -x))
    assert tau_minus(plant, x1) == tau_plus(plant, -x1)
    assert f_minus(plant, x1) == -f_plus(plant, -x1)


def test_near_repeated_branch_continuity():
    # distinct poles 1 +/- 5e-7 use the averaged double-pole formulas;
    # compare against a clearly distinct neighbour through continuity
    close = PlantSpec(-1, 1, 2.0, 1.0 - 2.5e-13)
    far = PlantSpec(-1, 1, 2.0, 1.0 - 1e-6)
    assert f_plus(close, 1.0) == pytest.approx(f_plus(far, 1.0), abs=1e-5)
    assert f_plus(close, 1.0) == pytest.approx(f_plus(REPEATED, 1.0), abs=1e-9)
