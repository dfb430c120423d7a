import math

import numpy as np
import pytest

from relaycycle.errors import BelowSwitchOnset
from relaycycle.flow import (ComplexCoefficients, DistinctCoefficients,
                             RepeatedCoefficients, branch_for, coefficients,
                             critical_time, flow_from, flow_positive,
                             matrix_exp, q_rate)
from relaycycle.plant import PlantSpec, realize, sink_point

from conftest import (COMPLEX, BASE, POLE_KINDS, REPEATED, expm_taylor,
                      random_plant, rk4_doubling)


@pytest.mark.parametrize("kind", POLE_KINDS)
def test_matrix_exp_matches_taylor(rng, kind):
    for _ in range(10):
        plant = random_plant(rng, kind)
        A = realize(plant).A
        for t in (0.0, 0.01, 0.7, 3.0, 12.0):
            np.testing.assert_allclose(matrix_exp(plant, t), expm_taylor(A, t),
                                       rtol=1e-10, atol=1e-12)


def test_matrix_exp_near_repeated_gap():
    # poles 1 and 1 + 1e-8: handled by the double-pole formulas
    a1, a2 = 2.0 + 1e-8, 1.0 + 1e-8
    plant = PlantSpec(-1, 1, a1, a2)
    assert branch_for(plant).kind == "repeated"
    A = realize(plant).A
    for t in (0.5, 2.0):
        np.testing.assert_allclose(matrix_exp(plant, t), expm_taylor(A, t),
                                   rtol=1e-7, atol=1e-9)


def test_base_coefficients():
    c = coefficients(BASE, 2.0)
    assert isinstance(c, DistinctCoefficients)
    assert (c.mu_alpha, c.nu_beta) == pytest.approx((4.5, 6.0))
    assert isinstance(coefficients(REPEATED, 1.0), RepeatedCoefficients)
    cc = coefficients(COMPLEX, 1.0)
    assert isinstance(cc, ComplexCoefficients)
    assert cc.chi4 > 0


@pytest.mark.parametrize("kind", POLE_KINDS)
def test_flow_positive_matches_rk4(rng, kind):
    for _ in range(5):
        plant = random_plant(rng, kind)
        real = realize(plant)
        xi = rng.uniform(-plant.kappa + 0.1, 10.0)
        T = 3.0 * critical_time(plant, xi)
        for t in np.linspace(0.0, T, 5)[1:]:
            ref = rk4_doubling(real.A, -real.B, [xi, 0.0], t, 400)
            st = flow_positive(plant, xi, t)
            assert abs(st.p - ref[0]) <= 1e-6
            assert abs(st.q - ref[1]) <= 1e-6


@pytest.mark.parametrize("kind", POLE_KINDS)
def test_critical_time_is_peak(rng, kind):
    for _ in range(5):
        plant = random_plant(rng, kind)
        xi = rng.uniform(-plant.kappa + 0.05, 20.0)
        ts = critical_time(plant, xi)
        assert abs(q_rate(plant, xi, ts)) <= 1e-12 * max(1.0, abs(xi))
        grid = np.linspace(0.0, 2.0 * ts, 2001)
        qs = [flow_positive(plant, xi, t).q for t in grid]
        assert flow_positive(plant, xi, ts).q >= max(qs) - 1e-12 * max(1.0, xi)


def test_q_rate_matches_difference():
    for plant in (BASE, REPEATED, COMPLEX):
        h = 1e-6
        fd = (flow_positive(plant, 1.5, 0.8 + h).q - flow_positive(plant, 1.5, 0.8 - h).q) / (2 * h)
        assert q_rate(plant, 1.5, 0.8) == pytest.approx(fd, rel=1e-8)


def test_short_excursion_accuracy():
    # q ~ e t - (gamma + a1 e) t^2 / 2 + O(t^3) for small t near the onset
    for plant in (BASE, REPEATED, COMPLEX):
        e = 1e-8
        xi = -plant.kappa + e
        t = 1e-8
        approx = e * t - (plant.gamma + plant.a1 * e) * t * t / 2
        assert flow_positive(plant, xi, t).q == pytest.approx(approx, rel=1e-6)


def test_critical_time_below_onset():
    with pytest.raises(BelowSwitchOnset):
        critical_time(BASE, -1.0)
    with pytest.raises(ValueError):
        flow_positive(BASE, 0.0, -1.0)


def test_flow_from_equilibrium_and_semigroup():
    for plant in (BASE, REPEATED, COMPLEX):
        sink = sink_point(realize(plant))
        for s in (1, -1):
            np.testing.assert_allclose(flow_from(plant, s * sink, s, 5.0), s * sink,
                                       atol=1e-13)
            x0 = np.array([0.4, 0.9])
            two = flow_from(plant, flow_from(plant, x0, s, 0.6), s, 1.1)
            np.testing.assert_allclose(two, flow_from(plant, x0, s, 1.7), atol=1e-13)
        # started on the line, flow_from agrees with the explicit p, q
        st = flow_positive(plant, 2.0, 0.9)
        np.testing.assert_allclose(flow_from(plant, [2.0, 0.0], 1, 0.9), [st.p, st.q],
                                   atol=1e-13)
    with pytest.raises(ValueError):
        flow_from(BASE, [0, 0], 0, 1.0)


def test_base_flow_closed_form():
    # distinct poles 2, 1: q = nu expm1(-t) - mu expm1(-2t), gap 1
    xi, t = 2.0, 0.4
    q = 6.0 * math.expm1(-t) - 4.5 * math.expm1(-2 * t)
    assert flow_positive(BASE, xi, t).q == pytest.approx(q, rel=1e-14)
    assert critical_time(BASE, xi) == pytest.approx(math.log(2 * 4.5 / 6.0), rel=1e-14)
