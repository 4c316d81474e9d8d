import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.integrate import quad, solve_ivp

from deformed_kepler import Chart, ChartPoint, ModelParams
from deformed_kepler.errors import DeformationRequired, DomainViolation, UnboundState
from deformed_kepler.keplermodel import hamiltonian_action, hamiltonian_pi, hamiltonian_reduced, hamiltonian_xi
from deformed_kepler.transforms import (
    TransformMode,
    action_to_pi,
    action_to_xi,
    flow_linear,
    pi_chi1_frequency_ratio,
    pi_literal_residual,
    pi_to_action,
    reduced_to_action,
    xi_frequency_residual,
    xi_to_action,
)

P = ModelParams(1.0, 1.0, 0.1)


def radial_action(x, params):
    """(1/pi) * integral of p_r between the turning points."""
    r0, _, pr0, l = x.coords
    m, k = params.m, params.k
    e = hamiltonian_reduced(params)(x)
    # turning points of 2m(E + k/r) - l^2/r^2 = 0
    disc = math.sqrt(k * k + 2 * e * l * l / m)
    rmin, rmax = (-k + disc) / (2 * e), (-k - disc) / (2 * e)
    rmin, rmax = min(rmin, rmax), max(rmin, rmax)

    def pr(r):
        return math.sqrt(max(2 * m * (e + k / r) - l * l / r ** 2, 0.0))

    val, _ = quad(pr, rmin, rmax, limit=200, epsabs=1e-13, epsrel=1e-12)
    return val / math.pi


def test_probe_actions(probe):
    j = reduced_to_action(probe, P)
    assert j[0] == pytest.approx(0.01671, abs=1e-4)
    assert j[1] == 0.9
    assert j[0] + j[1] == pytest.approx(1 / math.sqrt(1.19), abs=1e-14)


def test_actions_match_radial_quadrature(probe):
    for x in [probe, ChartPoint(Chart.REDUCED, (1.2, 0.3, 0.25, 0.7)), ChartPoint(Chart.REDUCED, (0.8, -1.0, -0.1, 1.0))]:
        assert reduced_to_action(x, P)[0] == pytest.approx(radial_action(x, P), abs=1e-7)


def test_circular_orbit_has_zero_radial_action():
    x = ChartPoint(Chart.REDUCED, (2.0, 0.0, 0.0, math.sqrt(2.0)))
    j = reduced_to_action(x, P)
    assert abs(j[0]) < 1e-12 and j[1] == pytest.approx(math.sqrt(2.0))


def test_unbound_state_raises():
    with pytest.raises(UnboundState, match="compact case requires E<0"):
        reduced_to_action(ChartPoint(Chart.REDUCED, (1.0, 0.0, 0.0, 2.0)), P)


def test_angles_are_mean_anomaly():
    # start at perihelion, integrate Hamilton's equations independently, compare with n t
    l, rp = 0.9, 0.7
    e = l * l / (2 * rp * rp) - 1 / rp
    x0 = ChartPoint(Chart.REDUCED, (rp, 0.0, 0.0, l))
    a0 = reduced_to_action(x0, P)
    assert a0[2] == pytest.approx(0.0, abs=1e-12) or a0[2] == pytest.approx(2 * math.pi, abs=1e-12)

    def rhs(t, y):
        r, phi, pr = y
        return [pr, l / r ** 2, l * l / r ** 3 - 1 / r ** 2]

    n = (-2 * e) ** 1.5
    for t in (0.4, 1.3, 2.9):
        sol = solve_ivp(rhs, (0, t), [rp, 0.0, 0.0], rtol=1e-12, atol=1e-13, method="DOP853")
        r, phi, pr = sol.y[:, -1]
        ang = reduced_to_action(ChartPoint(Chart.REDUCED, (r, phi, pr, l)), P)[2]
        assert ang == pytest.approx((n * t) % (2 * math.pi), abs=1e-8)


def test_pi_forward_values(probe):
    y = action_to_pi(reduced_to_action(probe, P), P)
    assert y[0] == pytest.approx(1.65034, abs=1e-5)
    assert y[1] == 0.9


def test_pi_inverse_modes(probe):
    a = reduced_to_action(probe, P)
    y = action_to_pi(a, P)
    back = pi_to_action(y, P, TransformMode.CORRECTED)
    assert np.allclose(back.array, a.array, atol=1e-12)
    assert pi_literal_residual(a, P) == pytest.approx(0.75034, abs=1e-4)
    literal = pi_to_action(y, P, TransformMode.PAPER_LITERAL)
    assert literal[0] == pytest.approx(-0.73364, abs=1e-4)
    assert literal[1] == a[1]


def test_pi_chi1_ratio_is_half(probe):
    assert pi_chi1_frequency_ratio(reduced_to_action(probe, P), P) == pytest.approx(0.5, abs=1e-12)


def test_xi_values(probe):
    a = reduced_to_action(probe, P)
    y = action_to_xi(a, P, 1.0)
    assert y[1] == pytest.approx(1.0) and y[0] == pytest.approx(0.9405)
    assert hamiltonian_xi(P)(y) == pytest.approx(-0.595)
    with pytest.raises(DeformationRequired):
        action_to_xi(a, ModelParams(alpha=0.0), 1.0)
    with pytest.raises(DomainViolation):
        action_to_xi(a, P, -1.0)


def test_flow_linear_examples():
    x = ChartPoint(Chart.ACTION, (0.4, 0.6, 0.1, 0.2))
    y = flow_linear(x, P, 1.0)
    assert y.coords == pytest.approx((0.4, 0.6, 1.1, 1.2))
    assert flow_linear(x, P, 0.0) == x
    xi = ChartPoint(Chart.XI, (0.5, 1.0, 0.0, 0.0))
    z = flow_linear(xi, P, P.m * P.alpha)
    assert z.coords == pytest.approx((0.5, 1.0, 1.0, -1.0))
    with pytest.raises(ValueError):
        flow_linear(ChartPoint(Chart.NU, (0, 0, 0, 0)), P, 1.0)


bound = st.tuples(
    st.floats(0.6, 1.6), st.floats(-3.0, 3.0), st.floats(-0.4, 0.4), st.floats(0.5, 1.1)
)


@settings(max_examples=50, deadline=None)
@given(bound)
def test_h_agrees_across_charts(c):
    x = ChartPoint(Chart.REDUCED, c)
    e = hamiltonian_reduced(P)(x)
    assume(e < -0.05)
    a = reduced_to_action(x, P)
    assert hamiltonian_action(P)(a) == pytest.approx(e, abs=1e-10)
    assert hamiltonian_pi(P)(action_to_pi(a, P)) == pytest.approx(e, abs=1e-9)
    assert hamiltonian_xi(P)(action_to_xi(a, P, x[0])) == pytest.approx(e, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(bound)
def test_round_trips(c):
    x = ChartPoint(Chart.REDUCED, c)
    assume(hamiltonian_reduced(P)(x) < -0.05)
    a = reduced_to_action(x, P)
    assume(a[0] > 1e-3)
    back = pi_to_action(action_to_pi(a, P), P)
    assert np.max(np.abs(back.array - a.array)) < 1e-10
    xi = xi_to_action(action_to_xi(a, P, 1.0), P, 1.0)
    assert np.max(np.abs(xi.array - a.array)) < 1e-10
    assert abs(xi_frequency_residual(a, P, 1.0)) < 1e-9
