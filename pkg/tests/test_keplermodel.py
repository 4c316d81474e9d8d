import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from deformed_kepler import Chart, ChartPoint, ModelParams
from deformed_kepler.chartcore import DiffConfig, DiffScheme, derivatives
from deformed_kepler.errors import DeformationRequired, DomainViolation, SingularStructure
from deformed_kepler.keplermodel import (
    VF,
    cartesian_velocity,
    chain_coefficient,
    hamiltonian_action,
    hamiltonian_cartesian,
    hamiltonian_chain,
    hamiltonian_pi,
    hamiltonian_reduced,
    hamiltonian_xi,
    l_alpha_cartesian,
    m_cartesian,
    newton_acceleration,
    omega_rate,
    structure_matrices,
    varpi,
    vector_field_library,
)

P = ModelParams(1.0, 1.0, 0.1)
C4 = DiffConfig(DiffScheme.CENTRAL_4)


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(m=0.0)
    with pytest.raises(ValueError):
        ModelParams(alpha=-0.1)
    with pytest.raises(ValueError):
        ModelParams(k=math.inf)
    with pytest.raises(DeformationRequired):
        ModelParams(alpha=0.0).require_deformation()


def test_rates():
    assert omega_rate(2.0, P) == pytest.approx(0.1 / 8)
    assert varpi(2.0, P) == pytest.approx(0.05)


def test_cartesian_hamiltonian_values():
    h = hamiltonian_cartesian(P)
    assert h(ChartPoint(Chart.CARTESIAN, (1, 0, 0, 0, 0.9, 0))) == pytest.approx(-0.595, abs=1e-15)
    assert -1e-6 < h(ChartPoint(Chart.CARTESIAN, (1e7, 0, 0, 0, 0, 0))) < 0
    with pytest.raises(DomainViolation):
        h.func(np.zeros(6))


def test_reduced_hamiltonian_values(probe):
    h = hamiltonian_reduced(P)
    assert h(probe) == pytest.approx(-0.595, abs=1e-15)
    assert h(ChartPoint(Chart.REDUCED, (1.0, 0.0, 0.0, 0.0))) == -1.0


def test_action_hamiltonian():
    h = hamiltonian_action(P)
    assert h(ChartPoint(Chart.ACTION, (0.4, 0.6, 0, 0))) == pytest.approx(-0.5)
    u = 1 / math.sqrt(1.19)
    assert h(ChartPoint(Chart.ACTION, (u - 0.9, 0.9, 0, 0))) == pytest.approx(-0.595, abs=1e-4)
    x = ChartPoint(Chart.ACTION, (0.2, 0.5, 0, 0))
    y = ChartPoint(Chart.ACTION, (0.6, 1.5, 0, 0))
    assert h(y) == pytest.approx(h(x) / 9, rel=1e-14)


def test_chain_values():
    x = ChartPoint(Chart.ACTION, (0.4, 0.6, 0, 0))
    assert hamiltonian_chain(P, 2)(x) == 0.0
    assert hamiltonian_chain(P, 3)(x) == pytest.approx(1.0)
    assert hamiltonian_chain(P, 1)(x) == pytest.approx(-1.0)
    with pytest.raises(IndexError):
        hamiltonian_chain(P, 4)


@pytest.mark.parametrize("i", range(4))
def test_chain_gradients_match_finite_differences(i):
    x = ChartPoint(Chart.ACTION, (0.3, 0.9, 0.1, 0.2))
    h = hamiltonian_chain(P, i)
    assert np.allclose(h.gradient(x), h.gradient(x, C4), atol=1e-9)


def test_xi_and_pi_hamiltonians():
    assert hamiltonian_xi(P)(ChartPoint(Chart.XI, (0.9405, 1.0, 0, 0))) == pytest.approx(-0.595)
    assert hamiltonian_pi(P)(ChartPoint(Chart.PI, (1.65034, 0.9, 0, 0))) == pytest.approx(-0.595, abs=1e-5)
    with pytest.raises(DeformationRequired):
        hamiltonian_xi(ModelParams(alpha=0.0))


def test_vector_field_values():
    x = ChartPoint(Chart.ACTION, (0.3, 0.7, 0, 0))
    assert np.allclose(vector_field_library(P, VF.X1)(x), [0, 0, 1, 1])
    assert np.allclose(vector_field_library(P, VF.DELTA)(ChartPoint(Chart.ACTION, (1.0, 0.0, 0, 0))), [0.5, 0, 0, 0])
    xpp = vector_field_library(P, VF.X_DOUBLE_PRIME)(ChartPoint(Chart.PI, (1.6503, 0.9, 0, 0)))
    assert xpp[2] == pytest.approx(0.7081, abs=1e-4)
    assert xpp[3] == pytest.approx(-2 * 0.9 * xpp[2])
    assert np.allclose(vector_field_library(P, VF.X_PRIME)(ChartPoint(Chart.XI, (0.5, 1, 0, 0))), [0, 0, 10, -10])


def test_chain_ratio_property():
    # X_{i+1} / X_i = J1 + J2
    for j in [(0.3, 0.7), (0.2, 1.1), (1.4, 0.5)]:
        x = ChartPoint(Chart.ACTION, j + (0.0, 0.0))
        for i in range(3):
            a = vector_field_library(P, VF(f"X{i}"))(x)[2]
            b = vector_field_library(P, VF(f"X{i + 1}"))(x)[2]
            assert b / a == pytest.approx(sum(j), rel=1e-14)
            assert a == chain_coefficient(P, i, sum(j))


def test_reduced_literal_field_differs_by_one_over_m(probe):
    p = ModelParams(2.0, 1.0, 0.1)
    canon = vector_field_library(p, VF.XH_REDUCED)(probe)
    lit = vector_field_library(p, VF.XH_REDUCED_LITERAL)(probe)
    assert lit[1] / canon[1] == pytest.approx(0.5)
    assert np.allclose(np.delete(lit, 1), np.delete(canon, 1))
    same = vector_field_library(P, VF.XH_REDUCED_LITERAL)(probe)
    assert np.allclose(same, vector_field_library(P, VF.XH_REDUCED)(probe))


def test_structure_matrices():
    with pytest.raises(SingularStructure):
        structure_matrices(ChartPoint(Chart.ACTION, (0.5, 0.5, 0, 0)))
    r, rinv = structure_matrices(ChartPoint(Chart.XI, (0.9405, 1.0, 0, 0)))
    assert np.allclose(r, np.diag([0.9405, 1.0])) and np.allclose(r @ rinv, np.eye(2))


def test_newton_undeformed():
    a = newton_acceleration([1, 0, 0], [0, 0, 0], ModelParams(alpha=0.0))
    assert np.allclose(a, [-1, 0, 0])


def test_newton_vertical_velocity_unaffected():
    # qdot along e3 leaves the third component of the deformation terms zero
    q, qd = np.array([0.6, 0.8, 0.0]), np.array([0.0, 0.0, 0.7])
    a = newton_acceleration(q, qd, P)
    a0 = newton_acceleration(q, qd, ModelParams(alpha=0.0))
    assert a[2] == pytest.approx(a0[2], abs=1e-15)


@pytest.mark.parametrize("state", [(1.0, 0, 0, 0, 1.0, 0), (0.7, -0.4, 0.2, 0.3, 0.8, -0.1)])
def test_newton_matches_first_order_flow(state):
    # differentiate qdot(q, p) along the first-order flow
    y = np.array(state, dtype=float)
    hc = hamiltonian_cartesian(P)
    gv = hc.gradient(y)[:3]
    ydot = np.concatenate([cartesian_velocity(y, P), -gv])
    jac = derivatives(lambda z: cartesian_velocity(z, P), y, Chart.CARTESIAN, C4)
    assert np.allclose(jac.T @ ydot, newton_acceleration(y[:3], cartesian_velocity(y, P), P), atol=1e-8)


def _sympy_gamma(f, g, q, p, alpha):
    can = sum(sp.diff(f, q[i]) * sp.diff(g, p[i]) - sp.diff(f, p[i]) * sp.diff(g, q[i]) for i in range(3))
    theta = alpha * (sp.diff(f, q[0]) * sp.diff(g, q[1]) - sp.diff(f, q[1]) * sp.diff(g, q[0]))
    return sp.simplify(can + theta)


def test_constants_in_involution_symbolic():
    # equatorial {H, M}_gamma and {H, L_alpha}_gamma vanish identically
    q = sp.symbols("q1:4", real=True)
    p = sp.symbols("p1:4", real=True)
    m, k, al = sp.Integer(1), sp.Integer(1), sp.Rational(1, 10)
    r = sp.sqrt(q[0] ** 2 + q[1] ** 2 + q[2] ** 2)
    h = (p[0] ** 2 + p[1] ** 2 + p[2] ** 2) / (2 * m) - k / r
    mm = q[0] * p[1] - q[1] * p[0] + m * k * al / r
    eq = {q[2]: 0, p[2]: 0}
    assert sp.simplify(_sympy_gamma(h, mm, q, p, al).subs(eq)) == 0
    assert sp.simplify(_sympy_gamma(h, mm + m * al * h, q, p, al).subs(eq)) == 0


def test_m_and_l_alpha_gradients():
    x = ChartPoint(Chart.CARTESIAN, (1.0, 0.2, 0.1, 0.1, 0.9, 0.0))
    for f in (m_cartesian(P), l_alpha_cartesian(P)):
        assert np.allclose(f.gradient(x), f.gradient(x, C4), atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 2.0), st.floats(0.05, 2.0), st.floats(0.1, 5.0))
def test_action_hamiltonian_homogeneity(j1, j2, c):
    h = hamiltonian_action(P)
    x = ChartPoint(Chart.ACTION, (j1, j2, 0, 0))
    y = ChartPoint(Chart.ACTION, (c * j1, c * j2, 0, 0))
    assert h(y) == pytest.approx(h(x) / c ** 2, rel=1e-12)
