import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from deformed_kepler import Chart, ChartPoint, ModelParams
from deformed_kepler.chartcore import poisson_canonical, poisson_gamma
from deformed_kepler.errors import ConstraintInfeasible, UnboundState
from deformed_kepler.invariants import (
    cartesian_lrl,
    cartesian_to_reduced,
    eval_invariants,
    gamma_sq_from_lrl,
    gamma_sq_reduced,
    involution_table,
    l3_reduced,
    lrl_auxiliaries,
    lrl_brackets,
    lrl_component,
    remark_i_condition,
    remark_i_state,
    reduced_to_cartesian,
    su2_check,
)
from deformed_kepler.keplermodel import hamiltonian_cartesian, hamiltonian_reduced, l_alpha_cartesian, m_cartesian

P = ModelParams(1.0, 1.0, 0.1)
K0 = ModelParams(1.0, 1.0, 0.0)
GENERIC = ChartPoint(Chart.REDUCED, (1.2, 0.4, 0.15, 0.85))


def test_probe_invariants(probe):
    inv = eval_invariants(probe, P)
    assert inv.M == pytest.approx(1.0, abs=1e-15)
    assert inv.L_alpha == pytest.approx(0.9405, abs=1e-15)
    assert inv.C == pytest.approx(0.0, abs=1e-15)
    assert inv.D == pytest.approx(-0.19, abs=1e-15)
    assert inv.A[0] == pytest.approx(-0.19) and inv.A[1] == pytest.approx(0.0, abs=1e-15)
    assert inv.L1 == inv.L2 == inv.A[2] == 0.0


def test_undeformed_reduces_to_classical(probe):
    inv = eval_invariants(probe, K0, t=3.0)
    assert inv.M == inv.L3 == 0.9
    assert inv.beta == 0.0
    cart = cartesian_lrl(reduced_to_cartesian(probe).array, K0)
    assert np.allclose(inv.A, cart, atol=1e-14)


def test_unbound_gamma():
    x = ChartPoint(Chart.REDUCED, (1.0, 0.0, 0.0, 2.0))
    with pytest.raises(UnboundState):
        eval_invariants(x, P)
    assert math.isnan(eval_invariants(x, P, allow_unbound=True).Gamma_sq)
    with pytest.raises(UnboundState):
        gamma_sq_reduced(P)(x)


def test_polar_map_round_trip():
    back = cartesian_to_reduced(reduced_to_cartesian(GENERIC))
    assert np.allclose(back.array, GENERIC.array, atol=1e-14)


def test_lrl_components_match_cartesian_vector():
    # (A_x, A_y) of p x L - mk q/r equals (D, C) at beta = 0
    c, d = lrl_auxiliaries(GENERIC.array, P)
    a = cartesian_lrl(reduced_to_cartesian(GENERIC).array, P)
    assert a[0] == pytest.approx(d, abs=1e-14) and a[1] == pytest.approx(c, abs=1e-14)


def test_gamma_display_versus_lrl_norm():
    # |A|^2 = m^2 k^2 + 2 m H L3^2, hence |A|^2/(-2mH) = -mk^2/(2H) - L3^2
    e = hamiltonian_reduced(P)(GENERIC)
    l3 = GENERIC[3]
    assert gamma_sq_from_lrl(GENERIC.array, P) == pytest.approx(-1 / (2 * e) - l3 ** 2, abs=1e-12)
    inv = eval_invariants(GENERIC, P)
    assert inv.Gamma_sq == pytest.approx(gamma_sq_reduced(P)(GENERIC), abs=1e-14)
    assert inv.Gamma_sq - gamma_sq_from_lrl(GENERIC.array, P) == pytest.approx(2 * l3 ** 2, abs=1e-12)


def test_gamma_bracket_examples():
    x = ChartPoint(Chart.CARTESIAN, (1.0, 0.2, 0.0, 0.1, 0.9, 0.0))
    assert abs(poisson_gamma(hamiltonian_cartesian(P), m_cartesian(P), x, P)) < 1e-8
    assert abs(poisson_gamma(m_cartesian(P), l_alpha_cartesian(P), x, P)) < 1e-12
    assert abs(poisson_canonical(gamma_sq_reduced(P), l3_reduced(), GENERIC)) < 1e-8


def test_involution_table():
    x = ChartPoint(Chart.CARTESIAN, (1.0, 0.2, 0.0, 0.1, 0.9, 0.0))
    table = involution_table(x, P)
    assert set(table) >= {("H", "M"), ("H", "L_alpha"), ("M", "L_alpha"), ("Gamma_sq", "L3"), ("L3", "H")}
    assert max(abs(v) for v in table.values()) < 1e-8


def test_undeformed_lrl_conserved():
    br = lrl_brackets(GENERIC, K0, t=2.0)
    assert abs(br["numeric"]["A1H"]) < 1e-8 and abs(br["numeric"]["A2H"]) < 1e-8


def _symbolic_lrl():
    r, phi, pr, l = sp.symbols("r phi p_r l", real=True)
    c = -pr * l * sp.cos(phi) + l ** 2 / r * sp.sin(phi) - sp.sin(phi)
    d = pr * l * sp.sin(phi) + l ** 2 / r * sp.cos(phi) - sp.cos(phi)

    def br(f, g):
        return sp.diff(f, r) * sp.diff(g, pr) - sp.diff(f, pr) * sp.diff(g, r) \
            + sp.diff(f, phi) * sp.diff(g, l) - sp.diff(f, l) * sp.diff(g, phi)

    return (r, phi, pr, l), c, d, br


def test_lrl_l3_brackets_against_symbolic_oracle():
    # at beta = 0, A1 = D and A2 = C; the oracle gives {A1, L3} = -A2 and {A2, L3} = A1
    syms, c, d, br = _symbolic_lrl()
    assert sp.simplify(br(d, syms[3]) + c) == 0
    assert sp.simplify(br(c, syms[3]) - d) == 0
    out = lrl_brackets(GENERIC, P, t=0.0)
    assert out["numeric"]["A1L3"] == pytest.approx(-out["display"]["A1L3"], abs=1e-9)
    assert abs(out["residual"]["A2L3"]) < 1e-8


def test_a1_a2_bracket_against_symbolic_oracle():
    syms, c, d, br = _symbolic_lrl()
    value = float(br(d, c).subs(dict(zip(syms, GENERIC.coords))))
    out = lrl_brackets(GENERIC, P, t=0.0)
    assert out["numeric"]["A1A2"] == pytest.approx(value, abs=1e-8)
    # displayed closed form carries an extra 3 k alpha p_r p_phi / r^4
    r, _, pr, l = GENERIC.coords
    assert out["residual"]["A1A2"] == pytest.approx(-3 * 0.1 * pr * l / r ** 4, abs=1e-8)


def test_frozen_beta_conserved():
    out = lrl_brackets(GENERIC, P, t=5.0, beta_mode="frozen")
    assert abs(out["numeric"]["A1H"]) < 1e-8 and abs(out["numeric"]["A2H"]) < 1e-8
    with pytest.raises(ValueError):
        lrl_component(P, 1, beta_mode="bogus")


def test_su2_seed_and_errors():
    res = su2_check(ChartPoint(Chart.REDUCED, (1.0, 0.0, 0.0, 1.0)), P)
    assert res["point"][3] == pytest.approx(1.0)
    assert res["residual"] < 1e-8
    with pytest.raises(ConstraintInfeasible):
        su2_check(ChartPoint(Chart.REDUCED, (3.0, 0.0, 0.0, 1.0)), P)
    base = su2_check(ChartPoint(Chart.REDUCED, (1.0, 0.0, 0.0, 1.0)), K0)
    assert math.isfinite(base["residual"])


def test_remark_condition_constructed_state():
    x, t = remark_i_state(1.1, 0.2, 0.9, P)
    cond = remark_i_condition(x, P, t)
    assert cond.beta_is_quarter_pi and cond.ratio_condition and not cond.degenerate
    assert cond.verified_display
    assert max(abs(v) for v in cond.display_brackets) < 1e-7


def test_remark_condition_generic_and_degenerate():
    cond = remark_i_condition(GENERIC, P, 1.0)
    assert not cond.beta_is_quarter_pi and not cond.verified_display
    assert max(abs(v) for v in cond.numeric_brackets) > 1e-6
    pole = ChartPoint(Chart.REDUCED, (1.0, 0.3, 0.1, 1.0))
    assert remark_i_condition(pole, P, 1.0).degenerate


reduced_bound = st.tuples(st.floats(0.6, 1.6), st.floats(-3.0, 3.0), st.floats(-0.4, 0.4), st.floats(0.5, 1.1))


@settings(max_examples=40, deadline=None)
@given(reduced_bound, st.floats(0.0, 5.0))
def test_gamma_identity_and_equatorial_structure(c, t):
    x = ChartPoint(Chart.REDUCED, c)
    assume(hamiltonian_reduced(P)(x) < -0.05)
    inv = eval_invariants(x, P, t=t)
    assert inv.Gamma_sq - (-1 / (2 * inv.H) + inv.L3 ** 2) == pytest.approx(0.0, abs=1e-10)
    assert inv.L1 == 0.0 and inv.L2 == 0.0 and inv.A[2] == 0.0
    # rotation by beta preserves |A|
    assert np.hypot(inv.A[0], inv.A[1]) == pytest.approx(np.hypot(inv.C, inv.D), rel=1e-12)
