"""Conserved quantities, the LRL and Runge-Lenz-Pauli vectors, and their brackets.

The LRL components carry an explicit time through ``beta = Omega t``.  Two
readings are offered for bracket computations:

``"frozen"``
    ``beta`` is an external constant; phase-space derivatives never see it.
``"state"``
    ``beta = Omega(r) t`` with ``t`` frozen, so ``d/dr`` reaches ``Omega``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chartcore import Chart, ChartPoint, ScalarField, poisson_canonical, poisson_gamma
from .errors import ConstraintInfeasible, UnboundState
from .keplermodel import (
    ModelParams,
    hamiltonian_cartesian,
    hamiltonian_reduced,
    l_alpha_cartesian,
    m_cartesian,
    omega_rate,
    varpi,
)

__all__ = [
    "BETA_MODES",
    "InvariantSet",
    "lrl_auxiliaries",
    "lrl_component",
    "l3_reduced",
    "m_reduced",
    "l_alpha_reduced",
    "gamma_sq_reduced",
    "gamma_sq_from_lrl",
    "cartesian_lrl",
    "eval_invariants",
    "involution_table",
    "lrl_brackets",
    "cartesian_to_reduced",
    "reduced_to_cartesian",
    "su2_constraint_momentum",
    "su2_check",
    "RemarkICondition",
    "remark_i_condition",
    "remark_i_state",
]

BETA_MODES = ("frozen", "state")


def lrl_auxiliaries(x, params: ModelParams) -> tuple:
    """``(C, D)``: the in-plane LRL components at ``beta = 0``."""
    r, phi, pr, pphi = x
    mk = params.m * params.k
    s, c = math.sin(phi), math.cos(phi)
    big_c = -pr * pphi * c + pphi ** 2 / r * s - mk * s
    big_d = pr * pphi * s + pphi ** 2 / r * c - mk * c
    return big_c, big_d


def lrl_component(params: ModelParams, index: int, t: float = 0.0, beta_mode: str = "frozen",
                  beta_value: float | None = None) -> ScalarField:
    """``A_1 = C sin(beta) + D cos(beta)``, ``A_2 = C cos(beta) - D sin(beta)``, ``A_3 = 0``.

    ``"frozen"`` uses the constant ``beta_value`` (default 0); ``"state"`` uses
    ``beta = Omega(r) t``.
    """
    if beta_mode not in BETA_MODES:
        raise ValueError(f"beta_mode must be one of {BETA_MODES}")
    if index == 3:
        return ScalarField(Chart.REDUCED, lambda x: 0.0, lambda x: np.zeros(4), "A3")

    def f(x):
        b = omega_rate(x[0], params) * t if beta_mode == "state" else (beta_value or 0.0)
        big_c, big_d = lrl_auxiliaries(x, params)
        if index == 1:
            return big_c * math.sin(b) + big_d * math.cos(b)
        return big_c * math.cos(b) - big_d * math.sin(b)

    return ScalarField(Chart.REDUCED, f, None, f"A{index}")


def l3_reduced() -> ScalarField:
    e = np.array([0.0, 0.0, 0.0, 1.0])
    return ScalarField(Chart.REDUCED, lambda x: x[3], lambda x: e.copy(), "L3")


def m_reduced(params: ModelParams) -> ScalarField:
    """``M = p_phi_alpha + m k alpha / r``."""
    c = params.m * params.k * params.alpha
    return ScalarField(
        Chart.REDUCED,
        lambda x: x[3] + c / x[0],
        lambda x: np.array([-c / x[0] ** 2, 0.0, 0.0, 1.0]),
        "M",
    )


def l_alpha_reduced(params: ModelParams) -> ScalarField:
    f = m_reduced(params) + hamiltonian_reduced(params) * (params.m * params.alpha)
    return ScalarField(Chart.REDUCED, f.func, f.grad, "L_alpha")


def gamma_sq_reduced(params: ModelParams) -> ScalarField:
    """``|Gamma|^2 = -m k^2 / (2H) + L3^2`` as displayed (bound states only)."""
    h = hamiltonian_reduced(params)
    a = params.mk2

    def f(x):
        e = h.func(x)
        if e >= 0:
            raise UnboundState("|Gamma|^2 needs H < 0")
        return -a / (2 * e) + x[3] ** 2

    def grad(x):
        e = h.func(x)
        g = (a / (2 * e ** 2)) * np.asarray(h.grad(x))
        g[3] += 2 * x[3]
        return g

    return ScalarField(Chart.REDUCED, f, grad, "Gamma_sq")


def gamma_sq_from_lrl(x, params: ModelParams) -> float:
    """``|A|^2 / (-2 m H)``, the squared norm of the scaled vector built from ``A``."""
    e = hamiltonian_reduced(params).func(np.asarray(x, dtype=float))
    if e >= 0:
        raise UnboundState("the Runge-Lenz-Pauli vector needs H < 0")
    big_c, big_d = lrl_auxiliaries(x, params)
    return (big_c ** 2 + big_d ** 2) / (-2 * params.m * e)


def cartesian_lrl(state, params: ModelParams) -> np.ndarray:
    """``A = p x L - m k q / r`` with ``L = q x p``."""
    q = np.asarray(state[:3], dtype=float)
    p = np.asarray(state[3:], dtype=float)
    r = float(np.linalg.norm(q))
    return np.cross(p, np.cross(q, p)) - params.m * params.k * q / r


@dataclass(frozen=True)
class InvariantSet:
    H: float
    M: float
    L_alpha: float
    L3: float
    A: np.ndarray = field(repr=False)
    Gamma: np.ndarray = field(repr=False)
    Gamma_sq: float
    C: float
    D: float
    beta: float
    L1: float = 0.0
    L2: float = 0.0


def eval_invariants(x: ChartPoint, params: ModelParams, t: float = 0.0, allow_unbound: bool = False) -> InvariantSet:
    """Every first integral at a REDUCED point; ``beta = Omega(r) t``.

    ``Gamma`` needs ``H < 0``; with ``allow_unbound`` its entries become nan
    instead of raising :class:`UnboundState`.
    """
    if x.chart is not Chart.REDUCED:
        raise ValueError("eval_invariants expects a REDUCED point")
    c = x.array
    r, pphi = c[0], c[3]
    e = hamiltonian_reduced(params).func(c)
    m_val = pphi + varpi(r, params)
    b = omega_rate(r, params) * t
    big_c, big_d = lrl_auxiliaries(c, params)
    a = np.array([big_c * math.sin(b) + big_d * math.cos(b), big_c * math.cos(b) - big_d * math.sin(b), 0.0])
    if e < 0:
        gamma = a / math.sqrt(-2 * params.m * e)
        gsq = -params.mk2 / (2 * e) + pphi ** 2
    elif allow_unbound:
        gamma = np.full(3, np.nan)
        gsq = math.nan
    else:
        raise UnboundState("Gamma is defined on H < 0 only")
    return InvariantSet(
        H=e,
        M=m_val,
        L_alpha=m_val + params.m * params.alpha * e,
        L3=pphi,
        A=a,
        Gamma=gamma,
        Gamma_sq=gsq,
        C=big_c,
        D=big_d,
        beta=b,
    )


def involution_table(x: ChartPoint, params: ModelParams) -> dict:
    """Pairwise brackets: gamma-brackets of (H, M, L_alpha) on CARTESIAN and
    canonical brackets of (H, |Gamma|^2, L3) on the matching REDUCED point."""
    if x.chart is not Chart.CARTESIAN:
        raise ValueError("involution_table expects a CARTESIAN point")
    h, mm, la = hamiltonian_cartesian(params), m_cartesian(params), l_alpha_cartesian(params)
    out = {
        ("H", "M"): poisson_gamma(h, mm, x, params),
        ("H", "L_alpha"): poisson_gamma(h, la, x, params),
        ("M", "L_alpha"): poisson_gamma(mm, la, x, params),
    }
    red = cartesian_to_reduced(x)
    hr, g2, l3 = hamiltonian_reduced(params), gamma_sq_reduced(params), l3_reduced()
    if hr(red) < 0:
        out[("Gamma_sq", "L3")] = poisson_canonical(g2, l3, red)
        out[("Gamma_sq", "H")] = poisson_canonical(g2, hr, red)
    out[("L3", "H")] = poisson_canonical(l3, hr, red)
    return out


def cartesian_to_reduced(x: ChartPoint) -> ChartPoint:
    """Polar canonical map of an equatorial CARTESIAN state."""
    q1, q2, _, p1, p2, _ = x.coords
    r = math.hypot(q1, q2)
    phi = math.atan2(q2, q1)
    pr = (q1 * p1 + q2 * p2) / r
    pphi = q1 * p2 - q2 * p1
    return ChartPoint(Chart.REDUCED, (r, phi, pr, pphi))


def reduced_to_cartesian(x: ChartPoint) -> ChartPoint:
    r, phi, pr, pphi = x.coords
    c, s = math.cos(phi), math.sin(phi)
    return ChartPoint(Chart.CARTESIAN, (r * c, r * s, 0.0, pr * c - pphi / r * s, pr * s + pphi / r * c, 0.0))


def lrl_brackets(x: ChartPoint, params: ModelParams, t: float = 0.0, beta_mode: str = "frozen") -> dict:
    """Numeric canonical brackets of the LRL components with the displayed closed forms.

    Returns numeric values, the displayed right-hand sides (the undefined
    symbol ``B`` read as ``C``) and their differences.
    """
    c = x.array
    b = omega_rate(c[0], params) * t
    a1 = lrl_component(params, 1, t, beta_mode, beta_value=b)
    a2 = lrl_component(params, 2, t, beta_mode, beta_value=b)
    h = hamiltonian_reduced(params)
    l3 = l3_reduced()
    big_c, big_d = lrl_auxiliaries(c, params)
    r, _, pr, pphi = c
    pref = 3 * params.k * params.alpha * pr / (params.m * r ** 4)
    numeric = {
        "A1H": poisson_canonical(a1, h, x),
        "A2H": poisson_canonical(a2, h, x),
        "A1A2": poisson_canonical(a1, a2, x),
        "A1L3": poisson_canonical(a1, l3, x),
        "A2L3": poisson_canonical(a2, l3, x),
    }
    display = {
        "A1H": pref * (big_d * math.sin(b) - big_c * math.cos(b)),
        "A2H": pref * (big_c * math.sin(b) - big_d * math.cos(b)),
        "A1A2": (-2 * params.m * h(x) + 3 * params.k * params.alpha * pr / r ** 4) * pphi,
        "A1L3": a2(x),
        "A2L3": a1(x),
    }
    return {
        "numeric": numeric,
        "display": display,
        "residual": {key: numeric[key] - display[key] for key in numeric},
        "beta": b,
        "beta_mode": beta_mode,
    }


def su2_constraint_momentum(r: float, pr: float, params: ModelParams) -> float:
    """Positive root of ``p_phi^2 = r [2mk - r + p_r (3 Omega - r p_r)]``."""
    rad = r * (2 * params.m * params.k - r + pr * (3 * omega_rate(r, params) - r * pr))
    if rad < 0:
        raise ConstraintInfeasible(f"constraint radicand {rad} < 0 at r={r}, p_r={pr}")
    return math.sqrt(rad)


def su2_check(x: ChartPoint, params: ModelParams, t: float = 0.0, beta_mode: str = "frozen") -> dict:
    """Project onto the constraint surface, set ``A3 = L3`` and measure
    ``max |{A_i, A_j} - eps_ijl A_l|``."""
    r, phi, pr, _ = x.coords
    pphi = su2_constraint_momentum(r, pr, params)
    y = ChartPoint(Chart.REDUCED, (r, phi, pr, pphi))
    b = omega_rate(r, params) * t
    comps = [
        lrl_component(params, 1, t, beta_mode, beta_value=b),
        lrl_component(params, 2, t, beta_mode, beta_value=b),
        l3_reduced(),
    ]
    vals = [f(y) for f in comps]
    worst = 0.0
    table = {}
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            l = 3 - i - j
            eps = 1.0 if (i, j, l) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1.0
            br = poisson_canonical(comps[i], comps[j], y)
            table[(i + 1, j + 1)] = br
            worst = max(worst, abs(br - eps * vals[l]))
    return {"point": y, "residual": worst, "brackets": table}


@dataclass(frozen=True)
class RemarkICondition:
    beta_is_quarter_pi: bool
    ratio_condition: bool
    degenerate: bool
    display_brackets: tuple
    numeric_brackets: tuple
    verified_display: bool
    verified_numeric: bool


def remark_i_condition(x: ChartPoint, params: ModelParams, t: float, tol: float = 1e-9) -> RemarkICondition:
    """Evaluate ``beta = pi/4`` and ``p_r p_phi / (p_phi^2/r - mk) = -cot(beta + phi)``.

    When both hold, checks that the displayed brackets (``B`` read as ``C``)
    and the numeric brackets with ``beta = Omega(r) t`` vanish to 1e-7.
    """
    r, phi, pr, pphi = x.coords
    b = omega_rate(r, params) * t
    den = pphi ** 2 / r - params.m * params.k
    degenerate = abs(den) < 1e-12
    cond1 = abs(b - math.pi / 4) < tol
    cond2 = False
    s = b + phi
    if not degenerate and 0 < s < math.pi:
        cond2 = abs(pr * pphi / den + math.cos(s) / math.sin(s)) < tol
    br = lrl_brackets(x, params, t, beta_mode="state")
    disp = (br["display"]["A1H"], br["display"]["A2H"])
    num = (br["numeric"]["A1H"], br["numeric"]["A2H"])
    both = cond1 and cond2
    return RemarkICondition(
        beta_is_quarter_pi=cond1,
        ratio_condition=cond2,
        degenerate=degenerate,
        display_brackets=disp,
        numeric_brackets=num,
        verified_display=both and max(abs(v) for v in disp) < 1e-7,
        verified_numeric=both and max(abs(v) for v in num) < 1e-7,
    )


def remark_i_state(r: float, pr: float, pphi: float, params: ModelParams) -> tuple:
    """A REDUCED point and time satisfying both conditions of the remark."""
    t = (math.pi / 4) / omega_rate(r, params)
    ratio = pr * pphi / (pphi ** 2 / r - params.m * params.k)
    s = math.atan2(1.0, -ratio)  # arccot(-ratio) in (0, pi)
    return ChartPoint(Chart.REDUCED, (r, s - math.pi / 4, pr, pphi)), t
