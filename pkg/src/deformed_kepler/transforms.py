"""Maps between the REDUCED, ACTION, XI and PI charts, and their linear flows."""

from __future__ import annotations

import enum
import math

from .chartcore import Chart, ChartPoint
from .errors import DeformationRequired, DomainViolation, SingularStructure, UnboundState
from .keplermodel import ModelParams, hamiltonian_reduced, varpi

__all__ = [
    "TransformMode",
    "reduced_to_action",
    "action_frequency",
    "action_to_xi",
    "xi_to_action",
    "xi_angle_coefficient",
    "action_to_pi",
    "pi_to_action",
    "flow_linear",
    "xi_frequency_residual",
    "pi_chi1_frequency_ratio",
    "pi_literal_residual",
]


class TransformMode(enum.Enum):
    PAPER_LITERAL = "paper-literal"
    CORRECTED = "corrected"


def action_frequency(params: ModelParams, j1: float, j2: float) -> float:
    """``dH/dJ_1 = dH/dJ_2 = m k^2 / (J1 + J2)^3``."""
    u = j1 + j2
    if u <= 0:
        raise SingularStructure("J1 + J2 must be positive")
    return params.mk2 / u ** 3


def reduced_to_action(x: ChartPoint, params: ModelParams) -> ChartPoint:
    """Actions from the residue formulas; both angles set to the mean anomaly.

    ``J1 = -p_phi + m k / sqrt(-2 m E)`` and ``J2 = p_phi``.  The angles advance
    at the common frequency ``m k^2 / (J1 + J2)^3`` and vanish at perihelion
    (``p_r = 0`` with ``dp_r/dt > 0``), so both equal the Kepler mean anomaly.
    """
    if x.chart is not Chart.REDUCED:
        raise ValueError("reduced_to_action expects a REDUCED point")
    r, _, pr, pphi = x.coords
    m, k = params.m, params.k
    e = hamiltonian_reduced(params)(x)
    if e >= 0:
        raise UnboundState(f"compact case requires E<0 (E={e!r})")
    u = m * k / math.sqrt(-2 * m * e)
    j1, j2 = u - pphi, pphi

    a = -k / (2 * e)
    n = action_frequency(params, j1, j2)
    e_sin = pr * r / (m * a * a * n)
    e_cos = 1.0 - r / a
    ecc_anomaly = math.atan2(e_sin, e_cos)
    mean_anomaly = (ecc_anomaly - e_sin) % (2 * math.pi)
    return ChartPoint(Chart.ACTION, (j1, j2, mean_anomaly, mean_anomaly))


def _require_r(r_context: float):
    if not r_context > 0:
        raise DomainViolation("r_context must be positive")


def xi_angle_coefficient(params: ModelParams, xi1: float, xi2: float) -> float:
    """``2 sqrt(2 alpha) / (m alpha k) (xi2 - xi1)^(3/2)``."""
    m, k, al = params.m, params.k, params.alpha
    return 2 * math.sqrt(2 * al) / (m * al * k) * (xi2 - xi1) ** 1.5


def action_to_xi(x: ChartPoint, params: ModelParams, r_context: float) -> ChartPoint:
    """``xi2 = M = J2 + varpi(r)``, ``xi1 = L_alpha = xi2 + m alpha H(J)``."""
    if params.alpha <= 0:
        raise DeformationRequired("the (xi, phi) chart degenerates at alpha = 0")
    _require_r(r_context)
    j1, j2, ph1, ph2 = x.coords
    u = j1 + j2
    h = -params.mk2 / (2 * u ** 2)
    xi2 = j2 + varpi(r_context, params)
    xi1 = xi2 + params.m * params.alpha * h
    if not xi2 > xi1 > 0:
        raise DomainViolation(f"xi ordering xi2 > xi1 > 0 violated: xi1={xi1}, xi2={xi2}")
    c = xi_angle_coefficient(params, xi1, xi2)
    return ChartPoint(Chart.XI, (xi1, xi2, ph1 / c, -ph2 / c))


def xi_to_action(y: ChartPoint, params: ModelParams, r_context: float) -> ChartPoint:
    """``J1 = -xi2 + varpi + sqrt(m^2 alpha k^2 / (2 (xi2 - xi1)))``, ``J2 = xi2 - varpi``."""
    if params.alpha <= 0:
        raise DeformationRequired("the (xi, phi) chart degenerates at alpha = 0")
    _require_r(r_context)
    xi1, xi2, f1, f2 = y.coords
    w = varpi(r_context, params)
    m, k, al = params.m, params.k, params.alpha
    j1 = -xi2 + w + math.sqrt(m * m * al * k * k / (2 * (xi2 - xi1)))
    j2 = xi2 - w
    c = xi_angle_coefficient(params, xi1, xi2)
    return ChartPoint(Chart.ACTION, (j1, j2, c * f1, -c * f2))


def action_to_pi(x: ChartPoint, params: ModelParams) -> ChartPoint:
    """``pi1 = |Gamma|^2 = -m k^2/(2H) + J2^2``, ``pi2 = J2``,
    ``chi1 = phi1 / (J1 + J2)``, ``chi2 = -J2 phi2 / (J1 + J2)``."""
    j1, j2, ph1, ph2 = x.coords
    u = j1 + j2
    h = -params.mk2 / (2 * u ** 2)
    pi1 = -params.mk2 / (2 * h) + j2 ** 2
    return ChartPoint(Chart.PI, (pi1, j2, ph1 / u, -j2 * ph2 / u))


def pi_to_action(y: ChartPoint, params: ModelParams, mode: TransformMode = TransformMode.CORRECTED) -> ChartPoint:
    """Inverse of :func:`action_to_pi`.

    ``CORRECTED`` uses ``J1 = -pi2 + sqrt(pi1 - pi2^2)``; ``PAPER_LITERAL``
    uses ``J1 = -pi1 + sqrt(pi1 - pi2^2)`` as printed.  Only the former
    round-trips.
    """
    pi1, pi2, c1, c2 = y.coords
    root = math.sqrt(pi1 - pi2 ** 2)
    lead = pi1 if mode is TransformMode.PAPER_LITERAL else pi2
    j1 = -lead + root
    j2 = pi2
    # angles recovered with the displayed J1 + J2
    u = j1 + j2
    if u == 0 or j2 == 0:
        raise SingularStructure("angle map needs J1 + J2 != 0 and J2 != 0")
    coords = (j1, j2, u * c1, -u * c2 / j2)
    if not Chart.ACTION.is_valid(coords):
        raise DomainViolation(f"inverse map left the ACTION chart (J1={j1}, J2={j2})")
    return ChartPoint(Chart.ACTION, coords)


def pi_literal_residual(x: ChartPoint, params: ModelParams) -> float:
    """``|J1_literal - J1|`` after ACTION -> PI -> ACTION with the printed J1 relation."""
    y = action_to_pi(x, params)
    pi1, pi2 = y[0], y[1]
    j1_literal = -pi1 + math.sqrt(pi1 - pi2 ** 2)
    return abs(j1_literal - x[0])


def flow_linear(x0: ChartPoint, params: ModelParams, t: float) -> ChartPoint:
    """Advance the angles of an action-type chart linearly in time."""
    c = list(x0.coords)
    if x0.chart is Chart.ACTION:
        w = action_frequency(params, c[0], c[1])
        freq = (w, w)
    elif x0.chart is Chart.XI:
        params.require_deformation()
        w = 1 / (params.m * params.alpha)
        freq = (w, -w)
    elif x0.chart is Chart.PI:
        d = c[1] ** 2 - c[0]
        w = params.mk2 / (2 * d ** 2)
        freq = (w, -2 * c[1] * w)
    else:
        raise ValueError(f"no linear flow on {x0.chart.name}")
    return ChartPoint(x0.chart, (c[0], c[1], c[2] + freq[0] * t, c[3] + freq[1] * t))


def xi_frequency_residual(x: ChartPoint, params: ModelParams, r_context: float) -> float:
    """``c_xi / (m alpha) - m k^2/(J1+J2)^3``: the angle map times the XI
    frequency must reproduce the action frequency."""
    y = action_to_xi(x, params, r_context)
    c = xi_angle_coefficient(params, y[0], y[1])
    return c / (params.m * params.alpha) - action_frequency(params, x[0], x[1])


def pi_chi1_frequency_ratio(x: ChartPoint, params: ModelParams) -> float:
    """``dH''/dpi1`` divided by the rate of ``chi1 = phi1 / (J1 + J2)`` along the flow."""
    y = action_to_pi(x, params)
    d = y[1] ** 2 - y[0]
    from_hamiltonian = params.mk2 / (2 * d ** 2)
    from_angle_map = action_frequency(params, x[0], x[1]) / (x[0] + x[1])
    return from_hamiltonian / from_angle_map

