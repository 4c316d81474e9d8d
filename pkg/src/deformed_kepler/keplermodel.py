"""Model parameters, Hamiltonians, vector fields and structure matrices."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .chartcore import Chart, ChartPoint, ScalarField, VectorField, s_inverse
from .errors import DeformationRequired, DomainViolation, SingularStructure

__all__ = [
    "ModelParams",
    "omega_rate",
    "varpi",
    "beta",
    "hamiltonian_cartesian",
    "hamiltonian_reduced",
    "hamiltonian_action",
    "hamiltonian_chain",
    "hamiltonian_xi",
    "hamiltonian_pi",
    "chain_coefficient",
    "VF",
    "vector_field_library",
    "s_matrix",
    "structure_matrices",
    "l_matrix",
    "newton_acceleration",
    "cartesian_velocity",
    "angular_momentum_cartesian",
    "m_cartesian",
    "l_alpha_cartesian",
]


@dataclass(frozen=True)
class ModelParams:
    """Mass ``m``, coupling ``k`` and deformation ``alpha`` (nondimensional)."""

    m: float = 1.0
    k: float = 1.0
    alpha: float = 0.1

    def __post_init__(self):
        for name in ("m", "k", "alpha"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.m <= 0 or self.k <= 0:
            raise ValueError("m and k must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")

    @property
    def mk2(self) -> float:
        return self.m * self.k ** 2

    def require_deformation(self):
        if self.alpha <= 0:
            raise DeformationRequired("this object divides by m*alpha; alpha > 0 is required")


def omega_rate(r: float, params: ModelParams) -> float:
    """Angular velocity ``k alpha / r^3`` of the deformation."""
    return params.k * params.alpha / r ** 3


def varpi(r: float, params: ModelParams) -> float:
    """``m r^2 Omega = m k alpha / r``."""
    return params.m * params.k * params.alpha / r


def beta(r: float, t: float, params: ModelParams) -> float:
    return omega_rate(r, params) * t


# --- Hamiltonians -------------------------------------------------------------


def _radius(q) -> float:
    r = math.sqrt(q[0] ** 2 + q[1] ** 2 + q[2] ** 2)
    if r == 0.0:
        raise DomainViolation("the origin is excluded from the configuration space")
    return r


def hamiltonian_cartesian(params: ModelParams) -> ScalarField:
    m, k = params.m, params.k

    def f(x):
        r = _radius(x)
        return (x[3] ** 2 + x[4] ** 2 + x[5] ** 2) / (2 * m) - k / r

    def grad(x):
        r = _radius(x)
        return np.concatenate([k * x[:3] / r ** 3, x[3:] / m])

    return ScalarField(Chart.CARTESIAN, f, grad, "H")


def hamiltonian_reduced(params: ModelParams) -> ScalarField:
    m, k = params.m, params.k

    def f(x):
        r, _, pr, pphi = x
        return pr ** 2 / (2 * m) + pphi ** 2 / (2 * m * r ** 2) - k / r

    def grad(x):
        r, _, pr, pphi = x
        return np.array([-pphi ** 2 / (m * r ** 3) + k / r ** 2, 0.0, pr / m, pphi / (m * r ** 2)])

    return ScalarField(Chart.REDUCED, f, grad, "H")


def _u(x) -> float:
    u = x[0] + x[1]
    if u <= 0:
        raise SingularStructure("J1 + J2 must be positive")
    return u


def chain_coefficient(params: ModelParams, i: int, u: float) -> float:
    """Coefficient ``c_i`` of ``X_i = c_i (d/dphi1 + d/dphi2)``; equals ``dH_i/dJ``."""
    return params.mk2 / u ** (3 - i)


def hamiltonian_chain(params: ModelParams, i: int) -> ScalarField:
    """``H_0 .. H_3`` of the bi-Hamiltonian hierarchy on ACTION."""
    if i not in (0, 1, 2, 3):
        raise IndexError("chain index must be 0..3")
    a = params.mk2
    value = {
        0: lambda u: -a / (2 * u ** 2),
        1: lambda u: -a / u,
        2: lambda u: a * math.log(u),
        3: lambda u: a * u,
    }[i]

    def grad(x):
        c = chain_coefficient(params, i, _u(x))
        return np.array([c, c, 0.0, 0.0])

    return ScalarField(Chart.ACTION, lambda x: value(_u(x)), grad, f"H{i}")


def hamiltonian_action(params: ModelParams) -> ScalarField:
    """``H = -m k^2 / (2 (J1 + J2)^2)``."""
    h = hamiltonian_chain(params, 0)
    return ScalarField(Chart.ACTION, h.func, h.grad, "H")


def hamiltonian_xi(params: ModelParams) -> ScalarField:
    """``H' = (xi1 - xi2) / (m alpha)``."""
    params.require_deformation()
    ma = params.m * params.alpha
    return ScalarField(
        Chart.XI,
        lambda x: (x[0] - x[1]) / ma,
        lambda x: np.array([1 / ma, -1 / ma, 0.0, 0.0]),
        "H'",
    )


def hamiltonian_pi(params: ModelParams) -> ScalarField:
    """``H'' = m k^2 / (2 (pi2^2 - pi1))``."""
    a = params.mk2

    def grad(x):
        d = x[1] ** 2 - x[0]
        w = a / (2 * d ** 2)
        return np.array([w, -2 * x[1] * w, 0.0, 0.0])

    return ScalarField(Chart.PI, lambda x: a / (2 * (x[1] ** 2 - x[0])), grad, "H''")


# --- Cartesian first integrals -----------------------------------------------


def angular_momentum_cartesian() -> ScalarField:
    return ScalarField(
        Chart.CARTESIAN,
        lambda x: x[0] * x[4] - x[1] * x[3],
        lambda x: np.array([x[4], -x[3], 0.0, -x[1], x[0], 0.0]),
        "L3",
    )


def m_cartesian(params: ModelParams) -> ScalarField:
    """``M = L3 + m k alpha / r`` (equals ``p_phi_alpha + varpi`` on the equator)."""
    c = params.m * params.k * params.alpha
    l3 = angular_momentum_cartesian()

    def f(x):
        return l3.func(x) + c / _radius(x)

    def grad(x):
        r = _radius(x)
        g = l3.grad(x)
        g[:3] -= c * x[:3] / r ** 3
        return g

    return ScalarField(Chart.CARTESIAN, f, grad, "M")


def l_alpha_cartesian(params: ModelParams) -> ScalarField:
    field = m_cartesian(params) + hamiltonian_cartesian(params) * (params.m * params.alpha)
    return ScalarField(Chart.CARTESIAN, field.func, field.grad, "L_alpha")


# --- vector fields ------------------------------------------------------------


class VF(enum.Enum):
    X0 = "X0"
    X1 = "X1"
    X2 = "X2"
    X3 = "X3"
    DELTA = "Delta"
    XH_ACTION = "X_H(action)"
    XH_REDUCED = "X_H(reduced, canonical)"
    XH_REDUCED_LITERAL = "X_H(reduced, paper-literal)"
    X_PRIME = "X'"
    X_DOUBLE_PRIME = "X''"
    UPSILON = "Upsilon"
    X_A = "X^a"
    X_E = "X^e"


_ANGLE_DIAG = np.array([0.0, 0.0, 1.0, 1.0])


def _reduced_field(params: ModelParams, literal: bool) -> VectorField:
    m, k = params.m, params.k

    def f(x):
        r, _, pr, pphi = x
        if r <= 0:
            raise DomainViolation("r must be positive")
        phidot = pphi / (m * r ** 2)
        if literal:
            phidot /= m
        return np.array([pr / m, phidot, (pphi ** 2 - m * k * r) / (m * r ** 3), 0.0])

    return VectorField(Chart.REDUCED, f, "X_H" + (" literal" if literal else ""))


def vector_field_library(params: ModelParams, which: VF) -> VectorField:
    """Every vector field the model displays, evaluated in its own chart."""
    if which in (VF.X0, VF.X1, VF.X2, VF.X3, VF.XH_ACTION):
        i = 0 if which is VF.XH_ACTION else int(which.value[1])
        return VectorField(Chart.ACTION, lambda x: chain_coefficient(params, i, _u(x)) * _ANGLE_DIAG, which.value)
    if which is VF.DELTA:
        return VectorField(
            Chart.ACTION,
            lambda x: np.array([(x[0] ** 2 + x[1] ** 2) / 2, x[0] * x[1], 0.0, 0.0]),
            "Delta",
        )
    if which is VF.XH_REDUCED:
        return _reduced_field(params, literal=False)
    if which is VF.XH_REDUCED_LITERAL:
        return _reduced_field(params, literal=True)
    if which is VF.X_PRIME:
        params.require_deformation()
        w = 1 / (params.m * params.alpha)
        return VectorField(Chart.XI, lambda x: np.array([0.0, 0.0, w, -w]), "X'")
    if which is VF.X_DOUBLE_PRIME:
        a = params.mk2

        def f(x):
            c = a / (2 * (x[1] ** 2 - x[0]) ** 2)
            return np.array([0.0, 0.0, c, -2 * x[1] * c])

        return VectorField(Chart.PI, f, "X''")
    if which is VF.UPSILON:
        x1 = vector_field_library(params, VF.X1)
        x2 = vector_field_library(params, VF.X2)
        return VectorField(Chart.ACTION, lambda x: x[0] * x1.func(x) + x[1] * x2.func(x), "Upsilon")
    if which is VF.X_A:
        return VectorField(Chart.ACTION, lambda x: _ANGLE_DIAG.copy(), "X^a")
    if which is VF.X_E:
        return VectorField(Chart.ACTION, lambda x: -_ANGLE_DIAG, "X^e")
    raise ValueError(f"unknown vector field {which!r}")


# --- structure matrices -------------------------------------------------------


def s_matrix(j1: float, j2: float) -> np.ndarray:
    return np.array([[j1, j2], [j2, j1]])


def l_matrix() -> np.ndarray:
    """Coefficients of the linear solutions ``f^i = L^ij nu_j``."""
    return np.array([[-0.5, 0.0], [0.0, 1.0]])


def structure_matrices(x: ChartPoint) -> tuple:
    """The chart's structure matrix and its inverse: S on ACTION, R on XI, F on PI."""
    if x.chart is Chart.ACTION:
        return s_matrix(x[0], x[1]), s_inverse(x[0], x[1])
    if x.chart in (Chart.XI, Chart.PI):
        a, b = x[0], x[1]
        if a == 0 or b == 0:
            raise SingularStructure(f"diagonal structure matrix singular at {x.coords}")
        return np.diag([a, b]), np.diag([1 / a, 1 / b])
    raise ValueError(f"no structure matrix on {x.chart.name}")


# --- second-order form --------------------------------------------------------


def cartesian_velocity(state, params: ModelParams) -> np.ndarray:
    """``qdot = p/m + Theta grad V`` for a CARTESIAN ``(q, p)`` state."""
    q = np.asarray(state[:3], dtype=float)
    p = np.asarray(state[3:], dtype=float)
    r = _radius(q)
    gv = params.k * q / r ** 3
    return p / params.m + params.alpha * np.array([gv[1], -gv[0], 0.0])


def newton_acceleration(q, qdot, params: ModelParams) -> np.ndarray:
    """Corrected Newton law with the magnetic-like and ``dOmega/dt`` terms.

    ``m q'' = -k q / r^3 + m qdot x Omega + m q x dOmega/dt`` where
    ``Omega = (k alpha / r^3) e_3`` and, by the chain rule,
    ``dOmega/dt = -3 k alpha rdot / r^4 e_3`` with ``rdot = q.qdot / r``.
    """
    q = np.asarray(q, dtype=float)
    qdot = np.asarray(qdot, dtype=float)
    r = _radius(q)
    omega = np.array([0.0, 0.0, params.k * params.alpha / r ** 3])
    rdot = float(q @ qdot) / r
    omega_dot = np.array([0.0, 0.0, -3 * params.k * params.alpha * rdot / r ** 4])
    return -params.k * q / (params.m * r ** 3) + np.cross(qdot, omega) + np.cross(q, omega_dot)
