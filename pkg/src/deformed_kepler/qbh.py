"""Quasi-bi-Hamiltonian decompositions of the symplectic form on ACTION.

Two families split a symplectic form into a pair of non-closed 2-forms:

``PRIME``
    ``omega'_1 = dJ1^dphi1 - (2K+1) dJ2^dphi2`` and
    ``omega'_2 = -dJ1^dphi2 + (2K+1) dJ2^dphi1`` with
    ``K = (J1+J2)^3 / (m^2 k^2 alpha)``.
``DOUBLE_PRIME``
    ``omega''_1``, ``omega''_2`` whose ``dJ^dJ`` terms depend on ``phi1``.

The weak operators are ``omega^-1 o omega_i``, computed here as the matrix
product ``W^-1 W_i`` and compared against their closed forms.  With blocks
ordered ``(J, phi)`` and ``W_i = [[A, B], [-B^T, 0]]`` this product is
``[[B^T, 0], [A, B]]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .chartcore import (
    Chart,
    ChartPoint,
    DiffConfig,
    ScalarField,
    Tensor11,
    TwoForm,
    canonical_bivector,
    canonical_two_form,
    hamiltonian_vector_field,
    exterior_derivative,
    wedge,
)
from .errors import SingularStructure
from .keplermodel import VF, ModelParams, hamiltonian_action, vector_field_library

__all__ = [
    "Family",
    "QbhStructure",
    "k_factor",
    "build_qbh",
    "closedness_report",
    "contraction_residuals",
    "first_integral_residuals",
    "weak_recursion",
    "decomposition_residual",
]

_E = np.eye(4)
J1, J2, PHI1, PHI2 = range(4)


class Family(enum.Enum):
    PRIME = "prime"
    DOUBLE_PRIME = "double-prime"


def _u(x) -> float:
    u = x[0] + x[1]
    if u <= 0:
        raise SingularStructure("J1 + J2 must be positive")
    return u


def k_factor(params: ModelParams, x) -> float:
    """``K = (J1 + J2)^3 / (m^2 k^2 alpha)``."""
    params.require_deformation()
    return _u(x) ** 3 / (params.m ** 2 * params.k ** 2 * params.alpha)


def _w(i, j):
    return wedge(_E[i], _E[j])


@dataclass(frozen=True)
class QbhStructure:
    family: Family
    params: ModelParams
    base_form: TwoForm = field(repr=False)
    partner_forms: tuple = field(repr=False)
    integrals: tuple = field(repr=False)
    weak_operators: tuple = field(repr=False)

    @property
    def names(self) -> tuple:
        tick = "'" if self.family is Family.PRIME else "''"
        return f"omega{tick}_1", f"omega{tick}_2"


# --- PRIME family -------------------------------------------------------------


def _prime(params: ModelParams) -> tuple:
    def big(x):
        return 2 * k_factor(params, x) + 1

    w1 = TwoForm(Chart.ACTION, lambda x: _w(J1, PHI1) - big(x) * _w(J2, PHI2), "omega'_1")
    w2 = TwoForm(Chart.ACTION, lambda x: -_w(J1, PHI2) + big(x) * _w(J2, PHI1), "omega'_2")
    ma = params.m * params.alpha
    h1 = ScalarField(Chart.ACTION, lambda x: -2 * x[1] / ma, None, "h'_1")
    h2 = ScalarField(Chart.ACTION, lambda x: 2 * x[1] / ma, None, "h'_2")

    def t1(x):
        return np.diag([1.0, -big(x), 1.0, -big(x)])

    def t2(x):
        b = big(x)
        t = np.zeros((4, 4))
        t[J1, J2] = b
        t[PHI2, PHI1] = b
        t[PHI1, PHI2] = -1.0
        t[J2, J1] = -1.0
        return t

    ops = (Tensor11(Chart.ACTION, t1, "T~'_1"), Tensor11(Chart.ACTION, t2, "T~'_2"))
    return (w1, w2), (h1, h2), ops


# --- DOUBLE_PRIME family ------------------------------------------------------


def _vt(x):
    return 2 * x[1] + 1


def _double_prime(params: ModelParams) -> tuple:
    a = params.mk2

    def w1(x):
        u = _u(x)
        return 2 * _w(J1, PHI1) - (2 * x[1] + x[1] * _vt(x) / u ** 2) * _w(J2, PHI2)

    def w2(x):
        u, j1, j2, phi = _u(x), x[0], x[1], x[2]
        return (
            -j2 * _w(J1, PHI2)
            - 2 * (1 + j1) * phi / u * _w(J1, J2)
            + (2 + _vt(x) / u) * _w(J2, PHI1)
            + (2 / u + _vt(x) / u ** 2) * (j2 - 1) * phi * _w(J2, J1)
        )

    def h1(x):
        j1, j2 = x[0], x[1]
        return a * (3 * j2 * (8 * j2 - 6 * j1 + 3) + j1 * (2 * j1 + 5)) / (6 * _u(x) ** 3)

    def h2(x):
        j1, j2 = x[0], x[1]
        return a * (j2 * (-j2 - 3 * j1 + 12) + 8 * j1) / (6 * _u(x) ** 3)

    def t1(x):
        d = -x[1] * (2 + _vt(x) / _u(x) ** 2)
        return np.diag([2.0, d, 2.0, d])

    def t2(x):
        u, j2, phi = _u(x), x[1], x[2]
        lead = 2 + _vt(x) / u
        tail = (2 + _vt(x) / u ** 2 * (j2 - 1)) * phi
        t = np.zeros((4, 4))
        t[J1, J2] = lead
        t[PHI2, PHI1] = lead
        t[PHI1, PHI2] = -j2
        t[J2, J1] = -j2 * j2
        t[PHI1, J2] = -tail
        t[PHI2, J1] = tail
        return t

    forms = (TwoForm(Chart.ACTION, w1, "omega''_1"), TwoForm(Chart.ACTION, w2, "omega''_2"))
    integrals = (ScalarField(Chart.ACTION, h1, None, "h''_1"), ScalarField(Chart.ACTION, h2, None, "h''_2"))
    ops = (Tensor11(Chart.ACTION, t1, "T~''_1"), Tensor11(Chart.ACTION, t2, "T~''_2"))
    return forms, integrals, ops


def build_qbh(params: ModelParams, family: Family) -> QbhStructure:
    """Assemble the forms, first integrals and displayed weak operators of ``family``.

    Raises
    ------
    DeformationRequired
        For ``PRIME`` with ``alpha = 0``, since ``K`` divides by ``alpha``.
    """
    family = Family(family)
    if family is Family.PRIME:
        params.require_deformation()
        forms, integrals, ops = _prime(params)
    else:
        forms, integrals, ops = _double_prime(params)
    return QbhStructure(family, params, canonical_two_form(Chart.ACTION), forms, integrals, ops)


# --- reports ------------------------------------------------------------------


def closedness_report(s: QbhStructure, grid, cfg: Optional[DiffConfig] = None) -> dict:
    """Max-abs component of ``d omega`` over ``grid`` for the base and partner forms."""
    kw = {} if cfg is None else {"cfg": cfg}
    out = {}
    for name, form in zip(("omega",) + s.names, (s.base_form,) + s.partner_forms):
        out[name] = max((float(np.max(np.abs(exterior_derivative(form, x, **kw)))) for x in grid), default=0.0)
    return out


def _x_h(params: ModelParams, x: ChartPoint, mode: str) -> np.ndarray:
    if mode == "paper-literal":
        return vector_field_library(params, VF.XH_ACTION)(x)
    if mode == "canonical":
        return hamiltonian_vector_field(hamiltonian_action(params), canonical_bivector(Chart.ACTION), x)
    raise ValueError("mode must be 'canonical' or 'paper-literal'")


def contraction_residuals(s: QbhStructure, x: ChartPoint, mode: str = "canonical",
                          cfg: Optional[DiffConfig] = None) -> list:
    """``i_{X_H} omega_i + dh_i`` for both partner forms.

    Each entry holds the residual one-form, its max-abs, and the pointwise
    least-squares factor ``g* = -<i, dh> / <i, i>`` with the residual left
    after replacing ``X_H`` by ``g* X_H``.
    """
    xh = _x_h(s.params, x, mode)
    out = []
    for form, h in zip(s.partner_forms, s.integrals):
        contracted = xh @ form(x)
        dh = h.gradient(x, cfg)
        resid = contracted + dh
        norm2 = float(contracted @ contracted)
        g_star = -float(contracted @ dh) / norm2 if norm2 > 0 else math.nan
        scaled = g_star * contracted + dh if norm2 > 0 else dh
        out.append({
            "form": form.name,
            "residual": resid,
            "max_abs": float(np.max(np.abs(resid))),
            "g_star": g_star,
            "g_star_residual": float(np.max(np.abs(scaled))),
        })
    return out


def first_integral_residuals(s: QbhStructure, x: ChartPoint, cfg: Optional[DiffConfig] = None) -> tuple:
    """``X_H(h_1)`` and ``X_H(h_2)`` (finite-difference gradients)."""
    xh = vector_field_library(s.params, VF.XH_ACTION)(x)
    return tuple(float(xh @ h.gradient(x, cfg)) for h in s.integrals)


def weak_recursion(s: QbhStructure, x: ChartPoint) -> list:
    """``omega^-1 o omega_i`` as ``W^-1 W_i`` next to the displayed tensor.

    Returns one dict per partner form with ``numeric``, ``displayed`` and
    ``max_abs_diff``.
    """
    w = s.base_form(x)
    if abs(np.linalg.det(w)) < 1e-14:
        raise SingularStructure("base form is degenerate")
    out = []
    for form, op in zip(s.partner_forms, s.weak_operators):
        numeric = np.linalg.solve(w, form(x))
        shown = op(x)
        out.append({
            "operator": op.name,
            "numeric": numeric,
            "displayed": shown,
            "max_abs_diff": float(np.max(np.abs(numeric - shown))),
        })
    return out


def decomposition_residual(s: QbhStructure, x: ChartPoint) -> float:
    """``omega_1 + omega_2`` (TwoForm sum) against the coefficient-wise sum."""
    total = (s.partner_forms[0] + s.partner_forms[1])(x)
    if s.family is Family.PRIME:
        b = 2 * k_factor(s.params, x) + 1
        coef = {(J1, PHI1): 1.0, (J2, PHI2): -b, (J1, PHI2): -1.0, (J2, PHI1): b}
    else:
        u, j1, j2, phi = _u(x), x[0], x[1], x[2]
        vt = _vt(x)
        coef = {
            (J1, PHI1): 2.0,
            (J2, PHI2): -(2 * j2 + j2 * vt / u ** 2),
            (J1, PHI2): -j2,
            (J2, PHI1): 2 + vt / u,
            (J1, J2): -2 * (1 + j1) * phi / u - (2 / u + vt / u ** 2) * (j2 - 1) * phi,
        }
    expected = np.zeros((4, 4))
    for (i, j), c in coef.items():
        expected[i, j] += c
        expected[j, i] -= c
    return float(np.max(np.abs(total - expected)))
