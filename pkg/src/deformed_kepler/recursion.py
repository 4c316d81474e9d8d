"""Recursion operators, the master-symmetry hierarchy and the alternative description.

All six operators have the same matrix on the action block and on the angle
block.  On ACTION the operator ``T`` is built from ``S = [[J1, J2], [J2, J1]]``;
on XI and PI it is the diagonal of the action coordinates; on the formal NU
chart the operators are diagonal in ``2 nu``.
"""

from __future__ import annotations

import enum
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
    VectorField,
    canonical_two_form,
    coordinate_function,
    interior_product,
    lie_bracket,
    lie_derivative_form,
    lie_derivative_tensor,
    nijenhuis_torsion,
    poisson_canonical,
    poisson_s1,
    wedge,
)
from .errors import Degenerate, SingularStructure
from .keplermodel import VF, ModelParams, hamiltonian_chain, s_matrix, vector_field_library

__all__ = [
    "Label",
    "RecursionOperator",
    "build_recursion",
    "omega1_form",
    "mu_bracket",
    "mu_bracket_hierarchy",
    "chain_residual_canonical",
    "chain_residual_s1",
    "chain_identity",
    "AlternativeDescription",
    "nu_values",
    "nu_point",
    "alternative_description",
    "eigen_integrals",
    "torsion_residual",
    "invariance_residual",
    "lie_delta_residual",
]

DEGENERACY_TOL = 1e-12


class Label(enum.Enum):
    T = "T"
    T_PRIME = "T'"
    T_DOUBLE_PRIME = "T''"
    CAL_T1 = "calT_1"
    CAL_T2 = "calT_2"
    CAL_T = "calT"


_CHART_OF = {
    Label.T: Chart.ACTION,
    Label.T_PRIME: Chart.XI,
    Label.T_DOUBLE_PRIME: Chart.PI,
    Label.CAL_T1: Chart.NU,
    Label.CAL_T2: Chart.NU,
    Label.CAL_T: Chart.NU,
}


def _block_diag(a: np.ndarray) -> np.ndarray:
    out = np.zeros((4, 4))
    out[:2, :2] = a
    out[2:, 2:] = a
    return out


def _action_block(label: Label, x) -> np.ndarray:
    if label is Label.T:
        return s_matrix(x[0], x[1])
    if label in (Label.T_PRIME, Label.T_DOUBLE_PRIME):
        return np.diag([x[0], x[1]])
    two_nu = 2 * np.asarray(x[:2], dtype=float)
    if label is Label.CAL_T1:
        return np.diag([two_nu[0], 0.0])
    if label is Label.CAL_T2:
        return np.diag([0.0, two_nu[1]])
    return np.diag(two_nu)


@dataclass(frozen=True)
class RecursionOperator:
    label: Label
    tensor: Tensor11 = field(repr=False)

    @property
    def chart(self) -> Chart:
        return self.tensor.chart

    def action_block(self, x) -> np.ndarray:
        return self.tensor(x)[:2, :2]

    def block_mismatch(self, x) -> float:
        """Max difference between the action-block and angle-block matrices."""
        t = self.tensor(x)
        off = max(np.max(np.abs(t[:2, 2:])), np.max(np.abs(t[2:, :2])))
        return float(max(np.max(np.abs(t[:2, :2] - t[2:, 2:])), off))


def build_recursion(label: Label, params: Optional[ModelParams] = None) -> RecursionOperator:
    """The operator ``label`` as a (1,1)-tensor field on its own chart.

    ``T = sum S^h_k (d/dJ_h (x) dJ_k + d/dphi^h (x) dphi^k)`` on ACTION,
    ``T' = diag(xi, xi)`` on XI, ``T'' = diag(pi, pi)`` on PI and the
    ``2 nu`` diagonals on NU.
    """
    label = Label(label)
    return RecursionOperator(label, Tensor11(_CHART_OF[label], lambda x: _block_diag(_action_block(label, x)), label.value))


def omega1_form() -> TwoForm:
    """``omega_1 = sum S^k_h dJ_k ^ dphi^h`` on ACTION."""

    def f(x):
        w = np.zeros((4, 4))
        w[:2, 2:] = s_matrix(x[0], x[1])
        return w - w.T

    return TwoForm(Chart.ACTION, f, "omega_1")


# --- master symmetries --------------------------------------------------------


def _chain_field(params: ModelParams, i: int) -> VectorField:
    return vector_field_library(params, (VF.X0, VF.X1, VF.X2, VF.X3)[i])


def mu_bracket(params: ModelParams, x: ChartPoint, i: int, cfg: Optional[DiffConfig] = None) -> np.ndarray:
    """``[X_i, Delta]_mu = (2/mu) [X_i, Delta]`` with ``mu = 3 - i``."""
    if i not in (0, 1, 2, 3):
        raise IndexError("chain index must be 0..3")
    mu = 3 - i
    if mu == 0:
        raise ValueError("the hierarchy terminates at X_3 (mu = 0)")
    delta = vector_field_library(params, VF.DELTA)
    kw = {} if cfg is None else {"cfg": cfg}
    return (2.0 / mu) * lie_bracket(_chain_field(params, i), delta, x, **kw)


def mu_bracket_hierarchy(params: ModelParams, x: ChartPoint, cfg: Optional[DiffConfig] = None) -> dict:
    """Evaluate ``X_0 .. X_3``, the hierarchy residuals and pairwise brackets.

    Returns
    -------
    dict
        ``fields``: the four vectors at ``x``; ``residuals``: max-abs of
        ``(2/mu)[X_i, Delta] - X_{i+1}`` for ``i = 0, 1, 2``; ``involution``:
        max-abs of ``[X_h, X_k]`` over all pairs.
    """
    if x.chart is not Chart.ACTION:
        raise ValueError("the hierarchy lives on ACTION")
    kw = {} if cfg is None else {"cfg": cfg}
    fields = [_chain_field(params, i) for i in range(4)]
    values = [f(x) for f in fields]
    residuals = [float(np.max(np.abs(mu_bracket(params, x, i, cfg) - values[i + 1]))) for i in range(3)]
    involution = {
        (h, k): float(np.max(np.abs(lie_bracket(fields[h], fields[k], x, **kw))))
        for h in range(4)
        for k in range(h + 1, 4)
    }
    return {"fields": values, "residuals": residuals, "involution": involution}


def _coordinate_functions():
    return [coordinate_function(Chart.ACTION, a) for a in range(4)]


def chain_residual_canonical(params: ModelParams, x: ChartPoint, i: int, cfg: Optional[DiffConfig] = None) -> float:
    """Max over coordinates of ``|{H_i, x^a} - X_i^a|``."""
    h = hamiltonian_chain(params, i)
    target = _chain_field(params, i)(x)
    got = np.array([poisson_canonical(h, c, x, cfg) for c in _coordinate_functions()])
    return float(np.max(np.abs(got - target)))


def chain_residual_s1(params: ModelParams, x: ChartPoint, i: int, cfg: Optional[DiffConfig] = None) -> float:
    """Max over coordinates of ``|{H_{i+1}, x^a}_1 - X_i^a|``; needs ``J1 != J2``."""
    h = hamiltonian_chain(params, i + 1)
    target = _chain_field(params, i)(x)
    got = np.array([poisson_s1(h, c, x, cfg) for c in _coordinate_functions()])
    return float(np.max(np.abs(got - target)))


def chain_identity(params: ModelParams, x: ChartPoint, i: int, cfg: Optional[DiffConfig] = None) -> tuple:
    """Residuals of ``X_i = {H_i, .}`` and ``X_i = {H_{i+1}, .}_1`` for ``i = 0, 1, 2``.

    Raises :class:`SingularStructure` from the second bracket when ``J1 = J2``.
    """
    if i not in (0, 1, 2):
        raise IndexError("chain identity index must be 0..2")
    return chain_residual_canonical(params, x, i, cfg), chain_residual_s1(params, x, i, cfg)


# --- tensor identities --------------------------------------------------------


def torsion_residual(op: RecursionOperator, x: ChartPoint, cfg: Optional[DiffConfig] = None) -> float:
    kw = {} if cfg is None else {"cfg": cfg}
    return float(np.max(np.abs(nijenhuis_torsion(op.tensor, x, **kw))))


def invariance_residual(params: ModelParams, x: ChartPoint, l: int, cfg: Optional[DiffConfig] = None) -> float:
    """Max-abs of ``L_{X_l} T``."""
    kw = {} if cfg is None else {"cfg": cfg}
    t = build_recursion(Label.T).tensor
    return float(np.max(np.abs(lie_derivative_tensor(_chain_field(params, l), t, x, **kw))))


def lie_delta_residual(params: ModelParams, x: ChartPoint, cfg: Optional[DiffConfig] = None) -> float:
    """Max-abs of ``L_Delta omega - omega_1``."""
    kw = {} if cfg is None else {"cfg": cfg}
    delta = vector_field_library(params, VF.DELTA)
    lie = lie_derivative_form(delta, canonical_two_form(Chart.ACTION), x, **kw)
    return float(np.max(np.abs(lie - omega1_form()(x))))


# --- alternative description --------------------------------------------------


def nu_values(params: ModelParams, j1: float, j2: float) -> tuple:
    """``nu_a = -2 J1 H_0`` and ``nu_e = J2 H_1``."""
    u = j1 + j2
    if u <= 0:
        raise SingularStructure("J1 + J2 must be positive")
    a = params.mk2
    h0, h1 = -a / (2 * u * u), -a / u
    return -2 * j1 * h0, j2 * h1


def _nu_jacobian(params: ModelParams, j1: float, j2: float) -> np.ndarray:
    a, u = params.mk2, j1 + j2
    return np.array([
        [a * (j2 - j1) / u ** 3, -2 * a * j1 / u ** 3],
        [a * j2 / u ** 2, -a * j1 / u ** 2],
    ])


def nu_point(params: ModelParams, x: ChartPoint) -> ChartPoint:
    """NU point of an ACTION point.

    The fibre labels are ``Phi^a = (phi1 + phi2)/2`` and ``Phi^e = -Phi^a``,
    one choice compatible with ``d/dPhi^a = -d/dPhi^e = d/dphi1 + d/dphi2``.
    """
    nu_a, nu_e = nu_values(params, x[0], x[1])
    phi = (x[2] + x[3]) / 2
    return ChartPoint(Chart.NU, (nu_a, nu_e, phi, -phi))


def _nu_form(coef_a, coef_e, name) -> TwoForm:
    def f(y):
        return coef_a(y) * wedge(np.eye(4)[0], np.eye(4)[2]) + coef_e(y) * wedge(np.eye(4)[1], np.eye(4)[3])

    return TwoForm(Chart.NU, f, name)


def f_fields() -> tuple:
    """``f^a = -nu_a/2`` and ``f^e = nu_e`` on NU."""
    return (
        ScalarField(Chart.NU, lambda y: -y[0] / 2, lambda y: np.array([-0.5, 0.0, 0.0, 0.0]), "f^a"),
        ScalarField(Chart.NU, lambda y: y[1], lambda y: np.array([0.0, 1.0, 0.0, 0.0]), "f^e"),
    )


def h_tilde() -> ScalarField:
    """``H~ = -nu_a^2/4 + nu_e^2/2``."""
    return ScalarField(
        Chart.NU,
        lambda y: -y[0] ** 2 / 4 + y[1] ** 2 / 2,
        lambda y: np.array([-y[0] / 2, y[1], 0.0, 0.0]),
        "H~",
    )


@dataclass(frozen=True)
class AlternativeDescription:
    point: ChartPoint
    nu: tuple
    f: tuple
    H_tilde: float
    omega_tilde: np.ndarray = field(repr=False)
    omega_tilde_1: np.ndarray = field(repr=False)
    omega_tilde_2: np.ndarray = field(repr=False)
    cal_T: np.ndarray = field(repr=False)
    cal_T_sum: np.ndarray = field(repr=False)
    contraction_residual: float
    generator_residuals: tuple
    sum_dnu_df: float
    cal_T_sum_residual: float
    upsilon_residual: float
    xa_wedge_xe: float
    dha_wedge_dhe: float
    jacobian_det: float


def alternative_description(params: ModelParams, x: ChartPoint, cfg: Optional[DiffConfig] = None) -> AlternativeDescription:
    """Evaluate the ``(nu, Phi)`` description at an ACTION point.

    Residuals of ``i_Upsilon omega~ + dH~`` and ``i_{X^i} omega~ + df^i`` are
    taken in NU components; ``cfg`` switches the derivatives of ``H~`` and
    ``f`` to finite differences.

    Raises
    ------
    Degenerate
        When ``df^a ^ df^e`` vanishes, i.e. ``det d(nu)/d(J) = m^2 k^4 J1/(J1+J2)^4 = 0``.
    """
    if x.chart is not Chart.ACTION:
        raise ValueError("alternative_description expects an ACTION point")
    jac = _nu_jacobian(params, x[0], x[1])
    det = float(np.linalg.det(jac))
    if abs(det) < DEGENERACY_TOL * params.mk2 ** 2:
        raise Degenerate(f"df^a ^ df^e = 0 at J = ({x[0]}, {x[1]})")
    y = nu_point(params, x)
    nu_a, nu_e = y[0], y[1]
    fa, fe = f_fields()
    ht = h_tilde()

    omega_t = _nu_form(lambda z: -0.5, lambda z: 1.0, "omega~")
    omega_1 = _nu_form(lambda z: 1.0, lambda z: 1.0, "omega~_1")
    omega_2 = _nu_form(lambda z: 2 * z[0], lambda z: 2 * z[1], "omega~_2")
    w1, w2 = omega_1(y), omega_2(y)
    # (1,1)-tensor of omega~_2 o omega~_1^{-1}, in the X -> omega_1^{-1} omega_2 X convention
    cal_t = np.linalg.solve(w1, w2)
    cal_sum = build_recursion(Label.CAL_T1).tensor(y) + build_recursion(Label.CAL_T2).tensor(y)

    x_a = VectorField(Chart.NU, lambda z: np.array([0.0, 0.0, 1.0, 0.0]), "X^a")
    x_e = VectorField(Chart.NU, lambda z: np.array([0.0, 0.0, 0.0, 1.0]), "X^e")
    upsilon = VectorField(Chart.NU, lambda z: np.array([0.0, 0.0, z[0], z[1]]), "Upsilon")
    contraction = interior_product(upsilon, omega_t, y) + ht.gradient(y, cfg)
    gens = (
        float(np.max(np.abs(interior_product(x_a, omega_t, y) + fa.gradient(y, cfg)))),
        float(np.max(np.abs(interior_product(x_e, omega_t, y) + fe.gradient(y, cfg)))),
    )
    dnu = np.eye(4)[:2]
    sum_wedge = wedge(dnu[0], fa.gradient(y, cfg)) + wedge(dnu[1], fe.gradient(y, cfg))

    # Upsilon = nu_a X^a + nu_e X^e against J1 X1 + J2 X2 on ACTION
    ups_action = vector_field_library(params, VF.UPSILON)(x)
    x_a_action = vector_field_library(params, VF.X_A)(x)
    x_e_action = vector_field_library(params, VF.X_E)(x)
    ups_resid = float(np.max(np.abs(nu_a * x_a_action + nu_e * x_e_action - ups_action)))

    a, u = params.mk2, x[0] + x[1]
    dha = np.array([a * (x[0] - x[1]) / (2 * u ** 3), a * x[0] / u ** 3, 0, 0])
    dhe = np.array([a * x[1] / u ** 2, -a * x[0] / u ** 2, 0, 0])
    return AlternativeDescription(
        point=y,
        nu=(nu_a, nu_e),
        f=(fa(y), fe(y)),
        H_tilde=ht(y),
        omega_tilde=omega_t(y),
        omega_tilde_1=w1,
        omega_tilde_2=w2,
        cal_T=cal_t,
        cal_T_sum=cal_sum,
        contraction_residual=float(np.max(np.abs(contraction))),
        generator_residuals=gens,
        sum_dnu_df=float(np.max(np.abs(sum_wedge))),
        cal_T_sum_residual=float(np.max(np.abs(cal_t - cal_sum))),
        upsilon_residual=ups_resid,
        xa_wedge_xe=float(np.max(np.abs(wedge(x_a_action, x_e_action)))),
        dha_wedge_dhe=float(np.max(np.abs(wedge(dha, dhe)))),
        jacobian_det=det,
    )


# --- eigenvalues --------------------------------------------------------------


def eigen_integrals(op: RecursionOperator, x: ChartPoint) -> list:
    """Closed-form eigenvalues of the action block.

    ``T``: ``J1 + J2`` and ``J1 - J2``; ``T'``, ``T''``: the diagonal; NU
    operators: their ``2 nu`` diagonal.
    """
    if x.chart is not op.chart:
        raise ValueError(f"{op.label.value} lives on {op.chart.name}, got a {x.chart.name} point")
    if op.label is Label.T:
        return [x[0] + x[1], x[0] - x[1]]
    block = _action_block(op.label, x.coords)
    return [float(block[0, 0]), float(block[1, 1])]
