"""Numeric differential geometry on the five phase-space charts.

Fields are thin immutable wrappers around closures ``coords -> components``.
Derivatives come from an optional analytic closure when one is attached,
otherwise from central finite differences.  The finite-difference engine is
also exposed directly so that analytic paths can be cross-checked.

Sign conventions
----------------
Every chart lists its coordinates as ``(Q_1, .., Q_n, P_1, .., P_n)`` and the
Poisson bracket is always

    {f, g} = sum_h (df/dQ_h dg/dP_h - df/dP_h dg/dQ_h).

On the action-type charts (ACTION, XI, PI, NU) the ``Q`` slots hold the
actions, so ``{H, .}`` is the time derivative and ``omega = sum dJ_h ^ dphi^h``.
On CARTESIAN and REDUCED the ``Q`` slots hold positions, so ``{., H}`` is the
time derivative and ``omega = sum dp ^ dq``.  In both cases the flow of ``H``
satisfies ``i_{X_H} omega = -dH``; :func:`canonical_bivector` returns the
matrix ``Lambda`` with ``X_f = Lambda df``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import ChartMismatch, DomainViolation, NonFinite, SingularStructure

__all__ = [
    "Chart",
    "ChartPoint",
    "DiffScheme",
    "DiffConfig",
    "ScalarField",
    "VectorField",
    "OneForm",
    "TwoForm",
    "Tensor11",
    "Bivector",
    "coordinate_function",
    "constant_field",
    "canonical_bivector",
    "symplectic_matrix",
    "canonical_two_form",
    "identity_tensor",
    "derivatives",
    "partial_derivative",
    "gradient",
    "poisson_gamma",
    "poisson_canonical",
    "poisson_s1",
    "s_inverse",
    "hamiltonian_vector_field",
    "exterior_derivative",
    "interior_product",
    "lie_bracket",
    "lie_derivative_tensor",
    "lie_derivative_form",
    "nijenhuis_torsion",
    "wedge",
]

ANTISYMMETRY_TOL = 1e-12
S_POLE_TOL = 1e-12


class Chart(enum.Enum):
    CARTESIAN = ("q1", "q2", "q3", "p1", "p2", "p3")
    REDUCED = ("r", "phi_alpha", "p_r", "p_phi_alpha")
    ACTION = ("J1", "J2", "phi1", "phi2")
    XI = ("xi1", "xi2", "phi1_xi", "phi2_xi")
    PI = ("pi1", "pi2", "chi1", "chi2")
    # formal (nu, Phi) coordinates of the alternative description
    NU = ("nu_a", "nu_e", "Phi_a", "Phi_e")

    @property
    def coordinate_names(self) -> tuple:
        return self.value

    @property
    def dim(self) -> int:
        return len(self.value)

    @property
    def canonical_pairs(self) -> list:
        """Index pairs ``(Q_h, P_h)`` entering the canonical bracket."""
        n = self.dim // 2
        return [(h, h + n) for h in range(n)]

    @property
    def actions_first(self) -> bool:
        return self not in (Chart.CARTESIAN, Chart.REDUCED)

    def margin(self, coords) -> float:
        """Signed distance-like quantity, positive inside the chart."""
        x = np.asarray(coords, dtype=float)
        if self is Chart.CARTESIAN:
            return float(np.linalg.norm(x[:3]))
        if self is Chart.REDUCED:
            return float(x[0])
        if self is Chart.ACTION:
            return float(x[0] + x[1])
        if self is Chart.XI:
            return float(min(x[0], x[1] - x[0]))
        if self is Chart.PI:
            return float(x[0] - x[1] ** 2)
        return math.inf

    def is_valid(self, coords) -> bool:
        x = np.asarray(coords, dtype=float)
        if x.shape != (self.dim,) or not np.all(np.isfinite(x)):
            return False
        return self.margin(x) > 0.0

    def describe_domain(self) -> str:
        return {
            Chart.CARTESIAN: "(q1,q2,q3) != 0",
            Chart.REDUCED: "r > 0",
            Chart.ACTION: "J1 + J2 > 0",
            Chart.XI: "xi2 > xi1 > 0",
            Chart.PI: "pi1 > pi2**2",
            Chart.NU: "all finite",
        }[self]


@dataclass(frozen=True)
class ChartPoint:
    chart: Chart
    coords: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in np.asarray(self.coords, dtype=float).ravel())
        object.__setattr__(self, "coords", c)
        if len(c) != self.chart.dim:
            raise DomainViolation(
                f"{self.chart.name} point needs {self.chart.dim} coordinates, got {len(c)}"
            )
        if not all(math.isfinite(v) for v in c):
            raise DomainViolation(f"non-finite coordinate in {self.chart.name} point {c}")
        if not self.chart.is_valid(c):
            raise DomainViolation(
                f"{self.chart.name} point {c} violates {self.chart.describe_domain()}"
            )

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __len__(self):
        return len(self.coords)

    def replace(self, **named) -> "ChartPoint":
        c = list(self.coords)
        for key, value in named.items():
            c[self.chart.coordinate_names.index(key)] = value
        return ChartPoint(self.chart, tuple(c))


Point = Union[ChartPoint, np.ndarray]


class DiffScheme(enum.Enum):
    CENTRAL_2 = "central2"
    CENTRAL_4 = "central4"


@dataclass(frozen=True)
class DiffConfig:
    """Finite-difference settings; step ``h = eps * max(1, |x_i|)``."""

    scheme: DiffScheme = DiffScheme.CENTRAL_2
    eps: Optional[float] = None

    def __post_init__(self):
        if self.eps is not None and not self.eps > 0:
            raise ValueError("eps must be positive")

    @property
    def step_scale(self) -> float:
        if self.eps is not None:
            return self.eps
        return 1e-6 if self.scheme is DiffScheme.CENTRAL_2 else 1e-4


DEFAULT_DIFF = DiffConfig()
CROSSCHECK_DIFF = DiffConfig(DiffScheme.CENTRAL_4)


def _coords(x: Point, chart: Chart) -> np.ndarray:
    if isinstance(x, ChartPoint):
        if x.chart is not chart:
            raise ChartMismatch(f"point on {x.chart.name}, field on {chart.name}")
        return x.array
    return np.asarray(x, dtype=float)


def _finite(value, what: str):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{what} evaluated to a non-finite value")
    return arr


def _same_chart(*objs):
    charts = {o.chart for o in objs}
    if len(charts) != 1:
        raise ChartMismatch("objects live on different charts: " + ", ".join(c.name for c in charts))
    return charts.pop()


# --- finite differences -------------------------------------------------------


def _step(x: np.ndarray, i: int, cfg: DiffConfig) -> float:
    h = cfg.step_scale * max(1.0, abs(x[i]))
    h = (x[i] + h) - x[i]
    if h == 0.0:
        raise ValueError("finite-difference step rounded to zero")
    return h


def derivatives(func: Callable, x: np.ndarray, chart: Chart, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """All first partials of an array-valued ``func`` at ``x``.

    Returns ``out`` with ``out[c] = d func / d x^c``; trailing axes follow the
    shape of ``func(x)``.
    """
    x = np.asarray(x, dtype=float)
    offsets = (-1, 1) if cfg.scheme is DiffScheme.CENTRAL_2 else (-2, -1, 1, 2)
    cols = []
    for i in range(x.size):
        h = _step(x, i, cfg)
        reach = h * max(abs(o) for o in offsets)
        if chart.margin(x) < 10 * reach:
            raise DomainViolation(
                f"stencil along {chart.coordinate_names[i]} too close to the "
                f"{chart.name} boundary ({chart.describe_domain()})"
            )
        vals = {}
        for o in offsets:
            node = x.copy()
            node[i] += o * h
            if not chart.is_valid(node):
                raise DomainViolation(f"stencil node {node} left {chart.name}")
            vals[o] = _finite(func(node), "stencil node")
        if cfg.scheme is DiffScheme.CENTRAL_2:
            d = (vals[1] - vals[-1]) / (2 * h)
        else:
            d = (-vals[2] + 8 * vals[1] - 8 * vals[-1] + vals[-2]) / (12 * h)
        cols.append(d)
    return np.array(cols)


# --- field objects ------------------------------------------------------------


@dataclass(frozen=True)
class ScalarField:
    chart: Chart
    func: Callable = field(repr=False)
    grad: Optional[Callable] = field(default=None, repr=False)
    name: str = ""

    def __call__(self, x: Point) -> float:
        return float(_finite(self.func(_coords(x, self.chart)), f"scalar field {self.name!r}"))

    def gradient(self, x: Point, cfg: Optional[DiffConfig] = None, analytic: bool = True) -> np.ndarray:
        c = _coords(x, self.chart)
        if analytic and self.grad is not None and cfg is None:
            return _finite(self.grad(c), f"gradient of {self.name!r}").astype(float)
        return derivatives(lambda y: self.func(y), c, self.chart, cfg or DEFAULT_DIFF)

    def without_gradient(self) -> "ScalarField":
        return ScalarField(self.chart, self.func, None, self.name)

    def _combine(self, other, op, dop, sym):
        if isinstance(other, ScalarField):
            _same_chart(self, other)
            f, g = self.func, other.func
            grad = None
            if self.grad is not None and other.grad is not None:
                fg, gg = self.grad, other.grad
                grad = lambda x: dop(f(x), np.asarray(fg(x)), g(x), np.asarray(gg(x)))
            return ScalarField(self.chart, lambda x: op(f(x), g(x)), grad, f"({self.name}{sym}{other.name})")
        c = float(other)
        return self._combine(constant_field(self.chart, c), op, dop, sym)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b, lambda a, da, b, db: da + db, "+")

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b, lambda a, da, b, db: da - db, "-")

    def __rsub__(self, other):
        return constant_field(self.chart, float(other)) - self

    def __mul__(self, other):
        return self._combine(other, lambda a, b: a * b, lambda a, da, b, db: da * b + a * db, "*")

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def constant_field(chart: Chart, value: float) -> ScalarField:
    n = chart.dim
    return ScalarField(chart, lambda x: value, lambda x: np.zeros(n), repr(value))


def coordinate_function(chart: Chart, index: int) -> ScalarField:
    n = chart.dim
    e = np.zeros(n)
    e[index] = 1.0
    return ScalarField(chart, lambda x: x[index], lambda x: e.copy(), chart.coordinate_names[index])


@dataclass(frozen=True)
class VectorField:
    chart: Chart
    func: Callable = field(repr=False)
    name: str = ""

    def __call__(self, x: Point) -> np.ndarray:
        v = _finite(self.func(_coords(x, self.chart)), f"vector field {self.name!r}")
        if v.shape != (self.chart.dim,):
            raise ValueError(f"vector field {self.name!r} returned shape {v.shape}")
        return v

    def apply(self, f: ScalarField, x: Point, cfg: Optional[DiffConfig] = None) -> float:
        """Directional derivative ``X(f)``."""
        _same_chart(self, f)
        return float(self(x) @ f.gradient(x, cfg))

    def __add__(self, other):
        _same_chart(self, other)
        return VectorField(self.chart, lambda x: self.func(x) + other.func(x), f"{self.name}+{other.name}")

    def __sub__(self, other):
        _same_chart(self, other)
        return VectorField(self.chart, lambda x: self.func(x) - other.func(x), f"{self.name}-{other.name}")

    def scaled(self, factor: Union[float, ScalarField]) -> "VectorField":
        if isinstance(factor, ScalarField):
            _same_chart(self, factor)
            return VectorField(self.chart, lambda x: factor.func(x) * self.func(x), f"({factor.name}){self.name}")
        return VectorField(self.chart, lambda x: factor * self.func(x), f"{factor}*{self.name}")


@dataclass(frozen=True)
class OneForm:
    chart: Chart
    func: Callable = field(repr=False)
    name: str = ""

    def __call__(self, x: Point) -> np.ndarray:
        v = _finite(self.func(_coords(x, self.chart)), f"one-form {self.name!r}")
        if v.shape != (self.chart.dim,):
            raise ValueError(f"one-form {self.name!r} returned shape {v.shape}")
        return v


@dataclass(frozen=True)
class TwoForm:
    """Antisymmetric ``omega_ij``; ``a ^ b`` has components ``a_i b_j - a_j b_i``."""

    chart: Chart
    func: Callable = field(repr=False)
    name: str = ""

    def __call__(self, x: Point) -> np.ndarray:
        w = _finite(self.func(_coords(x, self.chart)), f"two-form {self.name!r}")
        n = self.chart.dim
        if w.shape != (n, n):
            raise ValueError(f"two-form {self.name!r} returned shape {w.shape}")
        if np.max(np.abs(w + w.T)) > ANTISYMMETRY_TOL * max(1.0, float(np.max(np.abs(w)))):
            raise ValueError(f"two-form {self.name!r} is not antisymmetric")
        return w

    def __add__(self, other):
        _same_chart(self, other)
        return TwoForm(self.chart, lambda x: self.func(x) + other.func(x), f"{self.name}+{other.name}")


@dataclass(frozen=True)
class Tensor11:
    """(1,1)-tensor with components ``T[a, b] = T^a_b``; acts as ``(T X)^a = T^a_b X^b``."""

    chart: Chart
    func: Callable = field(repr=False)
    name: str = ""

    def __call__(self, x: Point) -> np.ndarray:
        t = _finite(self.func(_coords(x, self.chart)), f"tensor {self.name!r}")
        n = self.chart.dim
        if t.shape != (n, n):
            raise ValueError(f"tensor {self.name!r} returned shape {t.shape}")
        return t

    def __add__(self, other):
        _same_chart(self, other)
        return Tensor11(self.chart, lambda x: self.func(x) + other.func(x), f"{self.name}+{other.name}")


@dataclass(frozen=True)
class Bivector:
    """Antisymmetric contravariant 2-tensor ``Lambda^ij``."""

    chart: Chart
    func: Callable = field(repr=False)
    name: str = ""

    def __call__(self, x: Point) -> np.ndarray:
        return _finite(self.func(_coords(x, self.chart)), f"bivector {self.name!r}")


def _pair_matrix(chart: Chart) -> np.ndarray:
    n = chart.dim
    p = np.zeros((n, n))
    for q, pp in chart.canonical_pairs:
        p[q, pp] = 1.0
        p[pp, q] = -1.0
    return p


def canonical_bivector(chart: Chart) -> Bivector:
    """``Lambda`` such that ``X_f = Lambda df`` generates the physical flow."""
    lam = _pair_matrix(chart)
    if chart.actions_first:
        lam = lam.T.copy()
    return Bivector(chart, lambda x: lam.copy(), "Lambda")


def symplectic_matrix(chart: Chart) -> np.ndarray:
    lam = canonical_bivector(chart).func(None)
    return np.linalg.inv(lam)


def canonical_two_form(chart: Chart) -> TwoForm:
    w = symplectic_matrix(chart)
    return TwoForm(chart, lambda x: w.copy(), "omega")


def identity_tensor(chart: Chart) -> Tensor11:
    n = chart.dim
    return Tensor11(chart, lambda x: np.eye(n), "id")


def wedge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.outer(a, b) - np.outer(b, a)


# --- scalar derivatives and brackets -----------------------------------------


def partial_derivative(f: ScalarField, x: Point, i: int, cfg: DiffConfig = DEFAULT_DIFF) -> float:
    """Central finite-difference approximation of ``df/dx^i``."""
    c = _coords(x, f.chart)
    if not 0 <= i < f.chart.dim:
        raise IndexError(f"coordinate index {i} out of range for {f.chart.name}")
    offsets = (-1, 1) if cfg.scheme is DiffScheme.CENTRAL_2 else (-2, -1, 1, 2)
    h = _step(c, i, cfg)
    if f.chart.margin(c) < 10 * h * max(abs(o) for o in offsets):
        raise DomainViolation(f"stencil too close to the {f.chart.name} boundary")
    vals = {}
    for o in offsets:
        node = c.copy()
        node[i] += o * h
        if not f.chart.is_valid(node):
            raise DomainViolation(f"stencil node {node} left {f.chart.name}")
        vals[o] = float(_finite(f.func(node), f"scalar field {f.name!r} at stencil node"))
    if cfg.scheme is DiffScheme.CENTRAL_2:
        return (vals[1] - vals[-1]) / (2 * h)
    return (-vals[2] + 8 * vals[1] - 8 * vals[-1] + vals[-2]) / (12 * h)


def gradient(f: ScalarField, x: Point, cfg: Optional[DiffConfig] = None) -> np.ndarray:
    """Analytic gradient when ``f`` carries one, finite differences otherwise."""
    return f.gradient(x, cfg)


def _canonical_sum(a: np.ndarray, b: np.ndarray, pairs) -> float:
    terms = [a[q] * b[p] - a[p] * b[q] for q, p in pairs]
    return math.fsum(terms)


def poisson_gamma(f: ScalarField, g: ScalarField, x: Point, params, cfg: Optional[DiffConfig] = None) -> float:
    """Deformed bracket ``Theta^ij df/dq^i dg/dq^j + {f, g}`` on CARTESIAN.

    ``Theta^ij = eps^ijk alpha^k`` with ``alpha^k = delta^k3 alpha``, so only
    ``Theta^12 = -Theta^21 = alpha`` survive.
    """
    if f.chart is not Chart.CARTESIAN or g.chart is not Chart.CARTESIAN:
        raise ChartMismatch("the gamma bracket lives on the CARTESIAN chart")
    a = f.gradient(x, cfg)
    b = g.gradient(x, cfg)
    theta = params.alpha * (a[0] * b[1] - a[1] * b[0])
    return theta + _canonical_sum(a, b, Chart.CARTESIAN.canonical_pairs)


def poisson_canonical(f: ScalarField, g: ScalarField, x: Point, cfg: Optional[DiffConfig] = None) -> float:
    chart = _same_chart(f, g)
    if chart is Chart.NU:
        raise ChartMismatch("NU carries formal labels only; use the explicit forms")
    a = f.gradient(x, cfg)
    b = g.gradient(x, cfg)
    return _canonical_sum(a, b, chart.canonical_pairs)


def s_inverse(j1: float, j2: float) -> np.ndarray:
    """Closed-form inverse of ``S = [[J1, J2], [J2, J1]]``."""
    d1, d2 = j1 - j2, j1 + j2
    if abs(d1) < S_POLE_TOL or abs(d2) < S_POLE_TOL:
        raise SingularStructure(f"S is singular at J1={j1}, J2={j2}")
    den = d1 * d2
    return np.array([[j1 / den, -j2 / den], [-j2 / den, j1 / den]])


def poisson_s1(f: ScalarField, g: ScalarField, x: Point, cfg: Optional[DiffConfig] = None) -> float:
    """``{f, g}_1 = sum (S^-1)^h_k (df/dJ_k dg/dphi^h - df/dphi^h dg/dJ_k)``."""
    if _same_chart(f, g) is not Chart.ACTION:
        raise ChartMismatch("{.,.}_1 lives on the ACTION chart")
    c = _coords(x, Chart.ACTION)
    sinv = s_inverse(c[0], c[1])
    a = f.gradient(x, cfg)
    b = g.gradient(x, cfg)
    terms = []
    for h in range(2):
        for k in range(2):
            terms.append(sinv[h, k] * (a[k] * b[2 + h] - a[2 + h] * b[k]))
    return math.fsum(terms)


def hamiltonian_vector_field(f: ScalarField, bivector: Bivector, x: Point, cfg: Optional[DiffConfig] = None) -> np.ndarray:
    """Components of ``X_f = Lambda df`` at ``x``."""
    _same_chart(f, bivector)
    return bivector(x) @ f.gradient(x, cfg)


# --- exterior calculus --------------------------------------------------------


def exterior_derivative(form: Union[OneForm, TwoForm], x: Point, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """``d`` of a one-form (matrix) or a two-form (rank-3 array)."""
    c = _coords(x, form.chart)
    dw = derivatives(form.func, c, form.chart, cfg)
    if isinstance(form, OneForm):
        return dw - dw.T
    if isinstance(form, TwoForm):
        # (dw)_ijk = d_i w_jk + d_j w_ki + d_k w_ij
        return dw + np.transpose(dw, (1, 2, 0)) + np.transpose(dw, (2, 0, 1))
    raise TypeError(f"cannot take d of {type(form).__name__}")


def interior_product(X: VectorField, omega: TwoForm, x: Point) -> np.ndarray:
    """``(i_X omega)_j = X^i omega_ij``."""
    _same_chart(X, omega)
    return X(x) @ omega(x)


def lie_bracket(X: VectorField, Y: VectorField, x: Point, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """``[X, Y]^a = X^c d_c Y^a - Y^c d_c X^a``."""
    chart = _same_chart(X, Y)
    c = _coords(x, chart)
    dX = derivatives(X.func, c, chart, cfg)
    dY = derivatives(Y.func, c, chart, cfg)
    return X(c) @ dY - Y(c) @ dX


def lie_derivative_tensor(X: VectorField, T: Tensor11, x: Point, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """``(L_X T)^a_b = X^c d_c T^a_b - T^c_b d_c X^a + T^a_c d_b X^c``."""
    chart = _same_chart(X, T)
    c = _coords(x, chart)
    Xv = X(c)
    Tv = T(c)
    dX = derivatives(X.func, c, chart, cfg)  # dX[c, a]
    dT = derivatives(T.func, c, chart, cfg)  # dT[c, a, b]
    return (
        np.einsum("c,cab->ab", Xv, dT)
        - np.einsum("cb,ca->ab", Tv, dX)
        + np.einsum("ac,bc->ab", Tv, dX)
    )


def lie_derivative_form(X: VectorField, omega: TwoForm, x: Point, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Cartan formula ``i_X d omega + d(i_X omega)``."""
    chart = _same_chart(X, omega)
    c = _coords(x, chart)
    dw = exterior_derivative(omega, c, cfg)
    first = np.einsum("i,ijk->jk", X(c), dw)
    contracted = OneForm(chart, lambda y: X.func(y) @ omega.func(y), f"i_{X.name}{omega.name}")
    return first + exterior_derivative(contracted, c, cfg)


def nijenhuis_torsion(T: Tensor11, x: Point, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """``N[h, i, j] = T^k_i d_k T^h_j - T^k_j d_k T^h_i - T^h_k (d_i T^k_j - d_j T^k_i)``."""
    c = _coords(x, T.chart)
    Tv = T(c)
    dT = derivatives(T.func, c, T.chart, cfg)  # dT[k, h, j] = d_k T^h_j
    a = np.einsum("ki,khj->hij", Tv, dT)
    b = np.einsum("hk,ikj->hij", Tv, dT)
    return a - np.transpose(a, (0, 2, 1)) - (b - np.transpose(b, (0, 2, 1)))
