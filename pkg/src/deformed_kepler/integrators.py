"""Time integration of the deformed dynamics with conserved-quantity monitors.

Two steppers are offered.  ``RK45_ADAPTIVE`` drives scipy's Dormand-Prince
5(4) stepper one accepted step at a time so that the step budget and the
radial guard stay under our control.  ``IMPLICIT_MIDPOINT_FIXED`` is a
hand-written fixed-step implicit midpoint rule (symplectic for non-separable
Hamiltonians) solved by fixed-point iteration.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import RK45

from .chartcore import Chart, ChartPoint
from .errors import DomainViolation, StepFailure
from .keplermodel import (
    VF,
    ModelParams,
    cartesian_velocity,
    hamiltonian_cartesian,
    hamiltonian_reduced,
    newton_acceleration,
    omega_rate,
    varpi,
    vector_field_library,
)
from .invariants import cartesian_lrl, lrl_auxiliaries

__all__ = [
    "Method",
    "IntegratorConfig",
    "Trajectory",
    "MONITORS",
    "R_MIN_GUARD",
    "monitor_values",
    "cartesian_rhs",
    "reduced_rhs",
    "integrate_cartesian",
    "integrate_reduced",
    "integrate_newton",
    "drift_report",
]

R_MIN_GUARD = 1e-6
MIDPOINT_TOL = 1e-13
MIDPOINT_MAX_ITER = 50
MONITORS = ("H", "M", "L_alpha", "L3", "A1", "A2", "Gamma_sq")
REDUCED_MODES = ("canonical", "paper-literal")


class Method(enum.Enum):
    RK45_ADAPTIVE = "rk45"
    IMPLICIT_MIDPOINT_FIXED = "midpoint"


@dataclass(frozen=True)
class IntegratorConfig:
    """Integrator settings.

    Parameters
    ----------
    method : Method
    rel_tol, abs_tol : float
        Tolerances of the adaptive controller.
    dt : float
        Step of the fixed-step midpoint rule.
    t_end : float
        Final time; integration always starts at ``t = 0``.
    max_steps : int
        Budget of accepted steps; exceeding it raises :class:`StepFailure`.
    """

    method: Method = Method.RK45_ADAPTIVE
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    dt: float = 1e-3
    t_end: float = 1.0
    max_steps: int = 1_000_000

    def __post_init__(self):
        if isinstance(self.method, str):
            object.__setattr__(self, "method", Method(self.method))
        for name in ("rel_tol", "abs_tol", "dt", "t_end"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number (got {v!r})")
        if int(self.max_steps) != self.max_steps or self.max_steps <= 0:
            raise ValueError(f"max_steps must be a positive integer (got {self.max_steps!r})")


@dataclass
class Trajectory:
    chart: Chart
    times: np.ndarray
    states: np.ndarray
    monitors: dict = field(default_factory=dict)
    drift: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float).reshape(len(self.times), self.chart.dim)
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("trajectory times must be strictly increasing")
        for s in self.states:
            if not self.chart.is_valid(s):
                raise DomainViolation(f"trajectory sample {s} left {self.chart.name}")

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> ChartPoint:
        return ChartPoint(self.chart, self.states[-1])


# --- right-hand sides ---------------------------------------------------------


def _guarded_radius(r: float, t: float) -> float:
    if not r > R_MIN_GUARD:
        raise DomainViolation(f"r = {r:.3g} fell below the guard {R_MIN_GUARD:g} near t = {t:.17g}")
    return r


def cartesian_rhs(params: ModelParams) -> Callable:
    """First-order deformed Hamilton equations on ``(q, p)``."""
    k = params.k

    def rhs(t, y):
        q = y[:3]
        r = _guarded_radius(math.sqrt(float(q @ q)), t)
        qdot = cartesian_velocity(y, params)
        pdot = -k * q / r ** 3
        return np.concatenate([qdot, pdot])

    return rhs


def reduced_rhs(params: ModelParams, mode: str = "canonical") -> Callable:
    if mode not in REDUCED_MODES:
        raise ValueError(f"mode must be one of {REDUCED_MODES}")
    which = VF.XH_REDUCED if mode == "canonical" else VF.XH_REDUCED_LITERAL
    field_ = vector_field_library(params, which)

    def rhs(t, y):
        _guarded_radius(y[0], t)
        return field_.func(y)

    return rhs


def _newton_rhs(params: ModelParams) -> Callable:
    def rhs(t, y):
        q, v = y[:3], y[3:]
        _guarded_radius(math.sqrt(float(q @ q)), t)
        return np.concatenate([v, newton_acceleration(q, v, params)])

    return rhs


# --- steppers -----------------------------------------------------------------


def _run_rk45(rhs, y0, cfg: IntegratorConfig, radius):
    solver = RK45(rhs, 0.0, np.asarray(y0, dtype=float), cfg.t_end, rtol=cfg.rel_tol, atol=cfg.abs_tol)
    times, states = [0.0], [solver.y.copy()]
    steps = 0
    while solver.status == "running":
        if steps >= cfg.max_steps:
            raise StepFailure(f"step budget {cfg.max_steps} exhausted at t = {solver.t:.17g}")
        try:
            msg = solver.step()
        except DomainViolation as exc:
            raise DomainViolation(f"{exc}; last good time {times[-1]:.17g}") from None
        if solver.status == "failed":
            raise StepFailure(f"adaptive controller failed at t = {solver.t:.17g}: {msg}")
        steps += 1
        if not np.all(np.isfinite(solver.y)):
            raise StepFailure(f"non-finite state at t = {solver.t:.17g}")
        if not radius(solver.y) > R_MIN_GUARD:
            raise DomainViolation(f"r fell below {R_MIN_GUARD:g}; last good time {times[-1]:.17g}")
        times.append(solver.t)
        states.append(solver.y.copy())
    return np.array(times), np.array(states)


def _midpoint_step(rhs, t, y, h):
    # fixed-point iteration on z = y + h f(t + h/2, (y + z)/2), explicit Euler start
    z = y + h * rhs(t, y)
    for _ in range(MIDPOINT_MAX_ITER):
        z_new = y + h * rhs(t + h / 2, (y + z) / 2)
        if np.max(np.abs(z_new - z)) <= MIDPOINT_TOL * max(1.0, float(np.max(np.abs(z_new)))):
            return z_new
        z = z_new
    raise StepFailure(f"implicit midpoint iteration did not converge at t = {t:.17g} (dt = {h:g})")


def _run_midpoint(rhs, y0, cfg: IntegratorConfig, radius):
    n_steps = math.ceil(cfg.t_end / cfg.dt - 1e-12)
    if n_steps > cfg.max_steps:
        raise StepFailure(f"t_end / dt needs {n_steps} steps, budget is {cfg.max_steps}")
    y = np.asarray(y0, dtype=float)
    times, states = [0.0], [y.copy()]
    for i in range(n_steps):
        t = i * cfg.dt
        h = min(cfg.dt, cfg.t_end - t)
        try:
            y = _midpoint_step(rhs, t, y, h)
        except DomainViolation as exc:
            raise DomainViolation(f"{exc}; last good time {times[-1]:.17g}") from None
        if not np.all(np.isfinite(y)):
            raise StepFailure(f"non-finite state at t = {t + h:.17g}")
        if not radius(y) > R_MIN_GUARD:
            raise DomainViolation(f"r fell below {R_MIN_GUARD:g}; last good time {times[-1]:.17g}")
        times.append(t + h if i < n_steps - 1 else cfg.t_end)
        states.append(y.copy())
    return np.array(times), np.array(states)


def _run(rhs, y0, cfg, radius):
    if cfg.method is Method.RK45_ADAPTIVE:
        return _run_rk45(rhs, y0, cfg, radius)
    return _run_midpoint(rhs, y0, cfg, radius)


# --- monitors -----------------------------------------------------------------


def _rotate_lrl(a_x: float, a_y: float, b: float) -> tuple:
    # A1 = C sin b + D cos b, A2 = C cos b - D sin b with (D, C) = (A_x, A_y) at b = 0
    return a_y * math.sin(b) + a_x * math.cos(b), a_y * math.cos(b) - a_x * math.sin(b)


def monitor_values(chart: Chart, state, t: float, params: ModelParams) -> dict:
    """Values of :data:`MONITORS` at one sample.

    The LRL components use ``beta = Omega(r) t``; ``Gamma_sq`` is nan on
    unbound samples.
    """
    y = np.asarray(state, dtype=float)
    if chart is Chart.CARTESIAN:
        q = y[:3]
        r = math.sqrt(float(q @ q))
        h = hamiltonian_cartesian(params).func(y)
        l3 = q[0] * y[4] - q[1] * y[3]
        a = cartesian_lrl(y, params)
        a_x, a_y = a[0], a[1]
    elif chart is Chart.REDUCED:
        r = y[0]
        h = hamiltonian_reduced(params).func(y)
        l3 = y[3]
        big_c, big_d = lrl_auxiliaries(y, params)
        a_x, a_y = big_d, big_c
    else:
        raise ValueError(f"no monitors on {chart.name}")
    m_val = l3 + varpi(r, params)
    a1, a2 = _rotate_lrl(a_x, a_y, omega_rate(r, params) * t)
    return {
        "H": h,
        "M": m_val,
        "L_alpha": m_val + params.m * params.alpha * h,
        "L3": l3,
        "A1": a1,
        "A2": a2,
        "Gamma_sq": -params.mk2 / (2 * h) + l3 ** 2 if h < 0 else math.nan,
    }


def _attach_monitors(traj: Trajectory, params: ModelParams) -> Trajectory:
    rows = [monitor_values(traj.chart, s, t, params) for t, s in zip(traj.times, traj.states)]
    traj.monitors = {name: np.array([row[name] for row in rows]) for name in MONITORS}
    traj.drift = drift_report(traj)
    return traj


def drift_report(traj: Trajectory) -> dict:
    """Maximum absolute deviation of every monitor from its initial value."""
    if len(traj) == 0:
        raise ValueError("drift of an empty trajectory is undefined")
    out = {}
    for name, values in traj.monitors.items():
        values = np.asarray(values, dtype=float)
        dev = np.abs(values - values[0])
        out[name] = float(np.max(dev)) if np.all(np.isfinite(values)) else math.nan
    return out


# --- drivers ------------------------------------------------------------------


def integrate_cartesian(x0: ChartPoint, params: ModelParams, cfg: IntegratorConfig) -> Trajectory:
    """Integrate the first-order deformed equations from a CARTESIAN state."""
    if x0.chart is not Chart.CARTESIAN:
        raise ValueError("integrate_cartesian expects a CARTESIAN point")
    times, states = _run(cartesian_rhs(params), x0.array, cfg, lambda y: math.sqrt(float(y[:3] @ y[:3])))
    return _attach_monitors(Trajectory(Chart.CARTESIAN, times, states), params)


def integrate_reduced(x0: ChartPoint, params: ModelParams, cfg: IntegratorConfig,
                      mode: str = "canonical") -> Trajectory:
    """Integrate on the REDUCED chart.

    ``mode="canonical"`` uses Hamilton's equations of the reduced Hamiltonian;
    ``"paper-literal"`` uses the displayed vector field whose angle rate
    carries an extra ``1/m``.
    """
    if x0.chart is not Chart.REDUCED:
        raise ValueError("integrate_reduced expects a REDUCED point")
    times, states = _run(reduced_rhs(params, mode), x0.array, cfg, lambda y: y[0])
    return _attach_monitors(Trajectory(Chart.REDUCED, times, states), params)


def integrate_newton(x0: ChartPoint, params: ModelParams, cfg: IntegratorConfig) -> Trajectory:
    """Second-order (velocity form) integration of the corrected Newton law.

    The initial velocity is ``p/m + Theta grad V``; the returned states are
    ``(q, qdot)`` tagged CARTESIAN and carry no monitors.
    """
    if x0.chart is not Chart.CARTESIAN:
        raise ValueError("integrate_newton expects a CARTESIAN point")
    y0 = np.concatenate([x0.array[:3], cartesian_velocity(x0.array, params)])
    times, states = _run(_newton_rhs(params), y0, cfg, lambda y: math.sqrt(float(y[:3] @ y[:3])))
    return Trajectory(Chart.CARTESIAN, times, states)
