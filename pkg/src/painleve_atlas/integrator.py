"""Real-time integration of Painleve I that vaults over poles.

Away from poles the flow is integrated in ``(x, y)``.  When ``x`` exceeds the
switch radius the state moves to a pole chart, ``ZW`` or ``UV`` depending on
the sheet ``w = s * x**(-1/2)``, where the field is polynomial and the pole is
an ordinary zero of ``w``.  Once ``x`` drops below half the radius the state
goes back to ``(x, y)``.

Stepping uses scipy's embedded Runge-Kutta pairs (Dormand-Prince 5(4) by
default) with their dense output; every accepted step keeps its interpolant so
poles and chart switches can be located afterwards.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy.integrate import DOP853, RK45
from scipy.optimize import brentq

from . import atlas
from .atlas import ChartId
from .hamiltonian import builtin_triple, hamiltonian_field, vector_field
from .symcore import Polynomial, as_rf, parse, var

__all__ = [
    "BranchPolicy",
    "IntegratorConfig",
    "Sample",
    "Step",
    "Trajectory",
    "PoleRecord",
    "IntegrationError",
    "integrate",
    "detect_poles",
    "laurent_check",
    "structure_monitor",
    "harmonic_field",
    "reference_config",
    "trajectory_csv",
    "poles_json",
]

_METHODS = {"RK45": RK45, "DOP853": DOP853}


class IntegrationError(RuntimeError):
    pass


class BranchPolicy(str, Enum):
    CONTINUOUS = "continuous"  # always the ZW chart
    FIXED_PLUS = "fixed-plus"  # sheet s = +1
    FIXED_MINUS = "fixed-minus"  # sheet s = -1


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    switch_radius: float = 10.0
    branch_policy: BranchPolicy = BranchPolicy.CONTINUOUS
    max_step: float = 0.05
    dense_output: bool = True
    method: str = "RK45"
    first_step: float | None = None  # None lets the solver choose

    def __post_init__(self):
        object.__setattr__(self, "branch_policy", BranchPolicy(self.branch_policy))
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("rtol and atol must be positive")
        if not self.switch_radius > 1:
            raise ValueError("switch_radius must exceed 1")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")
        if self.first_step is not None and not 0 < self.first_step <= self.max_step:
            raise ValueError("first_step must lie in (0, max_step]")
        if self.method not in _METHODS:
            raise ValueError(f"unknown method {self.method!r}")


def reference_config(**overrides) -> IntegratorConfig:
    """Tight eighth-order run used as the numerical oracle."""
    base = dict(rtol=1e-13, atol=1e-15, method="DOP853")
    base.update(overrides)
    return IntegratorConfig(**base)


@dataclass(frozen=True)
class Sample:
    t: float
    chart: ChartId
    coords: tuple[float, float]
    branch: int  # sheet sign of the active pole-chart segment, 0 on XY


@dataclass
class Step:
    t_start: float
    t_end: float
    chart: ChartId
    branch: int
    interp: Callable  # t -> array of the two coordinates


@dataclass
class Trajectory:
    samples: list[Sample] = field(default_factory=list)
    steps: list[Step] = field(default_factory=list)
    switches: list[tuple[Sample, Sample]] = field(default_factory=list)
    config: IntegratorConfig | None = None
    fields: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.samples)

    def step_at(self, t: float) -> Step:
        lo, hi = 0, len(self.steps) - 1
        if hi < 0 or not (self.steps[0].t_start <= t <= self.steps[-1].t_end):
            raise ValueError(f"t={t} outside the trajectory")
        while lo < hi:
            mid = (lo + hi) // 2
            if self.steps[mid].t_end < t:
                lo = mid + 1
            else:
                hi = mid
        return self.steps[lo]

    def evaluate(self, t: float) -> Sample:
        st = self.step_at(t)
        a, b = st.interp(t)
        return Sample(t, st.chart, (float(a), float(b)), st.branch)

    def x_at(self, t: float) -> float:
        s = self.evaluate(t)
        return _to_xy(s)[0]


@dataclass(frozen=True)
class PoleRecord:
    t0: float
    z_at_pole: float
    laurent_residual: float
    dwdt: float
    chart: ChartId = ChartId.ZW

    @property
    def crossing_direction(self) -> int:
        return 1 if self.dwdt > 0 else -1

    def as_dict(self) -> dict:
        return {"t0": self.t0, "z_at_pole": self.z_at_pole, "laurent_residual": self.laurent_residual, "dwdt": self.dwdt}


# ------------------------------------------------------------------ fields


def _numeric_fields(xy_field=None) -> dict:
    out = {c: vector_field(c).numeric() for c in (ChartId.ZW, ChartId.UV)}
    out[ChartId.XY] = (xy_field or vector_field(ChartId.XY)).numeric()
    return out


def harmonic_field():
    """Test hook: the ``(x, y)`` field of ``(x^2 + y^2)/2``, i.e. the Painleve I
    Hamiltonian with its cubic and linear terms removed and a unit spring."""
    return hamiltonian_field(parse("1/2*y^2 + 1/2*x^2"), ChartId.XY.coords, ChartId.XY)


def _to_xy(s: Sample) -> tuple[float, float]:
    if s.chart is ChartId.XY:
        return s.coords
    if s.chart is ChartId.ZW:
        return atlas.zw_to_xy(*s.coords, s.t)
    return atlas.uv_to_xy(*s.coords, s.t)


def _pole_chart(y: float, branch: int) -> ChartId:
    # on the sheet w = s x^(-1/2), z stays bounded only when s*y < 0
    return ChartId.ZW if branch * y < 0 else ChartId.UV


def _enter_pole_chart(x, y, t, policy: BranchPolicy):
    if policy is BranchPolicy.CONTINUOUS:
        branch = -1 if y > 0 else 1
    else:
        branch = 1 if policy is BranchPolicy.FIXED_PLUS else -1
    chart = _pole_chart(y, branch)
    conv = atlas.xy_to_zw if chart is ChartId.ZW else atlas.xy_to_uv
    return chart, conv(x, y, t, branch), branch


# ------------------------------------------------------------- integration


def integrate(t_start: float, t_end: float, x0: float, y0: float, cfg: IntegratorConfig | None = None,
              xy_field=None, switching: bool = True) -> Trajectory:
    """Integrate from ``(x0, y0)`` at ``t_start`` to ``t_end``.

    ``xy_field`` replaces the Painleve field on the ``(x, y)`` chart (test hook);
    pass ``switching=False`` with it, since the pole charts belong to Painleve I.
    """
    cfg = cfg or IntegratorConfig()
    if not (math.isfinite(x0) and math.isfinite(y0)):
        raise ValueError("initial state must be finite")
    if t_end < t_start:
        raise ValueError("t_start must not exceed t_end")
    fields = _numeric_fields(xy_field)
    traj = Trajectory(config=cfg, fields=fields)
    if t_end == t_start:
        return traj

    R = cfg.switch_radius
    chart, state, branch = ChartId.XY, (float(x0), float(y0)), 0
    if switching and x0 > R:
        chart, state, branch = _enter_pole_chart(x0, y0, t_start, cfg.branch_policy)
    t = float(t_start)
    traj.samples.append(Sample(t, chart, tuple(map(float, state)), branch))
    method = _METHODS[cfg.method]

    while t < t_end:
        f = fields[chart]
        solver = method(
            lambda tt, u, f=f: np.array(f(u[0], u[1], tt)),
            t, np.array(state, dtype=float), t_end,
            rtol=cfg.rtol, atol=cfg.atol, max_step=cfg.max_step, first_step=cfg.first_step,
        )
        switched = False
        while solver.status == "running":
            msg = solver.step()
            if solver.status == "failed":
                raise IntegrationError(f"step failure at t={solver.t}: {msg}")
            if not np.all(np.isfinite(solver.y)):
                raise IntegrationError(f"non-finite state at t={solver.t}")
            interp = solver.dense_output()
            t0, t1 = solver.t_old, solver.t
            u1 = solver.y
            crossing = _switch_event(chart, R, interp, t0, t1, u1) if switching else None
            if crossing is not None:
                t1 = crossing
                u1 = interp(t1)
            traj.steps.append(Step(t0, t1, chart, branch, interp))
            traj.samples.append(Sample(float(t1), chart, (float(u1[0]), float(u1[1])), branch))
            if chart is ChartId.XY and u1[0] < -2 * R:
                raise IntegrationError(f"x = {u1[0]:.3g} < -2R: outside the real pole-vaulting scope")
            if crossing is not None:
                old = traj.samples[-1]
                if chart is ChartId.XY:
                    chart, state, branch = _enter_pole_chart(u1[0], u1[1], t1, cfg.branch_policy)
                else:
                    state = _to_xy(old)
                    chart, branch = ChartId.XY, 0
                new = Sample(float(t1), chart, tuple(map(float, state)), branch)
                traj.samples.append(new)
                traj.switches.append((old, new))
                t = float(t1)
                switched = True
                break
            t = float(t1)
        if not switched:
            break
    return traj


def _switch_event(chart, R, interp, t0, t1, u1):
    """Time in ``(t0, t1]`` where the state leaves the active chart's window."""
    if chart is ChartId.XY:
        g = lambda tt: interp(tt)[0] - R
    else:
        g = lambda tt: interp(tt)[1] ** 2 - 2.0 / R
    if g(t1) <= 0:
        return None
    if g(t0) > 0:
        return t0
    return brentq(g, t0, t1, xtol=1e-15, rtol=4 * np.finfo(float).eps)


# ------------------------------------------------------------------- poles


def detect_poles(traj: Trajectory, delta: float = 0.05, tol: float = 1e-12) -> list[PoleRecord]:
    """Zeros of the second pole-chart coordinate on pole-chart steps."""
    poles = []
    for st in traj.steps:
        if st.chart is ChartId.XY:
            continue
        w0, w1 = st.interp(st.t_start)[1], st.interp(st.t_end)[1]
        if w0 == 0 or w0 * w1 >= 0:
            continue
        t0 = _refine_zero(traj, st, tol)
        z0, w_at = st.interp(t0)
        dwdt = traj.fields[st.chart](z0, w_at, t0)[1]
        pole = PoleRecord(float(t0), float(z0), math.nan, float(dwdt), st.chart)
        try:
            res = laurent_check(traj, pole, delta)
        except ValueError:
            res = math.nan
        poles.append(PoleRecord(pole.t0, pole.z_at_pole, res, pole.dwdt, st.chart))
    return poles


def _refine_zero(traj: Trajectory, st: Step, tol: float) -> float:
    w = lambda tt: st.interp(tt)[1]
    a, b = st.t_start, st.t_end
    for _ in range(60):  # bisection to a bracket small enough for Newton
        m = 0.5 * (a + b)
        if (b - a) < 1e-6:
            break
        if w(a) * w(m) <= 0:
            b = m
        else:
            a = m
    t0 = 0.5 * (a + b)
    f = traj.fields[st.chart]
    for _ in range(50):
        z, ww = st.interp(t0)
        if abs(ww) <= tol:
            return t0
        t0 -= ww / f(z, ww, t0)[1]
        if not (st.t_start - 1e-9 <= t0 <= st.t_end + 1e-9):
            break
    raise IntegrationError(f"pole refinement did not converge near t={0.5 * (a + b)}")


def laurent_check(traj: Trajectory, pole: PoleRecord, delta: float = 0.05, n: int = 25) -> float:
    """``max |x(t) (t - t0)^2 - 1|`` over ``0 < |t - t0| <= delta``."""
    if not traj.steps or pole.t0 - delta < traj.steps[0].t_start or pole.t0 + delta > traj.steps[-1].t_end:
        raise ValueError("insufficient samples in the Laurent window")
    dev = 0.0
    for k in range(1, n + 1):
        h = delta * k / n
        for tt in (pole.t0 - h, pole.t0 + h):
            s = traj.evaluate(tt)
            if s.chart is ChartId.XY:
                x = s.coords[0]
            else:
                x = 1.0 / s.coords[1] ** 2
            dev = max(dev, abs(x * (tt - pole.t0) ** 2 - 1.0))
    return dev


# ------------------------------------------------------- structure monitor

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(6)


def _energy_functions(xy_hamiltonian=None):
    triple = builtin_triple()
    hams = {ChartId.XY: triple.H if xy_hamiltonian is None else xy_hamiltonian, ChartId.ZW: triple.K, ChartId.UV: triple.L}
    T = var("t")
    out = {}
    for c, h in hams.items():
        order = (*c.coords, T)
        h = as_rf(h)
        terms = [Polynomial({m: a}).compile(order) for m, a in h.as_polynomial().terms.items()]
        scale = lambda a, b, t, terms=terms: 1.0 + sum(abs(f(a, b, t)) for f in terms)
        out[c] = (h.compile(order), h.diff(T).compile(order), scale)
    return out


@dataclass
class MonitorSeries:
    energy_t: list[float] = field(default_factory=list)
    energy_defect: list[float] = field(default_factory=list)  # per-step balance defect / term scale
    energy_defect_abs: list[float] = field(default_factory=list)
    switch_t: list[float] = field(default_factory=list)
    switch_residual: list[float] = field(default_factory=list)

    @property
    def max_energy_defect(self) -> float:
        return max(self.energy_defect, default=0.0)

    @property
    def max_switch_residual(self) -> float:
        return max(self.switch_residual, default=0.0)


def structure_monitor(traj: Trajectory, xy_hamiltonian=None) -> MonitorSeries:
    """Energy balance ``H(t1) - H(t0) = int dH/dt`` on every step, and the
    gluing residual ``|K - (H - 1/w)|`` (``|L - (H + 1/v)|``) at every switch.

    Both are divided by ``1 + sum |h_i|``, the sum of the absolute values of the
    Hamiltonian's monomials, so they read as relative floating-point errors.
    The unscaled energy defect is kept in ``energy_defect_abs``.
    """
    funcs = _energy_functions(xy_hamiltonian)
    out = MonitorSeries()
    for st in traj.steps:
        if st.t_end <= st.t_start:
            continue
        H, Ht, scale = funcs[st.chart]
        a0, b0 = st.interp(st.t_start)
        a1, b1 = st.interp(st.t_end)
        h0, h1 = H(a0, b0, st.t_start), H(a1, b1, st.t_end)
        half = 0.5 * (st.t_end - st.t_start)
        mid = 0.5 * (st.t_end + st.t_start)
        integral = 0.0
        for node, wt in zip(_GL_NODES, _GL_WEIGHTS):
            tt = mid + half * node
            a, b = st.interp(tt)
            integral += wt * Ht(a, b, tt)
        integral *= half
        out.energy_t.append(st.t_end)
        defect = abs(h1 - h0 - integral)
        out.energy_defect_abs.append(defect)
        out.energy_defect.append(defect / scale(a0, b0, st.t_start))
    for old, new in traj.switches:
        xy, pole = (old, new) if old.chart is ChartId.XY else (new, old)
        H, _, scale = funcs[ChartId.XY]
        h = H(*xy.coords, xy.t)
        k = funcs[pole.chart][0](*pole.coords, pole.t)
        shift = 1.0 / pole.coords[1] if pole.chart is ChartId.ZW else -1.0 / pole.coords[1]
        out.switch_t.append(xy.t)
        out.switch_residual.append(abs(k - (h - shift)) / scale(*xy.coords, xy.t))
    return out


# ------------------------------------------------------------------ output


def _g(x: float) -> str:
    return f"{x:.17g}"


def trajectory_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["t", "chart", "c1", "c2", "branch"])
    for s in traj.samples:
        wr.writerow([_g(s.t), s.chart.name, _g(s.coords[0]), _g(s.coords[1]), s.branch])
    return buf.getvalue()


def poles_json(poles: list[PoleRecord]) -> str:
    items = [
        "{" + ", ".join(f'"{k}": {_g(v) if math.isfinite(v) else "null"}' for k, v in p.as_dict().items()) + "}"
        for p in poles
    ]
    return "[" + ",\n ".join(items) + "]\n"
