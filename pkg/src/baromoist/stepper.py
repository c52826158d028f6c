"""Time integration: Strang splitting around an integrating-factor RK2 core.

One step is

    [half moisture substep] o [explicit midpoint RK2 with exact diffusion
    integrating factors] o [half moisture substep]

where the moisture substep is the exact pointwise solution of the relaxation
sink for epsilon > 0, and the pointwise clamp min(q_e, 0) for the epsilon = 0
limiting system.  Diffusion (mu on u, v; eta on T_e, q_e) is applied exactly
in spectral space, so the step cost is epsilon-uniform and unconditionally
stable in the stiff term.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import BlowUp, EpsilonZero, StepTooSmall
from .model import ModelParams, State
from .spectral import Field, VectorField, heat_propagator, leray_project
from .tendencies import explicit_tendency


@dataclass(frozen=True)
class StepperConfig:
    dt: float = 1e-3
    cfl: float = 0.5
    scheme: str = "strang_rk2"
    min_dt: float = 1e-8
    max_dt: float = 1.0
    adaptive: bool = True

    def __post_init__(self):
        if not (0.0 < self.min_dt <= self.dt <= self.max_dt):
            raise ValueError(f"need 0 < min_dt <= dt <= max_dt, got "
                             f"({self.min_dt}, {self.dt}, {self.max_dt})")
        if not (0.0 < self.cfl <= 1.0):
            raise ValueError(f"cfl must be in (0,1], got {self.cfl}")
        if self.scheme != "strang_rk2":
            raise ValueError(f"unknown scheme {self.scheme!r}")

    def fixed(self) -> "StepperConfig":
        """Variant with adaptivity off (shared-dt sweep mode)."""
        return replace(self, adaptive=False)


def relax_substep(q_e: Field, p: ModelParams, dt: float) -> Field:
    """Exact solution of dq/dt = -((1+alpha)/epsilon) q^+ over dt.

    Positive values decay by exp(-(1+alpha) dt / epsilon) and never change
    sign; non-positive values are stationary.
    """
    if p.epsilon <= 0.0:
        raise EpsilonZero("relax_substep needs epsilon > 0")
    if dt < 0.0:
        raise ValueError("dt must be >= 0")
    decay = np.exp(-(1.0 + p.alpha) * dt / p.epsilon)
    q = q_e.values
    return Field(q_e.grid, np.where(q > 0.0, q * decay, q))


def limit_projection(q_e: Field) -> Field:
    """Clamp onto the feasible set q_e <= 0 (pointwise min with 0)."""
    return Field(q_e.grid, np.minimum(q_e.values, 0.0))


def _moisture_substep(q_e: Field, p: ModelParams, dt: float) -> Field:
    if p.epsilon > 0.0:
        return relax_substep(q_e, p, dt)
    return limit_projection(q_e)


def _propagate(f: Field, tend: Field | None, nu: float, dt: float,
               tend_weight: float) -> Field:
    """exp(-nu k^2 dt) applied to (f + tend_weight * tend)."""
    if tend is None:
        g = f
    else:
        g = Field(f.grid, f.values + tend_weight * tend.values)
    return heat_propagator(g, nu, dt)


def rk2_core(s: State, p: ModelParams, dt: float) -> State:
    """Integrating-factor midpoint step of the explicit tendencies."""
    t1 = explicit_tendency(s, p)
    h = 0.5 * dt

    def mid(f, df, nu):
        return _propagate(f, df, nu, h, h)

    s_mid = State(
        u=VectorField(mid(s.u.x, t1.du.x, p.mu), mid(s.u.y, t1.du.y, p.mu)),
        v=VectorField(mid(s.v.x, t1.dv.x, p.mu), mid(s.v.y, t1.dv.y, p.mu)),
        T_e=mid(s.T_e, t1.dT_e, p.eta),
        q_e=mid(s.q_e, t1.dq_e, p.eta),
        time=s.time + h,
    )
    t2 = explicit_tendency(s_mid, p)

    def full(f, df, nu):
        a = heat_propagator(f, nu, dt)
        b = heat_propagator(df, nu, h)
        return Field(f.grid, a.values + dt * b.values)

    return State(
        u=VectorField(full(s.u.x, t2.du.x, p.mu), full(s.u.y, t2.du.y, p.mu)),
        v=VectorField(full(s.v.x, t2.dv.x, p.mu), full(s.v.y, t2.dv.y, p.mu)),
        T_e=full(s.T_e, t2.dT_e, p.eta),
        q_e=full(s.q_e, t2.dq_e, p.eta),
        time=s.time + dt,
    )


def max_speed(s: State) -> float:
    sp = (np.hypot(s.u.x.values, s.u.y.values)
          + np.hypot(s.v.x.values, s.v.y.values))
    return float(sp.max())


def _wave_speed(p: ModelParams) -> float:
    # linearized coupling grad(T_e - q_e)/(1+alpha) against the divergence
    # sources supports waves with this speed
    return float(np.sqrt(((1.0 - p.qbar) + (p.qbar + p.alpha)) / (1.0 + p.alpha)))


def choose_dt(s: State, p: ModelParams, cfg: StepperConfig) -> float:
    """Base dt capped by the CFL condition on max(|u|+|v|) plus wave speed."""
    dt = cfg.dt
    if cfg.adaptive:
        speed = max_speed(s) + _wave_speed(p)
        if speed > 0.0:
            dt = min(dt, cfg.cfl * s.grid.dx / speed)
        dt = min(dt, cfg.max_dt)
        if dt < cfg.min_dt:
            raise StepTooSmall(
                f"CFL requires dt={dt:.3e} < min_dt={cfg.min_dt:.3e} at t={s.time:g}")
    return dt


def advance(s: State, p: ModelParams, cfg: StepperConfig, dt: float) -> State:
    """One Strang-split step of length exactly dt."""
    q_half = _moisture_substep(s.q_e, p, 0.5 * dt)
    core = rk2_core(State(s.u, s.v, s.T_e, q_half, s.time), p, dt)
    q_full = _moisture_substep(core.q_e, p, 0.5 * dt)
    out = State(leray_project(core.u), core.v, core.T_e, q_full, s.time + dt)
    if not out.is_finite():
        raise BlowUp("state after step", out.time)
    return out


def step(s: State, p: ModelParams, cfg: StepperConfig) -> State:
    """Advance by one step of length <= cfg.dt (CFL-capped when adaptive)."""
    return advance(s, p, cfg, choose_dt(s, p, cfg))


def run(s0: State, p: ModelParams, cfg: StepperConfig, t_end: float,
        observer=None, checkpoint_path: str | None = None) -> State:
    """March from s0.time to exactly t_end.

    The observer, when given, is called as observer(state, record) for the
    initial state and after every step.  On blow-up the last finite state is
    checkpointed (when a path is given) before the error propagates.
    """
    from .checkpoint import checkpoint_write
    from .diagnostics import compute_record

    if t_end < s0.time:
        raise ValueError(f"t_end={t_end} precedes s0.time={s0.time}")
    s = s0
    if observer is not None:
        observer(s, compute_record(s, p, prev=None, dt_used=0.0, cfl_used=0.0))
    tiny = 1e-12 * max(1.0, abs(t_end))
    while t_end - s.time > tiny:
        try:
            dt = choose_dt(s, p, cfg)
            dt = min(dt, t_end - s.time)  # land exactly on t_end
            s_new = advance(s, p, cfg, dt)
        except BlowUp:
            if checkpoint_path is not None:
                checkpoint_write(s, p, checkpoint_path)
            raise
        if observer is not None:
            cfl_used = (max_speed(s) + _wave_speed(p)) * dt / s.grid.dx
            observer(s_new, compute_record(s_new, p, prev=s,
                                           dt_used=dt, cfl_used=cfl_used))
        s = s_new
    return s
