"""Scalar observables: norms, the weighted energy, dissipation, budget defect.

The energy functional is

    E = 1/2 [ ||u||_2^2 + ||v||_2^2 + ||T_e||_2^2 / ((1+alpha)(1-qbar))
              + ||q_e||_2^2 / ((1+alpha)(qbar+alpha)) ]

and the dissipation

    D = mu (||grad u||_2^2 + ||grad v||_2^2) + ||q_e^+||_2^2 / (eps (qbar+alpha)),

with the moisture term read as 0 at epsilon = 0 (the limit keeps q_e <= 0).
For the exact dynamics dE/dt + D = 0; budget_residual measures the discrete
defect of that identity between two consecutive states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch
from .model import ModelParams, State
from .spectral import Field, VectorField, grad

_ENERGY_FLOOR = 1e-30


def lp_norm(f: Field, m: float) -> float:
    """L^m norm by grid quadrature, m in [1, inf)."""
    da = f.grid.cell_area
    return float((np.sum(np.abs(f.values) ** m) * da) ** (1.0 / m))


def norms(f: Field) -> tuple[float, float, float, float]:
    """(l2, l4, h1 seminorm, linf) of a scalar field."""
    da = f.grid.cell_area
    v = f.values
    l2 = float(np.sqrt(np.sum(v * v) * da))
    l4 = float((np.sum(v**4) * da) ** 0.25)
    g = grad(f)
    h1 = float(np.sqrt(np.sum(g.x.values**2 + g.y.values**2) * da))
    linf = float(np.max(np.abs(v)))
    return l2, l4, h1, linf


def vec_l2_sq(w: VectorField) -> float:
    da = w.grid.cell_area
    return float(np.sum(w.x.values**2 + w.y.values**2) * da)


def vec_l4(w: VectorField) -> float:
    da = w.grid.cell_area
    return float((np.sum((w.x.values**2 + w.y.values**2) ** 2) * da) ** 0.25)


def vec_h1_sq(w: VectorField) -> float:
    return (norms(w.x)[2] ** 2 + norms(w.y)[2] ** 2)


def grad_linf(w: VectorField) -> float:
    gx, gy = grad(w.x), grad(w.y)
    mag = np.sqrt(gx.x.values**2 + gx.y.values**2
                  + gy.x.values**2 + gy.y.values**2)
    return float(mag.max())


def spectral_l2(f: Field) -> float:
    """L2 norm via Parseval on the half-spectrum (used to cross-check quadrature)."""
    g = f.grid
    s = f.spec
    w = np.full(s.shape[1], 2.0)
    w[0] = 1.0
    w[-1] = 1.0  # kx = 0 and Nyquist columns are not doubled
    total = np.sum((s.real**2 + s.imag**2) * w[np.newaxis, :])
    return float(np.sqrt(total * g.cell_area / g.n**2))


def qplus_l2_sq(q_e: Field) -> float:
    qp = np.maximum(q_e.values, 0.0)
    return float(np.sum(qp * qp) * q_e.grid.cell_area)


def energy(s: State, p: ModelParams) -> float:
    wT = 1.0 / ((1.0 + p.alpha) * (1.0 - p.qbar))
    wq = 1.0 / ((1.0 + p.alpha) * (p.qbar + p.alpha))
    l2T = np.sum(s.T_e.values**2) * s.grid.cell_area
    l2q = np.sum(s.q_e.values**2) * s.grid.cell_area
    return 0.5 * (vec_l2_sq(s.u) + vec_l2_sq(s.v) + wT * l2T + wq * l2q)


def dissipation(s: State, p: ModelParams) -> float:
    d = p.mu * (vec_h1_sq(s.u) + vec_h1_sq(s.v))
    if p.epsilon > 0.0:
        d += qplus_l2_sq(s.q_e) / (p.epsilon * (p.qbar + p.alpha))
    if p.eta > 0.0:
        # regularized-system variant: the eta terms dissipate too
        d += p.eta * (norms(s.T_e)[2] ** 2 / ((1.0 + p.alpha) * (1.0 - p.qbar))
                      + norms(s.q_e)[2] ** 2 / ((1.0 + p.alpha) * (p.qbar + p.alpha)))
    return d


def budget_residual(s_before: State, s_after: State, p: ModelParams) -> float:
    """Relative defect of the rate identity dE/dt + D = 0 over one step.

    Computed as |(E(after) - E(before))/dt + trapezoid(D)| / max(E(before),
    floor); second-order small per step for the exact dynamics.
    """
    dt = s_after.time - s_before.time
    if dt <= 0.0:
        raise ValueError("states must be consecutive (after.time > before.time)")
    e0, e1 = energy(s_before, p), energy(s_after, p)
    d_tr = 0.5 * (dissipation(s_before, p) + dissipation(s_after, p))
    return abs((e1 - e0) / dt + d_tr) / max(e0, _ENERGY_FLOOR)


def state_distance(a: State, b: State) -> tuple[float, dict, float]:
    """L2 distance over all four unknowns, per-field breakdown, velocity H1 seminorm.

    Requires matching grids and matching times (within 1e-12).
    """
    if a.grid != b.grid:
        raise GridMismatch("states on different grids")
    if abs(a.time - b.time) > 1e-12 * max(1.0, abs(a.time), abs(b.time)):
        raise ValueError(f"state times differ: {a.time} vs {b.time}")
    da = a.grid.cell_area
    by_field = {
        "u": np.sqrt(np.sum((a.u.x.values - b.u.x.values) ** 2
                            + (a.u.y.values - b.u.y.values) ** 2) * da),
        "v": np.sqrt(np.sum((a.v.x.values - b.v.x.values) ** 2
                            + (a.v.y.values - b.v.y.values) ** 2) * da),
        "T_e": np.sqrt(np.sum((a.T_e.values - b.T_e.values) ** 2) * da),
        "q_e": np.sqrt(np.sum((a.q_e.values - b.q_e.values) ** 2) * da),
    }
    by_field = {k: float(x) for k, x in by_field.items()}
    l2_total = float(np.sqrt(sum(x**2 for x in by_field.values())))
    du = VectorField(a.u.x - b.u.x, a.u.y - b.u.y)
    dv = VectorField(a.v.x - b.v.x, a.v.y - b.v.y)
    h1_uv = float(np.sqrt(vec_h1_sq(du) + vec_h1_sq(dv)))
    return l2_total, by_field, h1_uv


@dataclass
class DiagnosticsRecord:
    time: float
    energy: float
    dissipation: float
    budget_residual: float
    l2_u: float
    l2_v: float
    l2_Te: float
    l2_qe: float
    l4_u: float
    l4_v: float
    h1_u: float
    h1_v: float
    h1_Te: float
    h1_qe: float
    qplus_l2_sq_over_eps: float | None  # None for the limiting system
    max_qe: float
    grad_u_linf: float
    cfl_used: float
    dt_used: float

    CSV_FIELDS = ("time", "energy", "dissipation", "budget_residual",
                  "l2_u", "l2_v", "l2_Te", "l2_qe", "l4_u", "l4_v",
                  "h1_u", "h1_v", "h1_Te", "h1_qe",
                  "qplus_l2_sq_over_eps", "max_qe", "grad_u_linf",
                  "cfl_used", "dt_used")


def compute_record(s: State, p: ModelParams, prev: State | None,
                   dt_used: float, cfl_used: float) -> DiagnosticsRecord:
    l2u = float(np.sqrt(vec_l2_sq(s.u)))
    l2v = float(np.sqrt(vec_l2_sq(s.v)))
    l2T, _, h1T, _ = norms(s.T_e)
    l2q, _, h1q, _ = norms(s.q_e)
    qp = qplus_l2_sq(s.q_e) / p.epsilon if p.epsilon > 0.0 else None
    resid = budget_residual(prev, s, p) if prev is not None else 0.0
    return DiagnosticsRecord(
        time=s.time,
        energy=energy(s, p),
        dissipation=dissipation(s, p),
        budget_residual=resid,
        l2_u=l2u, l2_v=l2v, l2_Te=l2T, l2_qe=l2q,
        l4_u=vec_l4(s.u), l4_v=vec_l4(s.v),
        h1_u=float(np.sqrt(vec_h1_sq(s.u))),
        h1_v=float(np.sqrt(vec_h1_sq(s.v))),
        h1_Te=h1T, h1_qe=h1q,
        qplus_l2_sq_over_eps=qp,
        max_qe=float(s.q_e.values.max()),
        grad_u_linf=grad_linf(s.u),
        cfl_used=cfl_used,
        dt_used=dt_used,
    )
