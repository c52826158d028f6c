"""Explicit right-hand sides of the coupled system.

Only the non-stiff, explicitly-stepped terms appear here: advection, the
baroclinic momentum exchange, the pressure-like coupling grad(T_e - q_e), and
the divergence sources in the T_e / q_e equations.  Viscosity, the eta
diffusivity, and the moisture relaxation sink are handled exactly by the
stepper.  Every quadratic product is 2/3-dealiased.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BlowUp
from .model import ModelParams, State
from .spectral import (Field, VectorField, _check_same_grid, dealias, div,
                       grad, leray_project)


@dataclass
class Tendency:
    du: VectorField
    dv: VectorField
    dT_e: Field
    dq_e: Field


def advect(u: VectorField, f: Field) -> Field:
    """Dealiased convective derivative u . grad f."""
    _check_same_grid(u, f)
    gf = grad(f)
    ux, uy = dealias(u.x), dealias(u.y)
    return dealias(ux * dealias(gf.x) + uy * dealias(gf.y))


def vector_advect(u: VectorField, w: VectorField) -> VectorField:
    """Componentwise (u . grad) w."""
    return VectorField(advect(u, w.x), advect(u, w.y))


def tensor_divergence(v: VectorField, w: VectorField) -> VectorField:
    """Divergence of the outer product: component i is sum_j d_j (v_j w_i)."""
    _check_same_grid(v, w)
    vx, vy = dealias(v.x), dealias(v.y)
    out = []
    for wi in (w.x, w.y):
        wid = dealias(wi)
        flux = VectorField(dealias(vx * wid), dealias(vy * wid))
        out.append(div(flux))
    return VectorField(out[0], out[1])


def _require_finite(f, term: str, time: float):
    if not f.is_finite():
        raise BlowUp(term, time)
    return f


def explicit_tendency(s: State, p: ModelParams) -> Tendency:
    """Assemble the explicit part of the time derivative of (u, v, T_e, q_e).

    du is Leray-projected, so it stays in the divergence-free subspace.
    """
    _check_same_grid(s.u, s.v, s.T_e, s.q_e)
    t = s.time

    du = -leray_project(vector_advect(s.u, s.u) + tensor_divergence(s.v, s.v))
    _require_finite(du, "barotropic momentum tendency", t)

    coupling = grad(s.T_e - s.q_e) * (1.0 / (1.0 + p.alpha))
    dv = -(vector_advect(s.u, s.v) + vector_advect(s.v, s.u)) + coupling
    _require_finite(dv, "baroclinic momentum tendency", t)

    dv_div = div(s.v)
    dT_e = -advect(s.u, s.T_e) + (1.0 - p.qbar) * dv_div
    _require_finite(dT_e, "equivalent-temperature tendency", t)

    dq_e = -advect(s.u, s.q_e) - (p.qbar + p.alpha) * dv_div
    _require_finite(dq_e, "equivalent-moisture tendency", t)

    return Tendency(du=du, dv=dv, dT_e=dT_e, dq_e=dq_e)
