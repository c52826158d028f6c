"""Model state, parameter validation, variable conversions, precipitation closure.

The prognostic unknowns are the barotropic velocity u (divergence-free), the
first-baroclinic velocity v, the equivalent temperature T_e and the equivalent
moisture q_e.  The physical pair (theta, q) exists only through the linear
change of variables

    T_e = q + theta,        q_e = q - alpha*theta - qhat,

whose inverse requires 1 + alpha > 0 (guaranteed by the parameter constraints
0 < qbar < 1 and alpha + qbar > 0).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConstraintViolation, EpsilonZero, GridMismatch
from .spectral import Field, Grid, VectorField, div, _check_same_grid


@dataclass(frozen=True)
class ModelParams:
    """Physical and numerical parameters.

    epsilon = 0 selects the limiting (instantaneous-adjustment) system; the
    stepper dispatches on it.  eta is the optional extra diffusivity acting on
    T_e and q_e; qhat enters only the (theta, q) conversions.
    """

    alpha: float
    qbar: float
    epsilon: float
    qhat: float = 1.0
    mu: float = 1.0
    eta: float = 0.0

    def with_epsilon(self, epsilon: float) -> "ModelParams":
        return replace(self, epsilon=epsilon)


def validate_params(p: ModelParams) -> ModelParams:
    """Return p unchanged iff every admissibility constraint holds."""
    if not (0.0 < p.qbar < 1.0):
        raise ConstraintViolation(f"qbar not in (0,1): qbar={p.qbar}")
    if not (p.alpha + p.qbar > 0.0):
        raise ConstraintViolation(f"alpha+qbar<=0: alpha={p.alpha}, qbar={p.qbar}")
    if not (p.epsilon >= 0.0):
        raise ConstraintViolation(f"epsilon<0: epsilon={p.epsilon}")
    if not (p.mu > 0.0):
        raise ConstraintViolation(f"mu<=0: mu={p.mu}")
    if not (p.eta >= 0.0):
        raise ConstraintViolation(f"eta<0: eta={p.eta}")
    return p


@dataclass
class State:
    """Solution tuple (u, v, T_e, q_e) at one time instant."""

    u: VectorField
    v: VectorField
    T_e: Field
    q_e: Field
    time: float = 0.0

    @property
    def grid(self) -> Grid:
        return _check_same_grid(self.u, self.v, self.T_e, self.q_e)

    @classmethod
    def zeros(cls, grid: Grid, time: float = 0.0) -> "State":
        return cls(VectorField.zeros(grid), VectorField.zeros(grid),
                   Field.zeros(grid), Field.zeros(grid), time)

    def copy(self) -> "State":
        return State(self.u.copy(), self.v.copy(), self.T_e.copy(),
                     self.q_e.copy(), self.time)

    def is_finite(self) -> bool:
        return (self.u.is_finite() and self.v.is_finite()
                and self.T_e.is_finite() and self.q_e.is_finite())

    def divergence_defect(self) -> float:
        """||div u||_2 relative to max(1, ||u||_2), by grid quadrature."""
        da = self.grid.cell_area
        d = np.sqrt(np.sum(div(self.u).values ** 2) * da)
        nu = np.sqrt(np.sum(self.u.x.values ** 2 + self.u.y.values ** 2) * da)
        return d / max(1.0, nu)


@dataclass
class PhysicalVars:
    """First-baroclinic potential temperature theta and moisture q."""

    theta: Field
    q: Field


def to_equivalent(phys: PhysicalVars, p: ModelParams) -> tuple[Field, Field]:
    """(theta, q) -> (T_e, q_e)."""
    if phys.theta.grid != phys.q.grid:
        raise GridMismatch("theta and q on different grids")
    T_e = phys.q + phys.theta
    q_e = phys.q - p.alpha * phys.theta - p.qhat
    return T_e, q_e


def from_equivalent(T_e: Field, q_e: Field, p: ModelParams) -> PhysicalVars:
    """(T_e, q_e) -> (theta, q); needs 1 + alpha > 0."""
    if T_e.grid != q_e.grid:
        raise GridMismatch("T_e and q_e on different grids")
    c = 1.0 / (1.0 + p.alpha)
    theta = (T_e - q_e - p.qhat) * c
    q = (p.alpha * T_e + q_e + p.qhat) * c
    return PhysicalVars(theta=theta, q=q)


def precipitation(q_e: Field, p: ModelParams, tendency_scaling: bool = True) -> Field:
    """Relaxation sink (1+alpha)/epsilon * max(q_e, 0).

    With tendency_scaling=False returns the raw precipitation rate
    q_e^+ / epsilon instead (the two differ by the factor 1+alpha; the q_e
    tendency uses the former).
    """
    if p.epsilon <= 0.0:
        raise EpsilonZero("precipitation undefined at epsilon=0; the limit "
                          "solver enforces q_e<=0 by projection instead")
    scale = (1.0 + p.alpha) / p.epsilon if tendency_scaling else 1.0 / p.epsilon
    return Field(q_e.grid, scale * np.maximum(q_e.values, 0.0))


def reconstruct_3d(state: State, z: float, H: float,
                   p: ModelParams) -> tuple[VectorField, Field, Field]:
    """Evaluate the vertical-mode ansatz at height z in [0, H].

    V = u + v*sqrt(2)*cos(pi z/H); W = w*sqrt(2)*sin(pi z/H) with
    w = -(H/pi)*div(v); Theta = theta*sqrt(2)*sin(pi z/H).
    """
    if H <= 0:
        raise ValueError(f"layer depth must be positive, got {H}")
    if not (0.0 <= z <= H):
        raise ValueError(f"z={z} outside [0, {H}]")
    c = np.sqrt(2.0) * np.cos(np.pi * z / H)
    s = np.sqrt(2.0) * np.sin(np.pi * z / H)
    V = state.u + state.v * c
    w = div(state.v) * (-H / np.pi)
    theta = from_equivalent(state.T_e, state.q_e, p).theta
    return V, w * s, theta * s
