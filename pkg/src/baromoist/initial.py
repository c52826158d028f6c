"""Named analytic initial-condition families.

All families return a State whose barotropic velocity has been Leray
projected.  The sweep and probe experiments require q_e <= 0 initially; the
families either guarantee it by construction ("moist-blob") or can be asked
to enforce it ("random-smooth" shifts q_e so its max is exactly zero).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .model import ModelParams, State
from .spectral import Field, Grid, VectorField, dealias, grad, leray_project

FAMILIES = ("taylor-green", "moist-blob", "random-smooth")


@dataclass(frozen=True)
class InitialSpec:
    family: str = "moist-blob"
    amplitude: float = 0.5              # barotropic velocity scale
    baroclinic_amplitude: float = 0.5   # v scale
    temperature_amplitude: float = 2.0  # T_e scale
    moisture_amplitude: float = 0.02    # |q_e| scale (q_e = -|.| * bump)
    width: float | None = None          # bump width; default L/16
    seed: int = 0
    require_nonpositive_qe: bool = False


def _taylor_green_u(grid: Grid, amplitude: float) -> VectorField:
    k0 = 2.0 * np.pi / grid.length
    ux = amplitude * np.cos(k0 * grid.x) * np.sin(k0 * grid.y)
    uy = -amplitude * np.sin(k0 * grid.x) * np.cos(k0 * grid.y)
    return VectorField(Field(grid, ux * np.ones((grid.n, grid.n))),
                       Field(grid, uy * np.ones((grid.n, grid.n))))


def _bump(grid: Grid, width: float) -> Field:
    cx = cy = 0.5 * grid.length
    r2 = (grid.x - cx) ** 2 + (grid.y - cy) ** 2
    return Field(grid, np.exp(-r2 / (2.0 * width**2)) * np.ones((grid.n, grid.n)))


def _band_limited_noise(grid: Grid, rng: np.random.Generator, k0: float) -> Field:
    white = rng.standard_normal((grid.n, grid.n))
    spec = np.fft.rfft2(white) * np.exp(-(grid.k2 / k0**2))
    spec[0, 0] = 0.0
    f = dealias(Field.from_spec(grid, spec))
    amp = np.abs(f.values).max()
    return f * (1.0 / amp) if amp > 0 else f


def make_initial_state(spec: InitialSpec, grid: Grid, params: ModelParams) -> State:
    if spec.family not in FAMILIES:
        raise ConfigError(f"unknown initial-condition family {spec.family!r}; "
                          f"choose from {FAMILIES}")
    width = spec.width if spec.width is not None else grid.length / 16.0

    if spec.family == "taylor-green":
        u = _taylor_green_u(grid, spec.amplitude)
        s = State(leray_project(u), VectorField.zeros(grid),
                  Field.zeros(grid), Field.zeros(grid))

    elif spec.family == "moist-blob":
        u = _taylor_green_u(grid, spec.amplitude)
        g = _bump(grid, width)
        gg = grad(g)
        v = VectorField(-spec.baroclinic_amplitude * gg.y,
                        spec.baroclinic_amplitude * gg.x)  # perp gradient
        T_e = spec.temperature_amplitude * g
        q_e = -abs(spec.moisture_amplitude) * g
        s = State(leray_project(u), v, T_e, q_e)

    else:  # random-smooth
        rng = np.random.default_rng(spec.seed)
        k0 = 4.0 * 2.0 * np.pi / grid.length
        mk = lambda a: a * _band_limited_noise(grid, rng, k0)
        u = leray_project(VectorField(mk(spec.amplitude), mk(spec.amplitude)))
        v = VectorField(mk(spec.baroclinic_amplitude),
                        mk(spec.baroclinic_amplitude))
        T_e = mk(spec.temperature_amplitude)
        q_e = mk(spec.moisture_amplitude)
        if spec.require_nonpositive_qe:
            q_e = q_e - float(q_e.values.max())
        s = State(u, v, T_e, q_e)

    if spec.require_nonpositive_qe and s.q_e.values.max() > 0.0:
        raise ConfigError(
            f"family {spec.family!r} produced positive initial q_e "
            f"(max {s.q_e.values.max():g}) but q_e<=0 is required")
    return s
