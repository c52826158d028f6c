import numpy as np
import pytest

from baromoist.errors import BlowUp
from baromoist.model import ModelParams, State
from baromoist.spectral import (Field, VectorField, div, grad, leray_project)
from baromoist.tendencies import (advect, explicit_tendency, tensor_divergence,
                                  vector_advect)
from conftest import band_limited, band_limited_vec, inner


P = ModelParams(alpha=0.5, qbar=0.5, epsilon=0.1)


def test_zero_state_zero_tendency(grid):
    t = explicit_tendency(State.zeros(grid), P)
    for f in (t.du.x, t.du.y, t.dv.x, t.dv.y, t.dT_e, t.dq_e):
        assert np.abs(f.values).max() == 0.0


def test_shear_is_stationary_explicitly(grid):
    # (sin y d_x)(sin y, 0) = 0, all other couplings vanish
    one = np.ones((grid.n, grid.n))
    u = VectorField(Field(grid, np.sin(grid.y) * one), Field.zeros(grid))
    s = State(u, VectorField.zeros(grid), Field.zeros(grid), Field.zeros(grid))
    t = explicit_tendency(s, P)
    for f in (t.du.x, t.du.y, t.dv.x, t.dv.y, t.dT_e, t.dq_e):
        assert np.abs(f.values).max() < 1e-12


def test_temperature_gradient_drives_baroclinic(grid):
    one = np.ones((grid.n, grid.n))
    s = State(VectorField.zeros(grid), VectorField.zeros(grid),
              Field(grid, np.sin(grid.x) * one), Field.zeros(grid))
    t = explicit_tendency(s, P)
    expect = np.cos(grid.x) / (1.0 + P.alpha)
    assert np.abs(t.dv.x.values - expect).max() < 1e-12
    assert np.abs(t.dv.y.values).max() < 1e-12
    assert np.abs(t.dT_e.values).max() < 1e-12
    assert np.abs(t.dq_e.values).max() < 1e-12


class TestAdvect:
    def test_constant_field(self, grid):
        u = band_limited_vec(grid, 1)
        f = Field(grid, np.full((grid.n, grid.n), 3.0))
        assert np.abs(advect(u, f).values).max() < 1e-12

    def test_zero_velocity(self, grid):
        assert np.abs(advect(VectorField.zeros(grid),
                             band_limited(grid, 2)).values).max() == 0.0

    def test_uniform_flow(self, grid):
        one = np.ones((grid.n, grid.n))
        u = VectorField(Field(grid, one), Field.zeros(grid))
        f = Field(grid, np.sin(grid.x) * one)
        assert np.abs(advect(u, f).values - np.cos(grid.x)).max() < 1e-12


class TestVectorAdvect:
    def test_constant(self, grid):
        u = band_limited_vec(grid, 3)
        w = VectorField(Field(grid, np.full((grid.n, grid.n), 1.0)),
                        Field(grid, np.full((grid.n, grid.n), -2.0)))
        out = vector_advect(u, w)
        assert np.abs(out.x.values).max() < 1e-12
        assert np.abs(out.y.values).max() < 1e-12

    def test_uniform_flow(self, grid):
        one = np.ones((grid.n, grid.n))
        u = VectorField(Field(grid, one), Field.zeros(grid))
        w = VectorField(Field(grid, np.sin(grid.x) * one), Field.zeros(grid))
        out = vector_advect(u, w)
        assert np.abs(out.x.values - np.cos(grid.x)).max() < 1e-12
        assert np.abs(out.y.values).max() < 1e-12

    def test_skew_symmetry(self, grid):
        u = leray_project(band_limited_vec(grid, 5))
        w = band_limited_vec(grid, 7)
        aw = vector_advect(u, w)
        val = inner(aw.x, w.x) + inner(aw.y, w.y)
        scale = max(1.0, inner(w.x, w.x) + inner(w.y, w.y))
        assert abs(val) < 1e-10 * scale


class TestTensorDivergence:
    def test_zero(self, grid):
        out = tensor_divergence(VectorField.zeros(grid), band_limited_vec(grid, 9))
        assert np.abs(out.x.values).max() == 0.0

    def test_matches_convective_form_for_divfree(self, grid):
        v = leray_project(band_limited_vec(grid, 11))
        w = band_limited_vec(grid, 13)
        a = tensor_divergence(v, w)
        b = vector_advect(v, w)
        scale = max(np.abs(b.x.values).max(), np.abs(b.y.values).max(), 1.0)
        assert np.abs(a.x.values - b.x.values).max() < 1e-10 * scale
        assert np.abs(a.y.values - b.y.values).max() < 1e-10 * scale

    def test_analytic_square(self, grid):
        one = np.ones((grid.n, grid.n))
        v = VectorField(Field(grid, np.sin(grid.x) * one), Field.zeros(grid))
        out = tensor_divergence(v, v)
        assert np.abs(out.x.values - np.sin(2 * grid.x)).max() < 1e-12
        assert np.abs(out.y.values).max() < 1e-12


def test_energy_neutral_advection_pair(grid):
    u = leray_project(band_limited_vec(grid, 15))
    v = band_limited_vec(grid, 17)
    tdiv = tensor_divergence(v, v)
    vadv = vector_advect(v, u)
    val = (inner(tdiv.x, u.x) + inner(tdiv.y, u.y)
           + inner(vadv.x, v.x) + inner(vadv.y, v.y))
    scale = max(1.0, inner(u.x, u.x) + inner(u.y, u.y))
    assert abs(val) < 1e-9 * scale


def test_pressure_coupling_duality(grid):
    f = band_limited(grid, 19)  # stands for T_e - q_e
    v = band_limited_vec(grid, 21)
    gf = grad(f)
    lhs = inner(gf.x, v.x) + inner(gf.y, v.y)
    rhs = -inner(f, div(v))
    assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))


def test_du_divergence_free(grid):
    s = State(leray_project(band_limited_vec(grid, 23)),
              band_limited_vec(grid, 25), band_limited(grid, 27),
              band_limited(grid, 29))
    t = explicit_tendency(s, P)
    d = div(t.du)
    scale = max(1.0, np.abs(t.du.x.values).max())
    assert np.abs(d.values).max() < 1e-10 * scale


def test_blowup_detection(grid):
    bad = Field(grid, np.full((grid.n, grid.n), np.nan))
    s = State(VectorField.zeros(grid), VectorField.zeros(grid), bad,
              Field.zeros(grid))
    with pytest.raises(BlowUp, match="baroclinic momentum"):
        explicit_tendency(s, P)
