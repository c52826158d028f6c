import numpy as np
import pytest

from baromoist.diagnostics import (budget_residual, compute_record, dissipation,
                                   energy, grad_linf, lp_norm, norms,
                                   qplus_l2_sq, state_distance, vec_l2_sq)
from baromoist.errors import GridMismatch
from baromoist.model import ModelParams, State
from baromoist.spectral import Field, Grid, VectorField, heat_propagator_vec
from conftest import band_limited, band_limited_vec


P = ModelParams(alpha=0.5, qbar=0.5, epsilon=0.1)
AREA = (2.0 * np.pi) ** 2


class TestNorms:
    def test_constant(self, grid):
        f = Field(grid, np.full((grid.n, grid.n), 2.0))
        l2, l4, h1, linf = norms(f)
        assert l2 == pytest.approx(2.0 * np.sqrt(AREA), rel=1e-13)
        assert l4 == pytest.approx(2.0 * AREA**0.25, rel=1e-13)
        assert h1 < 1e-12
        assert linf == 2.0

    def test_sin_x(self, grid):
        # ||sin x||_2^2 = (1/2)(2 pi)^2 = 2 pi^2 over the square torus
        f = Field(grid, np.sin(grid.x) * np.ones((grid.n, grid.n)))
        l2, _, h1, linf = norms(f)
        assert l2 == pytest.approx(np.sqrt(2.0) * np.pi, rel=1e-12)
        assert h1 == pytest.approx(np.sqrt(2.0) * np.pi, rel=1e-12)
        assert linf == pytest.approx(1.0, rel=1e-12)

    def test_lp_norm_interpolates(self, grid):
        f = band_limited(grid, 1)
        assert lp_norm(f, 2.0) == pytest.approx(norms(f)[0], rel=1e-12)
        assert lp_norm(f, 4.0) == pytest.approx(norms(f)[1], rel=1e-12)

    def test_grad_linf_shear(self, grid):
        w = VectorField(Field(grid, np.sin(grid.y) * np.ones((grid.n, grid.n))),
                        Field.zeros(grid))
        assert grad_linf(w) == pytest.approx(1.0, rel=1e-10)


class TestEnergy:
    def test_zero(self, grid):
        assert energy(State.zeros(grid), P) == 0.0

    def test_uniform_fields(self, grid):
        # constants c in every slot: E = A c^2 / 2 * (2 + wT + wq)
        c = 0.5
        one = np.full((grid.n, grid.n), c)
        s = State(VectorField(Field(grid, one), Field.zeros(grid)),
                  VectorField(Field(grid, one), Field.zeros(grid)),
                  Field(grid, one), Field(grid, one))
        wT = 1.0 / (1.5 * 0.5)
        wq = 1.0 / (1.5 * 1.0)
        expect = 0.5 * AREA * c**2 * (2.0 + wT + wq)
        assert energy(s, P) == pytest.approx(expect, rel=1e-13)

    def test_weights_depend_on_params(self, grid):
        s = State(VectorField.zeros(grid), VectorField.zeros(grid),
                  Field(grid, np.ones((grid.n, grid.n))), Field.zeros(grid))
        e1 = energy(s, ModelParams(alpha=0.5, qbar=0.5, epsilon=0.1))
        e2 = energy(s, ModelParams(alpha=0.5, qbar=0.9, epsilon=0.1))
        assert e2 == pytest.approx(5.0 * e1, rel=1e-12)


class TestDissipation:
    def test_shear_viscous(self, grid):
        # u = (sin y, 0): ||grad u||^2 = 2 pi^2, D = mu * 2 pi^2
        s = State(VectorField(Field(grid, np.sin(grid.y) * np.ones((grid.n, grid.n))),
                              Field.zeros(grid)),
                  VectorField.zeros(grid), Field.zeros(grid), Field.zeros(grid))
        assert dissipation(s, P) == pytest.approx(P.mu * 2.0 * np.pi**2, rel=1e-12)

    def test_moisture_term(self, grid):
        s = State.zeros(grid)
        s.q_e = Field(grid, np.full((grid.n, grid.n), 2.0))
        # ||q+||^2 / (eps (qbar+alpha)) = 4 A / (0.1 * 1.0)
        assert dissipation(s, P) == pytest.approx(40.0 * AREA, rel=1e-12)

    def test_limit_drops_moisture_term(self, grid):
        s = State.zeros(grid)
        s.q_e = Field(grid, np.full((grid.n, grid.n), -1.0))
        p0 = ModelParams(alpha=0.5, qbar=0.5, epsilon=0.0)
        assert dissipation(s, p0) == 0.0

    def test_qplus_ignores_negative(self, grid):
        q = Field(grid, np.sin(grid.x) * np.ones((grid.n, grid.n)))
        # integral of sin^2 over the half where sin > 0
        assert qplus_l2_sq(q) == pytest.approx(np.pi**2, rel=1e-10)


class TestBudgetResidual:
    def test_pure_diffusion_second_order(self, grid):
        # exact heat flow between samples: defect of the trapezoid rate
        # identity shrinks ~4x when dt halves
        u0 = band_limited_vec(grid, 5)
        def resid(dt):
            s0 = State(u0, VectorField.zeros(grid), Field.zeros(grid),
                       Field.zeros(grid), time=0.0)
            u1 = heat_propagator_vec(u0, P.mu, dt)
            s1 = State(u1, VectorField.zeros(grid), Field.zeros(grid),
                       Field.zeros(grid), time=dt)
            return budget_residual(s0, s1, P)
        r1, r2 = resid(2e-3), resid(1e-3)
        assert 3.5 < r1 / r2 < 4.5

    def test_requires_increasing_time(self, grid):
        s = State.zeros(grid)
        with pytest.raises(ValueError):
            budget_residual(s, s, P)

    def test_time_origin_invariance(self, grid):
        u0 = band_limited_vec(grid, 7)
        def resid(t0):
            dt = 1e-3
            s0 = State(u0, VectorField.zeros(grid), Field.zeros(grid),
                       Field.zeros(grid), time=t0)
            s1 = State(heat_propagator_vec(u0, P.mu, dt), VectorField.zeros(grid),
                       Field.zeros(grid), Field.zeros(grid), time=t0 + dt)
            return budget_residual(s0, s1, P)
        assert resid(0.0) == pytest.approx(resid(5.0), rel=1e-9)


class TestStateDistance:
    def test_identical_states(self, grid):
        s = State(band_limited_vec(grid, 9), band_limited_vec(grid, 11),
                  band_limited(grid, 13), band_limited(grid, 15))
        tot, by_field, h1 = state_distance(s, s)
        assert tot == 0.0 and h1 == 0.0
        assert all(x == 0.0 for x in by_field.values())

    def test_single_field_difference(self, grid):
        a = State.zeros(grid)
        b = State.zeros(grid)
        b.T_e = Field(grid, np.full((grid.n, grid.n), 1.0))
        tot, by_field, h1 = state_distance(a, b)
        assert tot == pytest.approx(np.sqrt(AREA), rel=1e-13)
        assert by_field["T_e"] == pytest.approx(np.sqrt(AREA), rel=1e-13)
        assert by_field["u"] == 0.0
        assert h1 < 1e-12

    def test_symmetry_and_pythagoras(self, grid):
        a = State(band_limited_vec(grid, 17), band_limited_vec(grid, 19),
                  band_limited(grid, 21), band_limited(grid, 23))
        b = State.zeros(grid)
        t_ab, bf, _ = state_distance(a, b)
        t_ba, _, _ = state_distance(b, a)
        assert t_ab == pytest.approx(t_ba, rel=1e-14)
        assert t_ab == pytest.approx(np.sqrt(sum(x**2 for x in bf.values())),
                                     rel=1e-14)

    def test_grid_mismatch(self, grid):
        with pytest.raises(GridMismatch):
            state_distance(State.zeros(grid), State.zeros(Grid(16, 2 * np.pi)))

    def test_time_mismatch(self, grid):
        with pytest.raises(ValueError):
            state_distance(State.zeros(grid, time=0.0),
                           State.zeros(grid, time=1.0))


class TestRecord:
    def test_zero_state(self, grid):
        r = compute_record(State.zeros(grid), P, None, dt_used=1e-3,
                           cfl_used=0.1)
        assert r.energy == 0.0 and r.dissipation == 0.0
        assert r.budget_residual == 0.0
        assert r.qplus_l2_sq_over_eps == 0.0
        assert r.dt_used == 1e-3 and r.cfl_used == 0.1

    def test_limit_record_has_none_qplus(self, grid):
        p0 = ModelParams(alpha=0.5, qbar=0.5, epsilon=0.0)
        s = State.zeros(grid)
        s.q_e = Field(grid, np.full((grid.n, grid.n), -0.25))
        r = compute_record(s, p0, None, dt_used=1e-3, cfl_used=0.0)
        assert r.qplus_l2_sq_over_eps is None
        assert r.max_qe == -0.25

    def test_field_order_stable(self):
        from baromoist.diagnostics import DiagnosticsRecord
        assert DiagnosticsRecord.CSV_FIELDS[0] == "time"
        assert DiagnosticsRecord.CSV_FIELDS[-1] == "dt_used"
        assert len(DiagnosticsRecord.CSV_FIELDS) == 19

    def test_norm_columns_consistent(self, grid):
        s = State(band_limited_vec(grid, 25), band_limited_vec(grid, 27),
                  band_limited(grid, 29), band_limited(grid, 31))
        r = compute_record(s, P, None, dt_used=1e-3, cfl_used=0.2)
        assert r.l2_u == pytest.approx(np.sqrt(vec_l2_sq(s.u)), rel=1e-13)
        assert r.l2_Te == pytest.approx(norms(s.T_e)[0], rel=1e-13)
        assert r.max_qe == s.q_e.values.max()
