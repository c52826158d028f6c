"""Experiment harnesses: single runs, the epsilon sweep, the continuous
dependence probe, the validation suite, and CSV persistence.

All CSV numbers are written with 17 significant digits so post-processing is
bit-faithful, and every harness is deterministic for a fixed configuration.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .checkpoint import checkpoint_write
from .config import ExperimentConfig
from .diagnostics import (DiagnosticsRecord, qplus_l2_sq, state_distance,
                          vec_h1_sq)
from .errors import BaromoistError, BlowUp
from .initial import InitialSpec, make_initial_state
from .model import ModelParams, State
from .spectral import Field, Grid, VectorField, grad, leray_project
from .stepper import StepperConfig, run


def fmt(x: float) -> str:
    return f"{x:.16e}"


def write_series_csv(path, records: list[DiagnosticsRecord]) -> None:
    lines = [",".join(DiagnosticsRecord.CSV_FIELDS)]
    for r in records:
        row = []
        for name in DiagnosticsRecord.CSV_FIELDS:
            val = getattr(r, name)
            row.append("" if val is None else fmt(val))
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


@dataclass
class RunResult:
    final_state: State
    records: list[DiagnosticsRecord]          # sampled every record_stride
    sampled_states: list[State] | None        # kept only when requested
    sup_qplus_over_eps: float = 0.0
    int_qplus_over_eps: float = 0.0           # trapezoid over all steps


def run_single(cfg: ExperimentConfig, epsilon: float | None = None,
               out_dir: str | None = None,
               keep_states: bool = False,
               initial_state: State | None = None,
               stepper: StepperConfig | None = None,
               t_end: float | None = None,
               require_nonpositive_qe: bool = False) -> RunResult:
    """One simulation; writes series.csv and a final checkpoint when out_dir is set."""
    params = cfg.params(epsilon)
    grid = cfg.grid()
    if initial_state is None:
        ic = InitialSpec(**{**cfg.ic.__dict__,
                            "require_nonpositive_qe": require_nonpositive_qe})
        initial_state = make_initial_state(ic, grid, params)
    scfg = stepper if stepper is not None else cfg.stepper
    horizon = cfg.t_end if t_end is None else t_end

    records: list[DiagnosticsRecord] = []
    states: list[State] | None = [] if keep_states else None
    acc = {"n": 0, "sup_qp": 0.0, "int_qp": 0.0, "last_qp": None, "last_t": None}

    def observer(s: State, rec: DiagnosticsRecord):
        i = acc["n"]
        acc["n"] = i + 1
        if params.epsilon > 0.0:
            qp = qplus_l2_sq(s.q_e) / params.epsilon
            acc["sup_qp"] = max(acc["sup_qp"], qp)
            if acc["last_qp"] is not None:
                acc["int_qp"] += 0.5 * (qp + acc["last_qp"]) * (s.time - acc["last_t"])
            acc["last_qp"], acc["last_t"] = qp, s.time
        if i % cfg.record_stride == 0:
            records.append(rec)
            if states is not None:
                states.append(s.copy())

    ckpt = None
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        ckpt = os.path.join(out_dir, "blowup.ckpt")
    final = run(initial_state, params, scfg, horizon,
                observer=observer, checkpoint_path=ckpt)
    # always sample the final state
    if (acc["n"] - 1) % cfg.record_stride != 0:
        from .diagnostics import compute_record
        records.append(compute_record(final, params, prev=None,
                                      dt_used=scfg.dt, cfl_used=0.0))
        if states is not None:
            states.append(final.copy())
    if out_dir is not None:
        write_series_csv(os.path.join(out_dir, "series.csv"), records)
        checkpoint_write(final, params,
                         os.path.join(out_dir, f"state_t{final.time:g}.ckpt"))
    return RunResult(final_state=final, records=records, sampled_states=states,
                     sup_qplus_over_eps=acc["sup_qp"],
                     int_qplus_over_eps=acc["int_qp"])


@dataclass
class RateRow:
    epsilon: float
    sup_l2_distance: float
    int_h1_velocity_distance_sq: float
    int_qplus_l2_sq_over_eps: float
    sup_qplus_l2_sq_over_eps: float
    status: str = "ok"


@dataclass
class RateReport:
    rows: list[RateRow]
    slope: float | None           # log sup-distance vs log epsilon
    slope_residual: float | None  # least-squares residual of the fit
    qplus_slope: float | None     # log int q+ dissipation vs log epsilon


def _loglog_fit(xs, ys):
    lx, ly = np.log(xs), np.log(ys)
    coef, res = np.polyfit(lx, ly, 1, full=True)[:2]
    resid = float(res[0]) if len(res) else 0.0
    return float(coef[0]), resid


def epsilon_sweep(cfg: ExperimentConfig, out_dir: str | None = None) -> RateReport:
    """Limit run plus one run per epsilon; distances sampled at matched times.

    Sweep runs share one fixed dt (adaptivity off) so sample times align
    exactly between the relaxed runs and the limit run.
    """
    scfg = cfg.stepper.fixed()
    grid = cfg.grid()
    ic = InitialSpec(**{**cfg.ic.__dict__, "require_nonpositive_qe": True})
    s0 = make_initial_state(ic, grid, cfg.params(cfg.epsilon_list[0]))

    limit_dir = os.path.join(out_dir, "limit") if out_dir else None
    limit = run_single(cfg, epsilon=0.0, out_dir=limit_dir, keep_states=True,
                       initial_state=s0.copy(), stepper=scfg)
    limit_states = limit.sampled_states

    rows: list[RateRow] = []
    for eps in cfg.epsilon_list:
        run_dir = os.path.join(out_dir, f"eps_{eps:g}") if out_dir else None
        try:
            res = run_single(cfg, epsilon=eps, out_dir=run_dir, keep_states=True,
                             initial_state=s0.copy(), stepper=scfg)
        except BaromoistError as exc:
            rows.append(RateRow(eps, float("nan"), float("nan"), float("nan"),
                                float("nan"), status=f"failed: {exc}"))
            continue
        sup_d = 0.0
        h1_sq = []
        times = []
        for sa, sb in zip(res.sampled_states, limit_states):
            d, _, _ = state_distance(sa, sb)
            sup_d = max(sup_d, d)
            du = VectorField(sa.u.x - sb.u.x, sa.u.y - sb.u.y)
            dv = VectorField(sa.v.x - sb.v.x, sa.v.y - sb.v.y)
            h1_sq.append(vec_h1_sq(du) + vec_h1_sq(dv))
            times.append(sa.time)
        int_h1 = float(np.trapezoid(h1_sq, times))
        rows.append(RateRow(eps, sup_d, int_h1,
                            res.int_qplus_over_eps, res.sup_qplus_over_eps))

    ok = [r for r in rows if r.status == "ok"]
    slope = resid = qslope = None
    if len(ok) >= 2:
        slope, resid = _loglog_fit([r.epsilon for r in ok],
                                   [max(r.sup_l2_distance, 1e-300) for r in ok])
        qslope, _ = _loglog_fit([r.epsilon for r in ok],
                                [max(r.int_qplus_l2_sq_over_eps, 1e-300) for r in ok])
    report = RateReport(rows=rows, slope=slope, slope_residual=resid,
                        qplus_slope=qslope)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_rates(report, out_dir)
    return report


RATES_HEADER = ("epsilon,sup_l2_distance,int_h1_velocity_distance_sq,"
                "int_qplus_l2_sq_over_eps,sup_qplus_l2_sq_over_eps,status")


def write_rates(report: RateReport, out_dir) -> None:
    lines = [RATES_HEADER]
    for r in report.rows:
        lines.append(",".join([fmt(r.epsilon), fmt(r.sup_l2_distance),
                               fmt(r.int_h1_velocity_distance_sq),
                               fmt(r.int_qplus_l2_sq_over_eps),
                               fmt(r.sup_qplus_l2_sq_over_eps), r.status]))
    with open(os.path.join(out_dir, "rates.csv"), "w", encoding="utf-8",
              newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    with open(os.path.join(out_dir, "rates.txt"), "w", encoding="utf-8",
              newline="\n") as fh:
        fh.write("relaxation-limit convergence study\n")
        fh.write(f"rows: {len(report.rows)}\n")
        if report.slope is None:
            fh.write("slope: undefined (need >= 2 successful rows)\n")
        else:
            fh.write(f"sup-distance slope vs epsilon: {report.slope:.6f} "
                     f"(residual {report.slope_residual:.3e}, expected ~0.5)\n")
            fh.write(f"relaxation-dissipation slope vs epsilon: "
                     f"{report.qplus_slope:.6f} (expected ~1)\n")


@dataclass
class ProbeRow:
    delta0: float
    initial_distance: float
    sup_distance: float
    amplification: float


def _perturbation(grid: Grid) -> tuple[VectorField, Field, Field]:
    """Fixed smooth perturbation: rotational bump in u, warm bump in T_e,
    and a dry (negative) bump in q_e so epsilon=0 feasibility is preserved."""
    width = grid.length / 12.0
    cx, cy = 0.3 * grid.length, 0.6 * grid.length
    r2 = (grid.x - cx) ** 2 + (grid.y - cy) ** 2
    psi = Field(grid, np.exp(-r2 / (2.0 * width**2)) * np.ones((grid.n, grid.n)))
    g = grad(psi)
    du = leray_project(VectorField(-g.y, g.x))
    return du, psi, -1.0 * psi


def continuous_dependence_probe(cfg: ExperimentConfig,
                                deltas: list[float] | None = None,
                                out_dir: str | None = None) -> list[ProbeRow]:
    deltas = deltas if deltas is not None else cfg.probe_deltas
    scfg = cfg.stepper.fixed()
    grid = cfg.grid()
    params = cfg.params()
    s0 = make_initial_state(cfg.ic, grid, params)
    base = run_single(cfg, out_dir=None, keep_states=True,
                      initial_state=s0.copy(), stepper=scfg)
    du, dT, dq = _perturbation(grid)

    rows = []
    for d0 in deltas:
        sp = State(leray_project(s0.u + d0 * du), s0.v.copy(),
                   s0.T_e + d0 * dT, s0.q_e + d0 * dq, s0.time)
        res = run_single(cfg, out_dir=None, keep_states=True,
                         initial_state=sp, stepper=scfg)
        dist0, _, _ = state_distance(res.sampled_states[0], base.sampled_states[0])
        sup_d = max(state_distance(a, b)[0] for a, b in
                    zip(res.sampled_states, base.sampled_states))
        amp = sup_d / dist0 if dist0 > 0 else float("inf") if sup_d > 0 else 0.0
        rows.append(ProbeRow(d0, dist0, sup_d, amp))

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        lines = ["delta0,initial_distance,sup_distance,amplification"]
        for r in rows:
            lines.append(",".join(map(fmt, (r.delta0, r.initial_distance,
                                            r.sup_distance, r.amplification))))
        with open(os.path.join(out_dir, "probe.csv"), "w", encoding="utf-8",
                  newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    return rows


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


def validation_suite(level: str = "quick") -> list[Check]:
    """Analytic regression checks; 'full' raises resolution and tightens dt."""
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")
    n = 64 if level == "quick" else 128
    checks: list[Check] = []

    params = ModelParams(alpha=0.5, qbar=0.5, epsilon=0.05)
    small = Grid(n, 2.0 * np.pi)

    # zero state is a fixed point
    s = State.zeros(small)
    scfg = StepperConfig(dt=1e-2, adaptive=False)
    out = run(s, params, scfg, 0.1)
    mags = [np.abs(out.u.x.values).max(), np.abs(out.v.x.values).max(),
            np.abs(out.T_e.values).max(), np.abs(out.q_e.values).max()]
    checks.append(Check("zero-state fixed point", max(mags) == 0.0,
                        f"max field magnitude {max(mags):.2e}"))

    # projector invariants on a random band-limited field
    rng = np.random.default_rng(7)
    from .spectral import dealias, div
    w = VectorField(dealias(Field(small, rng.standard_normal((n, n)))),
                    dealias(Field(small, rng.standard_normal((n, n)))))
    pw = leray_project(w)
    ppw = leray_project(pw)
    da = small.cell_area
    idem = np.sqrt(np.sum((ppw.x.values - pw.x.values) ** 2
                          + (ppw.y.values - pw.y.values) ** 2) * da)
    dfree = np.sqrt(np.sum(div(pw).values ** 2) * da)
    scale = max(1.0, np.sqrt(np.sum(w.x.values**2 + w.y.values**2) * da))
    ok = idem / scale < 1e-10 and dfree / scale < 1e-10
    checks.append(Check("Leray projector idempotent and divergence-free", ok,
                        f"idempotence {idem/scale:.2e}, divergence {dfree/scale:.2e}"))

    # decaying shear: exactly representable, so the step is exact up to round-off
    a = 0.7
    shear = State(
        u=VectorField(Field(small, a * np.sin(small.y) * np.ones((n, n))),
                      Field.zeros(small)),
        v=VectorField.zeros(small), T_e=Field.zeros(small), q_e=Field.zeros(small))
    t_end = 0.25
    out = run(shear, params, StepperConfig(dt=1e-3, adaptive=False), t_end)
    exact = a * np.exp(-params.mu * t_end) * np.sin(small.y) * np.ones((n, n))
    err = np.sqrt(np.sum((out.u.x.values - exact) ** 2) * da)
    checks.append(Check("decaying shear matches exp(-mu t)", err < 1e-10,
                        f"L2 error {err:.2e}"))

    # Taylor-Green vortex (thresholds from the dt^2 error model, frozen)
    tg_err = taylor_green_error(n=64, dt=1e-3, t_end=0.5, mu=1.0)
    checks.append(Check("Taylor-Green regression", tg_err < 1e-4,
                        f"L2 error {tg_err:.2e} (threshold 1e-4)"))

    # energy-budget refinement on a moist blob
    cfg = ExperimentConfig(grid_n=n, t_end=0.5 if level == "quick" else 1.0)
    ratios = budget_refinement_ratios(cfg, epsilon=0.05,
                                      dts=(4e-3, 2e-3, 1e-3))
    lo, hi = (2.5, 6.0) if level == "quick" else (3.0, 5.0)
    ok = all(lo <= r <= hi for r in ratios)
    checks.append(Check("energy-budget residual refinement", ok,
                        f"halving ratios {[f'{r:.2f}' for r in ratios]} "
                        f"window [{lo},{hi}]"))

    # limit solver feasibility
    res = run_single(cfg, epsilon=0.0, keep_states=False,
                     require_nonpositive_qe=True,
                     stepper=StepperConfig(dt=2e-3, adaptive=False), t_end=0.2)
    max_qe = max(r.max_qe for r in res.records)
    checks.append(Check("limit solver keeps q_e <= 0", max_qe <= 0.0,
                        f"max q_e {max_qe:.2e}"))
    return checks


def taylor_green_error(n: int, dt: float, t_end: float, mu: float) -> float:
    """L2 error of the decaying Taylor-Green vortex on the 2*pi torus."""
    grid = Grid(n, 2.0 * np.pi)
    params = ModelParams(alpha=0.5, qbar=0.5, epsilon=0.05, mu=mu)
    ux = np.cos(grid.x) * np.sin(grid.y) * np.ones((n, n))
    uy = -np.sin(grid.x) * np.cos(grid.y) * np.ones((n, n))
    s = State(VectorField(Field(grid, ux), Field(grid, uy)),
              VectorField.zeros(grid), Field.zeros(grid), Field.zeros(grid))
    out = run(s, params, StepperConfig(dt=dt, adaptive=False), t_end)
    decay = np.exp(-2.0 * mu * t_end)
    err2 = (np.sum((out.u.x.values - decay * ux) ** 2
                   + (out.u.y.values - decay * uy) ** 2) * grid.cell_area)
    return float(np.sqrt(err2))


def budget_refinement_ratios(cfg: ExperimentConfig, epsilon: float,
                             dts=(4e-3, 2e-3, 1e-3)) -> list[float]:
    """Max per-step budget residuals across a dt-halving ladder, as ratios."""
    from dataclasses import replace
    cfg = replace(cfg, record_stride=1)  # residual max must see every step
    maxres = []
    for dt in dts:
        res = run_single(cfg, epsilon=epsilon,
                         stepper=StepperConfig(dt=dt, adaptive=False),
                         require_nonpositive_qe=True)
        maxres.append(max(r.budget_residual for r in res.records))
    return [maxres[i] / maxres[i + 1] for i in range(len(maxres) - 1)]
