"""Command-line interface.

Exit codes: 0 success, 1 validation/acceptance failure, 2 configuration
error, 3 runtime blow-up.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .checkpoint import checkpoint_header
from .config import ExperimentConfig, load_config
from .errors import BlowUp, CheckpointError, ConfigError, StepTooSmall
from .experiments import (continuous_dependence_probe, epsilon_sweep,
                          run_single, validation_suite)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_BLOWUP = 3


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig().validate()
    if getattr(args, "out", None):
        cfg.out_dir = args.out
    if getattr(args, "t_end", None) is not None:
        cfg = replace(cfg, t_end=args.t_end)
    if getattr(args, "dt", None) is not None:
        cfg = replace(cfg, stepper=replace(cfg.stepper, dt=args.dt))
    if getattr(args, "epsilon", None) is not None:
        cfg = replace(cfg, epsilon=args.epsilon)
    return cfg.validate()


def cmd_run(args) -> int:
    cfg = _load(args)
    res = run_single(cfg, out_dir=cfg.out_dir)
    last = res.records[-1]
    print(f"run finished at t={res.final_state.time:g}: "
          f"energy={last.energy:.6e}, max_qe={last.max_qe:.3e}")
    print(f"series written to {cfg.out_dir}/series.csv")
    if args.figures:
        from .report import render_dir
        for p in render_dir(cfg.out_dir):
            print(f"figure written to {p}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    report = epsilon_sweep(cfg, out_dir=cfg.out_dir)
    for row in report.rows:
        print(f"eps={row.epsilon:g}: sup distance {row.sup_l2_distance:.6e} "
              f"[{row.status}]")
    if report.slope is not None:
        print(f"fitted sup-distance slope: {report.slope:.4f} (expected ~0.5)")
    print(f"rates written to {cfg.out_dir}/rates.csv")
    if args.figures:
        from .report import render_dir
        for p in render_dir(cfg.out_dir):
            print(f"figure written to {p}")
    if any(r.status != "ok" for r in report.rows):
        return EXIT_FAIL
    return EXIT_OK


def cmd_probe(args) -> int:
    cfg = _load(args)
    deltas = args.delta if args.delta else cfg.probe_deltas
    rows = continuous_dependence_probe(cfg, deltas, out_dir=cfg.out_dir)
    for r in rows:
        print(f"delta0={r.delta0:g}: amplification {r.amplification:.4f}")
    amps = [r.amplification for r in rows]
    stable = max(amps) < float("inf") and max(amps) / max(min(amps), 1e-300) < 2.0
    print("amplification stable across decades" if stable
          else "WARNING: amplification varies by >= factor 2")
    return EXIT_OK if stable else EXIT_FAIL


def cmd_validate(args) -> int:
    checks = validation_suite(args.level)
    failed = 0
    for c in checks:
        tag = "PASS" if c.passed else "FAIL"
        print(f"[{tag}] {c.name}: {c.detail}")
        failed += not c.passed
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def cmd_inspect(args) -> int:
    h = checkpoint_header(args.path)
    for k, v in h.items():
        print(f"{k} = {v}")
    return EXIT_OK


def cmd_report(args) -> int:
    from .report import render_dir
    written = render_dir(args.path)
    if not written:
        print(f"no series.csv or rates.csv found under {args.path}")
        return EXIT_FAIL
    for p in written:
        print(f"figure written to {p}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="baromoist",
        description="2D pseudo-spectral moist barotropic-baroclinic solver")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single simulation")
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--figures", action="store_true",
                   help="also render matplotlib figures")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("sweep", help="epsilon-convergence study")
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1,
                   help="reserved; runs execute sequentially for determinism")
    p.add_argument("--figures", action="store_true")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("probe", help="continuous-dependence probe")
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--delta", type=float, nargs="*")
    p.set_defaults(fn=cmd_probe)

    p = sub.add_parser("validate", help="analytic regression suite")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("inspect", help="dump checkpoint header")
    p.add_argument("path")
    p.set_defaults(fn=cmd_inspect)

    p = sub.add_parser("report", help="render figures from CSV outputs")
    p.add_argument("path")
    p.set_defaults(fn=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, CheckpointError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BlowUp, StepTooSmall) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_BLOWUP


if __name__ == "__main__":
    sys.exit(main())
