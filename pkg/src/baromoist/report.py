"""Render figures from the CSV artifacts of a run or sweep directory."""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return rows


def _col(rows, name):
    return np.array([float(r[name]) for r in rows if r[name] != ""])


def render_series(series_csv, out_dir=None) -> list[str]:
    """Energy/dissipation and norm history figures for one run."""
    out_dir = out_dir or os.path.dirname(series_csv) or "."
    rows = _read_csv(series_csv)
    t = _col(rows, "time")
    written = []

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    ax1.plot(t, _col(rows, "energy"), label="energy")
    ax1.set_ylabel("weighted energy")
    ax1.legend()
    ax2.semilogy(t, np.maximum(_col(rows, "dissipation"), 1e-300),
                 label="dissipation")
    resid = _col(rows, "budget_residual")
    ax2.semilogy(t[-len(resid):], np.maximum(resid, 1e-300),
                 label="budget residual")
    ax2.set_xlabel("t")
    ax2.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, "energy.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(7, 5))
    for name in ("l2_u", "l2_v", "l2_Te", "l2_qe"):
        ax.plot(t, _col(rows, name), label=name)
    qp = _col(rows, "qplus_l2_sq_over_eps")
    if qp.size:
        ax.plot(t[-qp.size:], qp, "--", label="qplus_l2_sq_over_eps")
    ax.set_xlabel("t")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, "norms.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)
    return written


def render_rates(rates_csv, out_dir=None) -> list[str]:
    """Log-log convergence figure for a sweep directory."""
    out_dir = out_dir or os.path.dirname(rates_csv) or "."
    rows = [r for r in _read_csv(rates_csv) if r["status"] == "ok"]
    eps = _col(rows, "epsilon")
    sup_d = _col(rows, "sup_l2_distance")
    int_qp = _col(rows, "int_qplus_l2_sq_over_eps")

    fig, ax = plt.subplots(figsize=(7, 5))
    ax.loglog(eps, sup_d, "o-", label="sup distance to limit run")
    ax.loglog(eps, int_qp, "s-", label="relaxation dissipation integral")
    if eps.size >= 2:
        slope = np.polyfit(np.log(eps), np.log(sup_d), 1)[0]
        ref = sup_d[0] * np.sqrt(eps / eps[0])
        ax.loglog(eps, ref, "k--", label=f"slope 1/2 reference (fit {slope:.2f})")
    ax.set_xlabel("epsilon")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, "rates.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]


def render_dir(path) -> list[str]:
    """Render figures for every series.csv / rates.csv under path."""
    written = []
    for root, _, files in os.walk(path):
        if "series.csv" in files:
            written += render_series(os.path.join(root, "series.csv"))
        if "rates.csv" in files:
            written += render_rates(os.path.join(root, "rates.csv"))
    return written
