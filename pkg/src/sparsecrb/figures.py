"""Rendering of sweep reports to figure files."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .simulation import SweepReport  # noqa: E402

_STYLE = {
    "oracle": dict(color="tab:green", marker="o"),
    "ls": dict(color="tab:gray", marker="v"),
    "ml": dict(color="tab:red", marker="s"),
    "bpdn": dict(color="tab:blue", marker="^"),
    "ds": dict(color="tab:orange", marker="d"),
    "gds": dict(color="tab:purple", marker="x"),
    "gauss-bpdn": dict(color="tab:brown", marker="+"),
}


def render_sweep(report: SweepReport, path, xlabel: str = "sweep value",
                 logx: bool = True, title: str | None = None) -> None:
    """Plot per-estimator MSE curves with error bars against the bound trace."""
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    estimators = sorted({r.estimator for r in report.rows})
    for name in estimators:
        rows = sorted((r for r in report.rows if r.estimator == name),
                      key=lambda r: r.sweep_value)
        x = [r.sweep_value for r in rows]
        y = [r.mse for r in rows]
        yerr = [r.std_error for r in rows]
        ax.errorbar(x, y, yerr=yerr, label=name, markersize=4, linewidth=1.2,
                    **_STYLE.get(name, {}))
    crb = sorted({(r.sweep_value, r.crb_trace) for r in report.rows})
    ax.plot([v for v, _ in crb], [c for _, c in crb], "k--", linewidth=1.5,
            label="unbiased bound")
    if logx:
        ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("MSE")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
