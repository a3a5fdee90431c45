"""Figure rendering for grid runs: log-log variance against the predicted
H^(2/3) law, and diagonal-sum convergence.  Figures are written next to the
delimited output; nothing here is interactive.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def render_variance_grid_figure(rows, slope: float | None, path: str) -> str:
    """Log-log plot of empirical total variance vs H with the predicted law."""
    if not rows:
        raise ValueError("no rows to plot")
    hs = [r.H for r in rows]
    totals = [r.total for r in rows]
    predicted = [r.predicted for r in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.loglog(hs, totals, "o-", label="empirical variance")
    ax.loglog(hs, predicted, "--", color="gray", label=r"$c_\infty H^{2/3}$")
    ax.set_xlabel("H")
    ax.set_ylabel("variance over [X, 2X]")
    title = f"X = {rows[0].X:g}"
    if slope is not None and not math.isnan(slope):
        title += f", fitted slope = {slope:.3f}"
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_diagonal_grid_figure(rows, path: str) -> str:
    """Diagonal-sum ratio to the predicted constant, with the H^(-eps/6) envelope."""
    if not rows:
        raise ValueError("no rows to plot")
    hs = [r["H"] for r in rows]
    ratios = [r["ratio"] for r in rows]
    envelopes = [r["envelope"] for r in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.semilogx(hs, ratios, "o-", label="diagonal / predicted")
    ax.semilogx(hs, [1 + e for e in envelopes], ":", color="gray", label="1 ± envelope")
    ax.semilogx(hs, [1 - e for e in envelopes], ":", color="gray")
    ax.axhline(1.0, color="black", linewidth=0.8)
    ax.set_xlabel("H")
    ax.set_ylabel("ratio")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
