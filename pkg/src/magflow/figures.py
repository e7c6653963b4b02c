"""Figure rendering for the report outputs: diagnostics traces and
convergence plots written next to the delimited data files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_diagnostics(records, path, title: str = "") -> None:
    """Plot energy (and any extra diagnostics) against time."""
    ts = [r.t for r in records]
    extras = sorted(records[0].extra) if records else []
    nplots = 1 + len(extras)
    fig, axes = plt.subplots(nplots, 1, figsize=(7, 2.2 * nplots),
                             sharex=True, squeeze=False)
    axes = axes[:, 0]
    e0 = records[0].energy if records else 0.0
    axes[0].plot(ts, [r.energy - e0 for r in records], lw=1.2)
    axes[0].set_ylabel("energy - E(0)")
    axes[0].ticklabel_format(style="sci", scilimits=(-2, 2), axis="y")
    for ax, key in zip(axes[1:], extras):
        ax.plot(ts, [r.extra[key] for r in records], lw=1.2)
        ax.set_ylabel(key)
        ax.ticklabel_format(style="sci", scilimits=(-2, 2), axis="y")
    axes[-1].set_xlabel("t")
    if title:
        axes[0].set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_convergence(table, path, title: str = "") -> None:
    """Log-log error plot of a refinement table with a fitted-order label."""
    vals = np.array([v for _, v, e in table.rows if np.isfinite(e)])
    errs = np.array([e for _, v, e in table.rows if np.isfinite(e)])
    fig, ax = plt.subplots(figsize=(5.5, 4))
    if vals.size:
        ax.loglog(vals, errs, "o-", lw=1.2)
        finite = [o for o in table.orders if np.isfinite(o)]
        if finite:
            ax.set_title(title or
                         f"observed order ~ {float(np.median(finite)):.2f}")
        elif title:
            ax.set_title(title)
    ax.set_xlabel(table.parameter)
    ax.set_ylabel("error")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
