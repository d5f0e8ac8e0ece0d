"""Figure rendering for the CLI report paths.

Every figure is written straight to a file (Agg backend); the CLI drops
one next to each delimited output it produces.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_trace_figure(trace, path, title=""):
    """Objective value against CPU seconds for one solver run."""
    records = [r for r in trace.records if np.isfinite(r.objective)]
    seconds = [r.cpu_seconds for r in records]
    values = [r.objective for r in records]
    fig, ax = plt.subplots(figsize=(6, 4))
    if values and min(values) > 0:
        ax.semilogy(seconds, values, marker=".", lw=1.2)
    else:
        ax.plot(seconds, values, marker=".", lw=1.2)
    ax.set_xlabel("CPU seconds")
    ax.set_ylabel("objective value")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_sweep_figure(rows, path, title=""):
    """Seconds-to-threshold against the regularization constant."""
    lams = [row["lam"] for row in rows if row["seconds"] is not None]
    secs = [row["seconds"] for row in rows if row["seconds"] is not None]
    fig, ax = plt.subplots(figsize=(6, 4))
    if lams:
        ax.loglog(lams, np.maximum(secs, 1e-6), marker="o")
    ax.set_xlabel("regularization constant")
    ax.set_ylabel("CPU seconds to 2% of optimum")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_envelope_figure(lines, stack, lower, upper, path):
    """All lines plus their segmented upper envelope."""
    hi = upper
    if not np.isfinite(hi):
        hi = stack[-1][0] + 1.0 if stack[-1][0] > lower else lower + 1.0
    xs = np.linspace(lower, hi, 256)
    fig, ax = plt.subplots(figsize=(6, 4))
    for a, b in zip(lines.slopes, lines.offsets):
        ax.plot(xs, b + xs * a, color="0.8", lw=0.8)
    breakpoints = [eta for eta, _ in stack] + [hi]
    for (eta, idx), nxt in zip(stack, breakpoints[1:]):
        seg = np.linspace(eta, nxt, 16)
        ax.plot(seg, lines.offsets[idx] + seg * lines.slopes[idx], lw=2.0, color="C0")
    ax.set_xlabel("position")
    ax.set_ylabel("envelope value")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
