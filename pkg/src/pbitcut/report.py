"""Figure rendering for the CLI report paths.

Figures are written to files next to the delimited output; nothing here
feeds back into the numerical results. The Agg backend keeps rendering
headless-safe.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)


def save_trace_figure(samples, betas, energies, cuts, path, title="") -> Path:
    """Energy/cut evolution across samples for a single trial."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.plot(samples, energies, color="tab:blue", lw=1.0, label="energy")
    ax.set_xlabel("sample")
    ax.set_ylabel("energy", color="tab:blue")
    ax.tick_params(axis="y", labelcolor="tab:blue")
    ax2 = ax.twinx()
    ax2.plot(samples, cuts, color="tab:red", lw=1.0, label="cut")
    ax2.set_ylabel("cut value", color="tab:red")
    ax2.tick_params(axis="y", labelcolor="tab:red")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_run_figure(cuts, best_known, path, title="") -> Path:
    """Distribution of per-trial best cuts, with the best-known mark."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    bins = min(30, max(5, len(set(cuts))))
    ax.hist(cuts, bins=bins, color="tab:blue", alpha=0.8, edgecolor="black", lw=0.4)
    if best_known is not None:
        ax.axvline(best_known, color="tab:red", ls="--", lw=1.2, label=f"best known = {best_known}")
        ax.legend(loc="upper left")
    ax.set_xlabel("best cut per trial")
    ax.set_ylabel("trials")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
