"""Figure rendering for the CLI report path.

Every renderer writes a PNG next to the delimited output and returns the
path it wrote.  Figures are deliberately plain: one panel, labeled axes,
no styling beyond matplotlib defaults.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "render_path_figure",
    "render_queue_figure",
    "render_convergence_figure",
    "render_decay_figure",
    "render_modulus_figure",
    "render_entropy_figure",
]


def _save(fig, out_path: str) -> str:
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_path_figure(times, values, out_path: str) -> str:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(times, values, lw=0.8)
    ax.axhline(0.0, color="gray", lw=0.5)
    ax.axvline(0.0, color="gray", lw=0.5)
    ax.set_xlabel("t")
    ax.set_ylabel("X(t)")
    ax.set_title("Sampled input path")
    return _save(fig, out_path)


def render_queue_figure(times, q_values, out_path: str) -> str:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(times, q_values, lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("Q(t)")
    ax.set_ylim(bottom=0.0)
    ax.set_title("Workload trajectory")
    return _save(fig, out_path)


def render_convergence_figure(report, out_path: str) -> str:
    """KS per time point along the c-sequence, with the pass threshold."""
    fig, ax = plt.subplots(figsize=(7, 4))
    cs = [e["c"] for e in report.per_c]
    labels = list(report.per_c[0]["ks_by_timepoint"].keys())
    for label in labels:
        ax.plot(cs, [e["ks_by_timepoint"][label] for e in report.per_c],
                marker="o", label=f"t={label}")
    ax.axhline(report.per_c[0]["threshold"], color="red", ls="--",
               label="threshold")
    ax.set_xscale("log")
    ax.set_xlabel("c")
    ax.set_ylabel("two-sample KS")
    ax.set_title(f"{report.kind} convergence ({report.regime} traffic)")
    ax.legend(fontsize=8)
    return _save(fig, out_path)


def render_decay_figure(report, out_path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(report.T_grid, report.p_values, marker="o")
    ax.set_xlabel("T")
    ax.set_ylabel(r"$p_T$")
    ax.set_ylim(0, 1.05)
    ax.set_title(f"Envelope exceedance decay (gamma={report.gamma}, "
                 f"eta={report.eta})")
    return _save(fig, out_path)


def render_modulus_figure(report, out_path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(report.zeta_grid, report.p_values, marker="o",
            label="empirical probability")
    ax.plot(report.zeta_grid, report.entropy_bounds, marker="s",
            label="entropy bound")
    ax.set_xlabel(r"$\zeta$")
    ax.set_xscale("log")
    ax.set_title("Oscillation probabilities vs entropy bound")
    ax.legend(fontsize=8)
    return _save(fig, out_path)


def render_entropy_figure(profile, out_path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(profile.theta_grid, np.sqrt(profile.entropy_values), marker=".")
    ax.set_xscale("log")
    ax.set_xlabel(r"$\vartheta$")
    ax.set_ylabel("sqrt(entropy)")
    ax.set_title(f"Entropy profile, L={profile.interval_length:g} "
                 f"(integral={profile.dudley_value:.4g})")
    return _save(fig, out_path)
