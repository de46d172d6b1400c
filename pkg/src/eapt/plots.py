"""Figure rendering for run reports: fidelity versus scaling factor with the
extrapolated zero-noise values, written as PNG next to the CSV."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .pipeline import EAPTResult


def render_fidelity_figure(result: EAPTResult, path) -> Path:
    """Plot state fidelity (and average gate fidelity, when present) against
    the noise-scaling factor, with mitigated values marked at s = 0."""
    has_process = result.avg_gate_fidelities is not None
    fig, axes = plt.subplots(1, 2 if has_process else 1, figsize=(9 if has_process else 5, 3.6))
    if not has_process:
        axes = [axes]

    panels = [
        (
            axes[0],
            "state fidelity",
            result.state_fidelities,
            result.state_fidelity_errors,
            result.mitigated_state_fidelity,
            result.mitigated_state_fidelity_error,
        )
    ]
    if has_process:
        panels.append(
            (
                axes[1],
                "avg gate fidelity",
                result.avg_gate_fidelities,
                result.avg_gate_fidelity_errors,
                result.mitigated_avg_gate_fidelity,
                result.mitigated_avg_gate_fidelity_error,
            )
        )

    for ax, label, values, errors, mitigated, mitigated_err in panels:
        yerr = errors if errors is not None else None
        ax.errorbar(result.scales, values, yerr=yerr, fmt="o-", capsize=3, label="measured")
        if mitigated is not None:
            ax.errorbar(
                [0],
                [mitigated],
                yerr=[mitigated_err] if mitigated_err is not None else None,
                fmt="D",
                color="tab:green",
                capsize=3,
                label="extrapolated",
            )
            ax.axhline(mitigated, color="tab:green", ls="--", lw=0.8, alpha=0.6)
        ax.set_xlabel("scaling factor s")
        ax.set_ylabel(label)
        ax.set_xticks([0, *result.scales] if mitigated is not None else list(result.scales))
        ax.grid(alpha=0.3)
        ax.legend(fontsize=8)

    fig.suptitle(f"{result.target_name} ({result.qubit_count} system qubits)")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150, metadata={"Software": "eapt"})
    plt.close(fig)
    return path
