"""Results persistence: a self-contained JSON record, a flat CSV projection
for plotting, and a comparison report.

Complex matrices are stored as nested arrays of [re, im] pairs. Every number
in the CSV also appears in the JSON record; the CSV is a projection, never a
source. Serialization is deterministic for a fixed record, so identical
(config, seed) runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .mitigation import MitigatedDataset
from .pipeline import ComparisonReport, EAPTResult

RESULTS_FILENAME = "results.json"
CSV_FILENAME = "results.csv"
COMPARISON_FILENAME = "comparison.json"
FIGURE_FILENAME = "fidelity_vs_scale.png"


def matrix_payload(m: np.ndarray) -> list:
    return [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_payload(payload) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in payload])


def _float(x) -> float | None:
    return None if x is None else float(x)


def _float_list(xs) -> list | None:
    return None if xs is None else [float(x) for x in xs]


def _mitigation_payload(mit: MitigatedDataset | None) -> dict | None:
    if mit is None:
        return None
    return {
        "scales": list(mit.scales),
        "settings": [
            {
                "setting": p.setting,
                "raw_frequencies": [[float(x) for x in row] for row in p.raw_frequencies],
                "intercepts": [float(x) for x in p.intercepts],
                "slopes": [float(x) for x in p.slopes],
                "clipped": p.clipped,
                "renormalization": float(p.renormalization),
            }
            for p in mit.provenance
        ],
    }


def results_record(config_doc: dict, result: EAPTResult) -> dict:
    """Self-contained run record: config echo, fidelities, reconstruction,
    and extrapolation provenance. Re-runnable from the echoed config."""
    return {
        "config": config_doc,
        "target": result.target_name,
        "system_qubits": result.qubit_count,
        "scales": list(result.scales),
        "shots": "exact" if result.shots is None else result.shots,
        "state_fidelities": _float_list(result.state_fidelities),
        "state_fidelity_errors": _float_list(result.state_fidelity_errors),
        "mitigated_state_fidelity": _float(result.mitigated_state_fidelity),
        "mitigated_state_fidelity_error": _float(result.mitigated_state_fidelity_error),
        "avg_gate_fidelities": _float_list(result.avg_gate_fidelities),
        "avg_gate_fidelity_errors": _float_list(result.avg_gate_fidelity_errors),
        "mitigated_avg_gate_fidelity": _float(result.mitigated_avg_gate_fidelity),
        "mitigated_avg_gate_fidelity_error": _float(result.mitigated_avg_gate_fidelity_error),
        "choi_matrix": matrix_payload(result.choi.state.matrix),
        "kraus_operators": [matrix_payload(a) for a in result.kraus.operators],
        "kraus_sub_normalized": result.kraus.sub_normalized,
        "trace_preservation_deviation": float(result.tp_deviation),
        "trace_preservation_warning": result.tp_warning,
        "mle_hit_iteration_cap": result.mle_capped,
        "zne_provenance": {
            "state_preparation": _mitigation_payload(result.state_mitigation),
            "process": _mitigation_payload(result.process_mitigation),
        },
    }


def csv_rows(result: EAPTResult) -> list:
    """Flat (scale, quantity, value, stderr) rows; mitigated rows use scale 0."""
    rows = []
    errs = result.state_fidelity_errors or (None,) * len(result.scales)
    for s, f, e in zip(result.scales, result.state_fidelities, errs):
        rows.append((s, "state_fidelity", f, e or 0.0))
    if result.avg_gate_fidelities is not None:
        ferrs = result.avg_gate_fidelity_errors or (None,) * len(result.scales)
        for s, f, e in zip(result.scales, result.avg_gate_fidelities, ferrs):
            rows.append((s, "avg_gate_fidelity", f, e or 0.0))
    if result.mitigated_state_fidelity is not None:
        rows.append(
            (0, "mitigated_state_fidelity", result.mitigated_state_fidelity,
             result.mitigated_state_fidelity_error or 0.0)
        )
    if result.mitigated_avg_gate_fidelity is not None:
        rows.append(
            (0, "mitigated_avg_gate_fidelity", result.mitigated_avg_gate_fidelity,
             result.mitigated_avg_gate_fidelity_error or 0.0)
        )
    return rows


def write_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def write_csv(rows, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("scale", "quantity", "value", "stderr"))
        for scale, quantity, value, stderr in rows:
            writer.writerow((scale, quantity, repr(float(value)), repr(float(stderr))))


def write_results(out_dir, config_doc: dict, result: EAPTResult) -> list:
    """Write results.json and results.csv; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    record = results_record(config_doc, result)
    json_path = out / RESULTS_FILENAME
    csv_path = out / CSV_FILENAME
    write_json(record, json_path)
    write_csv(csv_rows(result), csv_path)
    return [json_path, csv_path]


def comparison_record(config_doc: dict, report: ComparisonReport) -> dict:
    return {
        "config": config_doc,
        "target": report.target_name,
        "system_qubits": report.qubit_count,
        "choi_frobenius_distance": float(report.choi_distance),
        "eapt_avg_gate_fidelity": _float(report.eapt_avg_gate_fidelity),
        "qpt_avg_gate_fidelity": _float(report.qpt_avg_gate_fidelity),
        "eapt_circuit_executions": report.eapt_executions,
        "qpt_circuit_executions": report.qpt_executions,
        "qpt_chi_matrix": matrix_payload(report.qpt_chi.coefficients),
        "eapt_choi_matrix": matrix_payload(report.eapt.choi.state.matrix),
    }


def write_comparison(out_dir, config_doc: dict, report: ComparisonReport) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / COMPARISON_FILENAME
    write_json(comparison_record(config_doc, report), path)
    return [path]
