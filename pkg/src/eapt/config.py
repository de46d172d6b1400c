"""Experiment configuration: JSON parsing, validation, and noise presets.

A config file is a single JSON object with explicit keys; unknown keys are
rejected so typos fail loudly. The "table1" noise preset carries the
calibrated error rates of the six-qubit device layout this toolkit models
(three system qubits S1..S3 plus ancillas A1..A3 with couplers S_iA_i,
S1S2, S2S3).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .channels import NoiseModel, make_readout_confusion
from .circuits import folds_from_scale
from .pipeline import TargetProcess, load_unitary_file

# calibrated per-element error rates (percent): readout, single-qubit gate,
# and two-qubit (CZ) per coupler, in register order S1 S2 S3 A1 A2 A3
TABLE1_READOUT_PCT = (3.7, 5.4, 3.5, 4.8, 2.6, 4.3)
TABLE1_SINGLE_QUBIT_PCT = (0.11, 0.10, 0.11, 0.16, 0.16, 0.11)
TABLE1_CZ_PCT = {
    ("S1", "A1"): 1.19,
    ("S2", "A2"): 3.32,
    ("S3", "A3"): 0.80,
    ("S1", "S2"): 2.17,
    ("S2", "S3"): 2.21,
}

DEFAULT_SEED = 0
DEFAULT_SCALING = (1, 3, 5)
DEFAULT_BOOTSTRAP = 100
NAMED_TARGETS = ("identity", "cnot", "cascaded-cnot")


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


def table1_noise_model(system_qubits: int, ancilla_qubits: int | None = None) -> NoiseModel:
    """Noise model from the calibrated rates, sized for a concrete register.

    The register is S1..Sn followed by A1..Am; qubit indices map onto the
    corresponding table entries, and coupler rates attach to the qubit pairs
    that actually host the CZ gates (S_i-A_i and neighboring S_i-S_{i+1}).
    """
    n = int(system_qubits)
    m = n if ancilla_qubits is None else int(ancilla_qubits)
    if not 1 <= n <= 3 or not 0 <= m <= 3:
        raise ConfigError(f"table1 preset covers up to 3+3 qubits, got {n}+{m}")
    labels = [f"S{i + 1}" for i in range(n)] + [f"A{i + 1}" for i in range(m)]
    table_index = {f"S{i + 1}": i for i in range(3)} | {f"A{i + 1}": 3 + i for i in range(3)}
    order = [table_index[lab] for lab in labels]
    readout = [TABLE1_READOUT_PCT[i] / 100.0 for i in order]
    single = tuple(TABLE1_SINGLE_QUBIT_PCT[i] / 100.0 for i in order)
    position = {lab: q for q, lab in enumerate(labels)}
    pairs = {}
    for (a, b), pct in TABLE1_CZ_PCT.items():
        if a in position and b in position:
            pairs[(position[a], position[b])] = pct / 100.0
    return NoiseModel(
        single_qubit_depolarizing=single,
        two_qubit_depolarizing=pairs,
        readout_confusion=make_readout_confusion(readout),
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated run description; `raw` echoes the parsed JSON document."""

    target: TargetProcess
    system_qubits: int
    noise: NoiseModel | None
    shots: int | None
    scaling_factors: tuple
    seed: int
    bootstrap_resamples: int
    extrapolation_order: int
    output_dir: str
    raw: dict = field(repr=False)
    diagnostics: tuple = ()


_KNOWN_KEYS = {
    "target",
    "system_qubits",
    "noise",
    "shots",
    "scaling_factors",
    "seed",
    "bootstrap_resamples",
    "extrapolation_order",
    "output_dir",
}


def _parse_noise(spec, n: int) -> NoiseModel | None:
    if spec is None:
        return None
    if spec == "table1":
        return table1_noise_model(n, n)
    if not isinstance(spec, dict):
        raise ConfigError(f"noise: expected null, \"table1\", or an object, got {spec!r}")
    known = {
        "single_qubit_depolarizing",
        "two_qubit_depolarizing",
        "amplitude_damping",
        "dephasing",
        "readout_error",
    }
    unknown = set(spec) - known
    if unknown:
        raise ConfigError(f"noise: unknown keys {sorted(unknown)}")
    total_qubits = 2 * n
    p1 = spec.get("single_qubit_depolarizing", 0.0)
    if isinstance(p1, list):
        if len(p1) != total_qubits:
            raise ConfigError(
                f"noise.single_qubit_depolarizing: need {total_qubits} per-qubit rates, got {len(p1)}"
            )
        p1 = tuple(float(x) for x in p1)
    p2 = spec.get("two_qubit_depolarizing", 0.0)
    if isinstance(p2, dict):
        parsed = {}
        for key, val in p2.items():
            try:
                a, b = (int(x) for x in key.split(","))
            except Exception as exc:
                raise ConfigError(
                    f"noise.two_qubit_depolarizing: pair key {key!r} must look like \"0,1\""
                ) from exc
            parsed[(a, b)] = float(val)
        p2 = parsed
    readout = spec.get("readout_error")
    confusion = None
    if readout is not None:
        rates = [readout] * total_qubits if not isinstance(readout, list) else readout
        if len(rates) != total_qubits:
            raise ConfigError(
                f"noise.readout_error: need {total_qubits} per-qubit rates, got {len(rates)}"
            )
        confusion = make_readout_confusion(rates)
    try:
        return NoiseModel(
            single_qubit_depolarizing=p1,
            two_qubit_depolarizing=p2,
            amplitude_damping=float(spec.get("amplitude_damping", 0.0)),
            dephasing=float(spec.get("dephasing", 0.0)),
            readout_confusion=confusion,
        )
    except ValueError as exc:
        raise ConfigError(f"noise: {exc}") from exc


def _parse_target(name, n: int, base_dir: Path) -> TargetProcess:
    if not isinstance(name, str):
        raise ConfigError(f"target: expected a name or file path string, got {name!r}")
    if name == "identity":
        return TargetProcess.identity(n)
    if name == "cnot":
        t = TargetProcess.cnot()
    elif name == "cascaded-cnot":
        t = TargetProcess.cascaded_cnot()
    else:
        path = Path(name)
        if not path.is_absolute():
            path = base_dir / path
        if not path.exists():
            raise ConfigError(
                f"target: {name!r} is neither one of {NAMED_TARGETS} nor an existing unitary file"
            )
        try:
            u = load_unitary_file(path)
            t = TargetProcess.custom(u, name=str(name))
        except Exception as exc:
            raise ConfigError(f"target: failed to load unitary file {name!r}: {exc}") from exc
    if t.qubit_count != n:
        raise ConfigError(
            f"target: {name!r} acts on {t.qubit_count} qubits but system_qubits is {n}"
        )
    return t


def parse_config_dict(doc: dict, base_dir: Path | str = ".") -> ExperimentConfig:
    """Validate a parsed config document; raises ConfigError naming the field."""
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    base_dir = Path(base_dir)
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    diagnostics = []

    if "system_qubits" not in doc:
        raise ConfigError("system_qubits: required")
    n = doc["system_qubits"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ConfigError(f"system_qubits: expected an integer, got {n!r}")
    if not 1 <= n <= 3:
        raise ConfigError(f"system_qubits: {n} exceeds the simulator cap (1..3)")

    if "target" not in doc:
        raise ConfigError("target: required")
    target = _parse_target(doc["target"], n, base_dir)

    noise = _parse_noise(doc.get("noise"), n)

    shots = doc.get("shots", "exact")
    if shots == "exact":
        shots = None
    elif not isinstance(shots, int) or isinstance(shots, bool) or shots <= 0:
        raise ConfigError(f"shots: expected \"exact\" or a positive integer, got {shots!r}")

    scaling = doc.get("scaling_factors", list(DEFAULT_SCALING))
    if not isinstance(scaling, list) or not scaling:
        raise ConfigError(f"scaling_factors: expected a non-empty list, got {scaling!r}")
    for s in scaling:
        if not isinstance(s, int) or isinstance(s, bool) or s < 1 or s % 2 == 0:
            raise ConfigError(
                f"scaling_factors: {s!r} invalid; factors must be odd positive integers "
                "(s = 2*folds + 1)"
            )
        folds_from_scale(s)
    if any(b <= a for a, b in zip(scaling, scaling[1:])):
        raise ConfigError(f"scaling_factors: must be strictly increasing, got {scaling}")
    if len(scaling) < 2:
        diagnostics.append(
            "scaling_factors has a single entry: zero-noise extrapolation is disabled"
        )

    if "seed" in doc:
        seed = doc["seed"]
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ConfigError(f"seed: expected an integer, got {seed!r}")
    else:
        seed = DEFAULT_SEED
        diagnostics.append(f"seed not set: defaulting to {DEFAULT_SEED}")

    resamples = doc.get("bootstrap_resamples", DEFAULT_BOOTSTRAP)
    if not isinstance(resamples, int) or isinstance(resamples, bool) or resamples < 0:
        raise ConfigError(f"bootstrap_resamples: expected a non-negative integer, got {resamples!r}")

    order = doc.get("extrapolation_order", 1)
    if not isinstance(order, int) or isinstance(order, bool) or order < 1:
        raise ConfigError(f"extrapolation_order: expected an integer >= 1, got {order!r}")

    output_dir = doc.get("output_dir", "results")
    if not isinstance(output_dir, str):
        raise ConfigError(f"output_dir: expected a string, got {output_dir!r}")

    return ExperimentConfig(
        target=target,
        system_qubits=n,
        noise=noise,
        shots=shots,
        scaling_factors=tuple(scaling),
        seed=seed,
        bootstrap_resamples=resamples,
        extrapolation_order=order,
        output_dir=output_dir,
        raw=doc,
        diagnostics=tuple(diagnostics),
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return parse_config_dict(doc, base_dir=path.parent)
