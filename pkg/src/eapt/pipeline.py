"""End-to-end orchestration: entanglement-assisted process tomography with
zero-noise extrapolation, the standard probe-state tomography cross-check,
and fidelity metrics.

The entanglement-assisted run prepares the 2n-qubit maximally entangled state
(folded for noise scaling), applies the unfolded target process to the system
half, performs full state tomography of the joint output with readout
correction, extrapolates the setting probabilities to zero noise, and
reconstructs the channel from the maximum-likelihood Choi state.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .channels import (
    ChiMatrix,
    ChoiState,
    DensityMatrix,
    KrausChannel,
    NoiseModel,
    apply_kraus,
    channel_from_chi,
    channel_from_choi,
    choi_from_chi,
    choi_from_channel,
    max_entangled_state,
)
from .circuits import Circuit, Gate, build_prep_circuit, cnot_gates, fold_circuit, folds_from_scale, simulate
from .linalg import as_complex_matrix, eig_hermitian, pauli_operator, sqrt_psd
from .mitigation import MitigatedDataset, mitigate_dataset
from .tomography import (
    MLEOptions,
    TomographyDataset,
    collect_dataset,
    CountsRecord,
    mle_reconstruct,
    rem_correct_dataset,
)

TP_WARN_THRESHOLD = 1e-2

CNOT_UNITARY = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
# prepares |i> = (|0> + i|1>)/sqrt(2) from |0>
RX_M90 = np.array([[1, 1j], [1j, 1]], dtype=complex) / np.sqrt(2)


# ---------------------------------------------------------------------------
# Fidelity metrics
# ---------------------------------------------------------------------------


def state_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    root = sqrt_psd(rho.matrix)
    inner = root @ sigma.matrix @ root
    vals = eig_hermitian(inner, tol=1e-7).eigenvalues
    # roundoff leaves the rank-deficient product with tiny spurious
    # eigenvalues that the square root would amplify; drop them
    vals = np.where(vals < vals[-1] * 1e-13, 0.0, vals)
    f = float(np.sum(np.sqrt(np.clip(vals, 0.0, None))) ** 2)
    if f > 1.0 + 1e-6:
        raise ValueError(f"fidelity {f} exceeds 1 beyond tolerance")
    return min(max(f, 0.0), 1.0)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Half the trace norm of rho - sigma."""
    vals = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return 0.5 * float(np.sum(np.abs(vals)))


def _check_unitary(u: np.ndarray) -> np.ndarray:
    u = as_complex_matrix(u)
    d = u.shape[0]
    if u.shape[0] != u.shape[1] or np.max(np.abs(u.conj().T @ u - np.eye(d))) > 1e-10:
        raise ValueError("target is not unitary within 1e-10")
    return u


def avg_gate_fidelity(target_unitary: np.ndarray, actual: KrausChannel) -> float:
    """Average gate fidelity via the closed form (d F_pro + 1) / (d + 1).

    F_pro is the overlap of the Choi state of U^dag . E with the maximally
    entangled projector; the closed form is validated against a Monte-Carlo
    Haar average in the test suite.
    """
    u = _check_unitary(target_unitary)
    if u.shape[0] != actual.dim:
        raise ValueError(f"dimension mismatch: target {u.shape[0]} vs channel {actual.dim}")
    d = actual.dim
    composed = KrausChannel.from_unitary(u.conj().T).compose(actual)
    choi = choi_from_channel(composed)
    phi = max_entangled_state(actual.input_qubits)
    f_pro = float(np.trace(choi.state.matrix @ phi.matrix).real)
    return (d * f_pro + 1.0) / (d + 1.0)


def haar_average_fidelity(
    target_unitary: np.ndarray,
    actual: KrausChannel,
    samples: int = 10_000,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Monte-Carlo estimate of the Haar-average fidelity and its std error.

    Independent oracle for avg_gate_fidelity: draws Haar state vectors and
    averages <psi| U^dag E(|psi><psi|) U |psi>.
    """
    u = _check_unitary(target_unitary)
    rng = rng or np.random.default_rng(0)
    d = actual.dim
    vals = np.empty(samples)
    for i in range(samples):
        psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        psi /= np.linalg.norm(psi)
        out = apply_kraus(actual.operators, np.outer(psi, psi.conj()))
        target_psi = u @ psi
        vals[i] = np.real(target_psi.conj() @ out @ target_psi)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples))


# ---------------------------------------------------------------------------
# Target processes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TargetProcess:
    """Process under study: a named/custom unitary or an explicit channel."""

    name: str
    qubit_count: int
    unitary: np.ndarray | None = None
    channel: KrausChannel | None = None

    def __post_init__(self):
        if (self.unitary is None) == (self.channel is None):
            raise ValueError("target needs exactly one of unitary or channel")
        d = 2 ** self.qubit_count
        if self.unitary is not None:
            u = _check_unitary(self.unitary)
            if u.shape != (d, d):
                raise ValueError(f"target unitary must be {d}x{d}")
            object.__setattr__(self, "unitary", u)
        else:
            if self.channel.dim != d:
                raise ValueError(f"target channel must act on {self.qubit_count} qubits")

    @classmethod
    def identity(cls, n: int) -> "TargetProcess":
        return cls("identity", n, unitary=np.eye(2 ** n, dtype=complex))

    @classmethod
    def cnot(cls) -> "TargetProcess":
        return cls("cnot", 2, unitary=CNOT_UNITARY)

    @classmethod
    def cascaded_cnot(cls) -> "TargetProcess":
        u = Circuit(3, _target_gates_by_name("cascaded-cnot")).unitary()
        return cls("cascaded-cnot", 3, unitary=u)

    @classmethod
    def custom(cls, unitary: np.ndarray, name: str = "custom") -> "TargetProcess":
        u = as_complex_matrix(unitary)
        n = int(round(np.log2(u.shape[0])))
        return cls(name, n, unitary=u)

    @classmethod
    def from_channel(cls, channel: KrausChannel, name: str = "channel") -> "TargetProcess":
        return cls(name, channel.input_qubits, channel=channel)

    def ideal_channel(self) -> KrausChannel:
        if self.channel is not None:
            return self.channel
        return KrausChannel.from_unitary(self.unitary)


def _target_gates_by_name(name: str) -> tuple:
    if name == "identity":
        return ()
    if name == "cnot":
        return cnot_gates(0, 1)
    if name == "cascaded-cnot":
        # shared control on the middle system qubit, first toward qubit 0,
        # then toward qubit 2
        return cnot_gates(1, 0) + cnot_gates(1, 2)
    raise KeyError(name)


def target_gates(target: TargetProcess) -> tuple:
    """Gate sequence realizing a unitary target on system qubits 0..n-1."""
    if target.channel is not None:
        raise ValueError("channel targets are applied directly, not as gates")
    try:
        return _target_gates_by_name(target.name)
    except KeyError:
        return (Gate("custom", tuple(range(target.qubit_count)), matrix=target.unitary),)


def load_unitary_file(path) -> np.ndarray:
    """Read a d x d complex matrix: first line d, then d rows of d "re,im" pairs."""
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens:
        raise ValueError(f"unitary file {path} is empty")
    d = int(tokens[0])
    entries = tokens[1:]
    if len(entries) != d * d:
        raise ValueError(f"unitary file {path} has {len(entries)} entries, expected {d * d}")
    u = np.empty((d, d), dtype=complex)
    for i, tok in enumerate(entries):
        re_s, im_s = tok.split(",")
        u[i // d, i % d] = float(re_s) + 1j * float(im_s)
    return u


# ---------------------------------------------------------------------------
# Entanglement-assisted run
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EAPTResult:
    """Outputs of one entanglement-assisted tomography run.

    Fidelity tuples are ordered like `scales`; mitigated entries are None when
    only one scaling factor was run (no extrapolation possible), in which case
    `choi`/`kraus` hold the single-scale reconstruction. Error bars are
    bootstrap standard deviations, None in exact-probability mode.
    """

    target_name: str
    qubit_count: int
    scales: tuple
    shots: int | None
    state_fidelities: tuple
    state_fidelity_errors: tuple | None
    mitigated_state_fidelity: float | None
    mitigated_state_fidelity_error: float | None
    avg_gate_fidelities: tuple | None
    avg_gate_fidelity_errors: tuple | None
    mitigated_avg_gate_fidelity: float | None
    mitigated_avg_gate_fidelity_error: float | None
    choi: ChoiState
    kraus: KrausChannel
    tp_deviation: float
    tp_warning: bool
    state_mitigation: MitigatedDataset | None
    process_mitigation: MitigatedDataset | None
    mle_capped: bool


@dataclass(frozen=True)
class StateZNEResult:
    """State-preparation-only study: per-scale and mitigated state fidelity."""

    qubit_count: int
    scales: tuple
    shots: int | None
    fidelities: tuple
    mitigated_fidelity: float | None
    mitigation: MitigatedDataset | None
    states: tuple


def _validate_scaling(scaling) -> tuple:
    scales = tuple(int(s) for s in scaling)
    if not scales:
        raise ValueError("need at least one scaling factor")
    for s in scales:
        folds_from_scale(s)
    if any(b <= a for a, b in zip(scales, scales[1:])):
        raise ValueError(f"scaling factors must be strictly increasing: {scales}")
    return scales


def _apply_target(rho: DensityMatrix, target: TargetProcess, noise: NoiseModel | None) -> DensityMatrix:
    """Target process acting on the system half of a 2n-qubit state.

    Unitary targets run as (noisy) compiled gates; channel targets are the
    process itself and are applied exactly.
    """
    n2 = rho.num_qubits
    if target.channel is not None:
        extended = target.channel.tensor_identity(n2 - target.qubit_count)
        return DensityMatrix(apply_kraus(extended.operators, rho.matrix))
    circ = Circuit(n2, target_gates(target))
    return simulate(circ, rho, noise)


def _measure(rho, shots, confusion, entropy) -> TomographyDataset:
    ds = collect_dataset(rho, shots=shots, confusion=confusion, seed=entropy)
    if confusion is not None:
        ds = rem_correct_dataset(ds, confusion)
    return ds


def _resample_dataset(ds: TomographyDataset, entropy: tuple) -> TomographyDataset:
    """Bootstrap resample: redraw each record's counts from its frequencies."""
    records = []
    for i, r in enumerate(ds.records):
        rng = np.random.default_rng(np.random.SeedSequence(entropy + (i,)))
        counts = rng.multinomial(r.shots, r.frequencies / r.frequencies.sum())
        records.append(CountsRecord(setting=r.setting, shots=r.shots, frequencies=counts / r.shots))
    return TomographyDataset(qubit_count=ds.qubit_count, records=tuple(records))


def run_state_zne(
    n: int,
    noise: NoiseModel | None = None,
    shots: int | None = None,
    scaling=(1, 3, 5),
    seed: int = 0,
    extrapolation_order: int = 1,
    mle_options: MLEOptions | None = None,
) -> StateZNEResult:
    """Scaled-noise study of the entangled-state preparation alone.

    Folds the preparation circuit for each scaling factor, tomographs the
    output, and reports per-scale and zero-noise-extrapolated fidelities
    against the ideal maximally entangled state.
    """
    scales = _validate_scaling(scaling)
    options = mle_options or MLEOptions()
    confusion = noise.readout_confusion if noise is not None else None
    prep = build_prep_circuit(n)
    ideal = max_entangled_state(n)
    datasets = {}
    for s in scales:
        folded = fold_circuit(prep, folds_from_scale(s))
        rho = simulate(folded, DensityMatrix.computational_zero(2 * n), noise)
        datasets[s] = _measure(rho, shots, confusion, (seed, 0, s))
    fidelities = []
    states = []
    for s in scales:
        est = mle_reconstruct(datasets[s], options=options)
        states.append(est.state)
        fidelities.append(state_fidelity(ideal, est.state))
    mitigation = None
    mitigated_fidelity = None
    if len(scales) >= 2:
        mitigation = mitigate_dataset(datasets, order=extrapolation_order)
        est = mle_reconstruct(mitigation.dataset, options=options)
        mitigated_fidelity = state_fidelity(ideal, est.state)
    return StateZNEResult(
        qubit_count=n,
        scales=scales,
        shots=shots,
        fidelities=tuple(fidelities),
        mitigated_fidelity=mitigated_fidelity,
        mitigation=mitigation,
        states=tuple(states),
    )


@dataclass(frozen=True)
class _Estimate:
    state_fidelities: tuple
    mitigated_state_fidelity: float | None
    avg_gate_fidelities: tuple | None
    mitigated_avg_gate_fidelity: float | None
    choi: ChoiState
    kraus: KrausChannel
    state_mitigation: MitigatedDataset | None
    process_mitigation: MitigatedDataset | None
    mle_capped: bool


def _estimate(
    prep_datasets: dict,
    proc_datasets: dict,
    target: TargetProcess,
    scales: tuple,
    extrapolation_order: int,
    options: MLEOptions,
) -> _Estimate:
    n = target.qubit_count
    ideal = max_entangled_state(n)
    capped = False

    state_fids = []
    for s in scales:
        est = mle_reconstruct(prep_datasets[s], options=options)
        capped = capped or est.hit_iteration_cap
        state_fids.append(state_fidelity(ideal, est.state))

    favgs = [] if target.unitary is not None else None
    per_scale_choi = []
    for s in scales:
        est = mle_reconstruct(proc_datasets[s], options=options)
        capped = capped or est.hit_iteration_cap
        choi_s = ChoiState(channel_qubits=n, state=est.state)
        per_scale_choi.append(choi_s)
        if favgs is not None:
            favgs.append(avg_gate_fidelity(target.unitary, channel_from_choi(choi_s)))

    state_mit = proc_mit = None
    mit_state_fid = mit_favg = None
    if len(scales) >= 2:
        state_mit = mitigate_dataset(prep_datasets, order=extrapolation_order)
        est = mle_reconstruct(state_mit.dataset, options=options)
        capped = capped or est.hit_iteration_cap
        mit_state_fid = state_fidelity(ideal, est.state)

        proc_mit = mitigate_dataset(proc_datasets, order=extrapolation_order)
        est = mle_reconstruct(proc_mit.dataset, options=options)
        capped = capped or est.hit_iteration_cap
        choi = ChoiState(channel_qubits=n, state=est.state)
        kraus = channel_from_choi(choi)
        if target.unitary is not None:
            mit_favg = avg_gate_fidelity(target.unitary, kraus)
    else:
        choi = per_scale_choi[0]
        kraus = channel_from_choi(choi)

    return _Estimate(
        state_fidelities=tuple(state_fids),
        mitigated_state_fidelity=mit_state_fid,
        avg_gate_fidelities=tuple(favgs) if favgs is not None else None,
        mitigated_avg_gate_fidelity=mit_favg,
        choi=choi,
        kraus=kraus,
        state_mitigation=state_mit,
        process_mitigation=proc_mit,
        mle_capped=capped,
    )


def run_eapt(
    target: TargetProcess,
    noise: NoiseModel | None = None,
    shots: int | None = None,
    scaling=(1, 3, 5),
    seed: int = 0,
    bootstrap_resamples: int = 100,
    extrapolation_order: int = 1,
    mle_options: MLEOptions | None = None,
) -> EAPTResult:
    """Full entanglement-assisted process tomography with noise scaling.

    For each scaling factor the preparation circuit is folded, the (unfolded)
    target applied to the system half, and the joint output fully tomographed;
    readout correction runs per dataset, extrapolation across factors, and the
    zero-noise Choi state is reconstructed by maximum likelihood. A prep-only
    dataset per factor feeds the state-fidelity curve. Deterministic for a
    given seed; error bars come from a nonparametric bootstrap over shots.
    """
    n = target.qubit_count
    if not 1 <= n <= 3:
        raise ValueError(f"entanglement-assisted run supports 1..3 system qubits, got {n}")
    scales = _validate_scaling(scaling)
    options = mle_options or MLEOptions()
    confusion = noise.readout_confusion if noise is not None else None
    prep = build_prep_circuit(n)

    prep_raw = {}
    proc_raw = {}
    for s in scales:
        folded = fold_circuit(prep, folds_from_scale(s))
        rho_prep = simulate(folded, DensityMatrix.computational_zero(2 * n), noise)
        rho_proc = _apply_target(rho_prep, target, noise)
        prep_raw[s] = _measure(rho_prep, shots, confusion, (seed, 0, s))
        proc_raw[s] = _measure(rho_proc, shots, confusion, (seed, 1, s))

    est = _estimate(prep_raw, proc_raw, target, scales, extrapolation_order, options)

    state_errs = favg_errs = None
    mit_state_err = mit_favg_err = None
    if shots is not None and bootstrap_resamples > 0:
        boot_options = replace(options, starts=1)
        state_samples = []
        favg_samples = []
        mit_state_samples = []
        mit_favg_samples = []
        for b in range(bootstrap_resamples):
            prep_b = {s: _resample_dataset(prep_raw[s], (seed, 2, b, s)) for s in scales}
            proc_b = {s: _resample_dataset(proc_raw[s], (seed, 3, b, s)) for s in scales}
            eb = _estimate(prep_b, proc_b, target, scales, extrapolation_order, boot_options)
            state_samples.append(eb.state_fidelities)
            if eb.avg_gate_fidelities is not None:
                favg_samples.append(eb.avg_gate_fidelities)
            if eb.mitigated_state_fidelity is not None:
                mit_state_samples.append(eb.mitigated_state_fidelity)
            if eb.mitigated_avg_gate_fidelity is not None:
                mit_favg_samples.append(eb.mitigated_avg_gate_fidelity)
        state_errs = tuple(np.std(np.array(state_samples), axis=0, ddof=1))
        if favg_samples:
            favg_errs = tuple(np.std(np.array(favg_samples), axis=0, ddof=1))
        if mit_state_samples:
            mit_state_err = float(np.std(mit_state_samples, ddof=1))
        if mit_favg_samples:
            mit_favg_err = float(np.std(mit_favg_samples, ddof=1))

    tp_dev = est.choi.tp_deviation()
    return EAPTResult(
        target_name=target.name,
        qubit_count=n,
        scales=scales,
        shots=shots,
        state_fidelities=est.state_fidelities,
        state_fidelity_errors=state_errs,
        mitigated_state_fidelity=est.mitigated_state_fidelity,
        mitigated_state_fidelity_error=mit_state_err,
        avg_gate_fidelities=est.avg_gate_fidelities,
        avg_gate_fidelity_errors=favg_errs,
        mitigated_avg_gate_fidelity=est.mitigated_avg_gate_fidelity,
        mitigated_avg_gate_fidelity_error=mit_favg_err,
        choi=est.choi,
        kraus=est.kraus,
        tp_deviation=tp_dev,
        tp_warning=tp_dev > TP_WARN_THRESHOLD,
        state_mitigation=est.state_mitigation,
        process_mitigation=est.process_mitigation,
        mle_capped=est.mle_capped,
    )


# ---------------------------------------------------------------------------
# Standard probe-state tomography (the cross-check oracle)
# ---------------------------------------------------------------------------

PROBE_LABELS = ("0", "1", "+", "i")

_PROBE_KETS = {
    "0": np.array([1.0, 0.0], dtype=complex),
    "1": np.array([0.0, 1.0], dtype=complex),
    "+": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2),
    "i": np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2),
}


def _probe_prep_gate(label: str, qubit: int) -> Gate | None:
    if label == "0":
        return None
    if label == "1":
        return Gate("ry", (qubit,), theta=np.pi)
    if label == "+":
        return Gate("y2p", (qubit,))
    return Gate("custom", (qubit,), matrix=RX_M90)


def probe_states(n: int) -> list[np.ndarray]:
    """Ideal probe density matrices {|0>,|1>,|+>,|i>}^(x)n, qubit 0 first."""
    states = []
    for j in range(4 ** n):
        ket = np.array([1.0 + 0j])
        for q in range(n):
            digit = (j >> (2 * (n - 1 - q))) & 3
            ket = np.kron(ket, _PROBE_KETS[PROBE_LABELS[digit]])
        states.append(np.outer(ket, ket.conj()))
    return states


def run_standard_qpt(
    target: TargetProcess,
    noise: NoiseModel | None = None,
    shots: int | None = None,
    seed: int = 0,
    mle_options: MLEOptions | None = None,
) -> ChiMatrix:
    """Probe-state process tomography reconstructing the chi matrix.

    Each of the 4^n product probes is prepared by noisy single-qubit gates,
    passed through the target, and reconstructed by maximum-likelihood state
    tomography. The chi matrix solves the linear system expressing every
    reconstructed output in the probe operator basis, and is projected to the
    PSD cone at the end.
    """
    n = target.qubit_count
    if not 1 <= n <= 2:
        raise ValueError(f"standard probe tomography supports 1..2 qubits, got {n}")
    options = mle_options or MLEOptions()
    # the probe method never touches the ancilla register
    noise = noise.restrict(n) if noise is not None else None
    confusion = noise.readout_confusion if noise is not None else None
    d = 2 ** n

    outputs = []
    for j in range(4 ** n):
        gates = []
        for q in range(n):
            digit = (j >> (2 * (n - 1 - q))) & 3
            g = _probe_prep_gate(PROBE_LABELS[digit], q)
            if g is not None:
                gates.append(g)
        rho = simulate(Circuit(n, tuple(gates)), DensityMatrix.computational_zero(n), noise)
        if target.channel is not None:
            rho = DensityMatrix(apply_kraus(target.channel.operators, rho.matrix))
        else:
            rho = simulate(Circuit(n, target_gates(target)), rho, noise)
        ds = _measure(rho, shots, confusion, (seed, 4, j))
        outputs.append(mle_reconstruct(ds, options=options).state.matrix)

    probes = probe_states(n)
    # columns of basis are the vectorized probe operators; the canonical probe
    # set is informationally complete, so this matrix is invertible
    basis = np.stack([p.reshape(-1) for p in probes], axis=1)
    assert np.linalg.matrix_rank(basis) == d * d, "probe basis must span operator space"
    basis_inv = np.linalg.inv(basis)

    # decomposition of each reconstructed output over the probe basis
    lam = np.stack([basis_inv @ out.reshape(-1) for out in outputs])  # (probes, basis)

    # linear map from chi to those decompositions: P_m rho_j P_n^dag expanded
    # in the probe basis
    paulis = [pauli_operator(m, n) for m in range(d * d)]
    rows = []
    for j, rho_j in enumerate(probes):
        left = [p @ rho_j for p in paulis]
        for k in range(d * d):
            row = np.empty(d ** 4, dtype=complex)
            for m in range(d * d):
                for nn in range(d * d):
                    row[m * d * d + nn] = (basis_inv[k] @ (left[m] @ paulis[nn].conj().T).reshape(-1))
            rows.append(row)
    coeff_matrix = np.stack(rows)
    chi_vec, *_ = np.linalg.lstsq(coeff_matrix, lam.reshape(-1), rcond=None)
    chi = chi_vec.reshape(d * d, d * d)
    chi = (chi + chi.conj().T) / 2

    # PSD projection, preserving the pre-projection trace
    vals, vecs = np.linalg.eigh(chi)
    total = float(vals.sum())
    clipped = np.clip(vals, 0.0, None)
    if clipped.sum() > 0 and total > 0:
        clipped *= total / clipped.sum()
    chi = (vecs * clipped) @ vecs.conj().T
    chi = (chi + chi.conj().T) / 2
    return ChiMatrix(qubit_count=n, coefficients=chi)


# ---------------------------------------------------------------------------
# Method comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonReport:
    """Side-by-side reconstruction of one target by both methods."""

    target_name: str
    qubit_count: int
    choi_distance: float
    eapt_avg_gate_fidelity: float | None
    qpt_avg_gate_fidelity: float | None
    eapt_executions: int
    qpt_executions: int
    eapt: EAPTResult
    qpt_chi: ChiMatrix


def compare_methods(
    target: TargetProcess,
    noise: NoiseModel | None = None,
    shots: int | None = None,
    seed: int = 0,
    scaling=(1, 3, 5),
    bootstrap_resamples: int = 0,
    mle_options: MLEOptions | None = None,
) -> ComparisonReport:
    """Run both tomography schemes under identical noise and budget.

    Reports the Frobenius distance between the reconstructed Choi states, the
    average gate fidelity of each reconstruction against a unitary target, and
    the circuit-execution counts (one per preparation/setting/scale triple).
    """
    if target.qubit_count > 2:
        raise ValueError("comparison limited to 2 qubits by the probe-state method")
    eapt = run_eapt(
        target,
        noise=noise,
        shots=shots,
        scaling=scaling,
        seed=seed,
        bootstrap_resamples=bootstrap_resamples,
        mle_options=mle_options,
    )
    chi = run_standard_qpt(target, noise=noise, shots=shots, seed=seed, mle_options=mle_options)
    qpt_choi = choi_from_chi(chi)
    dist = float(np.linalg.norm(eapt.choi.state.matrix - qpt_choi.state.matrix))
    favg_eapt = eapt.mitigated_avg_gate_fidelity
    if favg_eapt is None and eapt.avg_gate_fidelities is not None:
        favg_eapt = eapt.avg_gate_fidelities[0]
    favg_qpt = None
    if target.unitary is not None:
        favg_qpt = avg_gate_fidelity(target.unitary, channel_from_chi(chi))
    n = target.qubit_count
    return ComparisonReport(
        target_name=target.name,
        qubit_count=n,
        choi_distance=dist,
        eapt_avg_gate_fidelity=favg_eapt,
        qpt_avg_gate_fidelity=favg_qpt,
        eapt_executions=3 ** (2 * n) * len(_validate_scaling(scaling)),
        qpt_executions=4 ** n * 3 ** n,
        eapt=eapt,
        qpt_chi=chi,
    )
