"""Quantum states and channel representations.

A channel lives in one of three interconvertible forms:

* Kraus operators {A_k}, acting as rho -> sum_k A_k rho A_k^dag
* a Choi state, the (trace-1) joint output of the channel applied to half of
  a maximally entangled state
* a chi matrix of coefficients over the n-qubit Pauli basis.

Also defines the parametric noise channels (depolarizing, amplitude damping,
dephasing) and the per-gate/per-qubit NoiseModel consumed by the simulator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .linalg import (
    as_complex_matrix,
    eig_hermitian,
    partial_trace,
    pauli_coefficients,
    pauli_operator,
    pauli_synthesis,
    tensor,
)

HERMITIAN_TOL = 1e-9
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
KRAUS_TP_TOL = 1e-8
CHOI_EIG_CUTOFF = 1e-10


def _num_qubits(dim: int) -> int:
    n = int(round(np.log2(dim)))
    if 2 ** n != dim or n < 1:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    return n


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, PSD, trace-1 operator on an n-qubit space."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        _num_qubits(m.shape[0])
        dev = np.max(np.abs(m - m.conj().T))
        if dev > HERMITIAN_TOL:
            raise ValueError(f"density matrix deviates from Hermitian by {dev:.3e}")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr:.12f} differs from 1")
        lo = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
        if lo < -PSD_TOL:
            raise ValueError(f"density matrix has eigenvalue {lo:.3e}; not PSD")
        object.__setattr__(self, "matrix", m)

    @property
    def num_qubits(self) -> int:
        return _num_qubits(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_state_vector(cls, psi: np.ndarray) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def computational_zero(cls, n: int) -> "DensityMatrix":
        d = 2 ** n
        m = np.zeros((d, d), dtype=complex)
        m[0, 0] = 1.0
        return cls(m)

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        d = 2 ** n
        return cls(np.eye(d, dtype=complex) / d)


def max_entangled_state(n: int) -> DensityMatrix:
    """Projector onto (1/sqrt(d)) sum_j |j>|j> over an n+n qubit register.

    The first register (qubits 0..n-1) is the system half, the second the
    ancilla half.
    """
    d = 2 ** n
    psi = np.zeros(d * d, dtype=complex)
    for j in range(d):
        psi[j * d + j] = 1.0
    psi /= np.sqrt(d)
    return DensityMatrix.from_state_vector(psi)


@dataclass(frozen=True)
class KrausChannel:
    """Operator-sum representation of a channel on input_qubits qubits.

    Trace preservation (sum_k A_k^dag A_k = I within 1e-8) is enforced unless
    the channel is explicitly flagged sub_normalized, which happens when it
    was extracted from an approximately trace-preserving Choi state.
    """

    operators: tuple
    sub_normalized: bool = False

    def __post_init__(self):
        ops = tuple(as_complex_matrix(a) for a in self.operators)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        _num_qubits(d)
        for a in ops:
            if a.shape != (d, d):
                raise ValueError("all Kraus operators must share one square shape")
        if not self.sub_normalized:
            dev = self.tp_deviation_of(ops)
            if dev > KRAUS_TP_TOL:
                raise ValueError(
                    f"Kraus operators deviate from trace preservation by {dev:.3e}; "
                    "pass sub_normalized=True to keep them"
                )
        object.__setattr__(self, "operators", ops)

    @staticmethod
    def tp_deviation_of(ops) -> float:
        d = ops[0].shape[0]
        acc = sum(a.conj().T @ a for a in ops)
        return float(np.max(np.abs(acc - np.eye(d))))

    @property
    def input_qubits(self) -> int:
        return _num_qubits(self.operators[0].shape[0])

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> "KrausChannel":
        return cls((as_complex_matrix(u),))

    def compose(self, inner: "KrausChannel") -> "KrausChannel":
        """self after inner: (self . inner)(rho) = self(inner(rho))."""
        ops = tuple(b @ a for b in self.operators for a in inner.operators)
        return KrausChannel(ops, sub_normalized=self.sub_normalized or inner.sub_normalized)

    def tensor_identity(self, extra_qubits: int) -> "KrausChannel":
        """Extend to act as E (x) I on extra trailing ancilla qubits."""
        eye = np.eye(2 ** extra_qubits, dtype=complex)
        return KrausChannel(
            tuple(tensor(a, eye) for a in self.operators),
            sub_normalized=self.sub_normalized,
        )


@dataclass(frozen=True)
class ChoiState:
    """Channel encoded as the trace-1 state (E (x) I)(|Phi+><Phi+|).

    The system register occupies qubits 0..n-1 of the 2n-qubit state and the
    ancilla register qubits n..2n-1.
    """

    channel_qubits: int
    state: DensityMatrix

    def __post_init__(self):
        if self.state.num_qubits != 2 * self.channel_qubits:
            raise ValueError(
                f"Choi state for {self.channel_qubits} channel qubits must live on "
                f"{2 * self.channel_qubits} qubits, got {self.state.num_qubits}"
            )

    @property
    def dim(self) -> int:
        return 2 ** self.channel_qubits

    def ancilla_marginal(self) -> np.ndarray:
        n = self.channel_qubits
        return partial_trace(self.state.matrix, [2] * (2 * n), keep=range(n, 2 * n))

    def tp_deviation(self) -> float:
        """Max-abs deviation of d * Tr_sys(choi) from the identity.

        Zero exactly when the encoded channel is trace preserving.
        """
        return float(np.max(np.abs(self.dim * self.ancilla_marginal() - np.eye(self.dim))))


@dataclass(frozen=True)
class ChiMatrix:
    """Channel coefficients chi_{mn} over the n-qubit Pauli-string basis.

    Basis order is lexicographic in (I, X, Y, Z) with qubit 0 the most
    significant factor. Hermitian and PSD within 1e-8 by contract.
    """

    qubit_count: int
    coefficients: np.ndarray

    def __post_init__(self):
        c = as_complex_matrix(self.coefficients)
        d2 = 4 ** self.qubit_count
        if c.shape != (d2, d2):
            raise ValueError(f"chi matrix must be {d2}x{d2}, got {c.shape}")
        dev = np.max(np.abs(c - c.conj().T))
        if dev > 1e-8:
            raise ValueError(f"chi matrix deviates from Hermitian by {dev:.3e}")
        lo = float(np.linalg.eigvalsh((c + c.conj().T) / 2)[0])
        if lo < -1e-8:
            raise ValueError(f"chi matrix has eigenvalue {lo:.3e}; not PSD")
        object.__setattr__(self, "coefficients", c)


def apply_channel(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """Operator-sum action sum_k A_k rho A_k^dag."""
    if ch.dim != rho.dim:
        raise ValueError(f"channel dim {ch.dim} does not match state dim {rho.dim}")
    out = apply_kraus(ch.operators, rho.matrix)
    return DensityMatrix(out)


def apply_kraus(operators, matrix: np.ndarray) -> np.ndarray:
    """Raw operator-sum action on a bare ndarray (no revalidation)."""
    out = np.zeros_like(matrix)
    for a in operators:
        out += a @ matrix @ a.conj().T
    return out


def choi_from_channel(ch: KrausChannel) -> ChoiState:
    """Apply E (x) I to the maximally entangled state of 2n qubits."""
    n = ch.input_qubits
    phi = max_entangled_state(n)
    extended = ch.tensor_identity(n)
    out = apply_kraus(extended.operators, phi.matrix)
    return ChoiState(channel_qubits=n, state=DensityMatrix(out))


def channel_from_choi(choi: ChoiState) -> KrausChannel:
    """Extract Kraus operators from the eigenvectors of a Choi state.

    Each eigenvector v with eigenvalue lam > 1e-10 yields the operator
    A[a, b] = sqrt(d * lam) * v[a * d + b]: with the system register as the
    most significant index, the d contiguous length-d segments of v are the
    rows of A. The result is flagged sub_normalized when the extracted set
    deviates from trace preservation by more than 1e-8 (eigenvalue truncation
    alone stays below that).
    """
    d = choi.dim
    eig = eig_hermitian(choi.state.matrix)
    if eig.eigenvalues[0] < -PSD_TOL:
        raise ValueError(f"Choi state has eigenvalue {eig.eigenvalues[0]:.3e}; not PSD")
    ops = []
    for lam, v in zip(eig.eigenvalues, eig.eigenvectors.T):
        if lam <= CHOI_EIG_CUTOFF:
            continue
        ops.append(np.sqrt(d * lam) * v.reshape(d, d))
    if not ops:
        raise ValueError("Choi state has no eigenvalue above the extraction cutoff")
    deviation = KrausChannel.tp_deviation_of(ops)
    return KrausChannel(tuple(ops), sub_normalized=deviation > KRAUS_TP_TOL)


def chi_from_channel(ch: KrausChannel) -> ChiMatrix:
    """Expand each Kraus operator in the Pauli basis: chi = sum_k c_k c_k^dag.

    c_k[m] = Tr(P_m A_k) / d, so that E(rho) = sum_{mn} chi_{mn} P_m rho P_n.
    """
    n = ch.input_qubits
    d = ch.dim
    coeffs = np.stack([pauli_coefficients(a, n) / d for a in ch.operators])
    chi = coeffs.T @ coeffs.conj()
    chi = (chi + chi.conj().T) / 2
    return ChiMatrix(qubit_count=n, coefficients=chi)


def channel_from_chi(chi: ChiMatrix) -> KrausChannel:
    """Kraus operators from the eigendecomposition of a chi matrix."""
    n = chi.qubit_count
    eig = eig_hermitian(chi.coefficients)
    ops = []
    for lam, u in zip(eig.eigenvalues, eig.eigenvectors.T):
        if lam <= CHOI_EIG_CUTOFF:
            continue
        ops.append(np.sqrt(lam) * pauli_synthesis(u, n))
    deviation = KrausChannel.tp_deviation_of(ops)
    return KrausChannel(tuple(ops), sub_normalized=deviation > KRAUS_TP_TOL)


def choi_from_chi(chi: ChiMatrix) -> ChoiState:
    """Choi state of the channel encoded by a chi matrix.

    Uses (P_m (x) I)|Phi+> = vec(P_m)/sqrt(d) with row-major vec, so the Choi
    matrix is V chi V^dag / d with V holding vectorized Pauli strings.
    """
    n = chi.qubit_count
    d = 2 ** n
    v = np.stack([pauli_operator(m, n).reshape(-1) for m in range(d * d)], axis=1)
    mat = v @ chi.coefficients @ v.conj().T / d
    mat = (mat + mat.conj().T) / 2
    return ChoiState(channel_qubits=n, state=DensityMatrix(mat))


# ---------------------------------------------------------------------------
# Parametric noise channels
# ---------------------------------------------------------------------------


def make_depolarizing(p: float, n: int) -> KrausChannel:
    """n-qubit depolarizing channel rho -> (1-p) rho + p I/d.

    Kraus set: sqrt(1 - p + p/d^2) I plus sqrt(p/d^2) P for every nontrivial
    Pauli string P.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability {p} outside [0, 1]")
    d = 2 ** n
    ops = [np.sqrt(1.0 - p + p / d ** 2) * np.eye(d, dtype=complex)]
    w = np.sqrt(p / d ** 2)
    if p > 0.0:
        for m in range(1, d * d):
            ops.append(w * pauli_operator(m, n))
    return KrausChannel(tuple(ops))


def make_amplitude_damping(gamma: float) -> KrausChannel:
    """Single-qubit energy relaxation |1> -> |0> with probability gamma."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"damping rate {gamma} outside [0, 1]")
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return KrausChannel((k0, k1))


def make_dephasing(lam: float) -> KrausChannel:
    """Single-qubit phase damping that scales coherences by sqrt(1 - lam)."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"dephasing rate {lam} outside [0, 1]")
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - lam)]], dtype=complex)
    k1 = np.array([[0.0, 0.0], [0.0, np.sqrt(lam)]], dtype=complex)
    return KrausChannel((k0, k1))


def make_readout_confusion(error_rates) -> tuple:
    """Symmetric per-qubit confusion matrices [[1-e, e], [e, 1-e]].

    Entry [i, j] is the probability of observing outcome i given true
    outcome j. Rates above 0.5 would make the map non-invertible and are
    rejected.
    """
    mats = []
    for e in error_rates:
        e = float(e)
        if not 0.0 <= e <= 0.5:
            raise ValueError(f"readout error rate {e} outside [0, 0.5]")
        mats.append(np.array([[1.0 - e, e], [e, 1.0 - e]]))
    return tuple(mats)


@dataclass(frozen=True)
class NoiseModel:
    """Per-gate noise rates plus per-qubit readout confusion.

    Depolarizing rates may be a single float or per-qubit / per-pair values;
    amplitude damping and dephasing apply per gate to each target qubit.
    """

    single_qubit_depolarizing: float | tuple = 0.0
    two_qubit_depolarizing: float | Mapping = 0.0
    amplitude_damping: float = 0.0
    dephasing: float = 0.0
    readout_confusion: tuple | None = None

    def __post_init__(self):
        p1 = self.single_qubit_depolarizing
        if not isinstance(p1, float | int):
            object.__setattr__(self, "single_qubit_depolarizing", tuple(float(p) for p in p1))
        p2 = self.two_qubit_depolarizing
        if isinstance(p2, Mapping):
            norm = {}
            for pair, p in p2.items():
                a, b = sorted(int(q) for q in pair)
                norm[(a, b)] = float(p)
            object.__setattr__(self, "two_qubit_depolarizing", norm)
        for p in self._all_probabilities():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"noise probability {p} outside [0, 1]")
        if self.readout_confusion is not None:
            mats = tuple(np.asarray(c, dtype=float) for c in self.readout_confusion)
            for c in mats:
                if c.shape != (2, 2) or np.any(c < 0):
                    raise ValueError("confusion matrices must be non-negative 2x2")
                if (
                    np.max(np.abs(c.sum(axis=0) - 1.0)) > 1e-12
                    or np.max(np.abs(c.sum(axis=1) - 1.0)) > 1e-12
                ):
                    raise ValueError("confusion matrix rows and columns must sum to 1")
            object.__setattr__(self, "readout_confusion", mats)

    def _all_probabilities(self):
        p1 = self.single_qubit_depolarizing
        yield from (p1 if isinstance(p1, tuple) else (float(p1),))
        p2 = self.two_qubit_depolarizing
        yield from (p2.values() if isinstance(p2, Mapping) else (float(p2),))
        yield float(self.amplitude_damping)
        yield float(self.dephasing)

    def single_qubit_rate(self, qubit: int) -> float:
        p1 = self.single_qubit_depolarizing
        if isinstance(p1, tuple):
            return p1[qubit]
        return float(p1)

    def two_qubit_rate(self, q1: int, q2: int) -> float:
        p2 = self.two_qubit_depolarizing
        if isinstance(p2, Mapping):
            pair = tuple(sorted((q1, q2)))
            if pair not in p2:
                raise KeyError(f"no two-qubit depolarizing rate for qubit pair {pair}")
            return p2[pair]
        return float(p2)

    def confusion_matrix(self, qubit: int) -> np.ndarray | None:
        if self.readout_confusion is None:
            return None
        return self.readout_confusion[qubit]

    def restrict(self, n: int) -> "NoiseModel":
        """Model for the first n qubits only (drops wider per-qubit data)."""
        p1 = self.single_qubit_depolarizing
        if isinstance(p1, tuple):
            p1 = p1[:n]
        p2 = self.two_qubit_depolarizing
        if isinstance(p2, Mapping):
            p2 = {pair: rate for pair, rate in p2.items() if max(pair) < n}
        confusion = self.readout_confusion[:n] if self.readout_confusion is not None else None
        return NoiseModel(p1, p2, self.amplitude_damping, self.dephasing, confusion)
