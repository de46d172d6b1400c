"""Gate set, entangled-state preparation, unitary folding, and the noisy
density-matrix simulator.

The native gates are RY rotations (Y2P/Y2M are the +-pi/2 cases), CZ, CNOT,
and custom unitaries. CNOT is normally compiled to the hardware-style
sequence Y2M, CZ, Y2P on the target qubit (see cnot_gates), so that folding a
circuit amplifies exactly the gates that would run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .channels import DensityMatrix, NoiseModel, make_amplitude_damping, make_dephasing, make_depolarizing
from .linalg import as_complex_matrix

GATE_ARITY = {"ry": 1, "y2p": 1, "y2m": 1, "cz": 2, "cnot": 2}

CZ_MATRIX = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def ry(theta: float) -> np.ndarray:
    """Rotation about Y: [[cos t/2, -sin t/2], [sin t/2, cos t/2]]."""
    if not np.isfinite(theta):
        raise ValueError(f"rotation angle must be finite, got {theta}")
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    """One gate application: a kind, ordered target qubits, and parameters.

    kind "ry" carries theta; kind "custom" carries an explicit unitary whose
    inverse is its conjugate transpose.
    """

    kind: str
    targets: tuple
    theta: float | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self):
        targets = tuple(int(q) for q in self.targets)
        object.__setattr__(self, "targets", targets)
        if len(set(targets)) != len(targets) or any(q < 0 for q in targets):
            raise ValueError(f"gate targets must be distinct and non-negative: {targets}")
        if self.kind in GATE_ARITY:
            if len(targets) != GATE_ARITY[self.kind]:
                raise ValueError(f"{self.kind} gate expects {GATE_ARITY[self.kind]} targets")
            if self.kind == "ry" and self.theta is None:
                raise ValueError("ry gate needs an angle")
        elif self.kind == "custom":
            if self.matrix is None:
                raise ValueError("custom gate needs a matrix")
            m = as_complex_matrix(self.matrix)
            d = 2 ** len(targets)
            if m.shape != (d, d):
                raise ValueError(f"custom gate matrix must be {d}x{d} for {len(targets)} targets")
            if np.max(np.abs(m.conj().T @ m - np.eye(d))) > 1e-10:
                raise ValueError("custom gate matrix is not unitary")
            object.__setattr__(self, "matrix", m)
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    @property
    def arity(self) -> int:
        return len(self.targets)

    def unitary(self) -> np.ndarray:
        if self.kind == "ry":
            return ry(self.theta)
        if self.kind == "y2p":
            return ry(np.pi / 2)
        if self.kind == "y2m":
            return ry(-np.pi / 2)
        if self.kind == "cz":
            return CZ_MATRIX
        if self.kind == "cnot":
            return CNOT_MATRIX
        return self.matrix

    def inverse(self) -> "Gate":
        if self.kind == "ry":
            return Gate("ry", self.targets, theta=-self.theta)
        if self.kind == "y2p":
            return Gate("y2m", self.targets)
        if self.kind == "y2m":
            return Gate("y2p", self.targets)
        if self.kind in ("cz", "cnot"):
            return self
        return Gate("custom", self.targets, matrix=self.matrix.conj().T)


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over qubit_count qubits; immutable once built."""

    qubit_count: int
    gates: tuple

    def __post_init__(self):
        gates = tuple(self.gates)
        for g in gates:
            if max(g.targets) >= self.qubit_count:
                raise ValueError(
                    f"gate targets {g.targets} exceed circuit width {self.qubit_count}"
                )
        object.__setattr__(self, "gates", gates)

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    def unitary(self) -> np.ndarray:
        """Noiseless full-space unitary (product of embedded gates)."""
        u = np.eye(2 ** self.qubit_count, dtype=complex)
        for g in self.gates:
            u = embed_unitary(g.unitary(), g.targets, self.qubit_count) @ u
        return u


def cnot_gates(control: int, target: int) -> tuple:
    """CNOT compiled to the native sequence: Y2M, CZ, Y2P on the target."""
    return (
        Gate("y2m", (target,)),
        Gate("cz", (control, target)),
        Gate("y2p", (target,)),
    )


def embed_unitary(g: np.ndarray, targets, n: int) -> np.ndarray:
    """Lift a k-qubit gate matrix onto the full 2^n space at `targets`.

    Qubit 0 is the most significant basis index; the gate matrix's own qubit
    order follows the order of `targets`.
    """
    targets = tuple(targets)
    k = len(targets)
    d = 2 ** n
    gt = np.asarray(g, dtype=complex).reshape((2,) * (2 * k))
    u = np.eye(d, dtype=complex).reshape((2,) * (2 * n))
    # contract the gate's input axes with the identity's output axes at the
    # target positions, then move the gate's output axes back into place
    u = np.tensordot(gt, u, axes=(tuple(range(k, 2 * k)), targets))
    u = np.moveaxis(u, tuple(range(k)), targets)
    return u.reshape(d, d)


def scale_from_folds(folds: int) -> int:
    return 2 * folds + 1


def folds_from_scale(s: int) -> int:
    s = int(s)
    if s < 1 or s % 2 == 0:
        raise ValueError(f"scaling factor must be an odd positive integer, got {s}")
    return (s - 1) // 2


def fold_circuit(c: Circuit, folds: int) -> Circuit:
    """Global unitary folding: U -> (U U^dag)^folds U as an explicit gate list.

    U^dag is realized by reversing the gate order and inverting each gate, so
    the folded circuit has exactly (2*folds + 1) times the original gate count
    and the same noiseless unitary.
    """
    if folds < 0:
        raise ValueError(f"fold count must be >= 0, got {folds}")
    inverse = tuple(g.inverse() for g in reversed(c.gates))
    gates = list(c.gates)
    for _ in range(folds):
        gates.extend(inverse)
        gates.extend(c.gates)
    return Circuit(c.qubit_count, tuple(gates))


def build_prep_circuit(n: int) -> Circuit:
    """Circuit preparing the n+n-qubit maximally entangled state from |0...0>.

    n parallel Bell pairs: Y2P on system qubit i, then CNOT from system qubit
    i to ancilla qubit n+i (compiled). System register is qubits 0..n-1.
    """
    if not 1 <= n <= 3:
        raise ValueError(f"prep circuit supports 1..3 system qubits, got {n}")
    gates = []
    for i in range(n):
        gates.append(Gate("y2p", (i,)))
        gates.extend(cnot_gates(i, n + i))
    return Circuit(2 * n, tuple(gates))


def _depolarizing_rate(noise: NoiseModel, g: Gate) -> float:
    if g.arity == 1:
        return noise.single_qubit_rate(g.targets[0])
    if g.arity == 2:
        return noise.two_qubit_rate(*g.targets)
    # wider custom gates reuse the scalar two-qubit rate
    p2 = noise.two_qubit_depolarizing
    if isinstance(p2, Mapping):
        raise ValueError("per-pair depolarizing rates defined, but gate has arity > 2")
    return float(p2)


def _apply_gate_noise(rho: np.ndarray, g: Gate, n: int, noise: NoiseModel) -> np.ndarray:
    p = _depolarizing_rate(noise, g)
    if p > 0.0:
        ops = make_depolarizing(p, g.arity).operators
        rho = _apply_local_kraus(rho, ops, g.targets, n)
    if noise.amplitude_damping > 0.0:
        ops = make_amplitude_damping(noise.amplitude_damping).operators
        for q in g.targets:
            rho = _apply_local_kraus(rho, ops, (q,), n)
    if noise.dephasing > 0.0:
        ops = make_dephasing(noise.dephasing).operators
        for q in g.targets:
            rho = _apply_local_kraus(rho, ops, (q,), n)
    return rho


def _apply_local_kraus(rho: np.ndarray, ops, targets, n: int) -> np.ndarray:
    out = np.zeros_like(rho)
    for a in ops:
        full = embed_unitary(a, targets, n)
        out += full @ rho @ full.conj().T
    return out


def simulate(c: Circuit, input_state: DensityMatrix, noise: NoiseModel | None = None) -> DensityMatrix:
    """Run the circuit on a density matrix, gate by gate.

    Each gate applies its unitary conjugation and then, when a noise model is
    given, that gate's noise channels in fixed order: depolarizing (rate by
    gate arity and targets), amplitude damping, dephasing. Idle qubits are
    untouched.
    """
    if input_state.dim != 2 ** c.qubit_count:
        raise ValueError(
            f"input dimension {input_state.dim} does not match circuit width {c.qubit_count}"
        )
    rho = input_state.matrix.copy()
    for g in c.gates:
        u = embed_unitary(g.unitary(), g.targets, c.qubit_count)
        rho = u @ rho @ u.conj().T
        if noise is not None:
            rho = _apply_gate_noise(rho, g, c.qubit_count, noise)
    return DensityMatrix(rho)
