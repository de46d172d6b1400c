"""Dense complex linear algebra kernel: Kronecker products, partial traces,
Hermitian eigendecomposition, PSD square roots, and Pauli-basis transforms.

Everything operates on plain complex128 ndarrays. Qubit 0 is the leftmost
(most significant) tensor factor, so basis states are labeled big-endian.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

# Largest operator dimension the toolkit will build (6-qubit joint states
# give 64-dim states whose chi/Choi objects reach 4096).
MAX_DIM = 2 ** 12

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# Fixed single-qubit operator basis order used everywhere: I, X, Y, Z.
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)
PAULI_LABELS = "IXYZ"


def as_complex_matrix(m: np.ndarray) -> np.ndarray:
    """Coerce to a finite 2-D complex128 array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix contains non-finite entries")
    return a


def tensor(*matrices: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices, left factor most significant.

    Rejects results whose row or column count exceeds MAX_DIM.
    """
    if not matrices:
        raise ValueError("tensor() needs at least one matrix")
    mats = [as_complex_matrix(m) for m in matrices]
    rows = int(np.prod([m.shape[0] for m in mats]))
    cols = int(np.prod([m.shape[1] for m in mats]))
    if rows > MAX_DIM or cols > MAX_DIM:
        raise ValueError(
            f"tensor result {rows}x{cols} exceeds the supported maximum dimension {MAX_DIM}"
        )
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out all subsystems not in `keep`; kept subsystems retain their order.

    `dims` lists the local dimension of each subsystem; their product must
    match the (square) matrix dimension. Tracing out everything returns a
    1x1 matrix holding the trace.
    """
    rho = as_complex_matrix(rho)
    dims = [int(d) for d in dims]
    n = len(dims)
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(f"dims product {total} does not match matrix shape {rho.shape}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {n} subsystems")

    t = rho.reshape(dims + dims)
    # Contract bra/ket axes of every traced subsystem, highest index first so
    # axis positions stay valid.
    traced = [q for q in range(n) if q not in keep]
    remaining = n
    for q in sorted(traced, reverse=True):
        t = np.trace(t, axis1=q, axis2=q + remaining)
        remaining -= 1
    d_keep = int(np.prod([dims[q] for q in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


@dataclass(frozen=True)
class HermitianEigen:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def hermitian_deviation(m: np.ndarray) -> float:
    """Max-abs deviation of m from its Hermitian part."""
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def eig_hermitian(m: np.ndarray, tol: float = 1e-8) -> HermitianEigen:
    """Eigendecompose a Hermitian matrix after symmetrizing (M + M†)/2.

    Raises if the input is non-square or deviates from Hermiticity by more
    than `tol` in max-abs norm.
    """
    m = as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    dev = hermitian_deviation(m)
    if dev > tol:
        raise ValueError(f"matrix deviates from Hermitian by {dev:.3e} (> {tol:.0e})")
    sym = (m + m.conj().T) / 2
    vals, vecs = np.linalg.eigh(sym)
    return HermitianEigen(eigenvalues=vals, eigenvectors=vecs)


def sqrt_psd(m: np.ndarray, neg_tol: float = 1e-10) -> np.ndarray:
    """Hermitian square root of a PSD matrix via eigendecomposition.

    Eigenvalues in [-neg_tol, 0) are clipped to zero; anything more negative
    signals a non-physical input and raises.
    """
    eig = eig_hermitian(m)
    vals = eig.eigenvalues
    if vals.size and vals[0] < -neg_tol:
        raise ValueError(f"matrix has eigenvalue {vals[0]:.3e} below -{neg_tol:.0e}; not PSD")
    root = np.sqrt(np.clip(vals, 0.0, None))
    v = eig.eigenvectors
    r = (v * root) @ v.conj().T
    return (r + r.conj().T) / 2


# ---------------------------------------------------------------------------
# Pauli-string machinery
#
# Strings over n qubits are indexed 0..4^n-1 in lexicographic (I, X, Y, Z)
# order with qubit 0 as the most significant base-4 digit.
# ---------------------------------------------------------------------------


def pauli_digits(index: int, n: int) -> tuple[int, ...]:
    """Base-4 digits of a Pauli-string index, qubit 0 first."""
    return tuple((index >> (2 * (n - 1 - q))) & 3 for q in range(n))


def pauli_label(index: int, n: int) -> str:
    return "".join(PAULI_LABELS[d] for d in pauli_digits(index, n))


def pauli_operator(index: int, n: int) -> np.ndarray:
    """Dense matrix of the n-qubit Pauli string with the given index."""
    return tensor(*(PAULIS[d] for d in pauli_digits(index, n)))


@lru_cache(maxsize=None)
def _coeff_kernel() -> np.ndarray:
    # k[p, a, b] = sigma_p[b, a], so contracting with M[a, b] yields Tr(sigma_p M)
    return np.stack([p.T for p in PAULIS]).astype(complex)


@lru_cache(maxsize=None)
def _synth_kernel() -> np.ndarray:
    # k[p, a, b] = sigma_p[a, b]
    return np.stack(PAULIS).astype(complex)


def pauli_coefficients(m: np.ndarray, n: int) -> np.ndarray:
    """All 4^n traces Tr(P M) for Pauli strings P, as a flat complex array.

    Computed one qubit at a time, so the cost is O(n 4^n) instead of
    materializing every string.
    """
    m = as_complex_matrix(m)
    d = 2 ** n
    if m.shape != (d, d):
        raise ValueError(f"expected {d}x{d} matrix for n={n}, got {m.shape}")
    k = _coeff_kernel()
    t = m.reshape((2,) * (2 * n))
    for q in range(n):
        # axes: (p_0..p_{q-1}, a_q..a_{n-1}, b_q..b_{n-1}); contract the
        # current qubit's bra/ket pair at positions (q, n).
        t = np.tensordot(t, k, axes=([q, n], [1, 2]))
        t = np.moveaxis(t, -1, q)
    return t.reshape(4 ** n)


def pauli_synthesis(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Sum c_P * P over all Pauli strings; inverse of pauli_coefficients up to d.

    pauli_synthesis(pauli_coefficients(M, n), n) == 2^n * M.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != (4 ** n,):
        raise ValueError(f"expected {4 ** n} coefficients, got shape {coeffs.shape}")
    k = _synth_kernel()
    t = coeffs.reshape((4,) * n)
    for q in range(n):
        # axes: (a_0, b_0, .., a_{q-1}, b_{q-1}, p_q..p_{n-1}); expand the
        # leading remaining Pauli axis into a bra/ket pair.
        t = np.tensordot(t, k, axes=([2 * q], [0]))
        t = np.moveaxis(t, [-2, -1], [2 * q, 2 * q + 1])
    t = t.reshape((2, 2) * n)
    # interleaved (a_0, b_0, a_1, b_1, ...) -> (a_0..a_{n-1}, b_0..b_{n-1})
    perm = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    return t.transpose(perm).reshape(2 ** n, 2 ** n)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases
