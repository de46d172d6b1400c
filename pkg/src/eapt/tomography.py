"""Quantum state tomography: measurement settings, counts simulation,
readout-error mitigation, Stokes linear inversion, and maximum-likelihood
reconstruction with a Cholesky-style parameterization.

Measurement settings are strings over {X, Y, Z}, one basis letter per qubit.
A complete dataset holds one counts record for each of the 3^n settings.

The likelihood machinery works in the Pauli-coefficient picture: the
projector of outcome o under setting s expands as
(1/d) * sum_m W[o, m] P_(s,m), where W is the 2^n Walsh (+-1) matrix, m runs
over qubit subsets, and P_(s,m) is the Pauli string with the setting's basis
on the qubits in m. Predicted probabilities and the likelihood gradient then
cost O(3^n 4^n) per evaluation instead of rebuilding projectors.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from .channels import DensityMatrix
from .linalg import pauli_coefficients, pauli_synthesis

BASIS_LETTERS = "XYZ"
_BASIS_DIGIT = {"X": 1, "Y": 2, "Z": 3}

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_SDG = np.diag([1.0, -1.0j])
# rotate the chosen basis into Z: r sigma_b r^dag = Z
BASIS_ROTATIONS = {"X": HADAMARD, "Y": HADAMARD @ _SDG, "Z": np.eye(2, dtype=complex)}

PROB_FLOOR = 1e-9
REM_CLIP_FLAG_THRESHOLD = 0.05


def all_settings(n: int) -> list[str]:
    """All 3^n measurement settings in lexicographic order (XX.. first)."""
    if not 1 <= n <= 6:
        raise ValueError(f"settings supported for 1..6 qubits, got {n}")
    return ["".join(p) for p in itertools.product(BASIS_LETTERS, repeat=n)]


def setting_rotation(setting: str) -> np.ndarray:
    """Full-register unitary rotating the setting's bases into Z measurements."""
    out = np.array([[1.0 + 0j]])
    for letter in setting:
        out = np.kron(out, BASIS_ROTATIONS[letter])
    return out


@lru_cache(maxsize=None)
def walsh_matrix(n: int) -> np.ndarray:
    """W[o, m] = (-1)^popcount(o & m) as an n-fold Kronecker power."""
    w = np.array([[1.0, 1.0], [1.0, -1.0]])
    out = np.array([[1.0]])
    for _ in range(n):
        out = np.kron(out, w)
    return out


@lru_cache(maxsize=None)
def setting_pauli_indices(setting: str) -> np.ndarray:
    """Pauli-string index for every qubit-subset mask of a setting.

    Entry m is the index of the string that has the setting's basis on the
    qubits selected by mask m and identity elsewhere (qubit 0 = most
    significant bit of m and most significant base-4 digit of the index).
    """
    n = len(setting)
    idx = np.zeros(2 ** n, dtype=np.int64)
    for m in range(2 ** n):
        acc = 0
        for q in range(n):
            digit = _BASIS_DIGIT[setting[q]] if (m >> (n - 1 - q)) & 1 else 0
            acc = acc * 4 + digit
        idx[m] = acc
    return idx


@lru_cache(maxsize=None)
def _stacked_setting_indices(n: int) -> np.ndarray:
    return np.stack([setting_pauli_indices(s) for s in all_settings(n)])


@dataclass(frozen=True)
class CountsRecord:
    """Outcome frequencies for one measurement setting.

    shots is None in exact-probability mode. rem_clipped marks records whose
    readout correction clipped some outcome by more than 0.05.
    """

    setting: str
    shots: int | None
    frequencies: np.ndarray
    rem_clipped: bool = False

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        n = len(self.setting)
        if any(c not in BASIS_LETTERS for c in self.setting):
            raise ValueError(f"invalid setting {self.setting!r}")
        if f.shape != (2 ** n,):
            raise ValueError(f"expected {2 ** n} outcome frequencies, got shape {f.shape}")
        if np.any(f < -1e-12):
            raise ValueError("negative outcome frequency")
        if abs(f.sum() - 1.0) > 1e-9:
            raise ValueError(f"frequencies sum to {f.sum():.12f}, expected 1")
        if self.shots is not None and self.shots <= 0:
            raise ValueError(f"shots must be positive, got {self.shots}")
        object.__setattr__(self, "frequencies", f)


@dataclass(frozen=True)
class TomographyDataset:
    """One CountsRecord for each of the 3^n settings, in lexicographic order."""

    qubit_count: int
    records: tuple

    def __post_init__(self):
        expected = all_settings(self.qubit_count)
        by_setting = {}
        for r in self.records:
            if r.setting in by_setting:
                raise ValueError(f"duplicate setting {r.setting}")
            by_setting[r.setting] = r
        if sorted(by_setting) != expected:
            missing = sorted(set(expected) - set(by_setting))
            extra = sorted(set(by_setting) - set(expected))
            raise ValueError(f"incomplete dataset: missing {missing[:5]}, extra {extra[:5]}")
        object.__setattr__(self, "records", tuple(by_setting[s] for s in expected))

    def frequencies_matrix(self) -> np.ndarray:
        """(3^n, 2^n) array of outcome frequencies, settings in order."""
        return np.stack([r.frequencies for r in self.records])

    def record(self, setting: str) -> CountsRecord:
        return self.records[all_settings(self.qubit_count).index(setting)]


# ---------------------------------------------------------------------------
# Counts simulation and readout confusion
# ---------------------------------------------------------------------------


def _confusion_map(confusion, n: int) -> np.ndarray:
    if len(confusion) != n:
        raise ValueError(f"need one confusion matrix per qubit ({n}), got {len(confusion)}")
    out = np.array([[1.0]])
    for c in confusion:
        out = np.kron(out, np.asarray(c, dtype=float))
    return out


def _exact_probabilities(stokes: np.ndarray, setting: str) -> np.ndarray:
    d = 2 ** len(setting)
    g = stokes[setting_pauli_indices(setting)]
    return (g @ walsh_matrix(len(setting))) / d


def born_probabilities(rho: DensityMatrix, setting: str) -> np.ndarray:
    """Outcome probabilities of measuring the given Pauli bases on rho."""
    if len(setting) != rho.num_qubits:
        raise ValueError(f"setting {setting!r} does not match {rho.num_qubits} qubits")
    stokes = pauli_coefficients(rho.matrix, rho.num_qubits).real
    p = _exact_probabilities(stokes, setting)
    return np.clip(p, 0.0, None) / np.clip(p, 0.0, None).sum()


def simulate_counts(
    rho: DensityMatrix,
    setting: str,
    shots: int | None = None,
    confusion=None,
    seed=0,
) -> CountsRecord:
    """Measure one setting: exact Born probabilities or seeded multinomial draws.

    Readout confusion, when given, acts as a stochastic map on the outcome
    distribution before any sampling.
    """
    p = born_probabilities(rho, setting)
    if confusion is not None:
        p = _confusion_map(confusion, rho.num_qubits) @ p
    if shots is None:
        return CountsRecord(setting=setting, shots=None, frequencies=p)
    if shots <= 0:
        raise ValueError(f"shots must be positive, got {shots}")
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, p / p.sum())
    return CountsRecord(setting=setting, shots=shots, frequencies=counts / shots)


def collect_dataset(
    rho: DensityMatrix,
    shots: int | None = None,
    confusion=None,
    seed=0,
) -> TomographyDataset:
    """Measure all 3^n settings of rho into a complete dataset.

    Each setting's sampler is seeded from (seed, setting index), so results do
    not depend on evaluation order. `seed` may be an int or a tuple of ints
    when the caller wants to namespace several collections under one run seed.
    """
    n = rho.num_qubits
    base = (int(seed),) if np.isscalar(seed) else tuple(int(x) for x in seed)
    records = []
    for i, setting in enumerate(all_settings(n)):
        records.append(
            simulate_counts(
                rho,
                setting,
                shots=shots,
                confusion=confusion,
                seed=np.random.SeedSequence(base + (i,)),
            )
        )
    return TomographyDataset(qubit_count=n, records=tuple(records))


def rem_correct(record: CountsRecord, confusion) -> CountsRecord:
    """Invert the readout-confusion map on one record's outcome distribution.

    The corrected distribution is clipped to be non-negative and renormalized;
    the record is flagged when clipping moved any entry by more than 0.05.
    """
    n = len(record.setting)
    mats = [np.asarray(c, dtype=float) for c in confusion]
    for c in mats:
        if abs(np.linalg.det(c)) < 1e-12:
            raise ValueError("confusion matrix is singular; cannot correct readout")
    inverse = _confusion_map([np.linalg.inv(c) for c in mats], n)
    raw = inverse @ record.frequencies
    clipped = np.clip(raw, 0.0, None)
    shift = float(np.max(np.abs(clipped - raw)))
    total = clipped.sum()
    if total <= 0:
        raise ValueError("readout correction produced an empty distribution")
    return CountsRecord(
        setting=record.setting,
        shots=record.shots,
        frequencies=clipped / total,
        rem_clipped=shift > REM_CLIP_FLAG_THRESHOLD,
    )


def rem_correct_dataset(data: TomographyDataset, confusion) -> TomographyDataset:
    return TomographyDataset(
        qubit_count=data.qubit_count,
        records=tuple(rem_correct(r, confusion) for r in data.records),
    )


# ---------------------------------------------------------------------------
# Stokes parameters and linear inversion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StokesVector:
    """Pauli-string expectation values; the identity entry is exactly 1."""

    qubit_count: int
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.shape != (4 ** self.qubit_count,):
            raise ValueError(f"expected {4 ** self.qubit_count} coefficients, got {c.shape}")
        if c[0] != 1.0:
            raise ValueError("identity Stokes coefficient must be exactly 1")
        object.__setattr__(self, "coefficients", c)


def stokes_from_dataset(data: TomographyDataset) -> StokesVector:
    """Estimate every Pauli-string expectation from the dataset.

    A string is estimated from each setting whose bases cover its non-identity
    factors (identity factors are marginalized by the Walsh sum); estimates
    from multiple compatible settings are averaged uniformly.
    """
    n = data.qubit_count
    w = walsh_matrix(n)
    idx = _stacked_setting_indices(n)
    estimates = data.frequencies_matrix() @ w  # (settings, masks)
    sums = np.bincount(idx.ravel(), weights=estimates.ravel(), minlength=4 ** n)
    counts = np.bincount(idx.ravel(), minlength=4 ** n)
    coeffs = sums / counts
    coeffs[0] = 1.0
    return StokesVector(qubit_count=n, coefficients=coeffs)


def linear_inversion(s: StokesVector) -> np.ndarray:
    """Direct reconstruction (1/d) sum_P S_P P; Hermitian but possibly non-PSD."""
    n = s.qubit_count
    rho = pauli_synthesis(s.coefficients.astype(complex), n) / 2 ** n
    return (rho + rho.conj().T) / 2


# ---------------------------------------------------------------------------
# Cholesky-style parameterization
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _lower_indices(d: int):
    rows, cols = [], []
    for r in range(d):
        for c in range(r):
            rows.append(r)
            cols.append(c)
    return np.array(rows, dtype=np.intp), np.array(cols, dtype=np.intp)


def cholesky_factor(t: np.ndarray) -> np.ndarray:
    """Lower-triangular T from d^2 real parameters.

    The first d parameters are the (real) diagonal; the remaining d^2 - d fill
    the strictly-lower triangle row by row as (real, imaginary) pairs.
    """
    t = np.asarray(t, dtype=float)
    d = int(round(np.sqrt(t.size)))
    if d * d != t.size:
        raise ValueError(f"parameter vector length {t.size} is not a perfect square")
    rows, cols = _lower_indices(d)
    factor = np.zeros((d, d), dtype=complex)
    factor[np.diag_indices(d)] = t[:d]
    off = t[d:]
    factor[rows, cols] = off[0::2] + 1j * off[1::2]
    return factor


def density_from_params(t: np.ndarray) -> np.ndarray:
    """rho(t) = T^dag T / Tr(T^dag T); PSD, Hermitian, trace 1 by construction."""
    factor = cholesky_factor(t)
    m = factor.conj().T @ factor
    trace = float(np.trace(m).real)
    if trace < 1e-30:
        raise ValueError("all-zero parameter vector has no associated state")
    m = m / trace
    return (m + m.conj().T) / 2


def params_from_density(rho: np.ndarray, blend: float = 1e-6) -> np.ndarray:
    """Parameters whose rho(t) approximates a (possibly non-PSD) matrix.

    Negative eigenvalues are clipped, the state renormalized, and a small
    maximally-mixed component blended in so the triangular factorization is
    well defined even for rank-deficient inputs.
    """
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    sym = (rho + rho.conj().T) / 2
    vals, vecs = np.linalg.eigh(sym)
    vals = np.clip(vals, 0.0, None)
    if vals.sum() <= 0:
        m = np.eye(d, dtype=complex) / d
    else:
        m = (vecs * vals) @ vecs.conj().T
        m = m / np.trace(m).real
    m = (1.0 - blend) * m + blend * np.eye(d) / d
    # factor m = T^dag T with T lower-triangular by Cholesky of the
    # index-reversed matrix
    j = np.eye(d)[::-1]
    lower = np.linalg.cholesky(j @ m @ j)
    factor = j @ lower.conj().T @ j
    rows, cols = _lower_indices(d)
    t = np.empty(d * d)
    t[:d] = np.diag(factor).real
    off = factor[rows, cols]
    t[d + 0 :: 2] = off.real
    t[d + 1 :: 2] = off.imag
    return t


# ---------------------------------------------------------------------------
# Maximum-likelihood reconstruction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MLEOptions:
    """Optimizer settings; defaults give the deterministic 3-start procedure."""

    max_iterations: int = 5000
    ftol: float = 1e-10
    prob_floor: float = PROB_FLOOR
    starts: int = 3
    random_seed: int = 0


@dataclass(frozen=True)
class MLEResult:
    state: DensityMatrix
    params: np.ndarray
    objective: float
    iterations: int
    hit_iteration_cap: bool
    start_label: str


class _Likelihood:
    """Vectorized objective and gradient for the Gaussian log-likelihood.

    Objective: sum over all (setting, outcome) pairs of
    (q - p)^2 / (2 * max(q, floor)), with q the predicted probability of the
    basis-rotated projector and p the observed frequency clipped to [floor, 1].
    """

    def __init__(self, data: TomographyDataset, floor: float):
        self.n = data.qubit_count
        self.d = 2 ** self.n
        self.floor = floor
        self.w = walsh_matrix(self.n)
        self.idx = _stacked_setting_indices(self.n)
        self.flat_idx = self.idx.ravel()
        self.p = np.clip(data.frequencies_matrix(), floor, 1.0)

    def value_and_grad(self, t: np.ndarray):
        d = self.d
        factor = cholesky_factor(t)
        m = factor.conj().T @ factor
        tau = float(np.trace(m).real)
        if tau < 1e-30:
            # zero parameter vector: push the optimizer away with a flat penalty
            return 1e30, np.zeros_like(t)
        rho = m / tau
        stokes = pauli_coefficients(rho, self.n).real
        q = (stokes[self.idx] @ self.w) / d
        qf = np.maximum(q, self.floor)
        resid = q - self.p
        value = float(np.sum(resid * resid / (2.0 * qf)))

        # d(value)/dq, accounting for the floor in the denominator
        wq = resid / qf
        above = q > self.floor
        wq[above] -= resid[above] ** 2 / (2.0 * qf[above] ** 2)
        # gradient wrt the Pauli coefficients of rho, then back to a matrix
        coeff_grad = np.bincount(self.flat_idx, weights=(wq @ self.w).ravel(), minlength=4 ** self.n) / d
        g = pauli_synthesis(coeff_grad.astype(complex), self.n)
        g = (g + g.conj().T) / 2
        # chain through rho = M / tau and M = T^dag T
        gp = (g - np.trace(g @ rho).real * np.eye(d)) / tau
        y = gp @ factor.conj().T
        rows, cols = _lower_indices(d)
        grad = np.empty_like(t)
        grad[:d] = 2.0 * np.diag(y).real
        yv = y[cols, rows]
        grad[d + 0 :: 2] = 2.0 * yv.real
        grad[d + 1 :: 2] = -2.0 * yv.imag
        return value, grad


def _initial_points(data: TomographyDataset, init, options: MLEOptions):
    d = 2 ** data.qubit_count
    points = []
    if init is not None:
        points.append(("init", np.asarray(init, dtype=float)))
    else:
        rho_li = linear_inversion(stokes_from_dataset(data))
        points.append(("linear_inversion", params_from_density(rho_li)))
    mixed = np.zeros(d * d)
    mixed[:d] = 1.0
    points.append(("maximally_mixed", mixed))
    rng = np.random.default_rng(options.random_seed)
    points.append(("random", rng.standard_normal(d * d) * 0.3))
    return points[: max(1, options.starts)]


def mle_reconstruct(
    data: TomographyDataset,
    init: np.ndarray | None = None,
    options: MLEOptions | None = None,
) -> MLEResult:
    """Maximum-likelihood state estimate over the Cholesky parameterization.

    Runs a deterministic L-BFGS descent from up to `options.starts` starting
    points (provided/linear-inversion init, maximally mixed, seeded random)
    and keeps the best objective. The result is flagged when the winning start
    stopped at the iteration cap instead of the tolerance.
    """
    options = options or MLEOptions()
    model = _Likelihood(data, options.prob_floor)
    best = None
    for label, t0 in _initial_points(data, init, options):
        res = minimize(
            model.value_and_grad,
            t0,
            jac=True,
            method="L-BFGS-B",
            options={
                "maxiter": options.max_iterations,
                "ftol": options.ftol,
                "gtol": 1e-12,
                "maxcor": 20,
            },
        )
        if not np.isfinite(res.fun):
            raise FloatingPointError(f"MLE objective diverged from start {label!r}")
        if best is None or res.fun < best[1].fun:
            best = (label, res)
    label, res = best
    rho = density_from_params(res.x)
    return MLEResult(
        state=DensityMatrix(rho),
        params=res.x,
        objective=float(res.fun),
        iterations=int(res.nit),
        hit_iteration_cap=res.nit >= options.max_iterations,
        start_label=label,
    )


# ---------------------------------------------------------------------------
# Dataset serialization
# ---------------------------------------------------------------------------


def dataset_to_dict(data: TomographyDataset) -> dict:
    return {
        "qubit_count": data.qubit_count,
        "records": [
            {
                "setting": r.setting,
                "shots": "exact" if r.shots is None else r.shots,
                "frequencies": [float(x) for x in r.frequencies],
                "rem_clipped": r.rem_clipped,
            }
            for r in data.records
        ],
    }


def dataset_from_dict(payload: dict) -> TomographyDataset:
    records = []
    for entry in payload["records"]:
        shots = entry["shots"]
        records.append(
            CountsRecord(
                setting=entry["setting"],
                shots=None if shots == "exact" else int(shots),
                frequencies=np.asarray(entry["frequencies"], dtype=float),
                rem_clipped=bool(entry.get("rem_clipped", False)),
            )
        )
    return TomographyDataset(qubit_count=int(payload["qubit_count"]), records=tuple(records))


def save_dataset(data: TomographyDataset, path) -> None:
    Path(path).write_text(json.dumps(dataset_to_dict(data), indent=2) + "\n")


def load_dataset(path) -> TomographyDataset:
    return dataset_from_dict(json.loads(Path(path).read_text()))
