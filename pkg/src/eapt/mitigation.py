"""Zero-noise extrapolation over scaled-noise tomography datasets.

Raw outcome probabilities are collected at several noise-scaling factors s
(odd integers from unitary folding), extrapolated per setting and outcome to
s = 0, clipped into [0, 1], and renormalized per setting. The assembled
dataset feeds the same maximum-likelihood reconstruction as unscaled data;
per-setting fit provenance is kept for audit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .tomography import CountsRecord, TomographyDataset


@dataclass(frozen=True)
class ZNESeries:
    """Observable values at strictly increasing odd scaling factors."""

    points: tuple

    def __post_init__(self):
        pts = tuple((int(s), float(v)) for s, v in self.points)
        if len(pts) < 2:
            raise ValueError("zero-noise extrapolation needs at least 2 points")
        scales = [s for s, _ in pts]
        if any(s < 1 or s % 2 == 0 for s in scales):
            raise ValueError(f"scaling factors must be odd positive integers: {scales}")
        if any(b <= a for a, b in zip(scales, scales[1:])):
            raise ValueError(f"scaling factors must be strictly increasing: {scales}")
        if not all(np.isfinite(v) for _, v in pts):
            raise ValueError("series values must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def scales(self) -> np.ndarray:
        return np.array([s for s, _ in self.points], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.points], dtype=float)


def extrapolate_linear(series: ZNESeries) -> float:
    """Intercept at s = 0 of the least-squares line through the points.

    With exactly two points this is the exact two-point extrapolation.
    """
    return float(np.polyfit(series.scales, series.values, 1)[-1])


def extrapolate_polynomial(series: ZNESeries, order: int) -> float:
    """Least-squares polynomial intercept at s = 0; order 1 is the default
    linear method, higher orders are capped at len(points) - 1."""
    if order < 1:
        raise ValueError(f"extrapolation order must be >= 1, got {order}")
    deg = min(order, len(series.points) - 1)
    return float(np.polyfit(series.scales, series.values, deg)[-1])


@dataclass(frozen=True)
class ZNEProvenance:
    """Per-setting audit trail of the extrapolation.

    raw_frequencies has one row per scaling factor; intercepts are the
    pre-clip extrapolated values, slopes the linear coefficients (None for
    constant fits is impossible here since order >= 1).
    """

    setting: str
    scales: tuple
    raw_frequencies: np.ndarray
    intercepts: np.ndarray
    slopes: np.ndarray
    clipped: bool
    renormalization: float


@dataclass(frozen=True)
class MitigatedDataset:
    """Extrapolated dataset plus per-setting fit provenance."""

    dataset: TomographyDataset
    scales: tuple
    provenance: tuple

    @property
    def clipped_settings(self) -> tuple:
        return tuple(p.setting for p in self.provenance if p.clipped)


def mitigate_dataset(datasets: Mapping[int, TomographyDataset], order: int = 1) -> MitigatedDataset:
    """Extrapolate every (setting, outcome) probability across scaling factors.

    `datasets` maps each odd scaling factor to the complete dataset measured
    at that factor; all datasets must cover the same settings. Extrapolated
    probabilities are clipped to [0, 1] and each setting's distribution is
    renormalized, with clipping recorded in the provenance.
    """
    if len(datasets) < 2:
        raise ValueError("mitigation needs datasets for at least 2 scaling factors")
    scales = sorted(int(s) for s in datasets)
    if any(s < 1 or s % 2 == 0 for s in scales):
        raise ValueError(f"scaling factors must be odd positive integers: {scales}")
    ordered = [datasets[s] for s in scales]
    n = ordered[0].qubit_count
    if any(d.qubit_count != n for d in ordered):
        raise ValueError("datasets disagree on qubit count")

    s_arr = np.array(scales, dtype=float)
    deg = min(order, len(scales) - 1)
    if order < 1:
        raise ValueError(f"extrapolation order must be >= 1, got {order}")

    records = []
    provenance = []
    for i, base_record in enumerate(ordered[0].records):
        setting = base_record.setting
        raw = np.stack([d.records[i].frequencies for d in ordered])
        coeffs = np.polyfit(s_arr, raw, deg)
        intercepts = coeffs[-1]
        slopes = coeffs[-2]
        clipped_vals = np.clip(intercepts, 0.0, 1.0)
        was_clipped = bool(np.any(np.abs(clipped_vals - intercepts) > 0))
        total = float(clipped_vals.sum())
        if total <= 0:
            raise ValueError(f"extrapolated distribution for setting {setting} is empty")
        records.append(
            CountsRecord(setting=setting, shots=None, frequencies=clipped_vals / total)
        )
        provenance.append(
            ZNEProvenance(
                setting=setting,
                scales=tuple(scales),
                raw_frequencies=raw,
                intercepts=intercepts,
                slopes=slopes,
                clipped=was_clipped,
                renormalization=total,
            )
        )
    mitigated = TomographyDataset(qubit_count=n, records=tuple(records))
    return MitigatedDataset(dataset=mitigated, scales=tuple(scales), provenance=tuple(provenance))
