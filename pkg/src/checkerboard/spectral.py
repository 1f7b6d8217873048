"""Spectra, point-mass measures, regime classification and semicircle references."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ensemble import EnsembleSpec
from .exceptions import OverlappingRegimesError

__all__ = [
    "Spectrum",
    "WeightedMeasure",
    "RegimePartition",
    "HistogramTable",
    "BULK",
    "eigenvalues",
    "bulk_measure",
    "classify_regimes",
    "regime_centers",
    "semicircle_radius",
    "semicircle_moment",
    "semicircle_density",
    "measure_moment",
    "centered_moment",
    "histogram",
]

BULK = -1


@dataclass(frozen=True, eq=False)
class Spectrum:
    values: np.ndarray

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=float).ravel())
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return int(self.values.size)

    def __len__(self):
        return self.dim


@dataclass(eq=False)
class WeightedMeasure:
    """Finite sum of point masses ``sum_a mass_a * delta(x - location_a)``."""

    locations: np.ndarray
    masses: np.ndarray
    normalization: float = 1.0

    def __post_init__(self):
        self.locations = np.asarray(self.locations, dtype=float).ravel()
        self.masses = np.asarray(self.masses, dtype=float).ravel()
        if self.locations.shape != self.masses.shape:
            raise ValueError("locations and masses must have the same length")
        if np.any(self.masses < 0):
            raise ValueError("masses must be nonnegative")

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def __len__(self):
        return int(self.locations.size)


def eigenvalues(m) -> Spectrum:
    """All eigenvalues of a real symmetric matrix, ascending (LAPACK ``syevd``)."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * scale):
        raise ValueError("matrix is not symmetric")
    return Spectrum(np.linalg.eigvalsh(m))


def bulk_measure(s: Spectrum) -> WeightedMeasure:
    """Eigenvalues scaled by ``1/sqrt(N)``, each with mass ``1/N``."""
    n = s.dim
    return WeightedMeasure(s.values / math.sqrt(n), np.full(n, 1.0 / n), 1.0)


def measure_moment(mu: WeightedMeasure, m: int, center: float = 0.0) -> float:
    if m < 0:
        raise ValueError("moment order must be nonnegative")
    return float(np.sum(mu.masses * (mu.locations - center) ** m))


def centered_moment(mu: WeightedMeasure, m: int) -> float:
    """Moment about the measure's own first moment ``int x dmu``."""
    return measure_moment(mu, m, center=measure_moment(mu, 1))


@dataclass(frozen=True, eq=False)
class RegimePartition:
    """Bulk/blip label of every eigenvalue.

    ``labels[a]`` is :data:`BULK` or the index ``j`` of ``blip_values[j]``.
    """

    labels: np.ndarray
    blip_values: tuple[float, ...]
    centers: tuple[float, ...]
    radius: float

    @property
    def bulk_count(self) -> int:
        return int(np.sum(self.labels == BULK))

    @property
    def blip_counts(self) -> tuple[int, ...]:
        return tuple(int(np.sum(self.labels == j)) for j in range(len(self.blip_values)))

    @property
    def counts(self) -> dict:
        out = {"bulk": self.bulk_count}
        out.update({w: c for w, c in zip(self.blip_values, self.blip_counts)})
        return out

    def mask(self, value: float) -> np.ndarray:
        return self.labels == self.blip_values.index(value)


def regime_centers(spec: EnsembleSpec) -> tuple[list[float], list[float]]:
    values = spec.distinct_weights()
    return values, [spec.dim * w / spec.k for w in values]


def classify_regimes(
    s: Spectrum, spec: EnsembleSpec, threshold_exponent: float = 0.75
) -> RegimePartition:
    """Label eigenvalues within ``N**threshold_exponent`` of ``N w'/k`` as blips.

    The bulk center 0 takes part in the overlap check: a blip window that
    reaches the origin would swallow bulk eigenvalues.
    """
    if not 0.5 < threshold_exponent < 1:
        raise ValueError("threshold_exponent must lie in (1/2, 1)")
    if s.dim != spec.dim:
        raise ValueError(f"spectrum has {s.dim} values but spec.dim={spec.dim}")
    values, centers = regime_centers(spec)
    radius = float(spec.dim) ** threshold_exponent
    anchors = [0.0] + centers
    for a in range(len(anchors)):
        for b in range(a + 1, len(anchors)):
            if abs(anchors[a] - anchors[b]) < 2 * radius:
                raise OverlappingRegimesError(
                    f"windows of radius {radius:.4g} around {anchors[a]:.4g} and "
                    f"{anchors[b]:.4g} intersect; increase dim or lower the threshold exponent"
                )
    labels = np.full(s.dim, BULK, dtype=int)
    for j, c in enumerate(centers):
        labels[np.abs(s.values - c) < radius] = j
    return RegimePartition(labels, tuple(values), tuple(centers), radius)


def semicircle_radius(k) -> float:
    """``2 sqrt(1 - 1/k)``; ``k = math.inf`` gives 2."""
    if k == math.inf:
        return 2.0
    if k < 1:
        raise ValueError("k must be at least 1")
    return 2.0 * math.sqrt(1.0 - 1.0 / k)


def semicircle_moment(radius: float, m: int) -> float:
    """``Catalan(m/2) (R/2)^m`` for even ``m``, 0 for odd ``m``."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    if m < 0:
        raise ValueError("moment order must be nonnegative")
    if m % 2:
        return 0.0
    h = m // 2
    catalan = math.comb(2 * h, h) // (h + 1)
    return catalan * (radius / 2.0) ** m


def semicircle_density(x, radius: float):
    x = np.asarray(x, dtype=float)
    if radius == 0:
        raise ValueError("degenerate semicircle has no density")
    inside = np.clip(radius**2 - x**2, 0.0, None)
    return 2.0 / (math.pi * radius**2) * np.sqrt(inside)


@dataclass(frozen=True, eq=False)
class HistogramTable:
    edges: np.ndarray
    densities: np.ndarray
    total_mass: float

    @property
    def empty(self) -> bool:
        return self.total_mass == 0

    def rows(self):
        for lo, hi, d in zip(self.edges[:-1], self.edges[1:], self.densities):
            yield float(lo), float(hi), float(d)

    def to_dict(self) -> dict:
        return {
            "bin_left": [float(e) for e in self.edges[:-1]],
            "bin_right": [float(e) for e in self.edges[1:]],
            "density": [float(d) for d in self.densities],
            "total_mass": self.total_mass,
            "empty": self.empty,
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["bin_left", "bin_right", "density"])
            for row in self.rows():
                w.writerow([repr(v) for v in row])

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)


def histogram(mu: WeightedMeasure, lo: float, hi: float, bins: int) -> HistogramTable:
    """Density table with equal-width bins.

    Bins are half-open on the right except the last, which is closed.
    Densities are normalized by the total mass of ``mu``, so atoms outside
    ``[lo, hi]`` lower the table's integral below one.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    if bins < 1:
        raise ValueError("need at least one bin")
    counts, edges = np.histogram(mu.locations, bins=bins, range=(lo, hi), weights=mu.masses)
    total = mu.total_mass
    width = (hi - lo) / bins
    if total == 0:
        dens = np.zeros(bins)
    else:
        dens = counts / (total * width)
    return HistogramTable(edges, dens, total)


def pooled_measure(measures: Sequence[WeightedMeasure]) -> WeightedMeasure:
    """Concatenate measures, rescaling so that every atom keeps equal weight."""
    locs = np.concatenate([m.locations for m in measures])
    return WeightedMeasure(locs, np.full(locs.size, 1.0 / max(locs.size, 1)))
