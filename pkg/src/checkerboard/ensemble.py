"""Sampling of (k, W)-checkerboard matrices and their deterministic parts.

Indices are 1-based in the mathematical description and 0-based in arrays:
array position ``p`` belongs to residue class ``p % k``, which is the class
``u = (p % k) + 1`` in ``{1, ..., k}`` (so residue 0 maps to ``k``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exceptions import InvalidSpecError

__all__ = [
    "EntryDist",
    "EnsembleSpec",
    "GrowingSpec",
    "trial_seed",
    "trial_rng",
    "sample_checkerboard",
    "build_z",
    "z_spectrum_exact",
    "sample_hollow_goe",
    "sample_fibonacci_matrix",
    "fibonacci_numbers",
    "write_matrix_csv",
]

_UINT64_MAX = 2**64 - 1


class EntryDist(str, enum.Enum):
    """Law of the random (non-fixed) entries."""

    NORMAL = "normal"
    RADEMACHER = "rademacher"
    # zero-variance stub; only useful for checking the deterministic part
    ZERO = "zero"


@dataclass(frozen=True)
class EnsembleSpec:
    """A (k, W)-checkerboard ensemble of ``dim x dim`` matrices.

    Parameters
    ----------
    k : int
        Modulus of the checkerboard pattern.
    weights : sequence of float
        ``(w_1, ..., w_k)``; entry ``(i, j)`` is fixed to ``w_u`` whenever
        ``i = j = u (mod k)``.
    dim : int
        Matrix size ``N``.
    entry_dist : EntryDist
        Law of the remaining entries (mean 0, variance 1).
    seed : int
        Root seed; every trial derives its own stream from it.
    """

    k: int
    weights: tuple[float, ...]
    dim: int
    entry_dist: EntryDist = EntryDist.NORMAL
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "entry_dist", EntryDist(self.entry_dist))
        self.validate()

    def validate(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise InvalidSpecError(f"k must be a positive integer, got {self.k!r}")
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise InvalidSpecError(f"dim must be a positive integer, got {self.dim!r}")
        if len(self.weights) != self.k:
            raise InvalidSpecError(
                f"expected {self.k} weights, got {len(self.weights)}"
            )
        if self.k > self.dim:
            raise InvalidSpecError(f"k={self.k} exceeds dim={self.dim}")
        if not all(math.isfinite(w) for w in self.weights):
            raise InvalidSpecError("weights must be finite")
        if not 0 <= int(self.seed) <= _UINT64_MAX:
            raise InvalidSpecError("seed must fit in an unsigned 64-bit integer")

    def distinct_weights(self) -> list[float]:
        """Distinct nonzero weights in order of first appearance."""
        seen = []
        for w in self.weights:
            if w != 0 and w not in seen:
                seen.append(w)
        return seen

    def multiplicity(self, value: float) -> int:
        return sum(1 for w in self.weights if w == value)

    def with_weights(self, weights: Sequence[float]) -> "EnsembleSpec":
        return EnsembleSpec(self.k, tuple(weights), self.dim, self.entry_dist, self.seed)

    def to_dict(self) -> dict:
        return {
            "k": int(self.k),
            "weights": list(self.weights),
            "dim": int(self.dim),
            "entry_dist": self.entry_dist.value,
            "seed": int(self.seed),
        }


def trial_seed(seed: int, trial: int) -> int:
    """64-bit seed of the stream used by ``trial``.

    Derived with :class:`numpy.random.SeedSequence` using ``trial`` as the
    spawn key, so trials are independent of each other and of evaluation order.
    """
    if trial < 0:
        raise ValueError("trial must be nonnegative")
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(trial),))
    return int(ss.generate_state(1, np.uint64)[0])


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(trial_seed(seed, trial)))


def _draw(rng: np.random.Generator, dist: EntryDist, size: int) -> np.ndarray:
    if dist is EntryDist.NORMAL:
        return rng.standard_normal(size)
    if dist is EntryDist.RADEMACHER:
        return rng.integers(0, 2, size=size).astype(float) * 2.0 - 1.0
    return np.zeros(size)


def _residues(dim: int, k: int) -> np.ndarray:
    return np.arange(dim) % k


def _fixed_mask(dim: int, k: int) -> np.ndarray:
    r = _residues(dim, k)
    return r[:, None] == r[None, :]


def sample_checkerboard(spec: EnsembleSpec, trial: int = 0) -> np.ndarray:
    """Draw one matrix from ``spec``.

    All ``N(N-1)/2`` strictly upper entries are drawn in row-major order from
    the trial stream; the fixed positions are then overwritten by their
    weights. Drawing every position keeps the random part identical across
    ensembles that differ only in ``weights``.
    """
    n = spec.dim
    rng = trial_rng(spec.seed, trial)
    m = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    m[iu] = _draw(rng, spec.entry_dist, iu[0].size)
    m = m + m.T
    z = build_z(spec.k, spec.weights, n)
    mask = _fixed_mask(n, spec.k)
    m[mask] = z[mask]
    return m


def build_z(k: int, weights: Sequence[float], dim: int) -> np.ndarray:
    """Deterministic part: ``Z_ij = w_u`` if ``i = j = u (mod k)``, else 0."""
    EnsembleSpec(k, tuple(weights), dim)
    w = np.asarray(weights, dtype=float)
    r = _residues(dim, k)
    return np.where(_fixed_mask(dim, k), w[r][:, None], 0.0)


def z_spectrum_exact(k: int, weights: Sequence[float], dim: int) -> np.ndarray:
    """Exact spectrum of :func:`build_z`, ascending.

    Residue class ``u`` contains ``ceil(N/k)`` indices for ``u <= N mod k`` and
    ``floor(N/k)`` otherwise; its block is a constant ``w_u`` matrix with the
    single nonzero eigenvalue ``w_u`` times the class size.
    """
    EnsembleSpec(k, tuple(weights), dim)
    q, r = divmod(dim, k)
    sizes = [q + 1 if u < r else q for u in range(k)]
    values = [float(w) * s for w, s in zip(weights, sizes)]
    values.extend([0.0] * (dim - k))
    return np.sort(np.asarray(values))


def sample_hollow_goe(k1: int, trial: int = 0, seed: int = 0) -> np.ndarray:
    """``k1 x k1`` symmetric matrix, zero diagonal, standard normal off-diagonal."""
    if k1 < 1:
        raise InvalidSpecError("k1 must be at least 1")
    rng = trial_rng(seed, trial)
    b = np.zeros((k1, k1))
    iu = np.triu_indices(k1, 1)
    b[iu] = rng.standard_normal(iu[0].size)
    return b + b.T


def fibonacci_numbers(count: int) -> list[int]:
    """``F_1, ..., F_count`` with ``F_1 = 1, F_2 = 2``."""
    out = []
    a, b = 1, 2
    for _ in range(count):
        out.append(a)
        a, b = b, a + b
    return out


@dataclass(frozen=True)
class GrowingSpec:
    """Checkerboard ensemble whose modulus may grow with ``dim``.

    Exactly one of ``k`` (fixed modulus) or ``sqrt_coef`` (modulus
    ``floor(c * sqrt(N))`` for rational ``c``) is given. ``diag_values``
    defaults to the Fibonacci numbers and ``scale`` to ``k_N``.
    """

    dim: int
    k: int | None = None
    sqrt_coef: Fraction | None = None
    diag_values: tuple[float, ...] | None = None
    scale: float | None = None
    _k_n: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if (self.k is None) == (self.sqrt_coef is None):
            raise InvalidSpecError("give exactly one of k or sqrt_coef")
        if self.sqrt_coef is not None:
            object.__setattr__(self, "sqrt_coef", Fraction(self.sqrt_coef))
            if self.sqrt_coef <= 0:
                raise InvalidSpecError("sqrt_coef must be positive")
        k_n = self.k_of(self.dim)
        if not 1 <= k_n <= self.dim:
            raise InvalidSpecError(f"k_N={k_n} must lie in [1, dim={self.dim}]")
        object.__setattr__(self, "_k_n", k_n)
        if self.diag_values is None:
            object.__setattr__(self, "diag_values", tuple(float(f) for f in fibonacci_numbers(k_n)))
        else:
            object.__setattr__(self, "diag_values", tuple(float(v) for v in self.diag_values))
        if len(self.diag_values) != k_n:
            raise InvalidSpecError(
                f"need {k_n} diagonal values, got {len(self.diag_values)}"
            )
        if self.scale is None:
            object.__setattr__(self, "scale", float(k_n))

    def k_of(self, n: int) -> int:
        if self.k is not None:
            return int(self.k)
        c = self.sqrt_coef
        # floor(p/q * sqrt(n)) == isqrt(p^2 n) // q, exactly
        return max(1, math.isqrt(c.numerator**2 * n) // c.denominator)

    @property
    def k_n(self) -> int:
        return self._k_n


def sample_fibonacci_matrix(
    gspec: GrowingSpec,
    entry_dist: EntryDist = EntryDist.NORMAL,
    seed: int = 0,
    trial: int = 0,
) -> np.ndarray:
    """``A_N + scale * Z_N`` with ``A_N`` a ``(k_N, 0)``-checkerboard sample."""
    k_n = gspec.k_n
    noise = EnsembleSpec(k_n, (0.0,) * k_n, gspec.dim, entry_dist, seed)
    a = sample_checkerboard(noise, trial)
    return a + gspec.scale * build_z(k_n, gspec.diag_values, gspec.dim)


def write_matrix_csv(m: np.ndarray, path) -> None:
    """Full symmetric matrix, row-major, one row per line."""
    np.savetxt(path, np.asarray(m), delimiter=",", fmt="%.17g")
