"""Weighted spectral measures localized at a single blip."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ensemble import EnsembleSpec
from .exceptions import MixedSpecsError, ZeroTargetError
from .spectral import Spectrum, WeightedMeasure

__all__ = [
    "WeightFunction",
    "BlipMeasure",
    "AveragedBlipMeasure",
    "n_schedule",
    "g_schedule",
    "make_weight",
    "eval_weight",
    "blip_measure",
    "average_blip_measures",
    "blip_index",
]


def n_schedule(n_dim: int) -> int:
    """``max(1, floor(log2 log2 N))``, computed in integers."""
    if n_dim < 2:
        raise ValueError("N must be at least 2")
    t = 0
    while 2 ** (2 ** (t + 1)) <= n_dim:
        t += 1
    return max(1, t)


def g_schedule(n_dim: int) -> int:
    """``ceil(sqrt(N))``."""
    if n_dim < 1:
        raise ValueError("N must be at least 1")
    g = math.isqrt(n_dim)
    return g if g * g == n_dim else g + 1


@dataclass(frozen=True)
class WeightFunction:
    """Even-power localizing polynomial for the blip of ``target``.

    ``f(x) = (x(2-x) prod_r (x-r)(2-x-r) / prod_r (1-r)^2) ** (2n)`` over the
    distinct ratios ``r = w_j / target`` with ``w_j != target``.
    """

    target: float
    n: int
    ratios: tuple[float, ...]
    norm: float

    @property
    def exponent(self) -> int:
        return 2 * self.n

    def __call__(self, x):
        return eval_weight(self, x)


def blip_index(spec: EnsembleSpec, value: float) -> int:
    """First position of ``value`` in ``spec.weights``."""
    try:
        return spec.weights.index(float(value))
    except ValueError:
        raise ValueError(f"{value!r} is not one of the weights {spec.weights}") from None


def make_weight(spec: EnsembleSpec, i: int, n: int) -> WeightFunction:
    """Weight function for the blip of ``spec.weights[i]`` (0-based ``i``)."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    target = spec.weights[i]
    if target == 0:
        raise ZeroTargetError("the bulk (w = 0) has no blip")
    ratios = sorted({w / target for w in spec.weights if w != target})
    norm = math.prod((1.0 - r) ** 2 for r in ratios)
    return WeightFunction(float(target), int(n), tuple(ratios), norm)


def eval_weight(wf: WeightFunction, x):
    """Evaluate ``wf`` at ``x`` (scalar or array).

    Uses ``u = x - 1`` and the factorization ``(x - r)(2 - x - r) =
    (1 - r)^2 - u^2``, which makes the value exactly mirror symmetric about 1
    and exactly 1 at ``x = 1``. Far outside the blip the power may overflow;
    the result is then ``+inf`` and callers are expected to check for it.
    """
    u = np.asarray(x, dtype=float) - 1.0
    return _eval_shifted(wf, u)


def _eval_shifted(wf: WeightFunction, u):
    s = u * u
    base = 1.0 - s
    for r in wf.ratios:
        base = base * (1.0 - s / (1.0 - r) ** 2)
    with np.errstate(over="ignore"):
        out = np.power(base, wf.exponent)
    return out if np.ndim(out) else float(out)


@dataclass(eq=False)
class BlipMeasure(WeightedMeasure):
    """Empirical blip measure of one matrix.

    Atoms sit at ``lambda - w_i N / k`` with mass ``f(k lambda / (w_i N)) / k_i``.
    """

    spec: EnsembleSpec | None = None
    blip_value: float = 0.0
    center: float = 0.0
    k_i: int = 1
    n_used: int = 1
    overflow_count: int = 0


@dataclass(eq=False)
class AveragedBlipMeasure(WeightedMeasure):
    spec: EnsembleSpec | None = None
    blip_value: float = 0.0
    k_i: int = 1
    n_used: int = 1
    g: int = 1
    overflow_count: int = 0


def blip_measure(s: Spectrum, spec: EnsembleSpec, i: int, n: int) -> BlipMeasure:
    """Empirical blip measure around ``N w_i / k`` (0-based ``i``)."""
    wf = make_weight(spec, i, n)
    w = wf.target
    center = spec.dim * w / spec.k
    k_i = spec.multiplicity(w)
    dev = s.values - center
    f = _eval_shifted(wf, dev * (spec.k / (w * spec.dim)))
    f = np.atleast_1d(np.asarray(f, dtype=float))
    bad = ~np.isfinite(f)
    f[bad] = 0.0
    return BlipMeasure(
        dev,
        f / k_i,
        1.0,
        spec=spec,
        blip_value=w,
        center=center,
        k_i=k_i,
        n_used=int(n),
        overflow_count=int(bad.sum()),
    )


def average_blip_measures(
    measures: Sequence[BlipMeasure], g: int | None = None
) -> AveragedBlipMeasure:
    """Pool ``g`` blip measures with every mass divided by ``g``."""
    measures = list(measures)
    if g is None:
        g = len(measures)
    if g < 1 or len(measures) != g:
        raise ValueError(f"expected {g} measures, got {len(measures)}")
    first = measures[0]
    key = (first.spec, first.blip_value, first.n_used)
    for m in measures[1:]:
        if (m.spec, m.blip_value, m.n_used) != key:
            raise MixedSpecsError("blip measures come from different (spec, blip, n)")
    return AveragedBlipMeasure(
        np.concatenate([m.locations for m in measures]),
        np.concatenate([m.masses for m in measures]) / g,
        1.0,
        spec=first.spec,
        blip_value=first.blip_value,
        k_i=first.k_i,
        n_used=first.n_used,
        g=g,
        overflow_count=sum(m.overflow_count for m in measures),
    )
