"""Exact and analytic reference values.

Everything that is an identity (partition sums, root orders, binomial sums,
weight polynomials) is computed in exact rational arithmetic. Hollow-GOE
trace moments have an exact walk/pairing enumeration and a Monte Carlo mode.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .ensemble import sample_hollow_goe, trial_rng
from .exceptions import (
    CombinatorialBlowupError,
    EqualWeightsError,
    ExactModeTooLargeError,
    InvalidSpecError,
    ZeroPolynomialError,
    ZeroTargetError,
)
from .polynomials import MultiPoly, RationalPoly, as_fraction

__all__ = [
    "PartitionSumQuery",
    "partition_sum_direct",
    "partition_sum_closed_s2",
    "composition_count",
    "interpolation_check",
    "vanishing_sum",
    "root_order",
    "binomial_alternating_sum",
    "isserlis_pairings",
    "gaussian_moment",
    "hollow_goe_trace_moment",
    "hollow_goe_exact_trace",
    "hollow_goe_trace_samples",
    "hollow_goe_joint_trace_moment",
    "hollow_goe_trace_m2_variance",
    "expected_blip_moment_limit",
    "centered_blip_moment_limit",
    "blip_m2_variance_limit",
    "weight_polynomial_exact",
]

DEFAULT_COMPOSITION_CAP = 10**7
EXACT_MAX_M = 8
EXACT_MAX_K1 = 6


# ---------------------------------------------------------------- partition sums


@dataclass(frozen=True)
class PartitionSumQuery:
    """``sum over x_1+...+x_s = eta, x_i >= y_i`` of ``p(x) prod w_i^{x_i}``."""

    eta: int
    lower_bounds: tuple[int, ...]
    weights: tuple[Fraction, ...]
    poly: MultiPoly | None = None

    def __post_init__(self):
        object.__setattr__(self, "lower_bounds", tuple(int(y) for y in self.lower_bounds))
        object.__setattr__(self, "weights", tuple(as_fraction(w) for w in self.weights))
        s = self.s
        if s < 2:
            raise InvalidSpecError("need s >= 2 parts")
        if len(self.weights) != s:
            raise InvalidSpecError("one weight per part is required")
        if min(self.lower_bounds) < 1:
            raise InvalidSpecError("lower bounds must be positive")
        if self.eta < sum(self.lower_bounds):
            raise InvalidSpecError("eta is below the sum of the lower bounds")
        if len(set(self.weights)) != s:
            raise EqualWeightsError("weights must be pairwise distinct")
        if self.poly is None:
            object.__setattr__(self, "poly", MultiPoly.one(s))
        elif self.poly.nvars != s:
            raise InvalidSpecError("polynomial has the wrong number of variables")

    @property
    def s(self) -> int:
        return len(self.lower_bounds)


def composition_count(eta: int, lower_bounds: Sequence[int]) -> int:
    s = len(lower_bounds)
    free = eta - sum(lower_bounds)
    return math.comb(free + s - 1, s - 1) if free >= 0 else 0


def _compositions(total: int, parts: int):
    """Nonnegative compositions of ``total`` into ``parts`` parts."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def partition_sum_direct(q: PartitionSumQuery, cap: int = DEFAULT_COMPOSITION_CAP) -> Fraction:
    """Exact value by enumerating every composition."""
    count = composition_count(q.eta, q.lower_bounds)
    if count > cap:
        raise CombinatorialBlowupError(f"{count} compositions exceed the cap {cap}")
    free = q.eta - sum(q.lower_bounds)
    total = Fraction(0)
    for c in _compositions(free, q.s):
        x = [ci + yi for ci, yi in zip(c, q.lower_bounds)]
        term = q.poly(x)
        if term:
            for w, e in zip(q.weights, x):
                term *= w**e
            total += term
    return total


def partition_sum_closed_s2(eta: int, w1, w2) -> Fraction:
    """``(w1^eta w2 - w2^eta w1) / (w1 - w2)``; two parts, both ``>= 1``, ``p = 1``."""
    if eta < 2:
        raise ValueError("eta must be at least 2")
    w1, w2 = as_fraction(w1), as_fraction(w2)
    if w1 == w2:
        raise EqualWeightsError("w1 and w2 must differ")
    return (w1**eta * w2 - w2**eta * w1) / (w1 - w2)


def _solve_exact(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Gauss-Jordan over the rationals; ``None`` if singular."""
    n = len(a)
    m = [row[:] + [bi] for row, bi in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [v / p for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [vr - f * vc for vr, vc in zip(m[r], m[col])]
    return [row[-1] for row in m]


def interpolation_check(
    lower_bounds: Sequence[int],
    weights: Sequence,
    poly: MultiPoly,
    eta0: int | None = None,
    holdout: int = 2,
    degree: int | None = None,
) -> bool:
    """Check that ``eta -> S(eta) * prod_{i<j}(w_i - w_j)^(2^q)`` has the form
    ``sum_l w_l^(eta + 2 - sum y) * P_l(eta)`` with ``deg P_l <= q``.

    The ``s (q + 1)`` unknown coefficients are fitted exactly on consecutive
    eta values, then the fit must reproduce ``holdout`` further eta values.
    ``degree`` overrides the polynomial degree used for ``P_l`` (the scaling
    factor always uses the true degree of ``poly``).
    """
    weights = [as_fraction(w) for w in weights]
    s = len(weights)
    q = max(poly.degree, 0)
    ysum = sum(lower_bounds)
    eta0 = ysum if eta0 is None else eta0
    scale = Fraction(1)
    for a, b in itertools.combinations(weights, 2):
        scale *= (a - b) ** (2**q)

    def lhs(eta):
        return partition_sum_direct(PartitionSumQuery(eta, tuple(lower_bounds), tuple(weights), poly)) * scale

    def basis(eta):
        return [w ** (eta + 2 - ysum) * Fraction(eta) ** j for w in weights for j in range(d + 1)]

    d = q if degree is None else degree
    unknowns = s * (d + 1)
    fit_etas = range(eta0, eta0 + unknowns)
    coef = _solve_exact([basis(e) for e in fit_etas], [lhs(e) for e in fit_etas])
    if coef is None:
        raise ZeroPolynomialError("interpolation system is singular; pick other weights")
    for e in range(eta0 + unknowns, eta0 + unknowns + holdout):
        if sum(c * v for c, v in zip(coef, basis(e))) != lhs(e):
            return False
    return True


# ---------------------------------------------------------------- root lemmas


def vanishing_sum(f: RationalPoly, x0, p: RationalPoly) -> Fraction:
    """``sum_a c_a x0^a p(a)`` for ``f = sum_a c_a x^a``."""
    x0 = as_fraction(x0)
    return sum((c * x0**a * p(Fraction(a)) for a, c in f.coeffs.items()), Fraction(0))


def root_order(f: RationalPoly, x0) -> int:
    """Multiplicity of ``x0`` as a root of ``f``, by repeated exact division."""
    if f.is_zero():
        raise ZeroPolynomialError("the zero polynomial has no finite root order")
    e = 0
    while True:
        quo, rem = f.divmod_linear(x0)
        if rem != 0 or f.degree < 1:
            return e
        f, e = quo, e + 1


def binomial_alternating_sum(m: int, j: int) -> int:
    """``sum_{i=0}^m C(m, i) (-1)^(m-i) i^j`` with ``0^0 = 1``."""
    if m < 0 or j < 0:
        raise ValueError("m and j must be nonnegative")
    return sum(math.comb(m, i) * (-1) ** (m - i) * i**j for i in range(m + 1))


# ---------------------------------------------------------------- hollow GOE


def isserlis_pairings(items: Sequence) -> int:
    """Number of perfect matchings of ``items`` pairing only equal labels.

    For independent standard Gaussians this is ``E[prod X_item]``.
    """
    items = tuple(items)
    if not items:
        return 1
    if len(items) % 2:
        return 0
    first, rest = items[0], items[1:]
    total = 0
    for pos, other in enumerate(rest):
        if other == first:
            total += isserlis_pairings(rest[:pos] + rest[pos + 1 :])
    return total


@lru_cache(maxsize=None)
def gaussian_moment(multiplicities: tuple[int, ...]) -> int:
    """``E[prod_e X_e^{r_e}]`` for independent standard normals, by pairing count."""
    labels = tuple(i for i, r in enumerate(sorted(multiplicities)) for _ in range(r))
    return isserlis_pairings(labels)


def _walk_weight(edges: list[tuple[int, int]]) -> int:
    counts: dict[tuple[int, int], int] = {}
    for a, b in edges:
        key = (a, b) if a < b else (b, a)
        counts[key] = counts.get(key, 0) + 1
    if any(r % 2 for r in counts.values()):
        return 0
    return gaussian_moment(tuple(sorted(counts.values())))


def _closed_walks(k1: int, m: int, start: int):
    """Closed walks of length ``m`` from ``start`` that never stay in place."""

    def rec(path):
        if len(path) == m:
            if path[-1] != start:
                yield path
            return
        for v in range(k1):
            if v != path[-1]:
                yield from rec(path + [v])

    yield from rec([start])


def _edges_of(path: list[int]) -> list[tuple[int, int]]:
    return [(path[t], path[(t + 1) % len(path)]) for t in range(len(path))]


def _check_exact(k1: int, m: int):
    if k1 < 1:
        raise ValueError("k1 must be positive")
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m > EXACT_MAX_M or k1 > EXACT_MAX_K1:
        raise ExactModeTooLargeError(
            f"exact mode supports m <= {EXACT_MAX_M}, k1 <= {EXACT_MAX_K1}; use monte_carlo"
        )


@lru_cache(maxsize=None)
def _exact_trace(k1: int, m: int) -> int:
    if m == 0:
        return k1
    if m == 1 or k1 == 1:
        return 0
    # every vertex is equivalent under relabelling; fix the start
    total = sum(_walk_weight(_edges_of(p)) for p in _closed_walks(k1, m, 0))
    return k1 * total


def hollow_goe_trace_samples(k1: int, m: int, trials: int, seed: int = 0) -> np.ndarray:
    """``Tr(B^m)`` for ``trials`` independent hollow GOE draws."""
    out = np.empty(trials)
    for t in range(trials):
        b = sample_hollow_goe(k1, t, seed)
        out[t] = np.trace(np.linalg.matrix_power(b, m))
    return out


def _mc_batch(k1: int, m: int, trials: int, seed: int) -> np.ndarray:
    # one stream for the whole batch: much faster than per-trial streams
    rng = trial_rng(seed, 0)
    iu = np.triu_indices(k1, 1)
    b = np.zeros((trials, k1, k1))
    b[:, iu[0], iu[1]] = rng.standard_normal((trials, iu[0].size))
    b = b + np.transpose(b, (0, 2, 1))
    return np.trace(np.linalg.matrix_power(b, m), axis1=1, axis2=2)


def hollow_goe_trace_moment(
    k1: int,
    m: int,
    mode: str = "exact",
    trials: int = 100_000,
    seed: int = 0,
    return_stderr: bool = False,
):
    """``E[Tr B^m]`` for the ``k1 x k1`` hollow GOE.

    ``mode="exact"`` sums ``E[prod B]`` over closed index walks (no step may
    stay on the diagonal), each expectation counted by Gaussian pairings.
    ``mode="monte_carlo"`` averages over ``trials`` draws.
    """
    if mode == "exact":
        _check_exact(k1, m)
        v = float(_exact_trace(k1, m))
        return (v, 0.0) if return_stderr else v
    if mode != "monte_carlo":
        raise ValueError(f"unknown mode {mode!r}")
    if trials < 2:
        raise ValueError("monte_carlo needs at least two trials")
    x = _mc_batch(k1, m, trials, seed)
    mean = float(x.mean())
    se = float(x.std(ddof=1) / math.sqrt(trials))
    return (mean, se) if return_stderr else mean


def hollow_goe_exact_trace(k1: int, m: int) -> int:
    """Integer-valued exact ``E[Tr B^m]``."""
    _check_exact(k1, m)
    return _exact_trace(k1, m)


@lru_cache(maxsize=None)
def hollow_goe_joint_trace_moment(k1: int, a: int, b: int) -> int:
    """Exact ``E[Tr(B^a) Tr(B^b)]`` by enumerating pairs of closed walks."""
    _check_exact(k1, a + b)
    if a == 0:
        return k1 * _exact_trace(k1, b)
    if b == 0:
        return k1 * _exact_trace(k1, a)

    def walks(m):
        if m == 1 or k1 == 1:
            return []
        return [p for s in range(k1) for p in _closed_walks(k1, m, s)]

    wb = walks(b)
    total = 0
    for pa in walks(a):
        ea = _edges_of(pa)
        for pb in wb:
            total += _walk_weight(ea + _edges_of(pb))
    return total


def hollow_goe_trace_m2_variance(k1: int) -> Fraction:
    """Exact ``Var[(1/k1) Tr B^2]``; equals ``4 (k1 - 1) / k1``."""
    e2 = hollow_goe_joint_trace_moment(k1, 2, 2)
    e1 = _exact_trace(k1, 2)
    return Fraction(e2 - e1 * e1, k1 * k1)


# ---------------------------------------------------------------- blip limits


def _trace_exact(k1: int, m: int) -> Fraction:
    _check_exact(k1, m)
    return Fraction(_exact_trace(k1, m))


def expected_blip_moment_limit(k: int, w_i, k1: int, m: int) -> Fraction:
    """``(1/k1) sum_{m1} C(m, m1) ((k-1)/w_i)^(m-m1) E[Tr B^m1]``, exactly."""
    w = as_fraction(w_i)
    if w == 0:
        raise ZeroTargetError("w_i must be nonzero")
    shift = Fraction(k - 1) / w
    total = sum(
        (math.comb(m, m1) * shift ** (m - m1) * _trace_exact(k1, m1) for m1 in range(m + 1)),
        Fraction(0),
    )
    return total / k1


def centered_blip_moment_limit(k1: int, m: int) -> Fraction:
    """``(1/k1) E[Tr B^m]``."""
    return _trace_exact(k1, m) / k1


def blip_m2_variance_limit(k1: int) -> Fraction:
    """``2 (k1 - 1) / k1``."""
    if k1 < 1:
        raise ValueError("k1 must be positive")
    return Fraction(2 * (k1 - 1), k1)


# ---------------------------------------------------------------- weight polynomial


def weight_polynomial_exact(weights: Sequence, i: int, n: int, base_only: bool = False) -> RationalPoly:
    """Expanded weight polynomial for the blip of ``weights[i]`` (0-based).

    ``base_only`` returns the polynomial before raising to ``2n``.
    """
    ws = [as_fraction(w) for w in weights]
    target = ws[i]
    if target == 0:
        raise ZeroTargetError("the bulk (w = 0) has no blip")
    ratios = sorted({w / target for w in ws if w != target})
    x = RationalPoly.x()
    base = x * (2 - x)
    norm = Fraction(1)
    for r in ratios:
        base = base * (x - r) * (2 - r - x)
        norm *= (1 - r) ** 2
    base = base * (1 / norm)
    return base if base_only else base ** (2 * n)
