"""Monte Carlo experiments and the exact-identity suite.

Every runner takes an :class:`ExperimentConfig` and returns a
:class:`~checkerboard.reports.Report`. All randomness comes from
``config.spec.seed``; trial ``t`` always uses the stream
``trial_rng(seed, t)``, so workers only change wall-clock time.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import oracles
from ._validation import check_positive_int, check_threshold_exponent
from .blip import (
    average_blip_measures,
    blip_index,
    blip_measure,
    g_schedule,
    n_schedule,
)
from .ensemble import (
    EnsembleSpec,
    EntryDist,
    GrowingSpec,
    fibonacci_numbers,
    sample_checkerboard,
    sample_fibonacci_matrix,
    z_spectrum_exact,
)
from .exceptions import IncompatibleSpecsError, InvalidSpecError
from .polynomials import MultiPoly, RationalPoly
from .reports import Report, check_format, persist_report
from .spectral import (
    BULK,
    Spectrum,
    WeightedMeasure,
    centered_moment,
    classify_regimes,
    eigenvalues,
    histogram,
    measure_moment,
    semicircle_moment,
    semicircle_radius,
)

__all__ = [
    "ExperimentConfig",
    "DEFAULT_TOLERANCES",
    "WORKERS_ENV",
    "resolve_workers",
    "run_bulk",
    "run_split_count",
    "run_singleton_blip",
    "run_blip_moments",
    "run_independence",
    "run_fibonacci",
    "run_exact_identities",
    "run_hollow_goe",
]

WORKERS_ENV = "CHECKERBOARD_WORKERS"
SEED_SCHEME = "SeedSequence(seed, spawn_key=(trial,)) -> PCG64"

DEFAULT_TOLERANCES = {
    # bulk
    "bulk_even_m2": 0.05,
    "bulk_even_m4": 0.08,
    "bulk_even_other": 0.15,
    "bulk_odd_se": 3.0,
    # split counts: minimum fraction of trials with exactly the predicted counts
    "split_match_fraction": 0.95,
    # singleton blip
    "singleton_mean_abs": 0.5,
    "singleton_weighted_vs_classified": 0.02,
    # averaged blip moments
    "blip_raw_m1": 0.10,
    "blip_raw_other": 0.15,
    "blip_centered_m2": 0.15,
    "blip_centered_even_other": 0.20,
    "blip_centered_odd_abs": 0.2,  # in units of (centered limit m2)^(m/2)
    "blip_m2_variance": 0.25,
    "blip_total_mass_abs": 0.05,
    # independence
    "indep_m2": 0.10,
    "indep_m4": 0.20,
    "indep_m1_std": 0.1,  # |dm1| <= tol * sqrt(m2)
    "indep_m3_std": 0.2,  # |dm3| <= tol * m2^(3/2)
    # fibonacci
    "fib_distance_max": 50.0,
    "fib_bulk_max": 50.0,
    # hollow GOE Monte Carlo
    "goe_se": 3.0,
}


def resolve_workers(workers: int | None = None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else 1
    return check_positive_int(workers, "workers")


def _map_ordered(fn, items, workers: int):
    """``list(map(fn, items))``, optionally on a thread pool; order preserved."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


@dataclass
class ExperimentConfig:
    spec: EnsembleSpec
    trials: int = 20
    blip_value: float | None = None
    max_moment: int = 4
    n_override: int | None = None
    g_override: int | None = None
    n_floor: int = 12
    threshold_exponent: float = 0.75
    tolerances: dict = field(default_factory=dict)
    output_path: str | None = None
    output_format: str = "json"
    workers: int | None = None
    hist_bins: int = 60

    def __post_init__(self):
        if not isinstance(self.spec, EnsembleSpec):
            raise InvalidSpecError("spec must be an EnsembleSpec")
        check_positive_int(self.trials, "trials")
        check_positive_int(self.max_moment, "max_moment")
        check_positive_int(self.n_floor, "n_floor")
        check_positive_int(self.hist_bins, "hist_bins")
        if self.n_override is not None:
            check_positive_int(self.n_override, "n_override")
        if self.g_override is not None:
            check_positive_int(self.g_override, "g_override")
        check_threshold_exponent(self.threshold_exponent)
        check_format(self.output_format)
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
        if self.blip_value is not None:
            self.blip_value = float(self.blip_value)
            blip_index(self.spec, self.blip_value)
        if self.workers is not None:
            check_positive_int(self.workers, "workers")

    def tol(self, key: str) -> float:
        return float(self.tolerances.get(key, DEFAULT_TOLERANCES[key]))

    @property
    def n_used(self) -> int:
        """Weight exponent parameter: the override, else ``max(n(N), n_floor)``."""
        if self.n_override is not None:
            return int(self.n_override)
        return max(n_schedule(self.spec.dim), int(self.n_floor))

    @property
    def g_used(self) -> int:
        return int(self.g_override) if self.g_override is not None else g_schedule(self.spec.dim)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "trials": self.trials,
            "blip_value": self.blip_value,
            "max_moment": self.max_moment,
            "n_override": self.n_override,
            "g_override": self.g_override,
            "n_floor": self.n_floor,
            "threshold_exponent": self.threshold_exponent,
            "tolerances": {k: self.tol(k) for k in sorted(DEFAULT_TOLERANCES)},
            "output_format": self.output_format,
            "hist_bins": self.hist_bins,
        }


def _provenance(seed: int, trial_indices) -> dict:
    idx = list(trial_indices)
    return {
        "root_seed": int(seed),
        "scheme": SEED_SCHEME,
        "trial_range": [min(idx), max(idx) + 1] if idx else [0, 0],
    }


def _finish(report: Report, config: ExperimentConfig | None, t0: float) -> Report:
    report.wall_clock_seconds = time.perf_counter() - t0
    if config is not None and config.output_path:
        persist_report(report, config.output_path, config.output_format)
        if report.histograms:
            stem = Path(config.output_path)
            for name, table in report.histograms.items():
                _write_hist_csv(table, stem.with_name(f"{stem.stem}.{name}.hist.csv"))
    return report


def _write_hist_csv(table: dict, path) -> None:
    with open(path, "w") as fh:
        fh.write("bin_left,bin_right,density\n")
        for lo, hi, d in zip(table["bin_left"], table["bin_right"], table["density"]):
            fh.write(f"{lo!r},{hi!r},{d!r}\n")


def _spectrum(spec: EnsembleSpec, trial: int) -> Spectrum:
    return eigenvalues(sample_checkerboard(spec, trial))


def _se(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else float("nan")


# ---------------------------------------------------------------- bulk


def run_bulk(config: ExperimentConfig) -> Report:
    """Pooled moments of normalized bulk eigenvalues against the semicircle."""
    t0 = time.perf_counter()
    spec = config.spec
    has_blips = bool(spec.distinct_weights())
    root_n = math.sqrt(spec.dim)

    def one(t):
        s = _spectrum(spec, t)
        v = s.values
        if has_blips:
            v = v[classify_regimes(s, spec, config.threshold_exponent).labels == BULK]
        return v / root_n

    rows = _map_ordered(one, range(config.trials), resolve_workers(config.workers))
    pooled = np.concatenate(rows)
    radius = semicircle_radius(spec.k)
    rep = Report("bulk", config.to_dict(), seed_provenance=_provenance(spec.seed, range(config.trials)))
    for m in range(1, config.max_moment + 1):
        per = [float(np.mean(r**m)) for r in rows]
        value = float(np.mean(pooled**m))
        ref = semicircle_moment(radius, m)
        if m % 2:
            rep.add(f"bulk_m{m}", value, ref, config.tol("bulk_odd_se"), "se", _se(per))
        else:
            key = {2: "bulk_even_m2", 4: "bulk_even_m4"}.get(m, "bulk_even_other")
            rep.add(f"bulk_m{m}", value, ref, config.tol(key), "rel", _se(per))
    if has_blips:
        # the trace is fixed, so the bulk mean is pinned by the blip shifts
        shift = sum((spec.k - 1) / w for w in spec.weights if w != 0)
        pred = [-shift / (r.size * root_n) for r in rows]
        rep.add("bulk_m1_trace_prediction", float(np.mean(pred)), float(np.mean(np.concatenate(rows))), None, "info")
    mu = WeightedMeasure(pooled, np.full(pooled.size, 1.0 / pooled.size))
    lim = 1.25 * max(radius, 1e-9)
    rep.histograms["bulk"] = histogram(mu, -lim, lim, config.hist_bins).to_dict()
    rep.extras["semicircle_radius"] = radius
    rep.extras["bulk_sizes"] = [int(r.size) for r in rows]
    return _finish(rep, config, t0)


# ---------------------------------------------------------------- split counts


def expected_counts(spec: EnsembleSpec) -> tuple[int, ...]:
    """``(N - x, k_1, ..., k_s)`` with ``x`` the number of nonzero weights."""
    values = spec.distinct_weights()
    x = sum(1 for w in spec.weights if w != 0)
    return (spec.dim - x,) + tuple(spec.multiplicity(v) for v in values)


def run_split_count(config: ExperimentConfig) -> Report:
    t0 = time.perf_counter()
    spec = config.spec
    want = expected_counts(spec)

    def one(t):
        p = classify_regimes(_spectrum(spec, t), spec, config.threshold_exponent)
        return (p.bulk_count,) + p.blip_counts

    counts = _map_ordered(one, range(config.trials), resolve_workers(config.workers))
    matches = np.array([c == want for c in counts], dtype=float)
    rep = Report("split", config.to_dict(), seed_provenance=_provenance(spec.seed, range(config.trials)))
    rep.add("match_fraction", float(matches.mean()), 1.0, config.tol("split_match_fraction"), "min", _se(matches))
    arr = np.array(counts, dtype=float)
    rep.add("mean_bulk_count", float(arr[:, 0].mean()), want[0], None, "info", _se(arr[:, 0]))
    for j, v in enumerate(spec.distinct_weights()):
        rep.add(f"mean_blip_count_w{v:g}", float(arr[:, j + 1].mean()), want[j + 1], None, "info", _se(arr[:, j + 1]))
    rep.extras["expected_counts"] = list(want)
    rep.extras["blip_values"] = spec.distinct_weights()
    rep.extras["per_trial_counts"] = [list(c) for c in counts]
    rep.extras["window_radius"] = float(spec.dim) ** config.threshold_exponent
    return _finish(rep, config, t0)


# ---------------------------------------------------------------- singleton blip


def run_singleton_blip(config: ExperimentConfig) -> Report:
    """Deviation of a multiplicity-one blip eigenvalue from ``N w / k``."""
    t0 = time.perf_counter()
    spec = config.spec
    if config.blip_value is None:
        raise InvalidSpecError("singleton experiment needs blip_value")
    w = config.blip_value
    if spec.multiplicity(w) != 1:
        raise InvalidSpecError(f"blip {w:g} has multiplicity {spec.multiplicity(w)}, expected 1")
    i = blip_index(spec, w)
    n = config.n_used
    center = spec.dim * w / spec.k

    def one(t):
        s = _spectrum(spec, t)
        part = classify_regimes(s, spec, config.threshold_exponent)
        vals = s.values[part.mask(w)]
        dev = float(vals[0] - center) if vals.size == 1 else float("nan")
        mu = blip_measure(s, spec, i, n)
        return dev, measure_moment(mu, 1), mu.total_mass

    out = np.array(_map_ordered(one, range(config.trials), resolve_workers(config.workers)))
    dev, wm1, mass = out[:, 0], out[:, 1], out[:, 2]
    # exact eigenvalue of the deterministic part: w times the residue class size
    q, r = divmod(spec.dim, spec.k)
    z_center = w * (q + 1 if i < r else q)
    rep = Report("singleton", config.to_dict(), seed_provenance=_provenance(spec.seed, range(config.trials)))
    ref = (spec.k - 1) / w
    rep.add("mean_deviation", float(np.mean(dev)), ref, config.tol("singleton_mean_abs"), "abs", _se(dev))
    rep.add(
        "weighted_m1_vs_classified",
        float(np.mean(wm1)),
        float(np.mean(dev)),
        config.tol("singleton_weighted_vs_classified"),
        "rel",
        _se(wm1 - dev),
    )
    rep.add("mean_deviation_from_z_eigenvalue", float(np.mean(dev + center - z_center)), ref, None, "info", _se(dev))
    rep.add("mean_total_mass", float(np.mean(mass)), 1.0, None, "info", _se(mass))
    rep.extras["z_eigenvalue"] = z_center
    rep.extras["n_used"] = n
    rep.extras["center"] = center
    rep.extras["missing_blip_trials"] = int(np.isnan(dev).sum())
    return _finish(rep, config, t0)


# ---------------------------------------------------------------- averaged blip moments


def _blip_samples(config: ExperimentConfig, spec: EnsembleSpec | None = None):
    """Per-matrix blip measures grouped into ``trials`` super-trials of size ``g``."""
    spec = spec or config.spec
    if config.blip_value is None:
        raise InvalidSpecError("blip experiments need blip_value")
    i = blip_index(spec, config.blip_value)
    n, g = config.n_used, config.g_used
    m_max = config.max_moment

    def one(t):
        mu = blip_measure(_spectrum(spec, t), spec, i, n)
        return mu

    total = config.trials * g
    measures = _map_ordered(one, range(total), resolve_workers(config.workers))
    groups = [measures[s * g : (s + 1) * g] for s in range(config.trials)]
    raw = np.zeros((config.trials, m_max))
    cen = np.zeros((config.trials, m_max))
    mass = np.zeros(config.trials)
    overflow = 0
    for s, grp in enumerate(groups):
        avg = average_blip_measures(grp, g)
        overflow += avg.overflow_count
        mass[s] = avg.total_mass
        for m in range(1, m_max + 1):
            raw[s, m - 1] = measure_moment(avg, m)
            cen[s, m - 1] = centered_moment(avg, m)
    per_matrix_m2 = np.array([measure_moment(mu, 2) for mu in measures])
    pooled = average_blip_measures(measures, total)
    return {
        "raw": raw,
        "centered": cen,
        "mass": mass,
        "per_matrix_m2": per_matrix_m2,
        "pooled": pooled,
        "n": n,
        "g": g,
        "k_i": spec.multiplicity(config.blip_value),
        "overflow": overflow,
        "trial_count": total,
    }


def _variance_se(x: np.ndarray) -> float:
    """Large-sample standard error of the sample variance."""
    n = x.size
    if n < 4:
        return float("nan")
    c = x - x.mean()
    m2, m4 = np.mean(c**2), np.mean(c**4)
    return float(math.sqrt(max(m4 - m2 * m2, 0.0) / n))


def run_blip_moments(config: ExperimentConfig) -> Report:
    """Raw and centered moments of averaged blip measures against their limits."""
    t0 = time.perf_counter()
    spec = config.spec
    d = _blip_samples(config)
    w, k1 = config.blip_value, d["k_i"]
    rep = Report("blip", config.to_dict(), seed_provenance=_provenance(spec.seed, range(d["trial_count"])))
    lim_m2 = float(oracles.centered_blip_moment_limit(k1, 2))
    for m in range(1, config.max_moment + 1):
        raw, cen = d["raw"][:, m - 1], d["centered"][:, m - 1]
        ref = float(oracles.expected_blip_moment_limit(spec.k, Fraction(w), k1, m))
        rep.add(f"raw_m{m}", float(raw.mean()), ref, config.tol("blip_raw_m1" if m == 1 else "blip_raw_other"), "rel", _se(raw))
        cref = float(oracles.centered_blip_moment_limit(k1, m))
        if cref == 0:
            tol = config.tol("blip_centered_odd_abs") * lim_m2 ** (m / 2) if lim_m2 > 0 else config.tol("blip_centered_odd_abs")
            rep.add(f"centered_m{m}", float(cen.mean()), 0.0, tol, "abs", _se(cen))
        else:
            key = "blip_centered_m2" if m == 2 else "blip_centered_even_other"
            rep.add(f"centered_m{m}", float(cen.mean()), cref, config.tol(key), "rel", _se(cen))
    x = d["per_matrix_m2"]
    var = float(x.var(ddof=1)) if x.size > 1 else float("nan")
    rep.add("m2_variance", var, float(oracles.blip_m2_variance_limit(k1)), config.tol("blip_m2_variance"), "rel", _variance_se(x))
    if 1 <= k1 <= oracles.EXACT_MAX_K1:
        hg = float(oracles.hollow_goe_trace_m2_variance(k1))
        rep.add("m2_variance_vs_hollow_goe", var, hg, config.tol("blip_m2_variance"), "info", _variance_se(x))
    rep.add("total_mass", float(d["mass"].mean()), 1.0, config.tol("blip_total_mass_abs"), "abs", _se(d["mass"]))
    pooled = d["pooled"]
    rep.histograms["blip"] = histogram(pooled, -6.0 * math.sqrt(max(k1, 2)), 6.0 * math.sqrt(max(k1, 2)) + 2 * abs((spec.k - 1) / w), config.hist_bins).to_dict()
    rep.extras.update(
        n_used=d["n"],
        g=d["g"],
        k_i=k1,
        blip_value=w,
        blip_index=blip_index(spec, w),
        overflow_atoms=d["overflow"],
        super_trial_raw=d["raw"].tolist(),
        super_trial_centered=d["centered"].tolist(),
    )
    return _finish(rep, config, t0)


# ---------------------------------------------------------------- independence


def run_independence(config_a: ExperimentConfig, config_b: ExperimentConfig) -> Report:
    """Centered blip moments of two ensembles that share the same blip."""
    t0 = time.perf_counter()
    a, b = config_a.spec, config_b.spec
    if config_a.blip_value is None or config_a.blip_value != config_b.blip_value:
        raise IncompatibleSpecsError("both configurations must name the same blip value")
    w = config_a.blip_value
    if (a.k, a.dim, a.multiplicity(w)) != (b.k, b.dim, b.multiplicity(w)):
        raise IncompatibleSpecsError("k, N and the blip multiplicity must agree")
    for attr in ("trials", "max_moment", "n_used", "g_used"):
        if getattr(config_a, attr) != getattr(config_b, attr):
            raise IncompatibleSpecsError(f"configurations differ in {attr}")
    da, db = _blip_samples(config_a), _blip_samples(config_b)
    cfg = {"a": config_a.to_dict(), "b": config_b.to_dict()}
    rep = Report(
        "independence",
        cfg,
        seed_provenance={"a": _provenance(a.seed, range(da["trial_count"])), "b": _provenance(b.seed, range(db["trial_count"]))},
    )
    ca, cb = da["centered"], db["centered"]
    m2b = float(cb[:, 1].mean()) if cb.shape[1] >= 2 else float("nan")
    for m in range(1, config_a.max_moment + 1):
        va, vb = float(ca[:, m - 1].mean()), float(cb[:, m - 1].mean())
        se = _se(ca[:, m - 1] - cb[:, m - 1])
        rep.add(f"centered_m{m}_a", va, None, None, "info", _se(ca[:, m - 1]))
        rep.add(f"centered_m{m}_b", vb, None, None, "info", _se(cb[:, m - 1]))
        if m == 2:
            rep.add("centered_m2_agreement", va, vb, config_a.tol("indep_m2"), "rel", se)
        elif m == 4:
            rep.add("centered_m4_agreement", va, vb, config_a.tol("indep_m4"), "rel", se)
        elif m in (1, 3) and math.isfinite(m2b):
            key = "indep_m1_std" if m == 1 else "indep_m3_std"
            rep.add(f"centered_m{m}_agreement", va, vb, config_a.tol(key) * m2b ** (m / 2), "abs", se)
        else:
            rep.add(f"centered_m{m}_agreement", va, vb, config_a.tol("indep_m4"), "rel", se)
    rep.extras.update(n_used=da["n"], g=da["g"], k_i=da["k_i"], blip_value=w)
    return _finish(rep, config_a, t0)


# ---------------------------------------------------------------- fibonacci


def run_fibonacci(
    dim: int = 100,
    k_n: int = 10,
    trials: int = 20,
    seed: int = 0,
    entry_dist: EntryDist | str = EntryDist.NORMAL,
    workers: int | None = None,
    tolerances: dict | None = None,
    output_path: str | None = None,
    output_format: str = "json",
    hist_bins: int | None = None,
) -> Report:
    """Blips at ``N F_n`` for a ``k_N``-periodic Fibonacci diagonal pattern."""
    t0 = time.perf_counter()
    check_format(output_format)
    trials = check_positive_int(trials, "trials")
    tolerances = dict(tolerances or {})
    unknown = set(tolerances) - set(DEFAULT_TOLERANCES)
    if unknown:
        raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
    tol = lambda key: float(tolerances.get(key, DEFAULT_TOLERANCES[key]))
    gspec = GrowingSpec(dim, k=k_n)
    entry_dist = EntryDist(entry_dist)
    fib = fibonacci_numbers(gspec.k_n)
    targets = np.array([dim * f for f in fib], dtype=float)

    def one(t):
        s = eigenvalues(sample_fibonacci_matrix(gspec, entry_dist, seed, t)).values
        taken = np.zeros(s.size, dtype=bool)
        dist = np.empty(targets.size)
        for j, x in enumerate(targets):
            free = np.flatnonzero(~taken)
            a = free[np.argmin(np.abs(s[free] - x))]
            dist[j] = abs(s[a] - x)
            taken[a] = True
        rest = s[~taken]
        return dist, float(np.max(np.abs(rest))) if rest.size else 0.0, s / dim

    out = _map_ordered(one, range(trials), resolve_workers(workers))
    dist = np.array([o[0] for o in out])
    bulk = np.array([o[1] for o in out])
    cfg = {
        "dim": dim,
        "k_n": gspec.k_n,
        "trials": trials,
        "seed": int(seed),
        "entry_dist": entry_dist.value,
        "scale": gspec.scale,
        "tolerances": {k: tol(k) for k in ("fib_distance_max", "fib_bulk_max")},
        "output_format": output_format,
    }
    rep = Report("fibonacci", cfg, seed_provenance=_provenance(seed, range(trials)))
    rep.add("max_blip_distance", float(dist.max()), 0.0, tol("fib_distance_max"), "max", None)
    for j, f in enumerate(fib):
        rep.add(f"distance_F{j + 1}", float(dist[:, j].max()), 0.0, tol("fib_distance_max"), "max", _se(dist[:, j]))
    rep.add("max_bulk_abs", float(bulk.max()), 0.0, tol("fib_bulk_max"), "max", _se(bulk))
    if k_n <= dim and dim % gspec.k_n == 0:
        exact = z_spectrum_exact(gspec.k_n, gspec.diag_values, dim) * gspec.scale
        top = np.sort(exact)[-gspec.k_n :]
        rep.add("noise_free_exact_match", float(np.max(np.abs(top - np.sort(targets)))), 0.0, None, "exact", None)
    pooled = np.concatenate([o[2] for o in out])
    mu = WeightedMeasure(pooled, np.full(pooled.size, 1.0 / pooled.size))
    hi = fib[-1] + 1.0
    bins = hist_bins or int(4 * (hi + 1))
    rep.histograms["fibonacci"] = histogram(mu, -1.0, hi, bins).to_dict()
    rep.extras["targets"] = targets.tolist()
    rep.extras["fibonacci"] = fib
    rep.wall_clock_seconds = time.perf_counter() - t0
    if output_path:
        persist_report(rep, output_path, output_format)
        stem = Path(output_path)
        _write_hist_csv(rep.histograms["fibonacci"], stem.with_name(f"{stem.stem}.fibonacci.hist.csv"))
    return rep


# ---------------------------------------------------------------- exact suites


def _rand_fraction(rng, lo=-9, hi=9, max_den=7) -> Fraction:
    num = int(rng.integers(lo * max_den, hi * max_den + 1))
    den = int(rng.integers(1, max_den + 1))
    return Fraction(num, den)


def _rand_poly(rng, degree: int, x0: Fraction | None = None) -> RationalPoly:
    """Random polynomial of exactly ``degree``; nonzero at ``x0`` if given."""
    while True:
        c = [_rand_fraction(rng) for _ in range(degree + 1)]
        if c[-1] == 0:
            continue
        p = RationalPoly(c)
        if x0 is None or p(x0) != 0:
            return p


def _rand_multipoly(rng, s: int, degree: int) -> MultiPoly:
    terms = {}
    for exps in _exponent_vectors(s, degree):
        if rng.random() < 0.6:
            terms[exps] = int(rng.integers(-3, 4))
    top = tuple([degree] + [0] * (s - 1))
    terms[top] = int(rng.integers(1, 4))
    return MultiPoly(s, terms)


def _exponent_vectors(s: int, degree: int):
    if s == 1:
        for d in range(degree + 1):
            yield (d,)
        return
    for d in range(degree + 1):
        for rest in _exponent_vectors(s - 1, degree - d):
            yield (d,) + rest


def run_exact_identities(seed: int = 0, output_path=None, output_format: str = "json") -> Report:
    """Exact combinatorial checks; every statistic counts failures (must be 0)."""
    t0 = time.perf_counter()
    check_format(output_format)
    rng = np.random.default_rng(seed)
    rep = Report("verify", {"seed": int(seed)}, seed_provenance={"root_seed": int(seed), "scheme": "numpy default_rng(seed)"})

    # two-part partition sums: enumeration vs closed form
    fails, checks = 0, 0
    pairs = []
    while len(pairs) < 30:
        w1, w2 = _rand_fraction(rng), _rand_fraction(rng)
        if w1 != w2:
            pairs.append((w1, w2))
    for w1, w2 in pairs:
        for eta in range(2, 21):
            direct = oracles.partition_sum_direct(oracles.PartitionSumQuery(eta, (1, 1), (w1, w2)))
            checks += 1
            fails += direct != oracles.partition_sum_closed_s2(eta, w1, w2)
    rep.add("partition_sum_s2_failures", fails, 0, None, "exact")
    rep.extras["partition_sum_s2_checks"] = checks

    # interpolation structure, s in {2, 3}, degree <= 2
    fails, checks = 0, 0
    for s in (2, 3):
        for degree in (0, 1, 2):
            for _ in range(2):
                while True:
                    ws = [int(v) for v in rng.choice(np.r_[-4:0, 1:5], size=s, replace=False)]
                    if len(set(ws)) == s:
                        break
                ys = tuple(int(y) for y in rng.integers(1, 3, size=s))
                poly = _rand_multipoly(rng, s, degree)
                checks += 1
                fails += not oracles.interpolation_check(ys, ws, poly)
    rep.add("interpolation_failures", fails, 0, None, "exact")
    rep.extras["interpolation_checks"] = checks

    # vanishing sums at planted roots
    fails = 0
    for _ in range(50):
        order = int(rng.integers(1, 6))
        x0 = _rand_fraction(rng, -3, 3, 4)
        cofactor = _rand_poly(rng, int(rng.integers(0, 4)), x0)
        f = RationalPoly.from_roots([x0] * order) * cofactor
        d = int(rng.integers(0, order))
        p = _rand_poly(rng, d)
        ok = oracles.vanishing_sum(f, x0, p) == 0 and oracles.root_order(f, x0) == order
        fails += not ok
    rep.add("vanishing_sum_failures", fails, 0, None, "exact")

    # alternating binomial sums
    fails = 0
    for m in range(0, 11):
        for j in range(0, m + 1):
            want = math.factorial(m) if j == m else 0
            fails += oracles.binomial_alternating_sum(m, j) != want
    rep.add("binomial_sum_failures", fails, 0, None, "exact")

    rep.wall_clock_seconds = time.perf_counter() - t0
    if output_path:
        persist_report(rep, output_path, output_format)
    return rep


def run_hollow_goe(
    trials: int = 100_000,
    seed: int = 0,
    max_k1: int = 4,
    max_m: int = 6,
    tolerances: dict | None = None,
) -> Report:
    """Exact pairing enumeration against closed forms and Monte Carlo."""
    t0 = time.perf_counter()
    tolerances = dict(tolerances or {})
    se_tol = float(tolerances.get("goe_se", DEFAULT_TOLERANCES["goe_se"]))
    rep = Report(
        "hollow_goe",
        {"trials": trials, "seed": int(seed), "max_k1": max_k1, "max_m": max_m},
        seed_provenance={"root_seed": int(seed), "scheme": SEED_SCHEME},
    )
    for k1 in range(1, oracles.EXACT_MAX_K1 + 1):
        rep.add(f"exact_k{k1}_m1", oracles.hollow_goe_exact_trace(k1, 1), 0, None, "exact")
        rep.add(f"exact_k{k1}_m2", oracles.hollow_goe_exact_trace(k1, 2), k1 * (k1 - 1), None, "exact")
    for k1 in range(1, max_k1 + 1):
        for m in range(0, max_m + 1):
            exact = oracles.hollow_goe_exact_trace(k1, m)
            mc, se = oracles.hollow_goe_trace_moment(
                k1, m, "monte_carlo", trials=trials, seed=seed + 1000 * k1 + m, return_stderr=True
            )
            if se == 0:
                rep.add(f"mc_k{k1}_m{m}", mc, exact, 1e-9 * max(1.0, abs(exact)), "abs", se)
            else:
                rep.add(f"mc_k{k1}_m{m}", mc, exact, se_tol, "se", se)
    rep.wall_clock_seconds = time.perf_counter() - t0
    return rep
