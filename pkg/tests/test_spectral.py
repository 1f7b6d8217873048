import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from checkerboard.ensemble import EnsembleSpec, build_z, sample_checkerboard, z_spectrum_exact
from checkerboard.exceptions import OverlappingRegimesError
from checkerboard.spectral import (
    BULK,
    HistogramTable,
    Spectrum,
    WeightedMeasure,
    bulk_measure,
    centered_moment,
    classify_regimes,
    eigenvalues,
    histogram,
    measure_moment,
    pooled_measure,
    semicircle_density,
    semicircle_moment,
    semicircle_radius,
)


def test_eigenvalue_examples():
    assert np.allclose(eigenvalues(np.diag([3.0, 1.0, 2.0])).values, [1, 2, 3])
    assert np.allclose(eigenvalues([[0, 1], [1, 0]]).values, [-1, 1])
    ev = eigenvalues(build_z(3, (1, 1, 2), 6)).values
    assert np.allclose(ev, z_spectrum_exact(3, (1, 1, 2), 6), atol=1e-12)


def test_eigenvalues_reject_non_symmetric():
    with pytest.raises(ValueError):
        eigenvalues([[0, 1], [0, 0]])
    with pytest.raises(ValueError):
        eigenvalues(np.zeros((2, 3)))


@given(n=st.integers(1, 50), seed=st.integers(0, 2**32 - 1))
def test_eigenvalues_recover_planted_spectrum(n, seed):
    rng = np.random.default_rng(seed)
    d = rng.uniform(-10, 10, n)
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    m = q @ np.diag(d) @ q.T
    m = (m + m.T) / 2
    s = eigenvalues(m)
    norm = max(1.0, np.abs(d).max())
    assert np.allclose(s.values, np.sort(d), atol=1e-8 * norm)
    assert abs(s.values.sum() - np.trace(m)) <= 1e-8 * n * norm
    assert abs((s.values**2).sum() - (m**2).sum()) <= 1e-8 * n * norm**2


def test_bulk_measure_examples():
    mu = bulk_measure(Spectrum([0.0, 0.0]))
    assert np.array_equal(mu.locations, [0, 0]) and np.allclose(mu.masses, 0.5)
    mu = bulk_measure(Spectrum([4.0]))
    assert mu.locations[0] == 4 and mu.masses[0] == 1
    mu = bulk_measure(Spectrum(np.arange(10.0)))
    assert math.isclose(mu.total_mass, 1.0)


def test_measure_moment_examples():
    mu = WeightedMeasure([3.0], [1.0])
    assert measure_moment(mu, 2) == 9
    mu = WeightedMeasure([1.0, 2.0, 5.0], [0.1, 0.2, 0.3])
    assert math.isclose(measure_moment(mu, 0), 0.6)
    assert math.isclose(measure_moment(bulk_measure(Spectrum([-1.0, 1.0])), 2), 0.5)
    # centering about the measure's own first moment
    mu = WeightedMeasure([0.0, 2.0], [0.5, 0.5])
    assert centered_moment(mu, 1) == 0
    assert centered_moment(mu, 2) == 1


def test_weighted_measure_validation():
    with pytest.raises(ValueError):
        WeightedMeasure([0.0, 1.0], [1.0])
    with pytest.raises(ValueError):
        WeightedMeasure([0.0], [-1.0])


def test_semicircle_radius_examples():
    assert math.isclose(semicircle_radius(2), math.sqrt(2))
    assert semicircle_radius(1) == 0
    assert semicircle_radius(math.inf) == 2


@pytest.mark.parametrize("m", range(0, 9))
@pytest.mark.parametrize("radius", [0.5, math.sqrt(2), 2.0])
def test_semicircle_moment_matches_quadrature(radius, m):
    val, _ = integrate.quad(lambda x: x**m * semicircle_density(x, radius), -radius, radius, epsabs=1e-13)
    assert math.isclose(semicircle_moment(radius, m), val, rel_tol=1e-9, abs_tol=1e-12)


def test_semicircle_moment_examples():
    assert semicircle_moment(1.3, 0) == 1
    assert semicircle_moment(1.3, 1) == 0
    assert semicircle_moment(2.0, 4) == 2


def test_classify_z_spectrum_gives_multiplicities():
    spec = EnsembleSpec(6, (1, -2, -2, 3, 3, 3), 600)
    part = classify_regimes(Spectrum(z_spectrum_exact(6, spec.weights, 600)), spec, 0.6)
    assert part.counts == {"bulk": 594, 1.0: 1, -2.0: 2, 3.0: 3}
    assert sum(part.counts.values()) == 600


@given(
    k=st.integers(1, 6),
    mult=st.integers(40, 120),
    data=st.data(),
)
def test_classify_z_spectrum_property(k, mult, data):
    n = k * mult
    w = tuple(data.draw(st.lists(st.integers(-3, 3), min_size=k, max_size=k)))
    spec = EnsembleSpec(k, w, n)
    s = Spectrum(z_spectrum_exact(k, w, n))
    try:
        part = classify_regimes(s, spec, 0.55)
    except OverlappingRegimesError:
        return
    assert part.bulk_count == n - sum(1 for x in w if x != 0)
    for v, c in zip(part.blip_values, part.blip_counts):
        assert c == spec.multiplicity(v)
    assert part.bulk_count + sum(part.blip_counts) == n


def test_classify_all_zero_weights():
    spec = EnsembleSpec(4, (0, 0, 0, 0), 64, seed=1)
    part = classify_regimes(eigenvalues(sample_checkerboard(spec)), spec)
    assert part.bulk_count == 64 and part.blip_values == ()
    assert np.all(part.labels == BULK)


def test_classify_sample_counts():
    spec = EnsembleSpec(6, (1, -2, -2, 3, 3, 3), 600, seed=3)
    part = classify_regimes(eigenvalues(sample_checkerboard(spec)), spec, 0.6)
    assert (part.bulk_count,) + part.blip_counts == (594, 1, 2, 3)
    assert np.all(np.abs(part.centers - np.array([100.0, -200.0, 300.0])) < 1e-12)


def test_classify_errors():
    spec = EnsembleSpec(6, (1, -2, -2, 3, 3, 3), 600)
    s = Spectrum(z_spectrum_exact(6, spec.weights, 600))
    with pytest.raises(OverlappingRegimesError):
        classify_regimes(s, spec, 0.75)
    with pytest.raises(ValueError):
        classify_regimes(s, spec, 0.5)
    with pytest.raises(ValueError):
        classify_regimes(Spectrum(np.zeros(10)), spec, 0.6)


def test_histogram_examples(tmp_path):
    h = histogram(WeightedMeasure([0.5], [1.0]), 0, 1, 1)
    assert np.allclose(h.densities, [1.0])
    h = histogram(WeightedMeasure([0.25, 0.75], [0.5, 0.5]), 0, 1, 2)
    assert np.allclose(h.densities, [1.0, 1.0])
    h = histogram(WeightedMeasure([], []), 0, 1, 4)
    assert h.empty and np.all(h.densities == 0)
    # boundary atoms go right; the last bin is closed
    h = histogram(WeightedMeasure([0.5, 1.0], [0.5, 0.5]), 0, 1, 2)
    assert np.allclose(h.densities, [0.0, 2.0])
    h.write_csv(tmp_path / "h.csv")
    lines = (tmp_path / "h.csv").read_text().splitlines()
    assert lines[0] == "bin_left,bin_right,density" and len(lines) == 3
    h.write_json(tmp_path / "h.json")
    d = json.loads((tmp_path / "h.json").read_text())
    assert d["density"] == [0.0, 2.0] and d["total_mass"] == 1.0
    with pytest.raises(ValueError):
        histogram(WeightedMeasure([0.5], [1.0]), 1, 0, 2)


@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=60), st.integers(1, 30))
def test_histogram_integrates_to_inside_mass(xs, bins):
    mu = WeightedMeasure(xs, np.full(len(xs), 1.0 / len(xs)))
    h = histogram(mu, -3, 3, bins)
    width = 6 / bins
    assert math.isclose(h.densities.sum() * width, 1.0, rel_tol=1e-9)


def test_pooled_measure():
    a, b = bulk_measure(Spectrum([1.0, 2.0])), bulk_measure(Spectrum([3.0, 4.0, 5.0]))
    p = pooled_measure([a, b])
    assert len(p) == 5 and math.isclose(p.total_mass, 1.0)


@pytest.mark.slow
def test_bulk_second_moment_and_blip_independence_of_bulk():
    rows = {}
    for w in [(0, 0, 0, 0), (5, 5, 5, 5)]:
        spec = EnsembleSpec(4, w, 512, seed=21)
        vals = []
        for t in range(40):
            s = eigenvalues(sample_checkerboard(spec, t))
            v = s.values
            if any(w):
                v = v[classify_regimes(s, spec).labels == BULK]
            vals.append(v / math.sqrt(512))
        x = np.concatenate(vals)
        rows[w] = (np.mean(x**2), np.mean(x**4))
    assert abs(rows[(0, 0, 0, 0)][0] - 0.75) < 0.05 * 0.75
    for j in range(2):
        a, b = rows[(0, 0, 0, 0)][j], rows[(5, 5, 5, 5)][j]
        assert abs(a - b) < 0.05 * abs(a)
