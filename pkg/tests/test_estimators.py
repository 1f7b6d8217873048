import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from checkerboard.ensemble import EnsembleSpec, sample_checkerboard
from checkerboard.estimators import (
    BlipMomentEstimator,
    BulkMomentEstimator,
    CheckerboardSampler,
    RegimeClassifier,
    SpectrumTransformer,
)
from checkerboard.spectral import BULK


def test_params_roundtrip_and_clone():
    est = BlipMomentEstimator(k=6, weights=(0, 0, 0, 3, 3, 3), blip_value=3.0, max_moment=3, n=12)
    params = est.get_params()
    assert params == {"k": 6, "weights": (0, 0, 0, 3, 3, 3), "blip_value": 3.0, "max_moment": 3, "n": 12}
    c = clone(est)
    assert c.get_params() == params and c is not est
    c.set_params(n=8)
    assert c.n == 8 and est.n == 12


def test_sampler_matches_functional_sampling():
    s = CheckerboardSampler(k=3, weights=(2, 0, 0), dim=30, seed=5).fit()
    mats = s.sample(3, start_trial=2)
    spec = EnsembleSpec(3, (2, 0, 0), 30, seed=5)
    for t in range(3):
        np.testing.assert_array_equal(mats[t], sample_checkerboard(spec, 2 + t))
    spectra = s.sample_spectra(2)
    assert spectra.shape == (2, 30)
    assert np.all(np.diff(spectra, axis=1) >= 0)
    with pytest.raises(NotFittedError):
        CheckerboardSampler().sample()


def test_spectrum_transformer_validates():
    X = np.stack([sample_checkerboard(EnsembleSpec(2, (0, 0), 10), t) for t in range(2)])
    out = SpectrumTransformer().fit_transform(X)
    np.testing.assert_allclose(out[0], np.linalg.eigvalsh(X[0]))
    bad = np.arange(9.0).reshape(3, 3)
    with pytest.raises(ValueError):
        SpectrumTransformer().transform(bad)
    with pytest.raises(ValueError):
        SpectrumTransformer().transform(np.zeros((2, 3)))


def test_regime_classifier_counts():
    w = (1, -2, -2, 3, 3, 3)
    X = CheckerboardSampler(k=6, weights=w, dim=600, seed=1).fit().sample_spectra(2)
    clf = RegimeClassifier(k=6, weights=w, threshold_exponent=0.6).fit(X)
    # blips in order of first appearance
    assert clf.blip_values_ == (1.0, -2.0, 3.0)
    np.testing.assert_array_equal(clf.counts(X), [[594, 1, 2, 3]] * 2)
    labels = clf.predict(X)
    assert (labels == BULK).sum(axis=1).tolist() == [594, 594]
    with pytest.raises(ValueError):
        clf.predict(X[:, :100])
    with pytest.raises(ValueError):
        RegimeClassifier(k=6, weights=w, threshold_exponent=0.4).fit(X)


def test_bulk_moment_estimator():
    X = CheckerboardSampler(k=4, weights=(0, 0, 0, 0), dim=200, seed=2).fit().sample_spectra(4)
    est = BulkMomentEstimator(k=4, weights=(0, 0, 0, 0), max_moment=4).fit(X)
    assert est.moments_.shape == (4,) and est.stderr_.shape == (4,)
    np.testing.assert_allclose(est.reference_, [0, 0.75, 0, 2 * 0.75**2])
    assert abs(est.moments_[1] - 0.75) < 0.05 * 0.75
    assert est.transform(X).shape == (4, 4)


def test_blip_moment_estimator():
    w = (0, 0, 0, 3, 3, 3)
    X = CheckerboardSampler(k=6, weights=w, dim=240, seed=3).fit().sample_spectra(6)
    est = BlipMomentEstimator(k=6, weights=w, blip_value=3.0, max_moment=2, n=12).fit(X)
    assert est.n_used_ == 12
    assert abs(est.total_mass_ - 1) < 0.05
    assert est.moments_.shape == est.centered_moments_.shape == (2,)
    # centering uses the unnormalized first moment, so m1 is off by the mass defect
    np.testing.assert_allclose(est.centered_moments_[0], est.moments_[0] * (1 - est.total_mass_), atol=1e-12)
    per = est.transform(X)
    assert per.shape == (6, 2)
    np.testing.assert_allclose(per[:, 0].mean(), est.moments_[0], rtol=0.05)
    with pytest.raises(ValueError):
        BlipMomentEstimator(k=6, weights=w, blip_value=0.0).fit(X)
