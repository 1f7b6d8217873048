"""scikit-learn style wrappers around the sampling and spectral routines.

Spectra are passed around as arrays of shape ``(n_matrices, N)``; each row is
the sorted spectrum of one matrix.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import spectral
from ._validation import (
    check_matrix_stack,
    check_positive_int,
    check_spectra,
    check_threshold_exponent,
)
from .blip import average_blip_measures, blip_index, blip_measure, n_schedule
from .ensemble import EnsembleSpec, EntryDist, sample_checkerboard

__all__ = [
    "CheckerboardSampler",
    "SpectrumTransformer",
    "RegimeClassifier",
    "BulkMomentEstimator",
    "BlipMomentEstimator",
]


class CheckerboardSampler(BaseEstimator):
    """Draws matrices from a fixed (k, W)-checkerboard ensemble.

    ``fit`` only validates the parameters; ``X`` is ignored.
    """

    def __init__(self, k=2, weights=(0.0, 0.0), dim=100, entry_dist="normal", seed=0):
        self.k = k
        self.weights = weights
        self.dim = dim
        self.entry_dist = entry_dist
        self.seed = seed

    def fit(self, X=None, y=None):
        self.spec_ = EnsembleSpec(self.k, tuple(self.weights), self.dim, EntryDist(self.entry_dist), self.seed)
        return self

    def sample(self, n_matrices=1, start_trial=0):
        check_is_fitted(self, "spec_")
        n_matrices = check_positive_int(n_matrices, "n_matrices")
        return np.stack([sample_checkerboard(self.spec_, start_trial + t) for t in range(n_matrices)])

    def sample_spectra(self, n_matrices=1, start_trial=0):
        return SpectrumTransformer().transform(self.sample(n_matrices, start_trial))


class SpectrumTransformer(TransformerMixin, BaseEstimator):
    """Symmetric matrices ``(n, N, N)`` to sorted spectra ``(n, N)``."""

    def fit(self, X=None, y=None):
        return self

    def transform(self, X):
        X = check_matrix_stack(X)
        return np.linalg.eigvalsh(X)


class RegimeClassifier(BaseEstimator):
    """Labels each eigenvalue as bulk (``-1``) or the index of its blip value."""

    def __init__(self, k=2, weights=(0.0, 0.0), threshold_exponent=0.75):
        self.k = k
        self.weights = weights
        self.threshold_exponent = threshold_exponent

    def fit(self, X, y=None):
        X = check_spectra(X)
        check_threshold_exponent(self.threshold_exponent)
        self.spec_ = EnsembleSpec(self.k, tuple(self.weights), X.shape[1])
        self.blip_values_ = tuple(self.spec_.distinct_weights())
        self.n_features_in_ = X.shape[1]
        return self

    def _partitions(self, X):
        check_is_fitted(self, "spec_")
        X = check_spectra(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"fitted for N={self.n_features_in_}, got N={X.shape[1]}")
        return [
            spectral.classify_regimes(spectral.Spectrum(row), self.spec_, self.threshold_exponent)
            for row in X
        ]

    def predict(self, X):
        return np.stack([p.labels for p in self._partitions(X)])

    def counts(self, X):
        """``(n, 1 + s)`` array: bulk count then one column per blip value."""
        return np.array([(p.bulk_count,) + p.blip_counts for p in self._partitions(X)])


class BulkMomentEstimator(TransformerMixin, BaseEstimator):
    """Moments of the normalized bulk eigenvalues.

    ``transform`` returns per-spectrum moments ``1..max_moment``; ``fit``
    stores pooled moments, their standard errors and the semicircle values.
    """

    def __init__(self, k=2, weights=(0.0, 0.0), max_moment=4, threshold_exponent=0.75):
        self.k = k
        self.weights = weights
        self.max_moment = max_moment
        self.threshold_exponent = threshold_exponent

    def _bulk_rows(self, X):
        X = check_spectra(X)
        spec = EnsembleSpec(self.k, tuple(self.weights), X.shape[1])
        rows = []
        for row in X:
            s = spectral.Spectrum(row)
            if spec.distinct_weights():
                part = spectral.classify_regimes(s, spec, self.threshold_exponent)
                row = row[part.labels == spectral.BULK]
            rows.append(row / np.sqrt(X.shape[1]))
        return rows

    def transform(self, X):
        m = check_positive_int(self.max_moment, "max_moment")
        rows = self._bulk_rows(X)
        return np.array([[np.mean(r**p) for p in range(1, m + 1)] for r in rows])

    def fit(self, X, y=None):
        per = self.transform(X)
        rows = self._bulk_rows(X)
        pooled = np.concatenate(rows)
        m = per.shape[1]
        self.moments_ = np.array([np.mean(pooled**p) for p in range(1, m + 1)])
        self.stderr_ = per.std(axis=0, ddof=1) / np.sqrt(len(per)) if len(per) > 1 else np.full(m, np.nan)
        r = spectral.semicircle_radius(self.k)
        self.reference_ = np.array([spectral.semicircle_moment(r, p) for p in range(1, m + 1)])
        return self


class BlipMomentEstimator(TransformerMixin, BaseEstimator):
    """Moments of weighted blip measures around ``N w / k``.

    ``n=None`` uses the default schedule for the fitted ``N``.
    """

    def __init__(self, k=2, weights=(1.0, 0.0), blip_value=1.0, max_moment=4, n=None):
        self.k = k
        self.weights = weights
        self.blip_value = blip_value
        self.max_moment = max_moment
        self.n = n

    def _measures(self, X):
        X = check_spectra(X)
        spec = EnsembleSpec(self.k, tuple(self.weights), X.shape[1])
        n = n_schedule(spec.dim) if self.n is None else check_positive_int(self.n, "n")
        i = blip_index(spec, self.blip_value)
        return [blip_measure(spectral.Spectrum(row), spec, i, n) for row in X]

    def transform(self, X):
        """Per-spectrum raw moments ``1..max_moment`` of the blip measure."""
        m = check_positive_int(self.max_moment, "max_moment")
        return np.array(
            [[spectral.measure_moment(mu, p) for p in range(1, m + 1)] for mu in self._measures(X)]
        )

    def fit(self, X, y=None):
        m = check_positive_int(self.max_moment, "max_moment")
        ms = self._measures(X)
        avg = average_blip_measures(ms)
        self.n_used_ = avg.n_used
        self.total_mass_ = avg.total_mass
        self.moments_ = np.array([spectral.measure_moment(avg, p) for p in range(1, m + 1)])
        self.centered_moments_ = np.array([spectral.centered_moment(avg, p) for p in range(1, m + 1)])
        return self
