"""Input checks shared by the estimator classes and the experiment runners."""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils import check_array


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_threshold_exponent(theta) -> float:
    theta = float(theta)
    if not 0.5 < theta < 1.0:
        raise ValueError(f"threshold_exponent must lie in (1/2, 1), got {theta}")
    return theta


def check_symmetric_matrix(m, atol: float = 1e-12) -> np.ndarray:
    m = check_array(m, dtype=float, ensure_2d=True)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max()))
    if not np.allclose(m, m.T, rtol=0.0, atol=atol * scale):
        raise ValueError("matrix is not symmetric")
    return m


def check_matrix_stack(x) -> np.ndarray:
    """Accept one ``N x N`` matrix or a stack ``(n, N, N)``; returns the stack."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 2:
        x = x[None]
    if x.ndim != 3 or x.shape[1] != x.shape[2]:
        raise ValueError(f"expected (N, N) or (n, N, N) input, got shape {x.shape}")
    for m in x:
        check_symmetric_matrix(m)
    return x


def check_spectra(x) -> np.ndarray:
    """One spectrum ``(N,)`` or a batch ``(n, N)``; rows come back sorted."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None]
    x = check_array(x, dtype=float, ensure_2d=True)
    return np.sort(x, axis=1)
