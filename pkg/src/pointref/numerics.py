"""Small shared numerical helpers."""

from __future__ import annotations

import numpy as np


def sigmoid(x):
    """Numerically stable logistic function; preserves scalar/array shape."""
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)
    pos = arr >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-arr[pos]))
    ex = np.exp(arr[~pos])
    out[~pos] = ex / (1.0 + ex)
    return float(out[0]) if scalar else out


def softmax(x):
    """Stable softmax over a 1-D array."""
    arr = np.asarray(x, dtype=float)
    shifted = arr - arr.max()
    ex = np.exp(shifted)
    return ex / ex.sum()


def unit(v, eps: float = 1e-12):
    """L2-normalize a vector; raises on (near-)zero input."""
    arr = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(arr))
    if n < eps:
        raise ValueError("cannot normalize zero vector")
    return arr / n
