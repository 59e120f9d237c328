"""Input checks shared by the estimators and the CLI."""

from __future__ import annotations

import numpy as np


def check_block_length(n: int) -> int:
    """Return ``m`` with ``n == 2**m``; raise for anything else."""
    n = int(n)
    if n < 1 or n & (n - 1):
        raise ValueError(f"block length must be a power of two, got {n}")
    return n.bit_length() - 1


def check_bits(X, n_features: int | None = None, name: str = "X") -> np.ndarray:
    """Validate a 2-d array of zeros and ones and return it as ``uint8``."""
    arr = np.asarray(X)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-d (n_samples, n_features), got shape {arr.shape}")
    if arr.size and not np.issubdtype(arr.dtype, np.number) and arr.dtype != bool:
        raise ValueError(f"{name} must be numeric, got dtype {arr.dtype}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError(f"{name} may only contain 0 and 1")
    if n_features is not None and arr.shape[1] != n_features:
        raise ValueError(f"{name} has {arr.shape[1]} features, expected {n_features}")
    return arr.astype(np.uint8)


def check_llr(X, n_features: int | None = None, name: str = "X") -> np.ndarray:
    """Validate a 2-d array of log-likelihood ratios (``+-inf`` allowed)."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-d (n_samples, n_features), got shape {arr.shape}")
    if np.isnan(arr).any():
        raise ValueError(f"{name} contains NaN")
    if n_features is not None and arr.shape[1] != n_features:
        raise ValueError(f"{name} has {arr.shape[1]} features, expected {n_features}")
    return arr


def check_weight(w: int, t: int) -> int:
    w = int(w)
    if w < 0:
        raise ValueError(f"error weight must be non-negative, got {w}")
    if w > t:
        raise ValueError(f"error weight {w} exceeds t = {t}")
    return w
