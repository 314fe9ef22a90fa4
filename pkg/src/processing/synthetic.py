"""Seeded Gaussian-mixture corpora standing in for SIFT / GIST style data.

Centers are uniform in the unit hypercube; label counts are balanced to
within one. Values are rounded to float32 so an in-memory corpus equals the
same corpus written to and read back from an fvecs file.
"""

from __future__ import annotations

import logging

import numpy as np

from src.core.model import Dataset


logger = logging.getLogger(__name__)


def gen_mixture(
    n: int, d: int, k_true: int, sigma: float, seed: int = 0
) -> tuple[Dataset, np.ndarray]:
    if n < 1 or d < 1:
        raise ValueError(f"Need n >= 1 and d >= 1, got n={n}, d={d}")
    if not 1 <= k_true <= n:
        raise ValueError(f"k_true must lie in [1, n], got {k_true}")
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")

    rng = np.random.default_rng(seed)
    centers = rng.random((k_true, d))
    labels = rng.permutation(np.arange(n, dtype=np.int64) % k_true)
    noise = rng.standard_normal((n, d)) * sigma
    values = (centers[labels] + noise).astype(np.float32)
    logger.info(f"Generated mixture: n={n}, d={d}, centers={k_true}, sigma={sigma}")
    return Dataset(values), labels
