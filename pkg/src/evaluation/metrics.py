from __future__ import annotations

import numpy as np
from scipy.stats import spearmanr

from src.core.model import Dataset, KnnGraph, Partition, as_generator


def distortion(data: Dataset, part: Partition) -> float:
    """Average squared distance between samples and their cluster centroid."""
    centroids = part.centroids()
    diff = data.centered - centroids[part.assignment]
    return float(np.einsum("ij,ij->", diff, diff) / data.n)


def sample_ids(n: int, size: int = 100, seed: np.random.Generator | int | None = 0) -> np.ndarray:
    """Sorted seeded subset of row ids, used to estimate recall on large graphs."""
    rng = as_generator(seed)
    return np.sort(rng.choice(n, size=min(size, n), replace=False))


def recall_at_1(
    approx: KnnGraph,
    exact: KnnGraph,
    ids: np.ndarray | None = None,
    *,
    top1_only: bool = False,
) -> float:
    """Fraction of rows whose exact nearest neighbor appears in the approximate row.

    With ``top1_only`` the neighbor must sit at rank 1 of the approximate row.
    """
    if approx.n != exact.n:
        raise ValueError(f"Graphs cover different sample counts: {approx.n} vs {exact.n}")
    rows = np.arange(approx.n) if ids is None else np.asarray(ids, dtype=np.int64)
    if rows.size == 0:
        raise ValueError("No rows selected for recall")
    truth = exact.indices[rows, 0]
    if top1_only:
        hits = approx.indices[rows, 0] == truth
    else:
        hits = np.any(approx.indices[rows] == truth[:, None], axis=1)
    return float(np.mean(hits))


def co_membership_rate(part: Partition, exact: KnnGraph, rank: int) -> float:
    """Fraction of samples sharing a cluster with their rank-th nearest neighbor."""
    if not 1 <= rank <= exact.kappa:
        raise ValueError(f"rank must lie in [1, {exact.kappa}], got {rank}")
    if exact.n != part.n:
        raise ValueError(f"Graph has {exact.n} rows but the partition has {part.n} samples")
    neighbor = exact.indices[:, rank - 1]
    return float(np.mean(part.assignment[neighbor] == part.assignment))


def co_membership_curve(
    part: Partition, exact: KnnGraph, max_rank: int | None = None
) -> np.ndarray:
    max_rank = exact.kappa if max_rank is None else max_rank
    return np.array([co_membership_rate(part, exact, r) for r in range(1, max_rank + 1)])


def spearman_trend(values: np.ndarray) -> float:
    """Spearman correlation of a curve against its position (negative = downward)."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ValueError("A trend needs at least two points")
    rho, _ = spearmanr(np.arange(values.size), values)
    return float(rho)
