"""Exact oracles: Lloyd k-means and brute-force KNN graph."""

from __future__ import annotations

import logging
import time

import numpy as np
from sklearn.metrics import pairwise_distances_argmin_min

from src.core import kernels
from src.core.model import Dataset, KnnGraph, Partition, distortion_from_objective
from src.evaluation.trace import MetricsTrace


logger = logging.getLogger(__name__)


def _repair_empty(labels: np.ndarray, dists: np.ndarray, k: int) -> int:
    """Give every empty cluster the sample farthest from its centroid; returns repairs."""
    sizes = np.bincount(labels, minlength=k)
    empty = np.flatnonzero(sizes == 0)
    if empty.size == 0:
        return 0
    order = np.argsort(-dists, kind="stable")
    pos = 0
    for r in empty:
        while sizes[labels[order[pos]]] < 2:
            pos += 1
        i = order[pos]
        sizes[labels[i]] -= 1
        labels[i] = r
        sizes[r] = 1
        pos += 1
    return int(empty.size)


def lloyd_kmeans(
    data: Dataset,
    k: int,
    init: Partition,
    max_iter: int = 30,
    *,
    trace: MetricsTrace | None = None,
) -> Partition:
    """Classic assign / re-center alternation until assignments stop changing."""
    if init.k != k or init.n != data.n:
        raise ValueError(
            f"Init partition (n={init.n}, k={init.k}) does not match n={data.n}, k={k}"
        )
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")

    X = data.centered
    part = init.copy()
    t0 = time.perf_counter()
    if trace is not None:
        trace.append(
            iteration=0, elapsed_seconds=0.0, distortion=distortion_from_objective(data, part)
        )

    for it in range(1, max_iter + 1):
        labels, dists = pairwise_distances_argmin_min(X, part.centroids())
        labels = labels.astype(np.int64)
        repaired = _repair_empty(labels, dists, k)
        changed = int(np.count_nonzero(labels != part.assignment))
        composite, sizes = kernels.accumulate(X, labels, k)
        part = Partition(labels, composite, sizes)
        if trace is not None:
            trace.append(
                iteration=it,
                elapsed_seconds=time.perf_counter() - t0,
                distortion=distortion_from_objective(data, part),
                moves_accepted=changed,
                distance_evals=data.n * k,
            )
        logger.debug(f"Lloyd iter {it}: {changed} reassigned, {repaired} empty repaired")
        if changed == 0:
            break

    logger.info(f"Lloyd k-means finished after {it} iteration(s), k={k}")
    return part


def brute_force_knn(data: Dataset, kappa: int) -> KnnGraph:
    """Exact KNN graph; rows hold the kappa nearest other samples, ties by ascending id."""
    if not 1 <= kappa <= data.n - 1:
        raise ValueError(f"kappa must lie in [1, n-1] = [1, {data.n - 1}], got {kappa}")
    t0 = time.perf_counter()
    ids, dists = kernels.brute_force_rows(data.values, kappa)
    logger.info(
        f"Brute-force KNN: n={data.n}, kappa={kappa} in {time.perf_counter() - t0:.2f}s"
    )
    return KnnGraph(ids, dists, distance_evals=data.n * (data.n - 1))
