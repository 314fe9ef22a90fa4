"""Approximate KNN graph built by alternating GK-means and in-cluster comparison.

Starting from random neighbor lists, each outer iteration clusters the data
into k0 = n // xi small clusters with GK-means driven by the current graph,
then compares every pair inside each cluster and keeps the closer pairs. The
better graph gives better clusters in the next iteration, and vice versa.
"""

from __future__ import annotations

import logging
import time

import numpy as np

from src.core import kernels
from src.core.model import (
    Dataset,
    KnnGraph,
    Partition,
    as_generator,
    distortion_from_objective,
)
from src.core.schemas import ClusterConfig
from src.evaluation.metrics import recall_at_1
from src.evaluation.trace import MetricsTrace
from src.training.gk_means import gk_means


logger = logging.getLogger(__name__)


def random_graph_init(
    data: Dataset, kappa: int, rng: np.random.Generator | int | None = None
) -> KnnGraph:
    """Rows of kappa distinct uniformly drawn ids (never the row's own id), sorted."""
    n = data.n
    if not 1 <= kappa <= n - 1:
        raise ValueError(f"kappa must lie in [1, n-1] = [1, {n - 1}], got {kappa}")
    rng = as_generator(rng)
    ids = np.empty((n, kappa), dtype=np.int64)
    for i in range(n):
        row = rng.choice(n - 1, size=kappa, replace=False)
        row[row >= i] += 1
        ids[i] = row
    dists = kernels.fill_sorted_rows(data.values, ids)
    return KnnGraph(ids, dists, distance_evals=n * kappa)


def update_knn_list(graph: KnnGraph, i: int, j: int, sq_dist: float) -> bool:
    """Offer the pair (i, j) to both rows; returns whether either row changed."""
    if i == j:
        raise ValueError(f"Cannot link sample {i} to itself")
    changed_i = kernels.try_insert(graph.indices[i], graph.distances[i], j, sq_dist)
    changed_j = kernels.try_insert(graph.indices[j], graph.distances[j], i, sq_dist)
    return bool(changed_i or changed_j)


def refine_within_clusters(data: Dataset, part: Partition, graph: KnnGraph) -> int:
    """Compare all pairs inside every cluster once; returns the number of row mutations."""
    if graph.n != data.n or part.n != data.n:
        raise ValueError("Dataset, partition and graph must cover the same samples")
    members = np.argsort(part.assignment, kind="stable")
    counts = np.bincount(part.assignment, minlength=part.k)
    starts = np.zeros(part.k + 1, dtype=np.int64)
    np.cumsum(counts, out=starts[1:])
    updates, evals = kernels.refine_clusters(
        data.values, members, starts, graph.indices, graph.distances
    )
    graph.distance_evals += evals
    return int(updates)


def build_knn_graph(
    data: Dataset,
    kappa: int,
    config: ClusterConfig,
    *,
    tau: int | None = None,
    rng: np.random.Generator | int | None = None,
    exact: KnnGraph | None = None,
    trace: MetricsTrace | None = None,
    snapshots: list[KnnGraph] | None = None,
) -> KnnGraph:
    """Build an approximate kappa-NN graph in `tau` (default ``config.tau``) iterations.

    With `trace`, one row per outer iteration records the clustering distortion,
    the recall against `exact` (when given), accepted moves and distance
    evaluations (pair comparisons plus gain evaluations).
    With `snapshots`, a copy of the graph is appended after every iteration,
    the random starting graph first.
    """
    n = data.n
    xi = config.xi
    if n <= xi:
        raise ValueError(
            f"n={n} must exceed xi={xi} to build a graph by clustering; "
            "use brute_force_knn for sets this small"
        )
    tau = config.tau if tau is None else tau
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    rng = as_generator(config.seed if rng is None else rng)

    t0 = time.perf_counter()
    graph = random_graph_init(data, kappa, rng)
    k0 = n // xi
    pass_config = config.with_updates(mode="boost", max_iter=config.build_passes)
    if trace is not None:
        trace.append(
            iteration=0,
            elapsed_seconds=0.0,
            distortion=float("nan"),
            recall_at_1=_recall(graph, exact, config),
            distance_evals=graph.distance_evals,
        )
    if snapshots is not None:
        snapshots.append(graph.copy())

    part: Partition | None = None
    for t in range(1, tau + 1):
        evals_before = graph.distance_evals
        passes = MetricsTrace()
        part = gk_means(
            data,
            k0,
            graph,
            pass_config,
            init=part if config.warm_start else None,
            rng=rng,
            trace=passes,
        )
        updates = refine_within_clusters(data, part, graph)
        recall = _recall(graph, exact, config)
        if trace is not None:
            trace.append(
                iteration=t,
                elapsed_seconds=time.perf_counter() - t0,
                distortion=distortion_from_objective(data, part),
                recall_at_1=recall,
                moves_accepted=passes.total("moves_accepted"),
                distance_evals=graph.distance_evals - evals_before
                + passes.total("distance_evals"),
            )
        if snapshots is not None:
            snapshots.append(graph.copy())
        logger.debug(
            f"Graph iteration {t}/{tau}: {updates} row updates"
            + (f", recall@1={recall:.4f}" if recall is not None else "")
        )

    logger.info(
        f"KNN graph built: n={n}, kappa={kappa}, k0={k0}, tau={tau} "
        f"in {time.perf_counter() - t0:.2f}s"
    )
    return graph


def _recall(graph: KnnGraph, exact: KnnGraph | None, config: ClusterConfig) -> float | None:
    if exact is None:
        return None
    return recall_at_1(graph, exact, top1_only=config.recall_top1_only)
