"""Boost k-means driven by a KNN graph (GK-means) and its exhaustive counterpart.

Every pass visits the samples in a fresh random order. A sample is compared
only with the clusters hosting its kappa graph neighbors and moved at once to
the candidate with the largest positive objective gain ("boost" mode) or to the
strictly nearer candidate centroid ("traditional" mode). Moves that would empty
a cluster are skipped. Runs stop after a pass without moves or after max_iter
passes.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Callable

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
from src.evaluation.trace import MetricsTrace
from src.training.two_means import two_means_tree


logger = logging.getLogger(__name__)

MODES = ("boost", "traditional")
# (moves accepted, gain evaluations, smallest accepted gain)
PassResult = tuple[int, int, float]


def candidate_clusters(part: Partition, graph: KnnGraph, i: int) -> np.ndarray:
    """Distinct clusters of sample i's graph neighbors, own cluster excluded (ascending ids)."""
    own = part.assignment[i]
    clusters = np.unique(part.assignment[graph.indices[i]])
    return clusters[clusters != own]


def best_move(
    data: Dataset,
    part: Partition,
    i: int,
    candidates: np.ndarray,
    mode: str = "boost",
) -> tuple[int, float] | None:
    """Best improving target among `candidates`, or None.

    Boost mode returns (v, objective gain) for the largest gain when it is > 0.
    Traditional mode returns (v, squared-distance reduction) for the nearest
    candidate centroid when it is strictly nearer than the current centroid.
    """
    if mode not in MODES:
        raise ValueError(f"Unknown mode {mode!r}; expected one of {MODES}")
    cands = np.ascontiguousarray(candidates, dtype=np.int64)
    u = int(part.assignment[i])
    cands = cands[cands != u]
    if cands.size == 0 or part.sizes[u] < 2:
        return None
    v, gain = kernels.best_target(
        data.centered[i], u, cands, cands.size, part.composite, part.sizes, mode == "boost"
    )
    if v < 0:
        return None
    return int(v), float(gain)


def _optimize(
    data: Dataset,
    part: Partition,
    run_pass: Callable[[np.ndarray], PassResult],
    max_iter: int,
    rng: np.random.Generator,
    trace: MetricsTrace | None,
    label: str,
) -> int:
    """Shared pass loop; returns the number of passes performed."""
    t0 = time.perf_counter()
    if trace is not None:
        trace.append(
            iteration=0, elapsed_seconds=0.0, distortion=distortion_from_objective(data, part)
        )
    passes = 0
    total_moves = 0
    for it in range(1, max_iter + 1):
        order = rng.permutation(data.n)
        moves, evals, min_gain = run_pass(order)
        passes = it
        total_moves += moves
        if moves and not min_gain > 0.0:
            raise RuntimeError(f"{label}: accepted a move with non-positive gain {min_gain}")
        if trace is not None:
            trace.append(
                iteration=it,
                elapsed_seconds=time.perf_counter() - t0,
                distortion=distortion_from_objective(data, part),
                moves_accepted=moves,
                distance_evals=evals,
            )
        logger.debug(f"{label} pass {it}: {moves} moves, {evals} gain evaluations")
        if moves == 0:
            break
    logger.info(
        f"{label}: k={part.k}, {passes} pass(es), {total_moves} moves, "
        f"{time.perf_counter() - t0:.2f}s"
    )
    return passes


def _initial_partition(
    data: Dataset,
    k: int,
    config: ClusterConfig,
    rng: np.random.Generator,
    init: Partition | None,
) -> Partition:
    if init is None:
        return two_means_tree(data, k, rng, config.bisect_passes)
    if init.k != k or init.n != data.n:
        raise ValueError(
            f"Init partition (n={init.n}, k={init.k}) does not match n={data.n}, k={k}"
        )
    if np.any(init.sizes == 0):
        raise ValueError("Init partition has an empty cluster")
    return init.copy()


def gk_means(
    data: Dataset,
    k: int,
    graph: KnnGraph,
    config: ClusterConfig,
    *,
    init: Partition | None = None,
    rng: np.random.Generator | int | None = None,
    trace: MetricsTrace | None = None,
) -> Partition:
    """Cluster `data` into k clusters with candidate sets taken from `graph`.

    Starts from a two-means tree unless `init` is given; `rng` defaults to a
    generator seeded with ``config.seed``.
    """
    if graph.n != data.n:
        raise ValueError(f"Graph has {graph.n} rows but the dataset has {data.n} samples")
    rng = as_generator(config.seed if rng is None else rng)
    part = _initial_partition(data, k, config, rng, init)
    boost = config.mode == "boost"

    def run_pass(order: np.ndarray) -> PassResult:
        return kernels.gk_pass(
            data.centered, part.assignment, part.composite, part.sizes, graph.indices, order, boost
        )

    _optimize(data, part, run_pass, config.max_iter, rng, trace, f"GK-means[{config.mode}]")
    return part


def boost_kmeans(
    data: Dataset,
    k: int,
    config: ClusterConfig,
    *,
    init: Partition | None = None,
    rng: np.random.Generator | int | None = None,
    trace: MetricsTrace | None = None,
) -> Partition:
    """Full boost k-means: every sample is evaluated against all other clusters."""
    rng = as_generator(config.seed if rng is None else rng)
    part = _initial_partition(data, k, config, rng, init)
    boost = config.mode == "boost"

    def run_pass(order: np.ndarray) -> PassResult:
        return kernels.exhaustive_pass(
            data.centered, part.assignment, part.composite, part.sizes, order, boost
        )

    label = "Boost k-means" if boost else "Online k-means"
    _optimize(data, part, run_pass, config.max_iter, rng, trace, label)
    return part
