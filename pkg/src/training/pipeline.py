from __future__ import annotations

import logging
from collections.abc import Callable
from pathlib import Path

import numpy as np

from src.core.model import Dataset, KnnGraph, Partition
from src.core.schemas import ClusterConfig
from src.evaluation.baselines import brute_force_knn, lloyd_kmeans
from src.evaluation.trace import MetricsTrace
from src.knn_graph.builder import build_knn_graph, random_graph_init
from src.processing.vecs_io import load_graph
from src.training.gk_means import boost_kmeans, gk_means


logger = logging.getLogger(__name__)

GraphBuilder = Callable[[Dataset, ClusterConfig, np.random.Generator], KnnGraph]
Method = Callable[
    [
        Dataset,
        int,
        KnnGraph | None,
        ClusterConfig,
        Partition,
        np.random.Generator,
        MetricsTrace | None,
    ],
    Partition,
]


# --------------------------- graph sources --------------------------- #
def _graph_registry() -> dict[str, GraphBuilder]:
    return {
        "build": lambda data, cfg, rng: build_knn_graph(data, cfg.kappa, cfg, rng=rng),
        "exact": lambda data, cfg, rng: brute_force_knn(data, cfg.kappa),
        "random": lambda data, cfg, rng: random_graph_init(data, cfg.kappa, rng),
    }


def resolve_graph(
    source: str,
    data: Dataset,
    config: ClusterConfig,
    rng: np.random.Generator,
    dists_path: Path | None = None,
) -> KnnGraph:
    """Produce the KNN graph named by `source`: build | exact | random | file:PATH."""
    name = (source or "").strip()
    if name.lower().startswith("file:"):
        path = Path(name[len("file:") :]).expanduser()
        logger.info(f"Loading KNN graph from {path}")
        return load_graph(path, data, dists_path)

    registry = _graph_registry()
    builder = registry.get(name.lower())
    if builder is None:
        raise ValueError(
            f"Unsupported graph source {source!r}; expected one of "
            f"{sorted(registry)} or file:PATH"
        )
    logger.info(f"Preparing KNN graph: source={name.lower()}, kappa={config.kappa}")
    return builder(data, config, rng)


# ----------------------------- methods ----------------------------- #
def _method_registry() -> dict[str, Method]:
    def gk(mode: str) -> Method:
        def run(data, k, graph, cfg, init, rng, trace):
            if graph is None:
                raise ValueError("GK-means needs a KNN graph")
            return gk_means(
                data, k, graph, cfg.with_updates(mode=mode), init=init, rng=rng, trace=trace
            )

        return run

    def bkm(data, k, graph, cfg, init, rng, trace):
        cfg = cfg.with_updates(mode="boost")
        return boost_kmeans(data, k, cfg, init=init, rng=rng, trace=trace)

    def lloyd(data, k, graph, cfg, init, rng, trace):
        return lloyd_kmeans(data, k, init, cfg.max_iter, trace=trace)

    return {
        "gk_boost": gk("boost"),
        "gk_traditional": gk("traditional"),
        "bkm": bkm,
        "lloyd": lloyd,
    }


METHODS = tuple(_method_registry())


def run_method(
    name: str,
    data: Dataset,
    k: int,
    graph: KnnGraph | None,
    config: ClusterConfig,
    init: Partition,
    rng: np.random.Generator,
    trace: MetricsTrace | None = None,
) -> Partition:
    """Run one optimizer (gk_boost | gk_traditional | bkm | lloyd) from `init`."""
    registry = _method_registry()
    method = registry.get(name.lower().strip())
    if method is None:
        raise ValueError(f"Unsupported method {name!r}; expected one of {sorted(registry)}")
    return method(data, k, graph, config, init, rng, trace)
