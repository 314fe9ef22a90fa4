"""Desk-scale benchmark drivers behind the `bench` command.

compare   - final distortion of GK-means (boost / traditional), full boost
            k-means and Lloyd from a shared two-means-tree init, per seed;
            optionally the per-pass trace of every run.
scaling   - median per-pass wall time of GK-means and Lloyd as k grows, or
            total run time at fixed k as n grows.
evolve    - recall / distortion curve of the graph builder per outer iteration.
recall    - GK-means distortion (boost and traditional) on the graphs reached
            after each graph-building iteration, against their recall.
"""

from __future__ import annotations

import logging
import time

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from src.core.model import Dataset, KnnGraph
from src.core.schemas import ClusterConfig
from src.evaluation.metrics import distortion, recall_at_1
from src.evaluation.trace import MetricsTrace
from src.knn_graph.builder import build_knn_graph
from src.processing.synthetic import gen_mixture
from src.training.gk_means import gk_means
from src.training.pipeline import METHODS, resolve_graph, run_method
from src.training.two_means import two_means_tree


logger = logging.getLogger(__name__)

TRACE_FRAME_COLUMNS = ["seed", "method", "iteration", "elapsed_seconds", "distortion"]


def warm_up() -> None:
    """Compile every kernel once so timings exclude JIT compilation."""
    data, _ = gen_mixture(120, 4, 4, 0.05, seed=0)
    config = ClusterConfig(k=4, kappa=5, xi=10, tau=1, max_iter=1)
    rng = np.random.default_rng(0)
    graph = resolve_graph("build", data, config, rng)
    exact = resolve_graph("exact", data, config, rng)
    init = two_means_tree(data, 4, rng)
    for method in METHODS:
        run_method(method, data, 4, graph if method == "gk_boost" else exact, config, init, rng)


def _compare_one(
    data: Dataset, k: int, config: ClusterConfig, seed: int, graph_source: str, methods
) -> tuple[list[dict], list[dict]]:
    cfg = config.with_updates(k=k, seed=seed)
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    graph = resolve_graph(graph_source, data, cfg, rng)
    graph_seconds = time.perf_counter() - t0
    init = two_means_tree(data, k, rng, cfg.bisect_passes)

    rows, trace_rows = [], []
    for idx, method in enumerate(methods):
        trace = MetricsTrace()
        t0 = time.perf_counter()
        part = run_method(
            method, data, k, graph, cfg, init, np.random.default_rng([seed, idx]), trace
        )
        rows.append(
            {
                "seed": seed,
                "method": method,
                "distortion": distortion(data, part),
                "iterations": trace.last.iteration,
                "seconds": time.perf_counter() - t0,
                "graph_seconds": graph_seconds if method.startswith("gk") else 0.0,
            }
        )
        trace_rows.extend(
            {
                "seed": seed,
                "method": method,
                "iteration": row.iteration,
                "elapsed_seconds": row.elapsed_seconds,
                "distortion": row.distortion,
            }
            for row in trace
        )
    return rows, trace_rows


def compare_methods_with_traces(
    data: Dataset,
    k: int,
    config: ClusterConfig,
    seeds: list[int],
    *,
    graph_source: str = "build",
    methods: tuple[str, ...] = METHODS,
    n_jobs: int = 1,
) -> tuple[pd.DataFrame, pd.DataFrame]:
    """Final table (one row per seed and method) plus the long-format per-pass traces."""
    if not 1 <= k <= data.n:
        raise ValueError(f"k={k} must lie in [1, n={data.n}]")
    results = Parallel(n_jobs=n_jobs)(
        delayed(_compare_one)(data, k, config, seed, graph_source, methods) for seed in seeds
    )
    df = pd.DataFrame([row for rows, _ in results for row in rows])
    traces = pd.DataFrame(
        [row for _, trace_rows in results for row in trace_rows], columns=TRACE_FRAME_COLUMNS
    )
    logger.info(f"Comparison over {len(seeds)} seed(s):\n{summarize(df)}")
    return df, traces


def compare_methods(
    data: Dataset,
    k: int,
    config: ClusterConfig,
    seeds: list[int],
    *,
    graph_source: str = "build",
    methods: tuple[str, ...] = METHODS,
    n_jobs: int = 1,
) -> pd.DataFrame:
    """One row per (seed, method); independent seeds may run in parallel."""
    df, _ = compare_methods_with_traces(
        data, k, config, seeds, graph_source=graph_source, methods=methods, n_jobs=n_jobs
    )
    return df


def summarize(df: pd.DataFrame) -> pd.DataFrame:
    return df.groupby("method")[["distortion", "seconds"]].mean()


def _pass_seconds(trace: MetricsTrace) -> float:
    elapsed = trace.column("elapsed_seconds")
    if elapsed.size < 2:
        return float("nan")
    return float(np.median(np.diff(elapsed)))


def scaling_benchmark(
    data: Dataset,
    ks: list[int],
    graph: KnnGraph,
    config: ClusterConfig,
    *,
    iterations: int = 5,
) -> pd.DataFrame:
    """Median per-pass seconds of GK-means (given graph) and Lloyd for every k."""
    warm_up()
    cfg = config.with_updates(max_iter=iterations)
    rows = []
    for k in ks:
        rng = np.random.default_rng([config.seed, k])
        init = two_means_tree(data, k, rng, cfg.bisect_passes)
        gk_trace, lloyd_trace = MetricsTrace(), MetricsTrace()
        gk_part = run_method("gk_boost", data, k, graph, cfg, init, rng, gk_trace)
        lloyd_part = run_method("lloyd", data, k, None, cfg, init, rng, lloyd_trace)
        rows.append(
            {
                "k": k,
                "gk_pass_seconds": _pass_seconds(gk_trace),
                "lloyd_iter_seconds": _pass_seconds(lloyd_trace),
                "gk_distortion": distortion(data, gk_part),
                "lloyd_distortion": distortion(data, lloyd_part),
            }
        )
        logger.info(f"Scaling k={k}: {rows[-1]}")
    return pd.DataFrame(rows)


def size_scaling_benchmark(
    data: Dataset,
    ns: list[int],
    k: int,
    config: ClusterConfig,
    *,
    graph_source: str = "build",
    iterations: int = 5,
) -> pd.DataFrame:
    """Wall time of GK-means (graph included) and Lloyd on the first n samples, k fixed."""
    for n in ns:
        if not k <= n <= data.n:
            raise ValueError(f"Sizes must lie in [k={k}, n={data.n}], got {n}")
    warm_up()
    cfg = config.with_updates(k=k, max_iter=iterations)
    rows = []
    for n in ns:
        subset = Dataset(data.values[:n])
        rng = np.random.default_rng([config.seed, n])
        t0 = time.perf_counter()
        graph = resolve_graph(graph_source, subset, cfg, rng)
        graph_seconds = time.perf_counter() - t0
        init = two_means_tree(subset, k, rng, cfg.bisect_passes)
        gk_trace, lloyd_trace = MetricsTrace(), MetricsTrace()
        gk_part = run_method("gk_boost", subset, k, graph, cfg, init, rng, gk_trace)
        lloyd_part = run_method("lloyd", subset, k, None, cfg, init, rng, lloyd_trace)
        rows.append(
            {
                "n": n,
                "graph_seconds": graph_seconds,
                "gk_seconds": gk_trace.last.elapsed_seconds,
                "gk_pass_seconds": _pass_seconds(gk_trace),
                "lloyd_seconds": lloyd_trace.last.elapsed_seconds,
                "lloyd_iter_seconds": _pass_seconds(lloyd_trace),
                "gk_distortion": distortion(subset, gk_part),
                "lloyd_distortion": distortion(subset, lloyd_part),
            }
        )
        logger.info(f"Scaling n={n}: {rows[-1]}")
    return pd.DataFrame(rows)


def evolution_benchmark(
    data: Dataset, config: ClusterConfig, exact: KnnGraph | None = None
) -> MetricsTrace:
    """Per-iteration recall / distortion of the graph builder (iteration 0 = random graph)."""
    trace = MetricsTrace()
    build_knn_graph(data, config.kappa, config, exact=exact, trace=trace)
    return trace


def recall_sweep(
    data: Dataset,
    k: int,
    config: ClusterConfig,
    exact: KnnGraph,
    modes: tuple[str, ...] = ("boost", "traditional"),
) -> pd.DataFrame:
    """GK-means distortion per mode on every intermediate graph of one build.

    All runs share one two-means-tree init, so rows differ only by graph and mode.
    """
    if not 1 <= k <= data.n:
        raise ValueError(f"k={k} must lie in [1, n={data.n}]")
    rng = np.random.default_rng(config.seed)
    snapshots: list[KnnGraph] = []
    build_knn_graph(data, config.kappa, config, rng=rng, snapshots=snapshots)
    init = two_means_tree(data, k, rng, config.bisect_passes)

    rows = []
    for t, graph in enumerate(snapshots):
        recall = recall_at_1(graph, exact, top1_only=config.recall_top1_only)
        for mode in modes:
            part = gk_means(
                data,
                k,
                graph,
                config.with_updates(k=k, mode=mode),
                init=init,
                rng=np.random.default_rng([config.seed, t]),
            )
            rows.append(
                {
                    "iteration": t,
                    "recall_at_1": recall,
                    "mode": mode,
                    "distortion": distortion(data, part),
                }
            )
        logger.info(f"Recall sweep iteration {t}: recall@1={recall:.4f}")
    return pd.DataFrame(rows)
