"""Implementations of the CLI subcommands; each returns a process exit code."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np
import pandas as pd

from src.core.model import Dataset, KnnGraph
from src.core.schemas import ClusterConfig, env_seed, resolve_config, tracking_settings
from src.evaluation.baselines import brute_force_knn
from src.evaluation.benchmarks import (
    compare_methods_with_traces,
    evolution_benchmark,
    recall_sweep,
    scaling_benchmark,
    size_scaling_benchmark,
    summarize,
)
from src.evaluation.metrics import (
    co_membership_curve,
    distortion,
    recall_at_1,
    sample_ids,
)
from src.evaluation.trace import MetricsTrace
from src.knn_graph.builder import build_knn_graph
from src.processing.synthetic import gen_mixture
from src.processing.vecs_io import (
    load_graph,
    load_partition,
    read_fvecs,
    save_graph,
    save_partition,
    write_fvecs,
    write_ivecs,
)
from src.training.gk_means import gk_means
from src.training.pipeline import resolve_graph

from .tracking import log_run


logger = logging.getLogger(__name__)


def _path(value: str | None) -> Path | None:
    return Path(value).expanduser() if value else None


def _config_from_args(args: argparse.Namespace) -> ClusterConfig:
    overrides = {
        "k": getattr(args, "k", None),
        "mode": getattr(args, "mode", None),
        "kappa": getattr(args, "kappa", None),
        "xi": getattr(args, "xi", None),
        "tau": getattr(args, "tau", None),
        "max_iter": getattr(args, "max_iter", None),
        "seed": getattr(args, "seed", None),
        "warm_start": True if getattr(args, "warm_start", False) else None,
        "recall_top1_only": True if getattr(args, "top1_only", False) else None,
    }
    return resolve_config(_path(getattr(args, "config", None)), overrides)


def _load_exact(path: Path | None, data: Dataset) -> KnnGraph | None:
    return load_graph(path, data) if path else None


def _track(
    args: argparse.Namespace,
    command: str,
    config: ClusterConfig,
    metrics: dict[str, float],
    artifacts: list[Path],
) -> None:
    experiment, run_name = tracking_settings(_path(getattr(args, "config", None)))
    log_run(
        args.mlflow_tracking_uri,
        args.experiment_name or experiment,
        command,
        config,
        metrics,
        artifacts,
        run_name=run_name,
    )


# ------------------------------ cluster ------------------------------ #
def cmd_cluster(args: argparse.Namespace) -> int:
    graph_source = args.graph.strip()
    is_file = graph_source.lower().startswith("file:")
    if args.graph_dists and not is_file:
        raise ValueError("--graph-dists only applies to --graph file:PATH")
    if graph_source.lower() != "build" and (args.xi is not None or args.tau is not None):
        raise ValueError("--xi/--tau only apply to --graph build")

    data = read_fvecs(_path(args.input))
    config = _config_from_args(args)
    config.check_against(data.n)
    rng = np.random.default_rng(config.seed)

    t0 = time.perf_counter()
    graph = resolve_graph(graph_source, data, config, rng, _path(args.graph_dists))
    graph_seconds = time.perf_counter() - t0
    if graph.kappa != config.kappa:
        logger.info(f"Graph provides kappa={graph.kappa} neighbors per sample")

    trace = MetricsTrace()
    t0 = time.perf_counter()
    part = gk_means(data, config.k, graph, config, rng=rng, trace=trace)
    cluster_seconds = time.perf_counter() - t0

    out = save_partition(_path(args.out), part)
    artifacts = [out]
    if args.trace:
        artifacts.append(trace.to_csv(_path(args.trace)))
    if args.graph_out:
        artifacts.append(save_graph(graph, _path(args.graph_out), _path(args.graph_dists_out)))

    final = distortion(data, part)
    print(f"distortion={final:.10g}")
    logger.info(
        f"Clustered n={data.n} into k={config.k}: distortion={final:.6g}, "
        f"graph {graph_seconds:.2f}s + clustering {cluster_seconds:.2f}s -> {out}"
    )
    _track(
        args,
        "cluster",
        config,
        {
            "distortion": final,
            "moves_accepted": trace.total("moves_accepted"),
            "passes": trace.last.iteration,
            "graph_seconds": graph_seconds,
            "cluster_seconds": cluster_seconds,
        },
        artifacts,
    )
    return 0


# ---------------------------- build-graph ---------------------------- #
def cmd_build_graph(args: argparse.Namespace) -> int:
    data = read_fvecs(_path(args.input))
    config = _config_from_args(args)
    exact = _load_exact(_path(args.exact_graph), data)

    trace = MetricsTrace()
    t0 = time.perf_counter()
    graph = build_knn_graph(data, config.kappa, config, exact=exact, trace=trace)
    seconds = time.perf_counter() - t0

    artifacts = [save_graph(graph, _path(args.out), _path(args.dists))]
    if args.trace:
        artifacts.append(trace.to_csv(_path(args.trace)))
    metrics = {"seconds": seconds, "distance_evals": graph.distance_evals}
    if exact is not None:
        metrics["recall_at_1"] = recall_at_1(graph, exact, top1_only=config.recall_top1_only)
        print(f"recall_at_1={metrics['recall_at_1']:.6f}")
    logger.info(f"KNN graph written to {artifacts[0]} ({seconds:.2f}s)")
    _track(args, "build-graph", config, metrics, artifacts)
    return 0


# -------------------------------- eval -------------------------------- #
def cmd_eval(args: argparse.Namespace) -> int:
    if args.approx_graph and not args.exact_graph:
        raise ValueError("--approx-graph needs --exact-graph to measure recall")
    data = read_fvecs(_path(args.input))
    part = load_partition(_path(args.partition), data)
    print(f"distortion={distortion(data, part):.10g}")

    exact = _load_exact(_path(args.exact_graph), data)
    if args.approx_graph:
        approx = load_graph(_path(args.approx_graph), data)
        ids = sample_ids(data.n, args.recall_sample, args.seed) if args.recall_sample else None
        recall = recall_at_1(approx, exact, ids, top1_only=args.top1_only)
        print(f"recall_at_1={recall:.6f}")

    if exact is not None:
        curve = co_membership_curve(part, exact, args.max_rank)
        df = pd.DataFrame({"rank": np.arange(1, curve.size + 1), "co_membership_rate": curve})
        if args.curve_out:
            out = _path(args.curve_out)
            out.parent.mkdir(parents=True, exist_ok=True)
            df.to_csv(out, index=False, float_format="%.10g", lineterminator="\n")
        else:
            df.to_csv(sys.stdout, index=False, float_format="%.10g", lineterminator="\n")
    return 0


# -------------------------------- gen -------------------------------- #
def cmd_gen(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else env_seed()
    data, labels = gen_mixture(args.n, args.d, args.centers, args.sigma, seed)
    out = write_fvecs(_path(args.out), data.values)
    if args.labels_out:
        write_ivecs(_path(args.labels_out), labels[:, None])
    logger.info(f"Wrote {data.n} x {data.d} samples to {out}")
    return 0


# ----------------------------- oracle-knn ----------------------------- #
def cmd_oracle_knn(args: argparse.Namespace) -> int:
    data = read_fvecs(_path(args.input))
    graph = brute_force_knn(data, args.kappa)
    out = save_graph(graph, _path(args.out), _path(args.dists))
    logger.info(f"Exact {args.kappa}-NN graph written to {out}")
    return 0


# -------------------------------- bench -------------------------------- #
def cmd_bench(args: argparse.Namespace) -> int:
    data = read_fvecs(_path(args.input))
    config = _config_from_args(args)
    out = _path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    artifacts = [out]

    if args.bench == "compare":
        seeds = args.seeds or [config.seed]
        df, traces = compare_methods_with_traces(
            data, config.k, config, seeds, graph_source=args.graph, n_jobs=args.n_jobs
        )
        df.to_csv(out, index=False, float_format="%.10g", lineterminator="\n")
        if args.traces:
            traces_out = _path(args.traces)
            traces_out.parent.mkdir(parents=True, exist_ok=True)
            traces.to_csv(traces_out, index=False, float_format="%.15g", lineterminator="\n")
            artifacts.append(traces_out)
        print(summarize(df).to_string())
        metrics = {
            f"{method}_distortion": value
            for method, value in summarize(df)["distortion"].items()
        }
    elif args.bench == "scaling" and args.ns:
        df = size_scaling_benchmark(
            data, args.ns, config.k, config, graph_source=args.graph, iterations=args.iterations
        )
        df.to_csv(out, index=False, float_format="%.10g", lineterminator="\n")
        print(df.to_string(index=False))
        metrics = {}
    elif args.bench == "scaling":
        rng = np.random.default_rng(config.seed)
        graph = resolve_graph(args.graph, data, config, rng)
        df = scaling_benchmark(data, args.ks, graph, config, iterations=args.iterations)
        df.to_csv(out, index=False, float_format="%.10g", lineterminator="\n")
        print(df.to_string(index=False))
        metrics = {}
    elif args.bench == "recall":
        exact = _load_exact(_path(args.exact_graph), data)
        if exact is None:
            exact = brute_force_knn(data, config.kappa)
        df = recall_sweep(data, config.k, config, exact)
        df.to_csv(out, index=False, float_format="%.10g", lineterminator="\n")
        print(df.to_string(index=False))
        last = df[df["iteration"] == df["iteration"].max()]
        metrics = {f"{m}_distortion": v for m, v in zip(last["mode"], last["distortion"])}
    else:
        exact = _load_exact(_path(args.exact_graph), data)
        if exact is None and args.with_exact:
            exact = brute_force_knn(data, config.kappa)
        trace = evolution_benchmark(data, config, exact)
        trace.to_csv(out)
        print(trace.to_frame().to_string(index=False))
        recall = trace.last.recall_at_1
        metrics = {"recall_at_1": recall} if recall is not None else {}

    _track(args, f"bench-{args.bench}", config, metrics, artifacts)
    return 0
