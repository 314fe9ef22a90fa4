"""GK-means command line: clustering, graph construction, evaluation and benchmarks.

Run:
  python src/cli/main.py gen --n 10000 --d 16 --centers 200 --sigma 0.05 --seed 1 \
    --out data/X.fvecs
  python src/cli/main.py oracle-knn --input data/X.fvecs --kappa 50 --out data/exact.ivecs
  python src/cli/main.py build-graph --input data/X.fvecs --seed 1 \
    --out data/graph.ivecs --dists data/graph.fvecs
  python src/cli/main.py cluster --input data/X.fvecs --k 100 --graph file:data/graph.ivecs \
    --out data/partition.ivecs --trace data/trace.csv
  python src/cli/main.py eval --input data/X.fvecs --partition data/partition.ivecs \
    --exact-graph data/exact.ivecs --approx-graph data/graph.ivecs
  python src/cli/main.py bench compare --input data/X.fvecs --k 200 --seeds 1 2 3 --out cmp.csv

Defaults come from src/configs/gkmeans_config.yaml (or --config); $GKMEANS_SEED
sets the seed when --seed is absent.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path


# Add project root to Python path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from src.cli import commands  # noqa: E402


def setup_logging(verbose: bool = False) -> None:
    logging.basicConfig(
        format="%(levelname)s | %(message)s",
        level=logging.DEBUG if verbose else logging.INFO,
        force=True,
    )
    # numba's own DEBUG output drowns the algorithm logs
    logging.getLogger("numba").setLevel(logging.WARNING)


def _add_tracking(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mlflow-tracking-uri", default=None, type=str)
    p.add_argument("--experiment-name", default=None, type=str)


def _add_clustering(p: argparse.ArgumentParser, graph_default: str = "build") -> None:
    p.add_argument("--config", default=None, type=str, help="YAML config (default: src/configs)")
    p.add_argument("--kappa", default=None, type=int, help="Neighbors per sample (default 50)")
    p.add_argument("--xi", default=None, type=int, help="Graph-building cluster size (default 50)")
    p.add_argument("--tau", default=None, type=int, help="Graph-building iterations (default 10)")
    p.add_argument("--max-iter", default=None, type=int, help="Clustering pass cap (default 30)")
    p.add_argument("--seed", default=None, type=int)
    p.add_argument("--warm-start", action="store_true")
    p.add_argument(
        "--graph",
        default=graph_default,
        type=str,
        help="KNN graph source: build | exact | random | file:PATH",
    )


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    p = argparse.ArgumentParser(
        prog="gkmeans", description="KNN-graph accelerated k-means (GK-means) toolkit."
    )
    p.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cluster", help="Build or load a KNN graph, then run GK-means")
    c.add_argument("--input", "-i", required=True, type=str)
    c.add_argument("--k", required=True, type=int)
    c.add_argument("--mode", choices=["boost", "traditional"], default=None)
    _add_clustering(c)
    c.add_argument("--graph-dists", default=None, type=str, help="fvecs distances for file:")
    c.add_argument("--out", "-o", required=True, type=str, help="Partition (1-column ivecs)")
    c.add_argument("--trace", default=None, type=str, help="Per-pass metrics CSV")
    c.add_argument("--graph-out", default=None, type=str, help="Persist the graph (ivecs)")
    c.add_argument("--graph-dists-out", default=None, type=str)
    _add_tracking(c)
    c.set_defaults(func=commands.cmd_cluster)

    b = sub.add_parser("build-graph", help="Approximate KNN graph by intertwined clustering")
    b.add_argument("--input", "-i", required=True, type=str)
    b.add_argument("--config", default=None, type=str)
    b.add_argument("--kappa", default=None, type=int)
    b.add_argument("--xi", default=None, type=int)
    b.add_argument("--tau", default=None, type=int)
    b.add_argument("--seed", default=None, type=int)
    b.add_argument("--warm-start", action="store_true")
    b.add_argument("--top1-only", action="store_true", help="Recall counts rank-1 hits only")
    b.add_argument("--exact-graph", default=None, type=str, help="Record recall per iteration")
    b.add_argument("--out", "-o", required=True, type=str, help="Neighbor ids (ivecs)")
    b.add_argument("--dists", default=None, type=str, help="Squared distances (fvecs)")
    b.add_argument("--trace", default=None, type=str, help="Per-iteration metrics CSV")
    _add_tracking(b)
    b.set_defaults(func=commands.cmd_build_graph)

    e = sub.add_parser("eval", help="Distortion, recall@1 and co-membership curve")
    e.add_argument("--input", "-i", required=True, type=str)
    e.add_argument("--partition", required=True, type=str)
    e.add_argument("--exact-graph", default=None, type=str)
    e.add_argument("--approx-graph", default=None, type=str)
    e.add_argument("--recall-sample", default=None, type=int, help="Estimate on N random rows")
    e.add_argument("--top1-only", action="store_true")
    e.add_argument("--max-rank", default=None, type=int)
    e.add_argument("--curve-out", default=None, type=str)
    e.add_argument("--seed", default=0, type=int)
    e.set_defaults(func=commands.cmd_eval)

    g = sub.add_parser("gen", help="Synthetic Gaussian-mixture corpus")
    g.add_argument("--n", required=True, type=int)
    g.add_argument("--d", required=True, type=int)
    g.add_argument("--centers", required=True, type=int)
    g.add_argument("--sigma", required=True, type=float)
    g.add_argument("--seed", default=None, type=int)
    g.add_argument("--out", "-o", required=True, type=str)
    g.add_argument("--labels-out", default=None, type=str)
    g.set_defaults(func=commands.cmd_gen)

    o = sub.add_parser("oracle-knn", help="Brute-force exact KNN graph")
    o.add_argument("--input", "-i", required=True, type=str)
    o.add_argument("--kappa", required=True, type=int)
    o.add_argument("--out", "-o", required=True, type=str)
    o.add_argument("--dists", default=None, type=str)
    o.set_defaults(func=commands.cmd_oracle_knn)

    bench = sub.add_parser("bench", help="Benchmark tables as CSV")
    bench_sub = bench.add_subparsers(dest="bench", required=True)

    bc = bench_sub.add_parser("compare", help="GK-means vs boost k-means vs Lloyd")
    bc.add_argument("--k", required=True, type=int)
    bc.add_argument("--seeds", nargs="+", type=int, default=None)
    bc.add_argument("--n-jobs", default=1, type=int)
    bc.add_argument("--mode", choices=["boost", "traditional"], default=None)
    bc.add_argument("--traces", default=None, type=str, help="Per-pass traces CSV (long format)")
    _add_clustering(bc)

    bs = bench_sub.add_parser("scaling", help="Per-pass time as k grows, or run time as n grows")
    sweep = bs.add_mutually_exclusive_group(required=True)
    sweep.add_argument("--ks", nargs="+", type=int, help="Cluster counts to sweep")
    sweep.add_argument("--ns", nargs="+", type=int, help="Sample counts to sweep at fixed --k")
    bs.add_argument("--k", default=None, type=int, help="Clusters for --ns")
    bs.add_argument("--iterations", default=5, type=int)
    _add_clustering(bs, graph_default="exact")

    bv = bench_sub.add_parser("evolve", help="Graph recall / distortion per iteration")
    bv.add_argument("--exact-graph", default=None, type=str)
    bv.add_argument("--with-exact", action="store_true", help="Compute the exact graph first")
    bv.add_argument("--top1-only", action="store_true")
    _add_clustering(bv)

    br = bench_sub.add_parser("recall", help="Distortion vs graph recall, boost and traditional")
    br.add_argument("--k", required=True, type=int)
    br.add_argument("--exact-graph", default=None, type=str, help="Default: brute force")
    br.add_argument("--top1-only", action="store_true")
    _add_clustering(br)

    for q in (bc, bs, bv, br):
        q.add_argument("--input", "-i", required=True, type=str)
        q.add_argument("--out", "-o", required=True, type=str)
        _add_tracking(q)
        q.set_defaults(func=commands.cmd_bench)

    return p.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)
    setup_logging(args.verbose)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as e:
        logging.error(str(e))
        return 2


if __name__ == "__main__":
    sys.exit(main())
