import numpy as np
import pytest

from src.core.model import Dataset, KnnGraph, Partition, delta_move, objective_value
from src.evaluation.baselines import brute_force_knn, lloyd_kmeans
from src.evaluation.metrics import distortion
from src.evaluation.trace import MetricsTrace
from src.training.gk_means import best_move, boost_kmeans, candidate_clusters, gk_means
from src.training.two_means import two_means_tree


def _graph_with_row0(n: int, row0: list[int]) -> KnnGraph:
    kappa = len(row0)
    ids = np.array([[(i + 1 + p) % n for p in range(kappa)] for i in range(n)])
    ids[0] = row0
    return KnnGraph(ids, np.zeros((n, kappa)))


# ------------------------- candidate_clusters ------------------------- #
def test_candidates_deduplicate_and_drop_own_cluster():
    data = Dataset(np.arange(16, dtype=float).reshape(8, 2))
    part = Partition.from_labels(data, np.array([0, 2, 2, 5, 7, 1, 3, 4]), 8)
    graph = _graph_with_row0(8, [1, 2, 3, 4])
    assert candidate_clusters(part, graph, 0).tolist() == [2, 5, 7]


def test_candidates_empty_when_neighbors_share_the_cluster():
    data = Dataset(np.arange(12, dtype=float).reshape(6, 2))
    part = Partition.from_labels(data, np.array([0, 0, 0, 1, 1, 1]), 2)
    graph = _graph_with_row0(6, [1, 2])
    assert candidate_clusters(part, graph, 0).size == 0


# ------------------------------ best_move ------------------------------ #
def test_best_move_empty_candidates(three_points):
    data, part = three_points
    assert best_move(data, part, 1, np.array([], dtype=np.int64)) is None


def test_best_move_rejects_losing_move(three_points):
    data, part = three_points
    assert best_move(data, part, 1, np.array([1])) is None


def test_best_move_skips_singleton_source(three_points):
    data, part = three_points
    assert best_move(data, part, 2, np.array([0])) is None


def test_best_move_unknown_mode(three_points):
    data, part = three_points
    with pytest.raises(ValueError):
        best_move(data, part, 1, np.array([1]), mode="fuzzy")


def test_best_move_matches_exhaustive_search(rng, make_instance):
    data, part = make_instance(rng, 80, 4, 6)
    everything = np.arange(part.k)
    for i in range(data.n):
        u = part.assignment[i]
        if part.sizes[u] < 2:
            continue
        gains = {v: delta_move(data, part, i, v) for v in range(part.k) if v != u}
        v_best = max(gains, key=lambda v: (gains[v], -v))
        result = best_move(data, part, i, everything)
        if gains[v_best] > 0:
            assert result is not None
            assert result[0] == v_best
            assert result[1] == pytest.approx(gains[v_best], rel=1e-12)
        else:
            assert result is None


def test_best_move_traditional_picks_nearer_centroid():
    data = Dataset(np.array([[0.0], [4.0], [5.0], [6.0]]))
    part = Partition.from_labels(data, np.array([0, 0, 1, 1]), 2)
    # sample 1 sits 2 from centroid 0 and 1.5 from centroid 1
    v, reduction = best_move(data, part, 1, np.array([1]), mode="traditional")
    assert v == 1
    assert reduction == pytest.approx(4.0 - 2.25)
    assert best_move(data, part, 0, np.array([1]), mode="traditional") is None


# ------------------------------- gk_means ------------------------------- #
def test_single_cluster_accepts_no_moves(rng, small_config):
    data = Dataset(rng.normal(size=(50, 3)))
    graph = brute_force_knn(data, 5)
    trace = MetricsTrace()
    part = gk_means(data, 1, graph, small_config, trace=trace)
    assert part.sizes.tolist() == [50]
    assert trace.total("moves_accepted") == 0
    assert [row.iteration for row in trace] == [0, 1]


def test_true_partition_is_a_fixed_point(blobs, small_config):
    data, labels = blobs
    graph = brute_force_knn(data, 10)
    init = Partition.from_labels(data, labels, 4)
    trace = MetricsTrace()
    part = gk_means(data, 4, graph, small_config, init=init, trace=trace)
    assert np.array_equal(part.assignment, labels)
    assert trace.total("moves_accepted") == 0


def test_converged_partition_has_no_improving_neighbor_move(mixture, small_config):
    data, _ = mixture
    graph = brute_force_knn(data, 10)
    config = small_config.with_updates(k=20, max_iter=200)
    trace = MetricsTrace()
    part = gk_means(data, 20, graph, config, trace=trace)

    assert trace.last.moves_accepted == 0
    for i in range(data.n):
        if part.sizes[part.assignment[i]] < 2:
            continue
        assert best_move(data, part, i, candidate_clusters(part, graph, i)) is None


def test_boost_trace_is_monotone(mixture, small_config):
    data, _ = mixture
    graph = brute_force_knn(data, 10)
    trace = MetricsTrace()
    init = two_means_tree(data, 40, 0)
    part = gk_means(data, 40, graph, small_config, init=init, trace=trace)

    assert trace.distortion_non_increasing(rtol=1e-12)
    assert trace.column("distortion")[-1] <= distortion(data, init) * (1 + 1e-12)
    assert part.k == 40 and part.sizes.min() >= 1
    assert part.is_consistent(data)
    lhs = data.n * distortion(data, part) + objective_value(data, part)
    assert lhs == pytest.approx(data.total_sq_norm, rel=1e-9)


@pytest.mark.parametrize("mode", ["boost", "traditional"])
def test_complete_graph_reproduces_exhaustive_run(rng, small_config, mode):
    data = Dataset(rng.normal(size=(60, 3)))
    config = small_config.with_updates(k=6, mode=mode)
    graph = brute_force_knn(data, data.n - 1)
    init = two_means_tree(data, 6, 1)

    gk_trace, full_trace = MetricsTrace(), MetricsTrace()
    gk = gk_means(data, 6, graph, config, init=init, rng=5, trace=gk_trace)
    full = boost_kmeans(data, 6, config, init=init, rng=5, trace=full_trace)

    assert np.array_equal(gk.assignment, full.assignment)
    assert gk_trace.column("moves_accepted").tolist() == full_trace.column(
        "moves_accepted"
    ).tolist()


def test_same_seed_same_partition(mixture, small_config):
    data, _ = mixture
    graph = brute_force_knn(data, 10)
    a = gk_means(data, 16, graph, small_config)
    b = gk_means(data, 16, graph, small_config)
    assert np.array_equal(a.assignment, b.assignment)


def test_init_is_not_modified(rng, small_config):
    data = Dataset(rng.normal(size=(40, 2)))
    graph = brute_force_knn(data, 5)
    init = two_means_tree(data, 4, 0)
    before = init.assignment.copy()
    gk_means(data, 4, graph, small_config, init=init)
    assert np.array_equal(init.assignment, before)


def test_rejects_mismatched_inputs(rng, small_config):
    data = Dataset(rng.normal(size=(20, 2)))
    with pytest.raises(ValueError):
        gk_means(data, 3, brute_force_knn(Dataset(rng.normal(size=(10, 2))), 3), small_config)
    graph = brute_force_knn(data, 3)
    wrong_k = Partition.from_labels(data, np.arange(20) % 2, 2)
    with pytest.raises(ValueError):
        gk_means(data, 3, graph, small_config, init=wrong_k)


# ----------------------------- boost_kmeans ----------------------------- #
def test_boost_kmeans_recovers_blobs(blobs, small_config):
    data, labels = blobs
    truth = distortion(data, Partition.from_labels(data, labels, 4))
    best = min(
        distortion(data, boost_kmeans(data, 4, small_config, rng=seed)) for seed in range(10)
    )
    assert best <= truth * 1.01


def test_gk_means_matches_best_lloyd_restart_on_blobs(blobs, small_config):
    data, _ = blobs
    graph = brute_force_knn(data, 10)
    lloyd_best = min(
        distortion(data, lloyd_kmeans(data, 4, two_means_tree(data, 4, seed)))
        for seed in range(10)
    )
    gk_best = min(
        distortion(data, gk_means(data, 4, graph, small_config, rng=seed)) for seed in range(10)
    )
    assert gk_best <= lloyd_best * 1.01


# --------------------------- offset invariance --------------------------- #
@pytest.fixture
def tight_blobs() -> np.ndarray:
    """400 samples in 8 blobs whose spread is tiny next to a large offset."""
    rng = np.random.default_rng(31)
    centers = rng.uniform(size=(8, 4))
    labels = np.repeat(np.arange(8), 50)
    return centers[labels] + rng.normal(scale=1e-3, size=(400, 4))


def test_far_offset_gives_the_same_clustering(tight_blobs, small_config):
    near = Dataset(tight_blobs)
    far = Dataset(tight_blobs + 1e6)
    graph = brute_force_knn(near, 10)
    labels = two_means_tree(near, 8, 2).assignment
    config = small_config.with_updates(k=8)

    runs = []
    for data in (near, far):
        trace = MetricsTrace()
        init = Partition.from_labels(data, labels, 8)
        part = gk_means(data, 8, graph, config, init=init, rng=4, trace=trace)
        assert trace.distortion_non_increasing(rtol=1e-9)
        assert np.all(trace.column("distortion") >= 0.0)
        assert trace.last.distortion == pytest.approx(distortion(data, part), rel=1e-6)
        runs.append(part)

    assert np.array_equal(runs[0].assignment, runs[1].assignment)
    assert distortion(far, runs[1]) == pytest.approx(distortion(near, runs[0]), rel=1e-6)


def test_far_offset_gains_match(tight_blobs):
    near = Dataset(tight_blobs)
    far = Dataset(tight_blobs + 1e6)
    labels = np.repeat(np.arange(8), 50)
    near_part = Partition.from_labels(near, labels, 8)
    far_part = Partition.from_labels(far, labels, 8)
    for i in (0, 75, 399):
        v = (labels[i] + 3) % 8
        assert delta_move(far, far_part, i, v) == pytest.approx(
            delta_move(near, near_part, i, v), rel=1e-6
        )
