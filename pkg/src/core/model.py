"""Sample set, partition and KNN-graph types plus the boost k-means arithmetic.

The objective of a partition is I = sum_r D_r.D_r / n_r where D_r is the
composite vector (sum of members) of cluster r and n_r its size. Maximizing I
minimizes the mean squared distortion E through n*E + I = sum_i ||x_i||^2.

Partition composites are sums of mean-centered samples (``Dataset.centered``);
gains and distortions do not depend on the offset, objective_value adds it back.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from src.core import kernels


logger = logging.getLogger(__name__)


def as_generator(seed: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# ------------------------------ types ------------------------------ #
@dataclass(frozen=True)
class Dataset:
    """Immutable n x d sample matrix, stored as read-only float64."""

    values: np.ndarray
    total_sq_norm: float = field(init=False, repr=False)
    center: np.ndarray = field(init=False, repr=False, compare=False)
    centered: np.ndarray = field(init=False, repr=False, compare=False)
    centered_sq_norm: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64, order="C", copy=True)
        if values.ndim != 2:
            raise ValueError(f"Dataset must be a 2-D matrix, got shape {values.shape}")
        n, d = values.shape
        if n < 1 or d < 1:
            raise ValueError(f"Dataset needs n >= 1 and d >= 1, got n={n}, d={d}")
        if not np.all(np.isfinite(values)):
            raise ValueError("Dataset contains NaN or infinite entries")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "total_sq_norm", float(np.einsum("ij,ij->", values, values)))
        center = values.mean(axis=0)
        centered = np.ascontiguousarray(values - center)
        center.setflags(write=False)
        centered.setflags(write=False)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "centered", centered)
        object.__setattr__(
            self, "centered_sq_norm", float(np.einsum("ij,ij->", centered, centered))
        )

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


@dataclass
class Partition:
    """Cluster assignment plus per-cluster composite vectors (centered frame) and sizes."""

    assignment: np.ndarray
    composite: np.ndarray
    sizes: np.ndarray

    @classmethod
    def from_labels(cls, data: Dataset, labels: np.ndarray, k: int) -> Partition:
        labels = np.ascontiguousarray(labels, dtype=np.int64)
        if labels.shape != (data.n,):
            raise ValueError(f"Expected {data.n} labels, got shape {labels.shape}")
        if labels.size and (labels.min() < 0 or labels.max() >= k):
            raise ValueError(f"Labels must lie in [0, {k})")
        composite, sizes = kernels.accumulate(data.centered, labels, k)
        return cls(labels.copy(), composite, sizes)

    @property
    def k(self) -> int:
        return self.sizes.shape[0]

    @property
    def n(self) -> int:
        return self.assignment.shape[0]

    def copy(self) -> Partition:
        return Partition(self.assignment.copy(), self.composite.copy(), self.sizes.copy())

    def centroids(self) -> np.ndarray:
        """Cluster means in the centered frame of the dataset."""
        if np.any(self.sizes == 0):
            raise ValueError("Partition has an empty cluster; centroids are undefined")
        return self.composite / self.sizes[:, None]

    def is_consistent(self, data: Dataset, rtol: float = 1e-9) -> bool:
        """Recompute the sufficient statistics from the assignment and compare."""
        composite, sizes = kernels.accumulate(data.centered, self.assignment, self.k)
        scale = max(1.0, float(np.abs(data.centered).max()) * data.n)
        return bool(
            np.array_equal(sizes, self.sizes)
            and np.allclose(composite, self.composite, rtol=0.0, atol=rtol * scale)
        )


@dataclass
class KnnGraph:
    """Per-sample neighbor rows sorted by (squared distance, id)."""

    indices: np.ndarray
    distances: np.ndarray
    distance_evals: int = 0

    def __post_init__(self) -> None:
        self.indices = np.ascontiguousarray(self.indices, dtype=np.int64)
        self.distances = np.ascontiguousarray(self.distances, dtype=np.float64)
        if self.indices.ndim != 2 or self.indices.shape != self.distances.shape:
            raise ValueError(
                f"Graph ids {self.indices.shape} and distances {self.distances.shape} "
                "must be matching 2-D arrays"
            )

    @property
    def n(self) -> int:
        return self.indices.shape[0]

    @property
    def kappa(self) -> int:
        return self.indices.shape[1]

    def row(self, i: int) -> list[tuple[int, float]]:
        return list(zip(self.indices[i].tolist(), self.distances[i].tolist()))

    def copy(self) -> KnnGraph:
        return KnnGraph(self.indices.copy(), self.distances.copy(), self.distance_evals)

    def validate(self, data: Dataset, *, check_distances: bool = True) -> None:
        """Raise ValueError when any row breaks ordering, uniqueness or distance fidelity."""
        if self.n != data.n:
            raise ValueError(f"Graph has {self.n} rows but the dataset has {data.n} samples")
        ids, dists = self.indices, self.distances
        if ids.min() < 0 or ids.max() >= data.n:
            raise ValueError("Graph references sample ids outside the dataset")
        if np.any(ids == np.arange(self.n)[:, None]):
            raise ValueError("A graph row contains its own sample id")
        srt = np.sort(ids, axis=1)
        if np.any(srt[:, 1:] == srt[:, :-1]):
            raise ValueError("A graph row contains a duplicate neighbor id")
        d_prev, d_next = dists[:, :-1], dists[:, 1:]
        ordered = (d_prev < d_next) | ((d_prev == d_next) & (ids[:, :-1] < ids[:, 1:]))
        if not np.all(ordered):
            raise ValueError("A graph row is not sorted by (distance, id)")
        if check_distances and not kernels.rows_match_distances(data.values, ids, dists, 1e-12):
            raise ValueError("Stored distances disagree with recomputed squared distances")


# ---------------------------- arithmetic ---------------------------- #
def squared_distance(a: np.ndarray, b: np.ndarray) -> float:
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape:
        raise ValueError(f"Dimension mismatch: {a.shape} vs {b.shape}")
    return float(kernels.sq_dist(a, b))


def _sum_sq_over_size(composite: np.ndarray, sizes: np.ndarray) -> float:
    if np.any(sizes == 0):
        raise ValueError("Partition has an empty cluster; the objective is undefined")
    norms = np.einsum("ij,ij->i", composite, composite)
    return float(np.sum(norms / sizes))


def objective_value(data: Dataset, part: Partition) -> float:
    """Objective I over the raw samples."""
    raw = part.composite + part.sizes[:, None] * data.center
    return _sum_sq_over_size(raw, part.sizes)


def distortion_from_objective(data: Dataset, part: Partition) -> float:
    """Mean squared distortion through the conservation identity, in O(k*d)."""
    centered = _sum_sq_over_size(part.composite, part.sizes)
    return max(data.centered_sq_norm - centered, 0.0) / data.n


def _check_move(part: Partition, i: int, v: int) -> int:
    if not 0 <= i < part.n:
        raise ValueError(f"Sample id {i} outside [0, {part.n})")
    if not 0 <= v < part.k:
        raise ValueError(f"Cluster id {v} outside [0, {part.k})")
    u = int(part.assignment[i])
    if u == v:
        raise ValueError(f"Sample {i} already belongs to cluster {v}")
    if part.sizes[u] < 2:
        raise ValueError(f"Moving sample {i} would empty cluster {u}")
    return u


def delta_move(data: Dataset, part: Partition, i: int, v: int) -> float:
    """Objective change of moving sample i to cluster v, in O(d)."""
    u = _check_move(part, i, v)
    return float(
        kernels.move_gain(
            data.centered[i], part.composite[u], part.sizes[u], part.composite[v], part.sizes[v]
        )
    )


def apply_move(part: Partition, data: Dataset, i: int, v: int) -> None:
    u = _check_move(part, i, v)
    kernels.apply_move_stats(
        data.centered[i], part.assignment, part.composite, part.sizes, i, u, v
    )
