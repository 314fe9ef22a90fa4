"""Two-means tree initializer.

The largest cluster is repeatedly popped, bisected by a two-cluster boost
k-means run, adjusted to two equal halves and pushed back until k clusters
exist. Each level touches every sample once, so building k clusters costs
O(d * n * log k).
"""

from __future__ import annotations

import heapq
import logging

import numpy as np

from src.core import kernels
from src.core.model import Dataset, Partition, as_generator


logger = logging.getLogger(__name__)


def bisect(
    data: Dataset,
    members: np.ndarray,
    rng: np.random.Generator | int | None = None,
    passes: int = 10,
) -> tuple[np.ndarray, np.ndarray]:
    """Split `members` into two non-empty lists with a two-cluster boost k-means run."""
    members = np.asarray(members, dtype=np.int64)
    m = members.size
    if m < 2:
        raise ValueError(f"Cannot bisect {m} sample(s); need at least 2")
    rng = as_generator(rng)

    xs = np.ascontiguousarray(data.centered[members])
    a, b = rng.choice(m, size=2, replace=False)
    to_a = np.einsum("ij,ij->i", xs - xs[a], xs - xs[a])
    to_b = np.einsum("ij,ij->i", xs - xs[b], xs - xs[b])
    side = (to_b < to_a).astype(np.int64)
    # seeds stay on their own side so neither half starts empty
    side[a], side[b] = 0, 1

    orders = rng.permuted(np.tile(np.arange(m, dtype=np.int64), (passes, 1)), axis=1)
    kernels.bisect_boost(xs, side, orders)
    return members[side == 0], members[side == 1]


def balance_equal_size(
    data: Dataset, left: np.ndarray, right: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Move samples from the larger side until the sizes differ by at most one.

    Migrants are the larger side's samples with the smallest margin
    ||x - c_small||^2 - ||x - c_large||^2, computed once before migrating.
    """
    left = np.asarray(left, dtype=np.int64)
    right = np.asarray(right, dtype=np.int64)
    if left.size == 0 or right.size == 0:
        raise ValueError("Both sides must be non-empty")
    if abs(left.size - right.size) <= 1:
        return left, right

    left_is_large = left.size > right.size
    large, small = (left, right) if left_is_large else (right, left)
    xs = data.centered[large]
    c_large = xs.mean(axis=0)
    c_small = data.centered[small].mean(axis=0)
    margin = np.einsum("ij,ij->i", xs - c_small, xs - c_small) - np.einsum(
        "ij,ij->i", xs - c_large, xs - c_large
    )

    n_move = (large.size - small.size) // 2
    moving = np.argsort(margin, kind="stable")[:n_move]
    small = np.concatenate([small, large[moving]])
    large = np.delete(large, moving)
    return (large, small) if left_is_large else (small, large)


def two_means_tree(
    data: Dataset,
    k: int,
    rng: np.random.Generator | int | None = None,
    passes: int = 10,
) -> Partition:
    """Partition `data` into exactly k size-balanced clusters."""
    n = data.n
    if not 1 <= k <= n:
        raise ValueError(f"two_means_tree needs 1 <= k <= n, got k={k}, n={n}")
    rng = as_generator(rng)

    labels = np.zeros(n, dtype=np.int64)
    members: dict[int, np.ndarray] = {0: np.arange(n, dtype=np.int64)}
    # largest cluster first, ties to the lowest id
    queue: list[tuple[int, int]] = [(-n, 0)]
    for new_id in range(1, k):
        _, cid = heapq.heappop(queue)
        left, right = bisect(data, members[cid], rng, passes)
        left, right = balance_equal_size(data, left, right)
        members[cid] = left
        members[new_id] = right
        labels[right] = new_id
        heapq.heappush(queue, (-left.size, cid))
        heapq.heappush(queue, (-right.size, new_id))

    logger.debug(f"Two-means tree: n={n}, k={k}")
    return Partition.from_labels(data, labels, k)
