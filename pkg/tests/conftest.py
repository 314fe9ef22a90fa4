import numpy as np
import pytest

from src.core.model import Dataset, Partition
from src.core.schemas import ClusterConfig
from src.processing.synthetic import gen_mixture


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def three_points() -> tuple[Dataset, Partition]:
    """Clusters {(0,0),(0,2)} and {(10,0)}."""
    data = Dataset(np.array([[0.0, 0.0], [0.0, 2.0], [10.0, 0.0]]))
    return data, Partition.from_labels(data, np.array([0, 0, 1]), 2)


@pytest.fixture
def blobs() -> tuple[Dataset, np.ndarray]:
    """Four tight, well separated 2-D blobs of 100 samples each."""
    rng = np.random.default_rng(7)
    centers = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [10.0, 10.0]])
    labels = np.repeat(np.arange(4), 100)
    values = centers[labels] + rng.normal(scale=0.3, size=(400, 2))
    return Dataset(values), labels


@pytest.fixture
def mixture() -> tuple[Dataset, np.ndarray]:
    return gen_mixture(1000, 8, 20, 0.03, seed=3)


@pytest.fixture
def small_config() -> ClusterConfig:
    return ClusterConfig(k=8, kappa=10, xi=20, tau=4, max_iter=30, seed=11)


def random_partition(
    rng: np.random.Generator, n: int, d: int, k: int
) -> tuple[Dataset, Partition]:
    """Random instance where every cluster is non-empty."""
    data = Dataset(rng.normal(size=(n, d)) * rng.uniform(0.5, 5.0))
    labels = np.concatenate([np.arange(k), rng.integers(0, k, size=n - k)])
    rng.shuffle(labels)
    return data, Partition.from_labels(data, labels, k)


@pytest.fixture(scope="session")
def make_instance():
    return random_partition
