import numpy as np
import pytest

from src.core.model import Partition
from src.evaluation.baselines import lloyd_kmeans
from src.evaluation.metrics import distortion
from src.processing.synthetic import gen_mixture
from src.processing.vecs_io import read_fvecs, write_fvecs


def test_zero_sigma_puts_samples_on_centers():
    data, labels = gen_mixture(60, 5, 6, 0.0, seed=2)
    for r in range(6):
        rows = data.values[labels == r]
        assert np.all(rows == rows[0])
    assert np.unique(data.values, axis=0).shape[0] == 6


def test_labels_are_balanced():
    _, labels = gen_mixture(103, 2, 10, 0.1, seed=0)
    counts = np.bincount(labels, minlength=10)
    assert counts.max() - counts.min() <= 1
    assert counts.sum() == 103


def test_same_seed_same_corpus():
    a, la = gen_mixture(200, 4, 5, 0.05, seed=9)
    b, lb = gen_mixture(200, 4, 5, 0.05, seed=9)
    c, _ = gen_mixture(200, 4, 5, 0.05, seed=10)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(la, lb)
    assert not np.array_equal(a.values, c.values)


def test_corpus_survives_an_fvecs_round_trip(tmp_path):
    data, _ = gen_mixture(50, 3, 4, 0.2, seed=1)
    back = read_fvecs(write_fvecs(tmp_path / "x.fvecs", data.values))
    assert np.array_equal(back.values, data.values)


@pytest.mark.parametrize(
    "n, d, k_true, sigma", [(0, 2, 1, 0.1), (5, 0, 1, 0.1), (5, 2, 6, 0.1), (5, 2, 2, -1.0)]
)
def test_invalid_arguments(n, d, k_true, sigma):
    with pytest.raises(ValueError):
        gen_mixture(n, d, k_true, sigma)


def test_true_labels_give_noise_level_distortion():
    d, sigma = 8, 0.01
    data, labels = gen_mixture(1000, d, 10, sigma, seed=6)
    part = lloyd_kmeans(data, 10, Partition.from_labels(data, labels, 10))
    assert np.array_equal(part.assignment, labels)
    assert distortion(data, part) == pytest.approx(d * sigma**2, rel=0.1)
