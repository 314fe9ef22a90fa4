"""Readers and writers for the fvecs / ivecs corpus formats.

Each record is a little-endian int32 dimension d followed by d little-endian
float32 (fvecs) or int32 (ivecs) values; all records of a file share d.
Partitions are stored as a 1-column ivecs of cluster ids, graphs as a
kappa-column ivecs of neighbor ids plus a parallel fvecs of squared distances.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from src.core import kernels
from src.core.model import Dataset, KnnGraph, Partition


logger = logging.getLogger(__name__)


# ------------------------ raw containers ------------------------ #
def _locate_bad_record(raw: bytes, d: int) -> str:
    """Describe the first malformed record of a file whose first record has dimension d."""
    offset = 0
    record = 4 * (d + 1)
    while offset < len(raw):
        if offset + 4 > len(raw):
            return f"truncated dimension header at byte offset {offset}"
        dim = int(np.frombuffer(raw, dtype="<i4", count=1, offset=offset)[0])
        if dim != d:
            return f"inconsistent dimension {dim} (expected {d}) at byte offset {offset}"
        if offset + record > len(raw):
            return f"truncated record at byte offset {offset}"
        offset += record
    return "malformed file"


def _read_vecs(path: Path, dtype: str) -> np.ndarray:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < 4:
        raise ValueError(f"{path}: empty or truncated file at byte offset 0")
    d = int(np.frombuffer(raw, dtype="<i4", count=1)[0])
    if d <= 0:
        raise ValueError(f"{path}: invalid dimension {d} at byte offset 0")
    record = 4 * (d + 1)
    if len(raw) % record != 0:
        raise ValueError(f"{path}: {_locate_bad_record(raw, d)}")
    words = np.frombuffer(raw, dtype="<i4").reshape(-1, d + 1)
    if np.any(words[:, 0] != d):
        raise ValueError(f"{path}: {_locate_bad_record(raw, d)}")
    body = np.ascontiguousarray(words[:, 1:])
    return body.view(dtype)


def _write_vecs(path: Path, matrix: np.ndarray, dtype: str) -> Path:
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[1] < 1:
        raise ValueError(f"Expected a 2-D matrix with d >= 1, got shape {matrix.shape}")
    n, d = matrix.shape
    words = np.empty((n, d + 1), dtype="<i4")
    words[:, 0] = d
    words[:, 1:] = matrix.astype(dtype).view("<i4")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(words.tobytes())
    return path


def read_fvecs_array(path: Path) -> np.ndarray:
    return _read_vecs(path, "<f4")


def read_fvecs(path: Path) -> Dataset:
    values = read_fvecs_array(path)
    logger.info(f"Loaded {path}: n={values.shape[0]}, d={values.shape[1]}")
    return Dataset(values)


def read_ivecs(path: Path) -> np.ndarray:
    return _read_vecs(path, "<i4").astype(np.int64)


def write_fvecs(path: Path, matrix: np.ndarray) -> Path:
    return _write_vecs(path, matrix, "<f4")


def write_ivecs(path: Path, matrix: np.ndarray) -> Path:
    matrix = np.asarray(matrix)
    info = np.iinfo(np.int32)
    if matrix.size and (matrix.min() < info.min or matrix.max() > info.max):
        raise ValueError("ivecs values must fit in 32-bit signed integers")
    return _write_vecs(path, matrix, "<i4")


# ------------------------ partitions & graphs ------------------------ #
def save_partition(path: Path, part: Partition) -> Path:
    return write_ivecs(path, part.assignment[:, None])


def load_partition(path: Path, data: Dataset, k: int | None = None) -> Partition:
    labels = read_ivecs(path)
    if labels.shape[1] != 1:
        raise ValueError(f"{path}: partition file must have one column, found {labels.shape[1]}")
    labels = labels[:, 0]
    if labels.size != data.n:
        raise ValueError(f"{path}: {labels.size} labels for {data.n} samples")
    k = int(labels.max()) + 1 if k is None else k
    return Partition.from_labels(data, labels, k)


def save_graph(graph: KnnGraph, ids_path: Path, dists_path: Path | None = None) -> Path:
    write_ivecs(ids_path, graph.indices)
    if dists_path is not None:
        write_fvecs(dists_path, graph.distances)
    return Path(ids_path)


def load_graph(ids_path: Path, data: Dataset, dists_path: Path | None = None) -> KnnGraph:
    """Load neighbor ids; distances are recomputed in float64 and rows re-sorted.

    The optional distance file only serves as a consistency check, since its
    float32 values are less precise than the recomputed ones.
    """
    ids = np.ascontiguousarray(read_ivecs(ids_path))
    if ids.shape[0] != data.n:
        raise ValueError(f"{ids_path}: {ids.shape[0]} rows for {data.n} samples")
    if ids.min() < 0 or ids.max() >= data.n:
        raise ValueError(f"{ids_path}: neighbor ids outside [0, {data.n})")
    dists = kernels.fill_sorted_rows(data.values, ids)
    graph = KnnGraph(ids, dists)
    graph.validate(data, check_distances=False)
    if dists_path is not None:
        stored = np.sort(read_fvecs_array(dists_path).astype(np.float64), axis=1)
        if stored.shape != dists.shape or not np.allclose(stored, dists, rtol=1e-5, atol=1e-6):
            raise ValueError(f"{dists_path}: distances disagree with {ids_path}")
    return graph
