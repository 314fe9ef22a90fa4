"""Per-iteration metrics of clustering and graph-building runs, persisted as CSV."""

from __future__ import annotations

from collections.abc import Iterator
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field


TRACE_SCHEMA_VERSION = 1
TRACE_COLUMNS = [
    "schema_version",
    "iteration",
    "elapsed_seconds",
    "distortion",
    "recall_at_1",
    "moves_accepted",
    "distance_evals",
]


class TraceRow(BaseModel):
    iteration: int = Field(..., ge=0)
    elapsed_seconds: float = Field(..., ge=0.0)
    distortion: float
    recall_at_1: float | None = Field(None, ge=0.0, le=1.0)
    moves_accepted: int = Field(0, ge=0)
    distance_evals: int = Field(0, ge=0)


class MetricsTrace:
    """Ordered trace rows: iteration strictly increasing, elapsed time non-decreasing."""

    def __init__(self, rows: list[TraceRow] | None = None) -> None:
        self.rows: list[TraceRow] = []
        for row in rows or []:
            self._push(row)

    def append(self, **fields) -> TraceRow:
        row = TraceRow(**fields)
        self._push(row)
        return row

    def _push(self, row: TraceRow) -> None:
        if self.rows:
            last = self.rows[-1]
            if row.iteration <= last.iteration:
                raise ValueError(
                    f"Trace iteration {row.iteration} does not follow {last.iteration}"
                )
            if row.elapsed_seconds < last.elapsed_seconds:
                raise ValueError("Trace elapsed_seconds must be non-decreasing")
        self.rows.append(row)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[TraceRow]:
        return iter(self.rows)

    @property
    def last(self) -> TraceRow:
        if not self.rows:
            raise ValueError("Trace is empty")
        return self.rows[-1]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def total(self, name: str) -> int:
        return int(sum(getattr(r, name) for r in self.rows))

    def distortion_non_increasing(self, rtol: float = 0.0) -> bool:
        e = self.column("distortion")
        e = e[~np.isnan(e)]
        return bool(np.all(e[1:] <= e[:-1] + rtol * np.abs(e[:-1])))

    # ------------------------------ io ------------------------------ #
    def to_frame(self) -> pd.DataFrame:
        df = pd.DataFrame(
            [r.model_dump() for r in self.rows], columns=TRACE_COLUMNS[1:]
        )
        df.insert(0, "schema_version", TRACE_SCHEMA_VERSION)
        return df

    def to_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.15g", lineterminator="\n")
        return path

    @classmethod
    def read_csv(cls, path: Path) -> MetricsTrace:
        df = pd.read_csv(path)
        if list(df.columns) != TRACE_COLUMNS:
            raise ValueError(f"{path}: unexpected trace header {list(df.columns)}")
        versions = set(df["schema_version"].unique().tolist())
        if versions - {TRACE_SCHEMA_VERSION}:
            raise ValueError(f"{path}: unsupported trace schema version(s) {sorted(versions)}")
        trace = cls()
        for rec in df.drop(columns="schema_version").to_dict(orient="records"):
            if pd.isna(rec["recall_at_1"]):
                rec["recall_at_1"] = None
            trace.append(**rec)
        return trace
