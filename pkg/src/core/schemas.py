from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field


logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / "configs" / "gkmeans_config.yaml"
SEED_ENV_VAR = "GKMEANS_SEED"

# YAML sections whose keys map onto ClusterConfig fields.
_CONFIG_SECTIONS = ("clustering", "graph", "evaluation")


class ClusterConfig(BaseModel):
    """All tunables of the clustering and graph-construction runs."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    k: int = Field(1, ge=1, description="Target cluster count")
    kappa: int = Field(50, ge=1, description="Neighbor-list length of the KNN graph")
    xi: int = Field(50, ge=2, description="Average cluster size while building the graph")
    tau: int = Field(10, ge=1, description="Outer iterations of graph construction")
    max_iter: int = Field(30, ge=1, description="Pass cap of GK-means / boost k-means / Lloyd")
    seed: int = Field(0, ge=0, lt=2**64, description="Seed of the run's random generator")
    mode: Literal["boost", "traditional"] = Field(
        "boost", description="Objective-gain moves (boost) or nearest-centroid moves"
    )
    warm_start: bool = Field(
        False, description="Reuse the previous partition between graph-building iterations"
    )
    build_passes: int = Field(1, ge=1, description="GK-means passes per graph iteration")
    bisect_passes: int = Field(10, ge=1, description="Boost passes per two-means bisection")
    recall_top1_only: bool = Field(
        False, description="Count recall only when the true neighbor sits at rank 1"
    )

    def check_against(self, n: int) -> None:
        if self.k > n:
            raise ValueError(f"k={self.k} exceeds the number of samples n={n}")

    def with_updates(self, **changes: Any) -> ClusterConfig:
        """Return a validated copy with some fields replaced."""
        return type(self)(**{**self.model_dump(), **changes})


def load_config(path: Path) -> dict:
    with open(path, encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def tracking_settings(path: Path | None = None) -> tuple[str | None, str | None]:
    """(experiment name, run name) from the YAML, both optional."""
    path = path if path is not None else DEFAULT_CONFIG_PATH
    if not Path(path).exists():
        return None, None
    cfg = load_config(path)
    experiment = (cfg.get("experiment") or {}).get("name") or cfg.get("experiment_name")
    return experiment, cfg.get("run_name") or None


def flatten_config(cfg: dict) -> dict[str, Any]:
    """Merge the YAML sections into one flat mapping of ClusterConfig fields."""
    flat: dict[str, Any] = {}
    known = set(ClusterConfig.model_fields)
    for section in _CONFIG_SECTIONS:
        for key, value in (cfg.get(section) or {}).items():
            if key in known:
                flat[key] = value
    return flat


def env_seed(default: int = 0) -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV_VAR}={raw!r} is not an integer")


def resolve_config(
    path: Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> ClusterConfig:
    """Build a ClusterConfig: flags > $GKMEANS_SEED (seed only) > YAML > defaults."""
    values: dict[str, Any] = {}
    if path is not None:
        values.update(flatten_config(load_config(path)))
    elif DEFAULT_CONFIG_PATH.exists():
        values.update(flatten_config(load_config(DEFAULT_CONFIG_PATH)))

    if os.environ.get(SEED_ENV_VAR):
        values["seed"] = env_seed()

    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    config = ClusterConfig(**values)
    logger.debug(f"Resolved config: {config.model_dump()}")
    return config
