"""Optional MLflow logging of CLI runs (params, final metrics, output files)."""

from __future__ import annotations

import logging
from pathlib import Path

import pandas as pd

from src.core.schemas import ClusterConfig


logger = logging.getLogger(__name__)

DEFAULT_EXPERIMENT = "gkmeans_experiments"


def log_run(
    tracking_uri: str | None,
    experiment_name: str | None,
    command: str,
    config: ClusterConfig,
    metrics: dict[str, float],
    artifacts: list[Path],
    run_name: str | None = None,
) -> None:
    """Log one run when a tracking URI is configured; a no-op otherwise."""
    if not tracking_uri:
        return
    import mlflow

    mlflow.set_tracking_uri(tracking_uri)
    try:
        mlflow.set_experiment(experiment_name or DEFAULT_EXPERIMENT)
    except Exception as e:
        logger.warning(f"Could not set MLflow experiment: {e}")

    stamp = pd.Timestamp.now().strftime("%Y%m%d_%H%M%S")
    run_name = run_name or f"{command}-k{config.k}-{stamp}"
    with mlflow.start_run(run_name=run_name):
        mlflow.log_param("command", command)
        for key, value in config.model_dump().items():
            mlflow.log_param(key, value)
        mlflow.log_metrics({k: float(v) for k, v in metrics.items() if v is not None})
        for path in artifacts:
            if Path(path).exists():
                mlflow.log_artifact(str(path))
    logger.info(f"Logged {command} run to MLflow at {tracking_uri}")
