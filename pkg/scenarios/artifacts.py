"""Run directories: manifest, report, per-trial CSV and chain snapshots."""

from __future__ import annotations

import hashlib
import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from tempfile import NamedTemporaryFile

import pandas as pd
from pydantic import BaseModel, Field

from config import settings

from .models import ScenarioConfig, ScenarioReport

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"
REPORT = "report.json"
TRIALS = "trials.csv"


class RunManifest(BaseModel):
    """Everything needed to rerun; timestamps live here so the report stays reproducible."""

    config_path: str | None = None
    config: ScenarioConfig
    config_hash: str
    tool_version: str = settings.TOOL_VERSION
    timestamp: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    output_dir: str


def config_hash(config: ScenarioConfig) -> str:
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def run_dir_name(config: ScenarioConfig) -> str:
    return f"{config.scenario.value}-seed{config.seed}"


def snapshot_name(key: str) -> str:
    return f"chain_t{key}.dot"


def _atomic_write(path: Path, text: str) -> None:
    with NamedTemporaryFile("w", dir=path.parent, delete=False, encoding="utf-8") as tmp:
        tmp.write(text)
        tmp.flush()
    Path(tmp.name).replace(path)


class RunDirectory:
    """Writes one run's artifacts under ``<root>/<scenario>-seed<seed>``."""

    def __init__(self, root: str | Path, config: ScenarioConfig):
        self.config = config
        self.path = Path(root) / run_dir_name(config)

    def write_manifest(self, config_path: str | None = None) -> RunManifest:
        self.path.mkdir(parents=True, exist_ok=True)
        manifest = RunManifest(
            config_path=config_path,
            config=self.config,
            config_hash=config_hash(self.config),
            output_dir=str(self.path),
        )
        _atomic_write(self.path / MANIFEST, manifest.model_dump_json(indent=2))
        logger.debug("Manifest written to %s", self.path / MANIFEST)
        return manifest

    def write_report(self, report: ScenarioReport) -> list[Path]:
        self.path.mkdir(parents=True, exist_ok=True)
        written = [self.path / REPORT, self.path / TRIALS]
        _atomic_write(written[0], report.model_dump_json(indent=2))
        rows = [{"trial": r.trial, "outcome": r.outcome, **r.values} for r in report.records]
        _atomic_write(written[1], pd.DataFrame(rows).to_csv(index=False))
        for key, dot in sorted(report.snapshots.items()):
            target = self.path / snapshot_name(key)
            _atomic_write(target, dot)
            written.append(target)
        logger.info("Wrote %d artifacts to %s", len(written), self.path)
        return written


def load_report(run_dir: str | Path) -> ScenarioReport:
    path = Path(run_dir) / REPORT
    return ScenarioReport.model_validate_json(path.read_text(encoding="utf-8"))


def load_snapshot(run_dir: str | Path, key: str) -> str | None:
    path = Path(run_dir) / snapshot_name(key)
    if not path.exists():
        return None
    return path.read_text(encoding="utf-8")


__all__ = [
    "RunDirectory",
    "RunManifest",
    "config_hash",
    "load_report",
    "load_snapshot",
    "run_dir_name",
    "snapshot_name",
]
