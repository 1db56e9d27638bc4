"""Write experiment results as CSV tables, JSON records and a run manifest."""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np
from pydantic import BaseModel

from app.schemas import ExperimentManifest

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


@dataclass
class ResultExport:
    root: Path
    files: List[str] = field(default_factory=list)

    @property
    def manifest_path(self) -> Path:
        return self.root / MANIFEST_NAME


def format_number(value: Any) -> str:
    """Shortest round-trip decimal for floats, plain text otherwise."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def to_jsonable(payload: Any) -> Any:
    if isinstance(payload, BaseModel):
        return payload.model_dump(mode="json")
    if isinstance(payload, dict):
        return {str(k): to_jsonable(v) for k, v in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [to_jsonable(v) for v in payload]
    if isinstance(payload, np.ndarray):
        return [to_jsonable(v) for v in payload.tolist()]
    if isinstance(payload, np.floating):
        return float(payload)
    if isinstance(payload, np.integer):
        return int(payload)
    return payload


class ResultExporter:
    """Collects the files of one run under ``root`` and writes the manifest last."""

    def __init__(self, root: Path | str = "results"):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.export = ResultExport(root=self.root)

    def _register(self, name: str) -> Path:
        if name not in self.export.files:
            self.export.files.append(name)
        return self.root / name

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        path = self._register(name)
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_number(v) for v in row])
        logger.debug("Wrote %s", path)
        return path

    def write_columns(self, name: str, columns: Dict[str, Sequence[Any]]) -> Path:
        """CSV from equal-length named columns."""
        lengths = {len(c) for c in columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"columns of {name} differ in length: {sorted(lengths)}")
        return self.write_csv(name, list(columns), zip(*columns.values()))

    def write_json(self, name: str, payload: Any) -> Path:
        path = self._register(name)
        path.write_text(json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        logger.debug("Wrote %s", path)
        return path

    def write_manifest(self, manifest: ExperimentManifest) -> Path:
        manifest = manifest.model_copy(update={"outputs": list(self.export.files)})
        path = self.export.manifest_path
        path.write_text(
            json.dumps(manifest.model_dump(mode="json"), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        logger.info("Run written to %s (%d files)", self.root, len(self.export.files))
        return path


def read_manifest(path: Path | str) -> ExperimentManifest:
    return ExperimentManifest.model_validate_json(Path(path).read_text(encoding="utf-8"))
