"""
Bundled Datasets
Manifest-driven access to shipped series and external-ingestion slots
"""
import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

from config import FractionalConfig
from core.errors import DatasetError, MissingDatasetError, UnknownDatasetError
from dataio.timeseries import TimeSeries, load_csv

logger = logging.getLogger(__name__)

BUNDLE_PREFIX = 'bundled:'


@dataclass(frozen=True)
class DatasetEntry:
    """One manifest record"""

    name: str
    file: str
    status: str
    t_unit: str
    y_unit: str
    source: str
    sha256: Optional[str]
    t_origin: float = 0.0
    expected_points: Optional[int] = None

    @property
    def path(self) -> Path:
        if self.status == 'external':
            return FractionalConfig.get_external_data_dir() / self.file
        return FractionalConfig.get_data_dir() / self.file

    @property
    def available(self) -> bool:
        return self.path.is_file()


def _read_manifest() -> Dict[str, DatasetEntry]:
    manifest_path = FractionalConfig.get_data_dir() / 'manifest.json'
    try:
        raw = json.loads(manifest_path.read_text(encoding='utf-8'))
    except FileNotFoundError:
        raise DatasetError(f"dataset manifest not found at {manifest_path}") from None
    except json.JSONDecodeError as e:
        raise DatasetError(f"dataset manifest {manifest_path} is not valid JSON: {e}") from None
    return {item['name']: DatasetEntry(**item) for item in raw['datasets']}


def list_datasets() -> List[DatasetEntry]:
    return sorted(_read_manifest().values(), key=lambda entry: entry.name)


def _file_sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def bundled_dataset(name: str) -> TimeSeries:
    """
    Load a dataset listed in the manifest.

    Shipped files are checked against their pinned SHA-256; external slots
    raise MissingDatasetError until the user supplies the file.
    """
    manifest = _read_manifest()
    if name not in manifest:
        raise UnknownDatasetError(f"unknown dataset '{name}'; available: {', '.join(sorted(manifest))}")
    entry = manifest[name]

    if not entry.available:
        if entry.status == 'external':
            raise MissingDatasetError(
                f"dataset '{name}' must be ingested by the user: place {entry.file} in "
                f"{entry.path.parent} (source: {entry.source})"
            )
        raise DatasetError(f"bundled file for '{name}' is missing at {entry.path}")

    if entry.sha256:
        actual = _file_sha256(entry.path)
        if actual != entry.sha256:
            raise DatasetError(f"dataset '{name}' hash mismatch: expected {entry.sha256}, got {actual}")

    series = load_csv(entry.path, name=name, t_unit=entry.t_unit, y_unit=entry.y_unit, t_origin=entry.t_origin)
    if entry.expected_points is not None and len(series) != entry.expected_points:
        logger.warning("dataset '%s' has %d points, expected %d", name, len(series), entry.expected_points)
    return series


def resolve_dataset(ref: str) -> TimeSeries:
    """`bundled:<name>` names a manifest dataset; anything else is a file path"""
    if ref.startswith(BUNDLE_PREFIX):
        return bundled_dataset(ref[len(BUNDLE_PREFIX):])
    path = Path(ref)
    if not path.is_file():
        raise DatasetError(f"data file not found: {path}")
    return load_csv(path)
