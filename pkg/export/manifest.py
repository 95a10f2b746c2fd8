"""
Run Manifest
============
Config snapshot, package versions, stage wall times, failures and the
SHA-256 of every artifact of a run. Written last.
"""

import hashlib
import os
import platform
from dataclasses import dataclass, field
from importlib import metadata
from typing import Dict, List, Optional

from config import settings
from export.writers import read_json, write_json

MANIFEST_NAME = settings.MANIFEST_FILENAME

TRACKED_PACKAGES = ('numpy', 'scipy', 'pandas', 'matplotlib', 'contourpy', 'duckdb', 'tqdm',
                    'python-dotenv')


def file_sha256(path: str, chunk: int = 1 << 20) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as handle:
        for block in iter(lambda: handle.read(chunk), b''):
            digest.update(block)
    return digest.hexdigest()


def package_versions() -> Dict[str, Optional[str]]:
    versions = {'python': platform.python_version()}
    for name in TRACKED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = None
    return versions


@dataclass
class RunManifest:
    """Everything needed to reproduce and audit one run directory."""

    run_dir: str
    config: dict
    stage_times: Dict[str, float] = field(default_factory=dict)
    failures: Dict[str, str] = field(default_factory=dict)
    verdicts: Dict[str, bool] = field(default_factory=dict)
    artifacts: List[str] = field(default_factory=list)

    def record_stage(self, stage: str, seconds: float):
        self.stage_times[stage] = float(seconds)

    def record_failure(self, stage: str, error: Exception):
        self.failures[stage] = f"{type(error).__name__}: {error}"

    def record_verdict(self, name: str, passed: bool):
        self.verdicts[name] = bool(passed)

    def add_artifact(self, path: str):
        rel = os.path.relpath(path, self.run_dir)
        if rel not in self.artifacts:
            self.artifacts.append(rel)

    @property
    def exit_code(self) -> int:
        """1 on any stage failure, 2 on a failed verification, else 0."""
        if self.failures:
            return 1
        if not all(self.verdicts.values()):
            return 2
        return 0

    def as_dict(self) -> dict:
        hashes = {}
        for rel in sorted(self.artifacts):
            full = os.path.join(self.run_dir, rel)
            hashes[rel] = file_sha256(full) if os.path.exists(full) else None
        return {
            'config': self.config,
            'packages': package_versions(),
            'stage_times': self.stage_times,
            'failures': self.failures,
            'verdicts': self.verdicts,
            'artifacts': hashes,
            'exit_code': self.exit_code,
        }

    def write(self) -> str:
        return write_json(self.as_dict(), os.path.join(self.run_dir, MANIFEST_NAME))


def load_manifest(run_dir: str) -> dict:
    return read_json(os.path.join(run_dir, MANIFEST_NAME))


def hash_mismatches(run_dir: str, manifest: Optional[dict] = None) -> List[str]:
    """Artifacts whose current SHA-256 differs from the manifest (or which are missing)."""
    manifest = manifest or load_manifest(run_dir)
    bad = []
    for rel, expected in sorted(manifest.get('artifacts', {}).items()):
        full = os.path.join(run_dir, rel)
        if not os.path.exists(full) or file_sha256(full) != expected:
            bad.append(rel)
    return bad
