"""Run manifests: enough provenance to tell two runs apart (or not)."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from driftmix import __version__


@dataclass(frozen=True)
class RunManifest:
    command: str
    config_digest: str
    input_digests: tuple[str, ...]
    seed: int
    tool_version: str

    def to_json_dict(self) -> dict:
        return {
            "command": self.command,
            "config_digest": self.config_digest,
            "input_digests": list(self.input_digests),
            "seed": self.seed,
            "tool_version": self.tool_version,
        }


def config_digest(params: dict) -> str:
    canon = json.dumps(params, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def build_manifest(command: str, params: dict, input_paths: list[str | Path], seed: int) -> RunManifest:
    """Digest resolved parameters and input file contents.

    Output locations stay out of the config digest so reruns into different
    directories produce identical manifests.
    """
    return RunManifest(
        command=command,
        config_digest=config_digest(params),
        input_digests=tuple(file_digest(p) for p in input_paths),
        seed=seed,
        tool_version=__version__,
    )
