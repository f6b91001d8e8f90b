"""Run manifests: content hashes that make stages auditable and idempotent.

A stage's identity is the hash of (stage name, its config subset, its input
hashes, the upstream chain hash). Re-running with an unchanged identity and
intact outputs is a no-op; a changed identity against existing outputs is a
ConfigConflict unless forced. Manifests carry no timestamps or absolute
paths, so identical runs produce byte-identical manifest files.
"""

from __future__ import annotations

import hashlib
import json
import os
from contextlib import contextmanager
from pathlib import Path

from ..errors import ConfigConflict, LockHeld, MissingUpstreamArtifact

MANIFEST_FORMAT = "fundcast-manifest/1"


def hash_bytes(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def hash_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


def hash_tree(path: Path) -> str:
    """Order-stable hash of a directory: relative paths plus file hashes."""
    h = hashlib.sha256()
    for sub in sorted(p for p in path.rglob("*") if p.is_file()):
        h.update(str(sub.relative_to(path)).encode())
        h.update(hash_file(sub).encode())
    return "sha256:" + h.hexdigest()


def hash_path(path: Path) -> str:
    return hash_tree(path) if path.is_dir() else hash_file(path)


def hash_obj(obj) -> str:
    return hash_bytes(json.dumps(obj, sort_keys=True).encode())


def manifest_path(stage_dir: Path) -> Path:
    return stage_dir / "manifest.run.json"


def require_inputs(inputs: dict[str, Path], produced_by: dict[str, str]) -> None:
    """Every input must exist; name the producing stage in the error."""
    for name, path in inputs.items():
        if not path.exists():
            producer = produced_by.get(name, "an upstream stage")
            raise MissingUpstreamArtifact(
                f"missing input {path.name!r}: run the `{producer}` step first"
            )


def stage_identity(stage: str, config_subset: dict, input_hashes: dict[str, str], upstream: str | None) -> str:
    return hash_obj(
        {
            "stage": stage,
            "config": config_subset,
            "inputs": input_hashes,
            "upstream": upstream,
        }
    )


def read_manifest(stage_dir: Path) -> dict | None:
    path = manifest_path(stage_dir)
    if not path.exists():
        return None
    return json.loads(path.read_text())


def chain_hash(stage_dir: Path) -> str | None:
    m = read_manifest(stage_dir)
    return None if m is None else m["chain"]


class StageRunner:
    """Idempotency and manifest bookkeeping around one stage execution."""

    def __init__(
        self,
        stage: str,
        stage_dir: Path,
        config_subset: dict,
        inputs: dict[str, Path],
        produced_by: dict[str, str],
        upstream_dirs: list[Path],
        force: bool = False,
    ):
        self.stage = stage
        self.stage_dir = stage_dir
        self.config_subset = config_subset
        self.inputs = inputs
        self.produced_by = produced_by
        self.upstream_dirs = upstream_dirs
        self.force = force

    def _upstream_chain(self) -> str | None:
        parts = [chain_hash(d) for d in self.upstream_dirs]
        if not parts:
            return None
        return hash_obj(parts)

    def up_to_date(self) -> bool:
        """True when the recorded identity matches and outputs are intact."""
        require_inputs(self.inputs, self.produced_by)
        self._identity = stage_identity(
            self.stage,
            self.config_subset,
            {name: hash_path(p) for name, p in sorted(self.inputs.items())},
            self._upstream_chain(),
        )
        recorded = read_manifest(self.stage_dir)
        if recorded is None:
            return False
        if recorded["identity"] != self._identity:
            if self.force:
                return False
            raise ConfigConflict(
                f"stage {self.stage!r}: existing outputs were produced from different "
                "inputs or config (manifest hash mismatch); re-run with --force to overwrite"
            )
        for rel, digest in recorded["outputs"].items():
            p = self.stage_dir / rel
            if not p.exists() or hash_path(p) != digest:
                return False
        return True

    def finish(self, outputs: list[Path]) -> None:
        out_hashes = {
            str(p.relative_to(self.stage_dir)): hash_path(p) for p in sorted(outputs)
        }
        manifest = {
            "format": MANIFEST_FORMAT,
            "stage": self.stage,
            "config": self.config_subset,
            "inputs": {name: hash_path(p) for name, p in sorted(self.inputs.items())},
            "identity": self._identity,
            "outputs": out_hashes,
        }
        manifest["chain"] = hash_obj({"identity": manifest["identity"], "outputs": out_hashes})
        manifest_path(self.stage_dir).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


@contextmanager
def output_lock(out_root: Path):
    """One command per output directory; stale locks report the holder."""
    out_root.mkdir(parents=True, exist_ok=True)
    lock = out_root / ".fundcast.lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise LockHeld(
            f"lock file {lock} exists; another command may be running "
            "(delete it if that command crashed)"
        ) from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        try:
            lock.unlink()
        except FileNotFoundError:
            pass
