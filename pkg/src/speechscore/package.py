"""Submission packaging: one task, validated outputs, one tarball."""

from __future__ import annotations

import gzip
import hashlib
import io
import json
import tarfile
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .errors import FormatError, PackagingError
from .formats.rttm import parse_rttm
from .formats.sad import SYSTEM, parse_sad
from .formats.sid import parse_sid_key, parse_sid_output
from .formats.sysdesc import SystemDescription, parse_description, serialize_description
from .formats.transcript import parse_transcript

OUTPUT_SUFFIXES = {
    "SAD": {".txt"},
    "SD": {".rttm"},
    "SID": {".txt"},
    "ASR": {".json"},
    "SENTIMENT": {".json"},
}


def _validate_file(task, path: Path, name: str):
    text = path.read_bytes().decode("utf-8")
    if task == "SAD":
        parse_sad(text, SYSTEM, source=name)
    elif task == "SD":
        parse_rttm(text, source=name, system=True)
    elif task == "SID":
        return parse_sid_output(text, source=name)
    elif task == "ASR":
        parse_transcript(text, source=name, require_sentiment=False)
    elif task == "SENTIMENT":
        parse_transcript(text, source=name, require_sentiment=True)
    return None


def validate_outputs(task: str, outputs_dir, trials=None) -> list[Path]:
    """Check every output file for ``task``; raise with all problems found.

    ``trials`` is an iterable of SID segment ids that must all be predicted.
    """
    task = task.upper()
    root = Path(outputs_dir)
    if not root.is_dir():
        raise PackagingError(f"outputs directory not found: {root}")
    files = sorted(p for p in root.rglob("*") if p.is_file())
    problems = []
    if not files:
        problems.append("no output files")
    allowed = OUTPUT_SUFFIXES[task]
    predicted = set()
    for f in files:
        name = f.relative_to(root).as_posix()
        if f.suffix.lower() not in allowed:
            problems.append(f"{name}: not a {task} output (expected {sorted(allowed)}); "
                            "a package holds a single task")
            continue
        try:
            preds = _validate_file(task, f, name)
        except FormatError as exc:
            problems.append(str(exc))
            continue
        if preds:
            predicted.update(p.segment_id for p in preds)
    if task == "SID" and trials is not None:
        missing = sorted(set(trials) - predicted)
        if missing:
            problems.append(f"missing predictions for {len(missing)} segments: {', '.join(missing)}")
    if problems:
        raise PackagingError("output validation failed", problems)
    return files


def _tar_add(tar: tarfile.TarFile, name: str, data: bytes, mtime: int):
    info = tarfile.TarInfo(name)
    info.size = len(data)
    info.mtime = mtime
    info.mode = 0o644
    info.uid = info.gid = 0
    info.uname = info.gname = ""
    tar.addfile(info, io.BytesIO(data))


def package(outputs_dir, description: SystemDescription, archive_path, task=None,
            trials=None, created: str | None = None) -> Path:
    """Validate and bundle outputs with their description into a ``.tar.gz``."""
    if task is not None and task.upper() != description.task:
        raise PackagingError(
            f"description declares task {description.task} but {task.upper()} was requested")
    task = description.task
    files = validate_outputs(task, outputs_dir, trials)
    root = Path(outputs_dir)
    if created is None:
        created = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
    stamp = int(datetime.fromisoformat(created.replace("Z", "+00:00")).timestamp())
    entries = []
    for f in files:
        data = f.read_bytes()
        entries.append((f"outputs/{f.relative_to(root).as_posix()}", data))
    manifest = {
        "tool_version": __version__,
        "task": task,
        "created": created,
        "files": [{"name": n, "sha256": hashlib.sha256(d).hexdigest(), "bytes": len(d)}
                  for n, d in entries],
    }
    out = Path(archive_path)
    buf = io.BytesIO()
    with tarfile.open(fileobj=buf, mode="w", format=tarfile.PAX_FORMAT) as tar:
        _tar_add(tar, "manifest", (json.dumps(manifest, indent=2) + "\n").encode(), stamp)
        _tar_add(tar, "description", serialize_description(description).encode(), stamp)
        for name, data in entries:
            _tar_add(tar, name, data, stamp)
    with open(out, "wb") as fh, gzip.GzipFile(fileobj=fh, mode="wb", mtime=stamp, filename="") as gz:
        gz.write(buf.getvalue())
    return out


def load_trials(path) -> list[str]:
    """Segment ids from a key file (two columns) or a plain list (one per line)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if lines and all(len(ln) == 2 for ln in lines):
        return list(parse_sid_key(text, source=str(path)))
    return [ln[0] for ln in lines]


def load_description(path) -> SystemDescription:
    p = Path(path)
    return parse_description(p.read_text(encoding="utf-8"), source=p.name)
