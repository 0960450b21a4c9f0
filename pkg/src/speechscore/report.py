"""JSON report documents and the per-file TSV table."""

from __future__ import annotations

import hashlib
import json
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from pathlib import Path

from . import __version__

SCHEMA = "speechscore.report/1"
DECIMALS = 6


def rational(value: Fraction | None) -> dict | None:
    """Exact fraction plus a half-even decimal rounded to six places."""
    if value is None:
        return None
    value = Fraction(value)
    dec = (Decimal(value.numerator) / Decimal(value.denominator)).quantize(
        Decimal(1).scaleb(-DECIMALS), rounding=ROUND_HALF_EVEN)
    return {"numerator": value.numerator, "denominator": value.denominator, "decimal": str(dec)}


def rational_text(value: Fraction | None) -> str:
    r = rational(value)
    return "NA" if r is None else r["decimal"]


def digest(path: Path, name: str, role: str) -> dict:
    h = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    return {"role": role, "name": name, "sha256": h}


def build_report(task: str, per_file: list, aggregate: dict, inputs: list, **extra) -> dict:
    doc = {
        "schema": SCHEMA,
        "tool_version": __version__,
        "task": task,
        "inputs": sorted(inputs, key=lambda d: (d["role"], d["name"])),
        "per_file": per_file,
        "aggregate": aggregate,
    }
    doc.update(extra)
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def write_report(doc: dict, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps(doc).encode("utf-8"))


def table_rows(doc: dict) -> list[list[str]]:
    """Flatten per-file results into rows; rationals become decimals."""
    rows = []
    header = None
    for entry in doc["per_file"]:
        flat = {}
        for key, value in entry.items():
            if key in ("warnings", "flags", "mapping", "segments", "confusion", "uncovered"):
                continue
            if isinstance(value, dict) and "decimal" in value:
                flat[key] = value["decimal"]
            elif value is None:
                flat[key] = "NA"
            elif isinstance(value, (str, int, float)):
                flat[key] = str(value)
        if header is None:
            header = list(flat)
            rows.append(header)
        rows.append([flat.get(k, "") for k in header])
    return rows


def to_tsv(doc: dict) -> str:
    return "".join("\t".join(row) + "\n" for row in table_rows(doc))
