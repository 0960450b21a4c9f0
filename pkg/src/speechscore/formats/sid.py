"""SID prediction lists, reference key files and segment naming."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import FormatError
from ._lines import iter_lines

TOP_K = 5
DEV = "dev"
EVAL = "eval"

_DEV_NAME = re.compile(r"^FS_P01_dev_(?P<speaker>.+)_(?P<utt>[^_]+)$")
_EVAL_NAME = re.compile(r"^FS_P01_eval_(?P<utt>[^_]+)$")


@dataclass(frozen=True)
class SidPrediction:
    segment_id: str
    predictions: tuple[str, ...]


def parse_sid_output(text, *, source=None):
    out = []
    seen = {}
    for lineno, line in iter_lines(text):
        tokens = line.split()
        if len(tokens) != TOP_K + 1:
            raise FormatError(
                f"expected a segment id and {TOP_K} predictions ({TOP_K + 1} fields), "
                f"found {len(tokens)} fields",
                source=source, line=lineno,
            )
        segment, preds = tokens[0], tuple(tokens[1:])
        if len(set(preds)) != TOP_K:
            dupes = sorted({p for p in preds if preds.count(p) > 1})
            raise FormatError(f"duplicate predictions {dupes} for {segment}",
                              source=source, line=lineno, field="predictions")
        if segment in seen:
            raise FormatError(f"segment {segment} already listed on line {seen[segment]}",
                              source=source, line=lineno, field="test")
        seen[segment] = lineno
        out.append(SidPrediction(segment, preds))
    return out


def serialize_sid_output(predictions) -> str:
    return "".join(f"{p.segment_id} {' '.join(p.predictions)}\n" for p in predictions)


def parse_sid_key(text, *, source=None) -> dict[str, str]:
    """Two whitespace-delimited columns: segment id and reference speaker."""
    key = {}
    for lineno, line in iter_lines(text):
        tokens = line.split()
        if len(tokens) != 2:
            raise FormatError(f"expected 2 fields (segment, speaker), found {len(tokens)}",
                              source=source, line=lineno)
        if tokens[0] in key:
            raise FormatError(f"duplicate segment id {tokens[0]}", source=source, line=lineno)
        key[tokens[0]] = tokens[1]
    return key


def serialize_sid_key(key: dict[str, str]) -> str:
    return "".join(f"{seg} {label}\n" for seg, label in key.items())


def ref_label_from_filename(name: str, split: str = DEV) -> str | None:
    """Speaker label embedded in a dev segment name; ``None`` for eval names."""
    if split == DEV:
        m = _DEV_NAME.match(name)
        if m:
            return m.group("speaker")
    elif split == EVAL:
        if _EVAL_NAME.match(name):
            return None
    else:
        raise ValueError(f"split must be {DEV!r} or {EVAL!r}")
    raise FormatError(f"{name!r} does not follow the {split} segment naming convention",
                      field="segment_id")


def dev_segment_name(speaker: str, utterance: int | str) -> str:
    if isinstance(utterance, int):
        utterance = f"{utterance:03d}"
    return f"FS_P01_dev_{speaker}_{utterance}"
