"""SAD segment files: nine tab-delimited fields, the last one optional.

References label intervals ``S``/``NS``; system outputs use
``speech``/``non-speech`` and may carry a confidence in ``[0, 1]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from ..errors import FormatError, OverlapError
from ..timeline import Timeline, seconds_to_ticks, ticks_to_seconds
from ._lines import emit, iter_lines

REFERENCE = "reference"
SYSTEM = "system"
FIELDS = ("test", "testset_id", "test_id", "task", "file_id", "start", "end", "type", "confidence")


class SadKind(enum.Enum):
    SPEECH = "speech"
    NON_SPEECH = "non-speech"


_TOKENS = {
    REFERENCE: {"S": SadKind.SPEECH, "NS": SadKind.NON_SPEECH},
    SYSTEM: {"speech": SadKind.SPEECH, "non-speech": SadKind.NON_SPEECH},
}
_NAMES = {mode: {kind: tok for tok, kind in table.items()} for mode, table in _TOKENS.items()}


@dataclass(frozen=True)
class SadRecord:
    file_id: str
    start: int
    end: int
    kind: SadKind
    confidence: float | None = None
    test: str = "X"
    testset_id: str = "X"
    test_id: str = "X"
    task: str = "SAD"

    @property
    def is_speech(self) -> bool:
        return self.kind is SadKind.SPEECH


def parse_sad(text, mode=SYSTEM, *, source=None, warnings=None):
    """Parse SAD records; ``mode`` selects the reference or system vocabulary.

    Intervals of one file must not overlap.  Lines without tabs are split on
    whitespace, with a warning.
    """
    if mode not in _TOKENS:
        raise ValueError(f"mode must be {REFERENCE!r} or {SYSTEM!r}")
    vocab = _TOKENS[mode]
    records = []
    linenos = []
    warned_ws = False
    for lineno, line in iter_lines(text):
        if "\t" in line:
            tokens = [t.strip() for t in line.strip().split("\t")]
        else:
            tokens = line.split()
            if not warned_ws:
                emit(warnings, f"{source or '<sad>'}:{lineno}: fields are not tab-delimited; "
                               "split on whitespace instead")
                warned_ws = True

        def fail(message, field=None):
            raise FormatError(message, source=source, line=lineno, field=field)

        if len(tokens) not in (8, 9):
            fail(f"expected 9 tab-delimited fields (confidence optional), found {len(tokens)}")
        if tokens[3] != "SAD":
            fail(f"task must be SAD, got {tokens[3]!r}", "task")
        start = seconds_to_ticks(tokens[5], source=source, line=lineno, field="start")
        end = seconds_to_ticks(tokens[6], source=source, line=lineno, field="end")
        if start > end:
            fail(f"interval start {tokens[5]} is after end {tokens[6]}", "end")
        kind = vocab.get(tokens[7])
        if kind is None:
            fail(f"unknown {mode} type {tokens[7]!r}; expected one of {sorted(vocab)}", "type")
        confidence = None
        if len(tokens) == 9:
            try:
                confidence = float(tokens[8])
            except ValueError:
                fail(f"confidence is not a number: {tokens[8]!r}", "confidence")
            if not (0.0 <= confidence <= 1.0) or math.isnan(confidence):
                fail(f"confidence {tokens[8]} outside [0, 1]", "confidence")
        records.append(SadRecord(tokens[4], start, end, kind, confidence,
                                 test=tokens[0], testset_id=tokens[1], test_id=tokens[2]))
        linenos.append(lineno)

    check_no_overlap(records, linenos, source=source)
    return records


def check_no_overlap(records, linenos=None, *, source=None):
    if linenos is None:
        linenos = list(range(1, len(records) + 1))
    order = sorted(range(len(records)),
                   key=lambda i: (records[i].file_id, records[i].start, records[i].end))
    for prev, cur in zip(order, order[1:]):
        a, b = records[prev], records[cur]
        if a.file_id == b.file_id and b.start < a.end and b.start < b.end:
            first, second = sorted((linenos[prev], linenos[cur]))
            raise OverlapError(
                f"interval overlap in {a.file_id}: line {linenos[prev]} ends at "
                f"{ticks_to_seconds(a.end)} but line {linenos[cur]} starts at "
                f"{ticks_to_seconds(b.start)} (lines {first} and {second})",
                source=source, line=linenos[cur], other_line=linenos[prev],
            )


def _format_confidence(value: float) -> str:
    text = f"{value:.6f}"
    return text if float(text) == value else repr(value)


def format_sad_record(record: SadRecord, mode=SYSTEM) -> str:
    fields = [
        record.test, record.testset_id, record.test_id, record.task, record.file_id,
        ticks_to_seconds(record.start), ticks_to_seconds(record.end),
        _NAMES[mode][record.kind],
    ]
    if record.confidence is not None:
        fields.append(_format_confidence(record.confidence))
    return "\t".join(fields)


def serialize_sad(records, mode=SYSTEM) -> str:
    return "".join(format_sad_record(r, mode) + "\n" for r in records)


def speech_timeline(records, min_confidence=None) -> Timeline:
    """Union of speech records, optionally only those at or above a threshold."""
    if min_confidence is None:
        return Timeline((r.start, r.end) for r in records if r.is_speech)
    return Timeline((r.start, r.end) for r in records
                    if r.is_speech and r.confidence is not None and r.confidence >= min_confidence)


def records_from_timeline(speech: Timeline, span_end: int, file_id="X", confidences=None):
    """Alternating speech / non-speech records covering ``[0, span_end)``."""
    out = []
    cursor = 0
    for i, iv in enumerate(speech):
        if iv.onset > cursor:
            out.append(SadRecord(file_id, cursor, iv.onset, SadKind.NON_SPEECH))
        conf = None if confidences is None else confidences[i]
        out.append(SadRecord(file_id, iv.onset, iv.offset, SadKind.SPEECH, conf))
        cursor = iv.offset
    if cursor < span_end:
        out.append(SadRecord(file_id, cursor, span_end, SadKind.NON_SPEECH))
    return out
