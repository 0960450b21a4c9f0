"""Transcript JSON: an array of utterance objects per audio file."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from decimal import Decimal

from ..errors import FormatError
from ..timeline import LabeledSegment, seconds_to_ticks, ticks_to_seconds


class Sentiment(enum.Enum):
    POSITIVE = "POSITIVE"
    NEUTRAL = "NEUTRAL"
    NEGATIVE = "NEGATIVE"


POLARITIES = (Sentiment.POSITIVE, Sentiment.NEUTRAL, Sentiment.NEGATIVE)
# The published example spells the start key "startTIme"; both are accepted.
START_KEYS = ("startTime", "startTIme")


@dataclass(frozen=True)
class TranscriptUtterance:
    speaker_id: str
    words: str
    sentiment: Sentiment | None
    start: int
    end: int

    def segment(self) -> LabeledSegment:
        return LabeledSegment(self.speaker_id, self.start, self.end)


def parse_transcript(text, *, source=None, require_sentiment=True):
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", source=source, line=exc.lineno) from None
    if isinstance(doc, dict):
        doc = [doc]
    if not isinstance(doc, list):
        raise FormatError("expected a JSON array of utterances", source=source)
    out = []
    for i, item in enumerate(doc):
        where = f"utterance {i}"

        def fail(message, field=None):
            raise FormatError(f"{where}: {message}", source=source, field=field)

        if not isinstance(item, dict):
            fail("not a JSON object")
        for key in ("speakerID", "words", "endTime"):
            if key not in item:
                fail(f"missing required key {key!r}", key)
        start_key = next((k for k in START_KEYS if k in item), None)
        if start_key is None:
            fail("missing required key 'startTime'", "startTime")
        speaker = item["speakerID"]
        if not isinstance(speaker, str) or not speaker:
            fail("speakerID must be a non-empty string", "speakerID")
        words = item["words"]
        if not isinstance(words, str):
            fail("words must be a string", "words")
        sentiment = None
        if "sentiment" in item and item["sentiment"] is not None:
            try:
                sentiment = Sentiment(item["sentiment"])
            except ValueError:
                fail(f"sentiment {item['sentiment']!r} is not one of "
                     f"{[p.value for p in POLARITIES]}", "sentiment")
        elif require_sentiment:
            fail("missing required key 'sentiment'", "sentiment")
        start = _time(item[start_key], source, where, "startTime")
        end = _time(item["endTime"], source, where, "endTime")
        if start > end:
            fail(f"startTime {item[start_key]} is after endTime {item['endTime']}", "endTime")
        out.append(TranscriptUtterance(speaker, words, sentiment, start, end))
    return out


def _time(value, source, where, field):
    if isinstance(value, (bool, list, dict)) or value is None:
        raise FormatError(f"{where}: {field} is not numeric: {value!r}", source=source, field=field)
    try:
        return seconds_to_ticks(value, source=source, field=field)
    except FormatError as exc:
        raise FormatError(f"{where}: {exc.message}", source=source, field=field) from None


def utterance_to_dict(u: TranscriptUtterance) -> dict:
    d = {"speakerID": u.speaker_id, "words": u.words}
    if u.sentiment is not None:
        d["sentiment"] = u.sentiment.value
    d["startTime"] = ticks_to_seconds(u.start)
    d["endTime"] = ticks_to_seconds(u.end)
    return d


def serialize_transcript(utterances) -> str:
    return json.dumps([utterance_to_dict(u) for u in utterances], indent=2, ensure_ascii=False) + "\n"
