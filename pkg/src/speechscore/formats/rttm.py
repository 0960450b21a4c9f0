"""RTTM speaker-turn files: nine space-delimited fields per turn."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import FormatError
from ..timeline import LabeledSegment, seconds_to_ticks, ticks_to_seconds
from ._lines import emit, iter_lines

NA = "<NA>"
UNKNOWN_SPEAKER = "UNK"
FIELDS = (
    "type", "file_id", "channel", "onset", "duration",
    "orthography", "speaker_type", "speaker_name", "confidence",
)


@dataclass(frozen=True)
class RttmTurn:
    file_id: str
    onset: int
    dur: int
    speaker_name: str
    channel_id: int = 1
    type_tag: str = "SPEAKER"
    ortho: str = NA
    speaker_type: str = NA
    confidence: str | None = NA

    @property
    def offset(self) -> int:
        return self.onset + self.dur

    def segment(self) -> LabeledSegment:
        return LabeledSegment(self.speaker_name, self.onset, self.offset)


def parse_rttm(text, *, source=None, system=False, expected_file_id=None, warnings=None):
    """Parse RTTM text into a list of :class:`RttmTurn`.

    ``system=True`` rejects the reserved ``UNK`` speaker label.  When
    ``expected_file_id`` is given, turns naming another file are dropped and
    reported through ``warnings`` (a list that collects messages).
    """
    turns = []
    for lineno, line in iter_lines(text):
        tokens = line.split()

        def fail(message, field=None):
            raise FormatError(message, source=source, line=lineno, field=field)

        if len(tokens) not in (8, 9):
            fail(f"expected 9 space-delimited fields, found {len(tokens)}")
        if tokens[0] != "SPEAKER":
            fail(f"type_tag must be SPEAKER, got {tokens[0]!r}", "type")
        try:
            channel = int(tokens[2])
        except ValueError:
            fail(f"channel is not an integer: {tokens[2]!r}", "channel")
        if channel != 1:
            fail(f"channel must be 1, got {channel}", "channel")
        onset = seconds_to_ticks(tokens[3], source=source, line=lineno, field="onset")
        dur = seconds_to_ticks(tokens[4], source=source, line=lineno, field="duration")
        if tokens[5] != NA:
            fail(f"orthography must be {NA}, got {tokens[5]!r}", "orthography")
        if tokens[6] != NA:
            fail(f"speaker type must be {NA}, got {tokens[6]!r}", "speaker_type")
        speaker = tokens[7]
        if system and speaker == UNKNOWN_SPEAKER:
            fail(f"speaker label {UNKNOWN_SPEAKER} is reserved for references", "speaker_name")
        confidence = tokens[8] if len(tokens) == 9 else None
        if confidence is not None and confidence != NA:
            fail(f"confidence must be {NA}, got {confidence!r}", "confidence")
        if expected_file_id is not None and tokens[1] != expected_file_id:
            emit(warnings, f"{source or '<rttm>'}:{lineno}: file id {tokens[1]!r} does not match "
                           f"{expected_file_id!r}; turn dropped")
            continue
        turns.append(RttmTurn(tokens[1], onset, dur, speaker, channel_id=channel,
                              confidence=confidence))
    return turns


def format_rttm_turn(turn: RttmTurn) -> str:
    fields = [
        turn.type_tag, turn.file_id, str(turn.channel_id),
        ticks_to_seconds(turn.onset), ticks_to_seconds(turn.dur),
        turn.ortho, turn.speaker_type, turn.speaker_name,
    ]
    if turn.confidence is not None:
        fields.append(turn.confidence)
    return " ".join(fields)


def serialize_rttm(turns) -> str:
    return "".join(format_rttm_turn(t) + "\n" for t in turns)


def group_by_file(turns) -> dict[str, list[RttmTurn]]:
    out: dict[str, list[RttmTurn]] = {}
    for t in turns:
        out.setdefault(t.file_id, []).append(t)
    return out
