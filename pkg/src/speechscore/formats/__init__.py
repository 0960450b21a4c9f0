"""Parsers, validators and serializers for the challenge label formats."""

from .rttm import RttmTurn, parse_rttm, serialize_rttm
from .sad import REFERENCE, SYSTEM, SadKind, SadRecord, parse_sad, serialize_sad
from .sid import (
    SidPrediction,
    parse_sid_key,
    parse_sid_output,
    ref_label_from_filename,
    serialize_sid_output,
)
from .sysdesc import SystemDescription, parse_description, serialize_description
from .transcript import Sentiment, TranscriptUtterance, parse_transcript, serialize_transcript
from .uem import UemRegion, parse_uem, serialize_uem

__all__ = [
    "REFERENCE", "SYSTEM",
    "RttmTurn", "SadKind", "SadRecord", "Sentiment", "SidPrediction",
    "SystemDescription", "TranscriptUtterance", "UemRegion",
    "parse_description", "parse_rttm", "parse_sad", "parse_sid_key", "parse_sid_output",
    "parse_transcript", "parse_uem", "ref_label_from_filename", "serialize",
]


def serialize(document, *, mode=None) -> str:
    """Render any parsed document back to its canonical text.

    ``mode`` picks the SAD vocabulary; it defaults to the system one.
    """
    if isinstance(document, SystemDescription):
        return serialize_description(document)
    items = list(document)
    if not items:
        return ""
    first = items[0]
    if isinstance(first, RttmTurn):
        return serialize_rttm(items)
    if isinstance(first, UemRegion):
        return serialize_uem(items)
    if isinstance(first, SadRecord):
        return serialize_sad(items, mode or SYSTEM)
    if isinstance(first, SidPrediction):
        return serialize_sid_output(items)
    if isinstance(first, TranscriptUtterance):
        return serialize_transcript(items)
    raise TypeError(f"don't know how to serialize {type(first).__name__}")
