"""Frame-level sentiment accuracy on a 10 ms grid."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .asr import is_unscorable, tokenize
from .errors import ScoringError
from .formats.transcript import POLARITIES
from .timeline import (
    Interval,
    Timeline,
    boundary_collars,
    coverage_at_least,
    label_timelines,
    merge_gap,
    union_all,
)

FRAME = 10
FORGIVENESS_COLLAR = 2000
SAME_SPEAKER_GAP = 1000


@dataclass(frozen=True)
class SentimentFrameSet:
    scored_frames: Timeline
    reference_labels: dict  # Sentiment -> frame-aligned Timeline
    frame_size: int = FRAME

    @property
    def n_frames(self) -> int:
        return self.scored_frames.duration // self.frame_size


@dataclass(frozen=True)
class SentimentScore:
    confusion: dict  # (ref Sentiment, sys Sentiment) -> ticks
    uncovered: dict  # ref Sentiment -> ticks with no system polarity
    conflict_time: int = 0

    @property
    def tp_time(self) -> int:
        return sum(self.confusion.get((p, p), 0) for p in POLARITIES)

    @property
    def scored_speech_time(self) -> int:
        return sum(self.confusion.values()) + sum(self.uncovered.values())

    @property
    def accuracy(self) -> Fraction | None:
        total = self.scored_speech_time
        return Fraction(self.tp_time, total) if total else None

    def __add__(self, other):
        conf = {k: self.confusion.get(k, 0) + other.confusion.get(k, 0)
                for k in set(self.confusion) | set(other.confusion)}
        unc = {k: self.uncovered.get(k, 0) + other.uncovered.get(k, 0)
               for k in set(self.uncovered) | set(other.uncovered)}
        return SentimentScore(conf, unc, self.conflict_time + other.conflict_time)


def snap_to_frames(tl: Timeline, frame: int = FRAME) -> Timeline:
    """Keep only whole grid frames lying inside ``tl``."""
    out = []
    for iv in tl:
        a = -(-iv.onset // frame) * frame
        b = (iv.offset // frame) * frame
        if a < b:
            out.append((a, b))
    return Timeline(out)


def build_frames(reference, collar: int = FORGIVENESS_COLLAR,
                 max_gap: int = SAME_SPEAKER_GAP, frame: int = FRAME) -> SentimentFrameSet:
    utts = [u for u in reference if u.end > u.start]
    unk = Timeline((u.start, u.end) for u in utts if is_unscorable(tokenize(u.words)))
    known = [u for u in utts if not is_unscorable(tokenize(u.words))]
    for u in known:
        if u.sentiment is None:
            raise ScoringError(f"reference utterance at {Interval(u.start, u.end)} has no sentiment")

    merged = merge_gap([u.segment() for u in known], max_gap) if known else []
    overlap = coverage_at_least(label_timelines(merged).values(), 2)
    collars = boundary_collars(merged, collar)
    by_polarity = {p: Timeline((u.start, u.end) for u in known if u.sentiment is p) for p in POLARITIES}
    conflicting = coverage_at_least(by_polarity.values(), 2)
    speech = union_all(by_polarity.values())
    scored = snap_to_frames(speech - union_all([unk, overlap, collars, conflicting]), frame)
    labels = {p: tl & scored for p, tl in by_polarity.items()}
    return SentimentFrameSet(scored, labels, frame)


def _system_pieces(system):
    """Elementary pieces of system time with the polarity that governs each.

    Where several utterances overlap, the latest-starting one wins (later
    list position breaks ties); pieces with disagreeing polarities are
    marked as conflicts.
    """
    events = []
    for idx, u in enumerate(system):
        if u.end > u.start and u.sentiment is not None:
            events.append((u.start, 1, idx))
            events.append((u.end, -1, idx))
    events.sort()
    active = set()
    prev = None
    i, n = 0, len(events)
    while i < n:
        t = events[i][0]
        if prev is not None and t > prev and active:
            winner = max(active, key=lambda k: (system[k].start, k))
            polarities = {system[k].sentiment for k in active}
            yield prev, t, system[winner].sentiment, len(polarities) > 1
        while i < n and events[i][0] == t:
            _, delta, idx = events[i]
            if delta > 0:
                active.add(idx)
            else:
                active.discard(idx)
            i += 1
        prev = t


def _midpoint_frames(a: int, b: int, frame: int):
    """Frames whose midpoint falls in ``[a, b)``, as a tick interval."""
    half = frame // 2
    lo = -(-(a - half) // frame) * frame
    hi = -(-(b - half) // frame) * frame
    return (max(lo, 0), hi) if hi > max(lo, 0) else None


def score_sentiment(frames: SentimentFrameSet, system) -> SentimentScore:
    system = list(system)
    per_sys = {p: [] for p in POLARITIES}
    conflicts = []
    for a, b, pol, conflict in _system_pieces(system):
        span = _midpoint_frames(a, b, frames.frame_size)
        if span is None:
            continue
        per_sys[pol].append(span)
        if conflict:
            conflicts.append(span)
    sys_tl = {p: Timeline(spans) for p, spans in per_sys.items()}
    covered = union_all(sys_tl.values())
    confusion = {}
    uncovered = {}
    for p, ref_tl in frames.reference_labels.items():
        for q, tl in sys_tl.items():
            confusion[(p, q)] = (ref_tl & tl).duration
        uncovered[p] = (ref_tl - covered).duration
    conflict_time = (Timeline(conflicts) & frames.scored_frames).duration
    return SentimentScore(confusion, uncovered, conflict_time)
