"""Top-5 speaker identification accuracy."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ScoringError
from .formats.rttm import UNKNOWN_SPEAKER
from .formats.sid import DEV, TOP_K, ref_label_from_filename

MIN_SEGMENT = 2200
MAX_SEGMENT = 15000


@dataclass(frozen=True)
class SidTrial:
    segment_id: str
    reference_label: str
    predictions: tuple = ()  # empty when the system skipped the segment

    @property
    def hit(self) -> bool:
        return self.reference_label in self.predictions


@dataclass(frozen=True)
class SidScore:
    m: int
    hits: int
    missing: tuple = ()
    misses: tuple = ()

    @property
    def accuracy(self) -> Fraction | None:
        return Fraction(self.hits, self.m) if self.m else None


def score_top5(trials) -> SidScore:
    seen = set()
    hits = 0
    missing, misses = [], []
    for t in trials:
        if t.segment_id in seen:
            raise ScoringError(f"segment {t.segment_id} appears more than once")
        seen.add(t.segment_id)
        if not t.reference_label or t.reference_label == UNKNOWN_SPEAKER:
            raise ScoringError(f"segment {t.segment_id} has no usable reference label")
        if not t.predictions:
            missing.append(t.segment_id)
        if t.hit:
            hits += 1
        else:
            misses.append(t.segment_id)
    return SidScore(len(seen), hits, tuple(missing), tuple(misses))


def build_trials(predictions, key=None, split=DEV, durations=None, warnings=None):
    """Pair system predictions with reference labels.

    ``key`` maps segment id to speaker; without it, labels come from dev
    segment names and the trial list is whatever the system returned.
    Segments in ``key`` that the system skipped become trials with no
    predictions.  ``durations`` (segment id -> ticks) only drives warnings.
    """
    by_segment = {p.segment_id: tuple(p.predictions) for p in predictions}
    for preds in by_segment.values():
        if len(preds) != TOP_K:
            raise ScoringError(f"expected {TOP_K} predictions per segment")
    if key is None:
        key = {seg: ref_label_from_filename(seg, split) for seg in by_segment}
        unlabeled = sorted(seg for seg, lab in key.items() if lab is None)
        if unlabeled:
            raise ScoringError(f"no reference label for {len(unlabeled)} segments "
                               f"(e.g. {unlabeled[0]}); eval scoring needs a key file")
    elif warnings is not None:
        extra = sorted(set(by_segment) - set(key))
        if extra:
            warnings.append(f"{len(extra)} predicted segments are not in the key and were ignored")
    if durations and warnings is not None:
        for seg in key:
            d = durations.get(seg)
            if d is not None and not (MIN_SEGMENT <= d <= MAX_SEGMENT):
                warnings.append(f"segment {seg} lasts {d / 1000:g} s, outside 2.2-15 s")
    return [SidTrial(seg, label, by_segment.get(seg, ())) for seg, label in key.items()]
