"""Speech activity detection scoring.

Reference speech is surrounded by 0.5 s unscored collars.  Any non-speech
left shorter than 0.1 s after collaring is folded into the collars, so every
scored non-speech stretch lasts at least 100 ticks.  Missed speech and false
alarms are time-weighted into P_FN / P_FP and combined into the detection
cost ``DCF = 0.75 * P_FN + 0.25 * P_FP``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ScoringError
from .formats.sad import speech_timeline
from .timeline import Interval, Timeline, boundary_collars, subtract

COLLAR = 500
MIN_NONSPEECH = 100
MISS_WEIGHT = Fraction(3, 4)
FALSE_ALARM_WEIGHT = Fraction(1, 4)
# Threshold that keeps no speech record at all.
KEEP_NOTHING = math.inf


@dataclass(frozen=True)
class SadScoringRegions:
    scored_speech: Timeline
    scored_nonspeech: Timeline
    collars: Timeline
    file_span: Interval


@dataclass(frozen=True)
class SadScore:
    tp: int
    tn: int
    fp: int
    fn: int
    flags: tuple = ()

    @property
    def speech_time(self) -> int:
        return self.tp + self.fn

    @property
    def nonspeech_time(self) -> int:
        return self.tn + self.fp

    @property
    def p_fp(self) -> Fraction:
        return Fraction(self.fp, self.nonspeech_time) if self.nonspeech_time else Fraction(0)

    @property
    def p_fn(self) -> Fraction:
        return Fraction(self.fn, self.speech_time) if self.speech_time else Fraction(0)

    @property
    def dcf(self) -> Fraction:
        return MISS_WEIGHT * self.p_fn + FALSE_ALARM_WEIGHT * self.p_fp

    def __add__(self, other: "SadScore") -> "SadScore":
        return pooled([self, other])


def pooled(scores) -> SadScore:
    """Sum tick counts across files; rates are then recomputed from the sums."""
    tp = tn = fp = fn = 0
    for s in scores:
        tp += s.tp
        tn += s.tn
        fp += s.fp
        fn += s.fn
    flags = []
    if tp + fn == 0:
        flags.append("no scored speech")
    if tn + fp == 0:
        flags.append("no scored non-speech")
    return SadScore(tp, tn, fp, fn, tuple(flags))


def build_scoring_regions(reference_speech: Timeline, file_span: Interval,
                          collar: int = COLLAR, min_nonspeech: int = MIN_NONSPEECH) -> SadScoringRegions:
    reference_speech = Timeline(reference_speech)
    span = Timeline([file_span])
    if not span.covers(reference_speech):
        raise ScoringError(f"reference speech {reference_speech.extent} extends outside the "
                           f"file span {Interval(*file_span)}")
    collars = boundary_collars(reference_speech, collar, file_span[0], file_span[1]) - reference_speech
    nonspeech = subtract(subtract(span, reference_speech), collars)
    short = Timeline(iv for iv in nonspeech if iv.duration < min_nonspeech)
    if short:
        collars = collars | short
        nonspeech = nonspeech - short
    return SadScoringRegions(reference_speech, nonspeech, collars, Interval(*file_span))


def restrict_regions(regions: SadScoringRegions, keep: Timeline) -> SadScoringRegions:
    """Limit scoring to ``keep`` (e.g. UEM regions); the rest joins the unscored set."""
    span = Timeline([regions.file_span])
    dropped = span - keep
    return SadScoringRegions(
        regions.scored_speech & keep,
        regions.scored_nonspeech & keep,
        regions.collars | dropped,
        regions.file_span,
    )


def clip_to_span(system_speech: Timeline, file_span, warnings=None) -> Timeline:
    clipped = Timeline(system_speech).clip(*file_span)
    if clipped != system_speech and warnings is not None:
        warnings.append(f"system speech outside the file span {Interval(*file_span)} was ignored")
    return clipped


def score_sad(regions: SadScoringRegions, system_speech: Timeline, warnings=None) -> SadScore:
    system_speech = clip_to_span(Timeline(system_speech), regions.file_span, warnings)
    speech, nonspeech = regions.scored_speech, regions.scored_nonspeech
    tp = (system_speech & speech).duration
    fn = speech.duration - tp
    fp = (system_speech & nonspeech).duration
    tn = nonspeech.duration - fp
    flags = []
    if speech.duration == 0:
        flags.append("no scored speech")
    if nonspeech.duration == 0:
        flags.append("no scored non-speech")
    return SadScore(tp, tn, fp, fn, tuple(flags))


@dataclass(frozen=True)
class SweepResult:
    theta: float
    dcf: Fraction
    curve: tuple = field(default=())  # ((theta, dcf), ...) ascending theta


def sweep_dcf(regions: SadScoringRegions, records) -> SweepResult:
    """Pick the confidence threshold minimizing DCF for one file."""
    return sweep_dcf_pooled([(regions, records)])


def sweep_dcf_pooled(files) -> SweepResult:
    """Shared-threshold sweep over ``(regions, records)`` pairs, pooling ticks.

    Candidates are the distinct speech confidences plus ``KEEP_NOTHING``.
    Ties go to the larger threshold.
    """
    files = list(files)
    thetas = set()
    for _, records in files:
        for r in records:
            if not r.is_speech:
                continue
            if r.confidence is None:
                raise ScoringError(
                    f"speech record {r.file_id} [{r.start}, {r.end}) has no confidence; "
                    "a threshold sweep needs one on every speech record")
            thetas.add(r.confidence)
    candidates = sorted(thetas) + [KEEP_NOTHING]
    curve = []
    for theta in candidates:
        scores = [score_sad(regions, speech_timeline(records, theta)) for regions, records in files]
        curve.append((theta, pooled(scores).dcf))
    best_theta, best_dcf = curve[-1]
    for theta, dcf in reversed(curve):
        if dcf < best_dcf:
            best_theta, best_dcf = theta, dcf
    return SweepResult(best_theta, best_dcf, tuple(curve))
