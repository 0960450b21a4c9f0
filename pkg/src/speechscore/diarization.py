"""Diarization error rate with reference preparation and speaker mapping."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment

from .formats.rttm import UNKNOWN_SPEAKER
from .timeline import (
    Interval,
    LabeledSegment,
    Timeline,
    boundary_collars,
    coverage_at_least,
    label_timelines,
    merge_gap,
    union_all,
)

FORGIVENESS_COLLAR = 250
SAME_SPEAKER_GAP = 1000


@dataclass(frozen=True)
class DiarReference:
    turns: tuple  # merged LabeledSegments, UNK removed
    scoring_regions: Timeline
    excluded: Timeline
    speakers: dict  # label -> Timeline restricted to scoring_regions
    flags: tuple = ()


@dataclass(frozen=True)
class SpeakerMapping:
    pairs: dict  # reference label -> system label
    ref_labels: tuple
    sys_labels: tuple
    overlap_matrix: tuple  # rows follow ref_labels, columns sys_labels

    @property
    def mapped_overlap(self) -> int:
        ri = {r: i for i, r in enumerate(self.ref_labels)}
        si = {s: j for j, s in enumerate(self.sys_labels)}
        return sum(self.overlap_matrix[ri[r]][si[s]] for r, s in self.pairs.items())


@dataclass(frozen=True)
class DiarScore:
    fa: int
    miss: int
    error: int
    total: int
    flags: tuple = ()

    @property
    def der(self) -> Fraction | None:
        if self.total == 0:
            return None
        return Fraction(self.fa + self.miss + self.error, self.total)


def pooled(scores) -> DiarScore:
    fa = miss = error = total = 0
    for s in scores:
        fa += s.fa
        miss += s.miss
        error += s.error
        total += s.total
    return DiarScore(fa, miss, error, total, () if total else ("no scored reference speech",))


def _segments(turns):
    out = []
    for t in turns:
        if isinstance(t, LabeledSegment):
            out.append(t)
        else:
            out.append(t.segment())
    return out


def prepare_reference(turns, uem=None, collar: int = FORGIVENESS_COLLAR,
                      file_span: Interval | None = None,
                      max_gap: int = SAME_SPEAKER_GAP) -> DiarReference:
    """Drop UNK, merge short same-speaker gaps, exclude overlap and collars.

    ``uem`` is a timeline (or list of regions) of scoring time; when empty,
    ``file_span`` is used, defaulting to ``[0, last reference offset)``.
    """
    segs = [s for s in _segments(turns) if s.duration > 0]
    unk = Timeline(s.interval for s in segs if s.label == UNKNOWN_SPEAKER)
    known = [s for s in segs if s.label != UNKNOWN_SPEAKER]
    merged = merge_gap(known, max_gap) if known else []

    if uem:
        universe = Timeline((r.onset, r.offset) if hasattr(r, "onset") else r for r in uem)
    else:
        if file_span is None:
            end = max((s.offset for s in segs), default=0)
            file_span = Interval(0, end)
        universe = Timeline([file_span])

    by_speaker = label_timelines(merged)
    overlap = coverage_at_least(by_speaker.values(), 2)
    collars = boundary_collars(merged, collar) if collar else Timeline()
    horizon = max([s.offset for s in segs] + [iv.offset for iv in universe], default=0)
    outside = Timeline([(0, horizon)]) - universe
    excluded = union_all([unk, overlap, collars, outside])
    scoring = universe - excluded
    speakers = {label: tl & scoring for label, tl in by_speaker.items()}
    flags = () if any(speakers.values()) else ("no scored reference speech",)
    return DiarReference(tuple(merged), scoring, excluded, speakers, flags)


def system_speakers(system_turns, scoring: Timeline) -> dict[str, Timeline]:
    return {label: tl & scoring for label, tl in label_timelines(_segments(system_turns)).items()}


def overlap_matrix(ref_speakers: dict, sys_speakers: dict):
    ref_labels = tuple(sorted(ref_speakers))
    sys_labels = tuple(sorted(sys_speakers))
    matrix = tuple(
        tuple((ref_speakers[r] & sys_speakers[s]).duration for s in sys_labels)
        for r in ref_labels
    )
    return ref_labels, sys_labels, matrix


def optimal_assignment(matrix) -> dict[int, int]:
    """Maximum-weight one-to-one assignment with a deterministic tie-break.

    Among all optimal assignments that only use positive cells, returns the
    one whose (row, column) pair list is lexicographically smallest, rows and
    columns being taken in index order.
    """
    m = np.asarray(matrix, dtype=np.int64)
    if m.size == 0 or not m.any():
        return {}
    best = _best_total(m, [], [])
    fixed = {}
    used_rows, used_cols = [], []
    gained = 0
    for r in range(m.shape[0]):
        rows_left = used_rows + [r]
        for c in range(m.shape[1]):
            if c in used_cols or m[r, c] <= 0:
                continue
            rest = _best_total(m, rows_left, used_cols + [c])
            if gained + m[r, c] + rest == best:
                fixed[r] = c
                used_cols.append(c)
                gained += int(m[r, c])
                break
        used_rows.append(r)
    return fixed


def _best_total(m, drop_rows, drop_cols) -> int:
    rows = [i for i in range(m.shape[0]) if i not in drop_rows]
    cols = [j for j in range(m.shape[1]) if j not in drop_cols]
    if not rows or not cols:
        return 0
    sub = m[np.ix_(rows, cols)]
    ri, ci = linear_sum_assignment(sub, maximize=True)
    return int(sub[ri, ci].sum())


def map_speakers(ref: DiarReference, system_turns) -> SpeakerMapping:
    sys_tl = system_speakers(system_turns, ref.scoring_regions)
    ref_labels, sys_labels, matrix = overlap_matrix(ref.speakers, sys_tl)
    assignment = optimal_assignment(matrix)
    pairs = {ref_labels[r]: sys_labels[c] for r, c in assignment.items()}
    return SpeakerMapping(pairs, ref_labels, sys_labels, matrix)


def score_der(ref: DiarReference, system_turns, mapping: SpeakerMapping | None = None) -> DiarScore:
    """Count FA / MISS / ERROR ticks inside the scoring regions by boundary sweep."""
    if mapping is None:
        mapping = map_speakers(ref, system_turns)
    sys_tl = system_speakers(system_turns, ref.scoring_regions)

    # Events: (time, kind, label, delta); kind 0 = reference, 1 = system.
    events = []
    for label, tl in ref.speakers.items():
        for iv in tl:
            events.append((iv.onset, 0, label, 1))
            events.append((iv.offset, 0, label, -1))
    for label, tl in sys_tl.items():
        for iv in tl:
            events.append((iv.onset, 1, label, 1))
            events.append((iv.offset, 1, label, -1))
    events.sort()

    active_ref: dict[str, int] = {}
    active_sys: dict[str, int] = {}
    fa = miss = error = total = 0
    prev = None
    i, n = 0, len(events)
    while i < n:
        t = events[i][0]
        if prev is not None and t > prev:
            d = t - prev
            n_ref = len(active_ref)
            n_sys = len(active_sys)
            total += n_ref * d
            if n_sys > n_ref:
                fa += (n_sys - n_ref) * d
            if n_ref:
                if n_sys == 0:
                    miss += n_ref * d
                else:
                    correct = sum(1 for r in active_ref if mapping.pairs.get(r) in active_sys)
                    error += (min(n_ref, n_sys) - correct) * d
                    if n_ref > n_sys:
                        miss += (n_ref - n_sys) * d
        while i < n and events[i][0] == t:
            _, kind, label, delta = events[i]
            table = active_ref if kind == 0 else active_sys
            count = table.get(label, 0) + delta
            if count:
                table[label] = count
            else:
                table.pop(label, None)
            i += 1
        prev = t
    flags = ref.flags if total else tuple(ref.flags) + ("unscorable: no scored reference speech",)
    return DiarScore(fa, miss, error, total, tuple(dict.fromkeys(flags)))
