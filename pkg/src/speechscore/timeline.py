"""Integer-millisecond time arithmetic and canonical interval sets.

All scoring happens on ticks (1 tick = 1 ms) and half-open intervals
``[onset, offset)``.  A :class:`Timeline` is always stored in canonical form:
sorted, pairwise disjoint, no empty members and no two members touching.
Canonical form is unique for a given point set, so equality of timelines is
equality of the sets they cover.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Iterable, NamedTuple

from .errors import FormatError

TICKS_PER_SECOND = 1000
MAX_FRACTION_DIGITS = 3


def seconds_to_ticks(text, *, source=None, line=None, field=None) -> int:
    """Convert decimal seconds (``"1325.203"``, ``5.77``) to integer ticks.

    Values with more than three fractional digits are rejected instead of
    rounded.  Floats are converted through their shortest ``repr``.
    """
    if isinstance(text, bool):
        raise FormatError(f"not a time value: {text!r}", source=source, line=line, field=field)
    if isinstance(text, float):
        text = repr(text)
    try:
        value = Decimal(str(text).strip())
    except InvalidOperation:
        raise FormatError(f"not a number: {text!r}", source=source, line=line, field=field) from None
    if not value.is_finite():
        raise FormatError(f"not a finite time: {text!r}", source=source, line=line, field=field)
    if value < 0:
        raise FormatError(f"negative time: {text!r}", source=source, line=line, field=field)
    scaled = value * TICKS_PER_SECOND
    if scaled != scaled.to_integral_value():
        raise FormatError(
            f"time {text!r} has more than {MAX_FRACTION_DIGITS} fractional digits",
            source=source, line=line, field=field,
        )
    return int(scaled)


def ticks_to_seconds(ticks: int) -> str:
    """Render ticks as seconds with the fewest decimals that are exact."""
    whole, frac = divmod(int(ticks), TICKS_PER_SECOND)
    if frac == 0:
        return str(whole)
    return f"{whole}.{frac:03d}".rstrip("0")


class Interval(NamedTuple):
    onset: int
    offset: int

    @property
    def duration(self) -> int:
        return self.offset - self.onset

    def __str__(self):
        return f"[{ticks_to_seconds(self.onset)}, {ticks_to_seconds(self.offset)})"


@dataclass(frozen=True)
class LabeledSegment:
    """A labelled half-open span, e.g. a speaker turn or an utterance."""

    label: str
    onset: int
    offset: int

    @property
    def interval(self) -> Interval:
        return Interval(self.onset, self.offset)

    @property
    def duration(self) -> int:
        return self.offset - self.onset


class Timeline:
    """Immutable canonical set of half-open integer intervals.

    Build one with :func:`normalize` (or ``Timeline(raw)``, which normalizes);
    combine with ``|``, ``&`` and ``-``.
    """

    __slots__ = ("_ivs",)

    def __init__(self, raw: Iterable = ()):
        self._ivs = _normalize(raw)

    @classmethod
    def _trusted(cls, ivs: tuple) -> "Timeline":
        tl = object.__new__(cls)
        tl._ivs = ivs
        return tl

    @property
    def intervals(self) -> tuple:
        return self._ivs

    def __iter__(self):
        return iter(self._ivs)

    def __len__(self):
        return len(self._ivs)

    def __bool__(self):
        return bool(self._ivs)

    def __eq__(self, other):
        if isinstance(other, Timeline):
            return self._ivs == other._ivs
        return NotImplemented

    def __hash__(self):
        return hash(self._ivs)

    def __repr__(self):
        return f"Timeline({[tuple(iv) for iv in self._ivs]!r})"

    def __or__(self, other):
        return union(self, other)

    def __and__(self, other):
        return intersect(self, other)

    def __sub__(self, other):
        return subtract(self, other)

    @property
    def duration(self) -> int:
        return sum(b - a for a, b in self._ivs)

    @property
    def extent(self) -> Interval | None:
        if not self._ivs:
            return None
        return Interval(self._ivs[0].onset, self._ivs[-1].offset)

    def covers(self, other: "Timeline") -> bool:
        return not (other - self)

    def clip(self, onset: int, offset: int) -> "Timeline":
        return intersect(self, Timeline._trusted((Interval(onset, offset),) if onset < offset else ()))


def _normalize(raw) -> tuple:
    if isinstance(raw, Timeline):
        return raw._ivs
    ivs = []
    for item in raw:
        if isinstance(item, LabeledSegment):
            a, b = item.onset, item.offset
        else:
            a, b = item
        if a > b:
            raise FormatError(f"reversed interval [{a}, {b}): onset after offset")
        if a < 0:
            raise FormatError(f"interval [{a}, {b}) starts before time zero")
        if a < b:
            ivs.append((int(a), int(b)))
    ivs.sort()
    out = []
    for a, b in ivs:
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return tuple(Interval(a, b) for a, b in out)


def normalize(raw: Iterable) -> Timeline:
    """Canonical timeline covering exactly the union of ``raw`` intervals."""
    return Timeline(raw)


def _combine(a: Timeline, b: Timeline, keep) -> Timeline:
    # Boundary sweep; membership is evaluated once per distinct coordinate.
    events = []
    for iv in a._ivs:
        events.append((iv.onset, 0, 1))
        events.append((iv.offset, 0, -1))
    for iv in b._ivs:
        events.append((iv.onset, 1, 1))
        events.append((iv.offset, 1, -1))
    events.sort()
    depth = [0, 0]
    out = []
    start = None
    i, n = 0, len(events)
    while i < n:
        t = events[i][0]
        while i < n and events[i][0] == t:
            depth[events[i][1]] += events[i][2]
            i += 1
        inside = keep(depth[0] > 0, depth[1] > 0)
        if inside and start is None:
            start = t
        elif not inside and start is not None:
            out.append(Interval(start, t))
            start = None
    return Timeline._trusted(tuple(out))


def union(a: Timeline, b: Timeline) -> Timeline:
    if not b:
        return a
    if not a:
        return b
    return _combine(a, b, lambda x, y: x or y)


def intersect(a: Timeline, b: Timeline) -> Timeline:
    if not a or not b:
        return Timeline._trusted(())
    return _combine(a, b, lambda x, y: x and y)


def subtract(a: Timeline, b: Timeline) -> Timeline:
    if not a or not b:
        return a
    return _combine(a, b, lambda x, y: x and not y)


def union_all(timelines: Iterable[Timeline]) -> Timeline:
    return Timeline(iv for tl in timelines for iv in tl)


def duration(a: Timeline) -> int:
    return a.duration


def merge_gap(segments: Iterable[LabeledSegment], max_gap: int) -> list[LabeledSegment]:
    """Join same-label segments separated by at most ``max_gap`` ticks.

    Each label is processed independently; overlapping same-label segments
    are joined as well.  The result is sorted by ``(onset, label)``.
    """
    if max_gap < 0:
        raise ValueError("max_gap must be non-negative")
    by_label: dict[str, list] = {}
    for seg in segments:
        by_label.setdefault(seg.label, []).append((seg.onset, seg.offset))
    merged = []
    for label, spans in by_label.items():
        spans.sort()
        cur_on, cur_off = spans[0]
        for on, off in spans[1:]:
            if on - cur_off <= max_gap:
                cur_off = max(cur_off, off)
            else:
                merged.append(LabeledSegment(label, cur_on, cur_off))
                cur_on, cur_off = on, off
        merged.append(LabeledSegment(label, cur_on, cur_off))
    merged.sort(key=lambda s: (s.onset, s.label, s.offset))
    return merged


def label_timelines(segments: Iterable[LabeledSegment]) -> dict[str, Timeline]:
    """Group segments by label into one timeline per label."""
    spans: dict[str, list] = {}
    for seg in segments:
        spans.setdefault(seg.label, []).append((seg.onset, seg.offset))
    return {label: Timeline(ivs) for label, ivs in spans.items()}


def coverage_at_least(timelines: Iterable[Timeline], k: int) -> Timeline:
    """Points covered by at least ``k`` of the given timelines."""
    events = []
    for tl in timelines:
        for iv in tl:
            events.append((iv.onset, 1))
            events.append((iv.offset, -1))
    events.sort()
    out = []
    depth = 0
    start = None
    i, n = 0, len(events)
    while i < n:
        t = events[i][0]
        while i < n and events[i][0] == t:
            depth += events[i][1]
            i += 1
        if depth >= k and start is None:
            start = t
        elif depth < k and start is not None:
            out.append(Interval(start, t))
            start = None
    return Timeline._trusted(tuple(out))


def boundary_collars(segments: Iterable, width: int, lower: int = 0, upper: int | None = None) -> Timeline:
    """``[b - width, b + width)`` around every onset and offset, clipped."""
    raw = []
    for seg in segments:
        if isinstance(seg, LabeledSegment):
            bounds = (seg.onset, seg.offset)
        else:
            bounds = tuple(seg)
        for b in bounds:
            lo = max(lower, b - width)
            hi = b + width if upper is None else min(upper, b + width)
            if lo < hi:
                raw.append((lo, hi))
    return Timeline(raw)
