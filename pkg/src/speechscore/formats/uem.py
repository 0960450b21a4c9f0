"""UEM scoring-region files: ``file_id channel onset offset`` per line."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import FormatError, OverlapError
from ..timeline import Interval, Timeline, seconds_to_ticks, ticks_to_seconds
from ._lines import iter_lines


@dataclass(frozen=True)
class UemRegion:
    file_id: str
    channel_id: int
    onset: int
    offset: int

    @property
    def interval(self) -> Interval:
        return Interval(self.onset, self.offset)


def parse_uem(text, *, source=None):
    regions = []
    lines = []
    for lineno, line in iter_lines(text):
        tokens = line.split()
        if len(tokens) != 4:
            raise FormatError(f"expected 4 space-delimited fields, found {len(tokens)}",
                              source=source, line=lineno)
        try:
            channel = int(tokens[1])
        except ValueError:
            raise FormatError(f"channel is not an integer: {tokens[1]!r}",
                              source=source, line=lineno, field="channel") from None
        onset = seconds_to_ticks(tokens[2], source=source, line=lineno, field="onset")
        offset = seconds_to_ticks(tokens[3], source=source, line=lineno, field="offset")
        if onset >= offset:
            raise FormatError(
                f"reversed or empty region: onset {tokens[2]} is not before offset {tokens[3]}",
                source=source, line=lineno, field="offset",
            )
        regions.append(UemRegion(tokens[0], channel, onset, offset))
        lines.append(lineno)

    order = sorted(range(len(regions)), key=lambda i: (regions[i].file_id, regions[i].onset))
    for prev, cur in zip(order, order[1:]):
        a, b = regions[prev], regions[cur]
        if a.file_id == b.file_id and b.onset < a.offset:
            raise OverlapError(
                f"regions overlap in {a.file_id}: lines {lines[prev]} and {lines[cur]}",
                source=source, line=lines[cur], other_line=lines[prev],
            )
    return regions


def serialize_uem(regions) -> str:
    return "".join(
        f"{r.file_id} {r.channel_id} {ticks_to_seconds(r.onset)} {ticks_to_seconds(r.offset)}\n"
        for r in regions
    )


def uem_timelines(regions) -> dict[str, Timeline]:
    spans: dict[str, list] = {}
    for r in regions:
        spans.setdefault(r.file_id, []).append((r.onset, r.offset))
    return {fid: Timeline(ivs) for fid, ivs in spans.items()}
