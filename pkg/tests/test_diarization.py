import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import assignment_oracle, der_oracle
from speechscore.diarization import (
    map_speakers,
    optimal_assignment,
    pooled,
    prepare_reference,
    score_der,
)
from speechscore.timeline import Interval, LabeledSegment, Timeline


def seg(label, a, b):
    return LabeledSegment(label, a, b)


def pairs(tl):
    return [tuple(iv) for iv in tl]


REF = [seg("A", 0, 10_000), seg("B", 10_000, 20_000)]
SYS = [seg("1", 0, 12_000), seg("2", 12_000, 20_000)]


class TestPrepare:
    def test_merges_short_gap_before_collars(self):
        ref = prepare_reference([seg("A", 0, 5_000), seg("A", 5_800, 8_000)], collar=250)
        assert ref.turns == (seg("A", 0, 8_000),)
        assert pairs(ref.excluded) == [(0, 250), (7_750, 8_250)]

    def test_reference_overlap_excluded(self):
        ref = prepare_reference([seg("A", 0, 5_000), seg("B", 4_000, 6_000)], collar=0)
        assert pairs(ref.excluded) == [(4_000, 5_000)]
        assert not ref.scoring_regions & Timeline([(4_000, 5_000)])

    def test_unk_removed_and_excluded(self):
        ref = prepare_reference([seg("A", 0, 5_000), seg("UNK", 10_000, 12_000)], collar=0)
        assert "UNK" not in ref.speakers
        assert pairs(ref.excluded) == [(10_000, 12_000)]

    def test_uem_restricts_scoring(self):
        ref = prepare_reference(REF, uem=[Interval(5_000, 15_000)], collar=0)
        assert pairs(ref.scoring_regions) == [(5_000, 15_000)]
        assert (0, 5_000) in pairs(ref.excluded)

    def test_empty_is_flagged(self):
        ref = prepare_reference([seg("UNK", 0, 1_000)])
        assert ref.flags
        assert score_der(ref, SYS).der is None


class TestMapping:
    def test_documented_matrix(self):
        assert optimal_assignment([[10, 0], [2, 8]]) == {0: 0, 1: 1}

    def test_swapped_labels(self):
        ref = prepare_reference(REF, collar=0)
        swapped = [seg("2", 0, 12_000), seg("1", 12_000, 20_000)]
        m = map_speakers(ref, swapped)
        assert m.pairs == {"A": "2", "B": "1"}
        assert m.mapped_overlap == map_speakers(ref, SYS).mapped_overlap

    def test_disjoint_system_maps_nothing(self):
        ref = prepare_reference(REF, collar=0)
        assert map_speakers(ref, [seg("1", 30_000, 40_000)]).pairs == {}

    def test_tie_break_is_lexicographic(self):
        assert optimal_assignment([[5, 5], [5, 5]]) == {0: 0, 1: 1}
        assert optimal_assignment([[0, 3, 3], [3, 0, 0]]) == {0: 1, 1: 0}

    @settings(max_examples=150)
    @given(st.integers(1, 6).flatmap(lambda r: st.integers(1, 6).flatmap(
        lambda c: st.lists(st.lists(st.integers(0, 4), min_size=c, max_size=c), min_size=r, max_size=r))))
    def test_matches_exhaustive_search(self, matrix):
        total, expected = assignment_oracle(matrix)
        got = optimal_assignment(matrix)
        assert sum(matrix[r][c] for r, c in got.items()) == total
        assert got == expected


class TestDer:
    def test_no_collar(self):
        s = score_der(prepare_reference(REF, collar=0), SYS)
        assert (s.error, s.miss, s.fa, s.total) == (2_000, 0, 0, 20_000)
        assert s.der == Fraction(1, 10)

    def test_quarter_second_collar(self):
        ref = prepare_reference(REF, collar=250)
        assert pairs(ref.excluded) == [(0, 250), (9_750, 10_250), (19_750, 20_250)]
        s = score_der(ref, SYS)
        assert (s.error, s.total) == (1_750, 19_000)
        assert s.der == Fraction(7, 76)
        assert round(float(s.der), 6) == 0.092105

    def test_perfect(self):
        ref = prepare_reference(REF)
        assert score_der(ref, REF).der == 0

    def test_system_overlap_counts_as_false_alarm(self):
        ref = prepare_reference([seg("A", 0, 10_000)], collar=0)
        s = score_der(ref, [seg("1", 0, 10_000), seg("2", 0, 4_000)])
        assert (s.fa, s.error, s.miss) == (4_000, 0, 0)

    def test_pooled(self):
        a = score_der(prepare_reference(REF, collar=0), SYS)
        p = pooled([a, a])
        assert p.der == Fraction(1, 10)
        assert p.total == 40_000


def _random_turns(rng, horizon, labels, count):
    out = []
    for _ in range(count):
        a = rng.randrange(0, horizon - 100)
        b = min(horizon, a + rng.randint(100, 20_000))
        out.append((rng.choice(labels), a, b))
    return out


def _fixture(rng):
    horizon = rng.randint(2_000, 120_000)
    n_ref = rng.randint(1, 6)
    ref = _random_turns(rng, horizon, [f"R{i}" for i in range(n_ref)] + ["UNK"] * (rng.random() < 0.3),
                        rng.randint(1, 12))
    system = _random_turns(rng, horizon, [f"s{i}" for i in range(rng.randint(1, 6))], rng.randint(0, 12))
    uem = None
    if rng.random() < 0.4:
        a = rng.randrange(0, horizon // 2)
        uem = [(a, rng.randint(a + 1, horizon))]
    collar = rng.choice([0, 250])
    return ref, system, uem, collar


def _score(ref, system, uem, collar):
    prepared = prepare_reference([seg(*t) for t in ref],
                                 uem=[Interval(*u) for u in uem] if uem else None, collar=collar)
    return score_der(prepared, [seg(*t) for t in system])


@pytest.mark.parametrize("seed", range(30))
def test_matches_tick_oracle(seed):
    ref, system, uem, collar = _fixture(random.Random(seed))
    s = _score(ref, system, uem, collar)
    assert (s.fa, s.miss, s.error, s.total) == der_oracle(ref, system, uem, collar)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.randoms())
def test_invariant_under_system_relabeling(seed, rnd):
    ref, system, uem, collar = _fixture(random.Random(seed))
    labels = sorted({s for s, _, _ in system})
    shuffled = labels[:]
    rnd.shuffle(shuffled)
    rename = dict(zip(labels, shuffled))
    a = _score(ref, system, uem, collar)
    b = _score(ref, [(rename[s], x, y) for s, x, y in system], uem, collar)
    assert (a.fa, a.miss, a.error, a.total) == (b.fa, b.miss, b.error, b.total)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_turns_inside_excluded_time_change_nothing(seed):
    rng = random.Random(seed)
    ref, system, uem, collar = _fixture(rng)
    prepared = prepare_reference([seg(*t) for t in ref],
                                 uem=[Interval(*u) for u in uem] if uem else None, collar=collar)
    sys_turns = [seg(*t) for t in system]
    base = score_der(prepared, sys_turns)
    for iv in prepared.excluded:
        extra = sys_turns + [seg(rng.choice(["s0", "new"]), iv.onset, iv.offset)]
        s = score_der(prepared, extra)
        assert (s.fa, s.miss, s.error, s.total) == (base.fa, base.miss, base.error, base.total)
