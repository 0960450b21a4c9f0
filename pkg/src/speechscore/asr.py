"""Word error rate by minimum edit-distance alignment.

Reference ``[unk]`` tokens are optionally deletable: dropping one costs
nothing and aligning anything to one counts as correct, but they still count
in the reference length.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .timeline import ticks_to_seconds

UNK = "[unk]"
_STRIP = '.,?!;:"()'

CORRECT = "C"
SUBSTITUTION = "S"
DELETION = "D"
INSERTION = "I"
OPTIONAL_SKIP = "O"  # unscored deletion of an optionally deletable token


@dataclass(frozen=True)
class Token:
    text: str
    optional_delete: bool = False


def tokenize(words: str) -> tuple[Token, ...]:
    out = []
    for raw in words.split():
        text = raw.casefold().strip(_STRIP)
        if not text:
            continue
        out.append(Token(text, text == UNK))
    return tuple(out)


def _as_tokens(seq):
    if isinstance(seq, str):
        return tokenize(seq)
    return tuple(t if isinstance(t, Token) else Token(str(t)) for t in seq)


@dataclass(frozen=True)
class AsrScore:
    n_del: int = 0
    n_ins: int = 0
    n_subst: int = 0
    n_ref: int = 0

    @property
    def errors(self) -> int:
        return self.n_del + self.n_ins + self.n_subst

    @property
    def wer(self) -> Fraction | None:
        return Fraction(self.errors, self.n_ref) if self.n_ref else None

    def __add__(self, other):
        return AsrScore(self.n_del + other.n_del, self.n_ins + other.n_ins,
                        self.n_subst + other.n_subst, self.n_ref + other.n_ref)


@dataclass(frozen=True)
class Alignment:
    ops: tuple  # (op, ref_text | None, hyp_text | None)
    score: AsrScore


def edit_cost_matrix(ref, hyp) -> np.ndarray:
    """Full DP table of minimal alignment cost, shape ``(len(ref)+1, len(hyp)+1)``."""
    n, m = len(ref), len(hyp)
    vocab = {}
    hyp_ids = np.array([vocab.setdefault(t.text, len(vocab)) for t in hyp], dtype=np.int64)
    cols = np.arange(m + 1, dtype=np.int64)
    table = np.empty((n + 1, m + 1), dtype=np.int64)
    table[0] = cols
    for i, tok in enumerate(ref, start=1):
        prev = table[i - 1]
        del_cost = 0 if tok.optional_delete else 1
        if tok.optional_delete:
            sub = np.zeros(m, dtype=np.int64)
        else:
            sub = (hyp_ids != vocab.get(tok.text, -1)).astype(np.int64)
        cand = np.empty(m + 1, dtype=np.int64)
        cand[0] = prev[0] + del_cost
        cand[1:] = np.minimum(prev[:-1] + sub, prev[1:] + del_cost)
        # Insertions: row[j] = min_k<=j cand[k] + (j - k).
        table[i] = np.minimum.accumulate(cand - cols) + cols
    return table


def align(ref, hyp) -> Alignment:
    """Minimum-cost alignment; backtrace prefers correct, substitution, deletion, insertion."""
    ref, hyp = _as_tokens(ref), _as_tokens(hyp)
    table = edit_cost_matrix(ref, hyp)
    i, j = len(ref), len(hyp)
    ops = []
    n_del = n_ins = n_sub = 0
    while i > 0 or j > 0:
        cur = table[i, j]
        if i > 0 and j > 0:
            r, h = ref[i - 1], hyp[j - 1]
            match = r.optional_delete or r.text == h.text
            if match and cur == table[i - 1, j - 1]:
                ops.append((CORRECT, r.text, h.text))
                i, j = i - 1, j - 1
                continue
            if not match and cur == table[i - 1, j - 1] + 1:
                ops.append((SUBSTITUTION, r.text, h.text))
                n_sub += 1
                i, j = i - 1, j - 1
                continue
        if i > 0:
            r = ref[i - 1]
            del_cost = 0 if r.optional_delete else 1
            if cur == table[i - 1, j] + del_cost:
                if r.optional_delete:
                    ops.append((OPTIONAL_SKIP, r.text, None))
                else:
                    ops.append((DELETION, r.text, None))
                    n_del += 1
                i -= 1
                continue
        ops.append((INSERTION, None, hyp[j - 1].text))
        n_ins += 1
        j -= 1
    ops.reverse()
    return Alignment(tuple(ops), AsrScore(n_del, n_ins, n_sub, len(ref)))


@dataclass(frozen=True)
class SegmentResult:
    segment: str
    score: AsrScore
    ops: tuple = ()


@dataclass
class CorpusResult:
    score: AsrScore = field(default_factory=AsrScore)
    segments: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # all-[unk] references
    empty: list = field(default_factory=list)  # references without tokens
    unscored_extras: list = field(default_factory=list)


def is_unscorable(tokens) -> bool:
    return bool(tokens) and all(t.optional_delete for t in tokens)


def score_corpus(pairs, result: CorpusResult | None = None) -> CorpusResult:
    """Pool counts over ``(segment_name, ref_words, hyp_words)`` triples."""
    result = result or CorpusResult()
    total = result.score
    for name, ref_words, hyp_words in pairs:
        ref, hyp = _as_tokens(ref_words), _as_tokens(hyp_words)
        if is_unscorable(ref):
            result.skipped.append(name)
            if hyp:
                result.unscored_extras.append(name)
            continue
        if not ref:
            result.empty.append(name)
            if hyp:
                result.unscored_extras.append(name)
            continue
        al = align(ref, hyp)
        total = total + al.score
        result.segments.append(SegmentResult(name, al.score, al.ops))
    result.score = total
    return result


def pair_utterances(reference, hypothesis, file_id=""):
    """Match hypothesis utterances to scorable references by maximal time overlap.

    Returns ``(triples, extras)`` where triples feed :func:`score_corpus` and
    extras lists hypothesis utterances overlapping no scorable reference.
    Hypotheses tie-break toward the earlier reference.
    """
    refs = sorted(reference, key=lambda u: (u.start, u.end, u.speaker_id))
    scorable = [k for k, u in enumerate(refs) if not is_unscorable(tokenize(u.words))]
    assigned = {k: [] for k in range(len(refs))}
    extras = []
    for h in sorted(hypothesis, key=lambda u: (u.start, u.end)):
        best, best_ov = None, 0
        for k in scorable:
            r = refs[k]
            ov = min(r.end, h.end) - max(r.start, h.start)
            if ov > best_ov:
                best, best_ov = k, ov
        if best is None:
            extras.append(h)
        else:
            assigned[best].append(h)
    triples = []
    for k, r in enumerate(refs):
        hyp_words = " ".join(h.words for h in assigned[k])
        name = f"{file_id}:{ticks_to_seconds(r.start)}-{ticks_to_seconds(r.end)}"
        triples.append((name, r.words, hyp_words))
    return triples, extras
