"""Seeded synthetic reference / system bundles for end-to-end checks.

Randomness comes only from :meth:`random.Random.random` (MT19937, whose
output for an integer seed is fixed across Python versions and platforms).
Every distribution below is built from those uniforms with plain float
addition and multiplication, and no libm calls, so a given seed yields
byte-identical files everywhere.  Normals use the Irwin-Hall sum of twelve
uniforms.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .formats.rttm import RttmTurn, serialize_rttm
from .formats.sad import REFERENCE, SYSTEM, records_from_timeline, serialize_sad
from .formats.sid import SidPrediction, dev_segment_name, serialize_sid_key, serialize_sid_output
from .formats.transcript import POLARITIES, Sentiment, TranscriptUtterance, serialize_transcript
from .formats.uem import UemRegion, serialize_uem
from .timeline import Interval, Timeline, ticks_to_seconds

MIN_SPAN = 30 * 60 * 1000
MAX_SPAN = 33 * 60 * 1000
MIN_TURN = 0.4
MAX_TURN = 50.0
# Pauses of at least 0.35 s keep same-speaker gaps above the 1 s merge window.
MIN_PAUSE = 0.35
WORDS_PER_SECOND = 2.5
CHUNK = 1000
SID_MEAN, SID_STD, SID_MIN, SID_MAX = 5.35, 2.5, 2.2, 15.0


@dataclass(frozen=True)
class ChannelPreset:
    n_speakers: int
    turn_mean: float
    turn_std: float
    snr_mean: float
    snr_std: float


PRESETS = {
    "EECOM": ChannelPreset(16, 23.04, 6.72, 13.32, 7.40),
    "FD": ChannelPreset(11, 28.74, 6.08, 14.67, 10.51),
    "GNC": ChannelPreset(21, 25.18, 5.58, 14.91, 11.96),
    "MOCR": ChannelPreset(13, 22.36, 5.65, 5.07, 12.60),
    "NTWK": ChannelPreset(24, 17.12, 4.97, 10.68, 11.17),
}

AUDIO_METADATA = {"format": "WAV", "encoding": "16-bit PCM", "channels": 1, "sample_rate_hz": 8000}


@dataclass(frozen=True)
class PlantedRates:
    p_miss: float = 0.0
    p_fa: float = 0.0
    speaker_confusion: float = 0.0
    wer_target: float = 0.0
    sentiment_flip: float = 0.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"planted rate {name}={value} outside [0, 1]")


@dataclass(frozen=True)
class FixtureSpec:
    seed: int
    n_speakers: int = 8
    turn_dur_mean: float = 20.0
    turn_dur_std: float = 6.0
    file_span: Interval | None = None
    channel_preset: str | None = None
    pause_mean: float = 3.0
    n_sid_trials: int = 40
    file_id: str = "FS_P01_dev_001"
    planted: PlantedRates = field(default_factory=PlantedRates)

    def __post_init__(self):
        if self.n_speakers < 1:
            raise ValueError("n_speakers must be positive")
        if self.turn_dur_mean <= 0 or self.turn_dur_std < 0 or self.pause_mean <= MIN_PAUSE:
            raise ValueError("turn and pause statistics must be positive "
                             f"(pause_mean above {MIN_PAUSE} s)")
        if self.channel_preset is not None and self.channel_preset not in PRESETS:
            raise ValueError(f"unknown channel preset {self.channel_preset!r}")

    @classmethod
    def from_preset(cls, preset: str, seed: int, **overrides) -> "FixtureSpec":
        p = PRESETS[preset]
        kw = dict(n_speakers=p.n_speakers, turn_dur_mean=p.turn_mean,
                  turn_dur_std=p.turn_std, channel_preset=preset)
        kw.update(overrides)
        return cls(seed=seed, **kw)


class FixtureRng:
    """Portable random stream; see the module docstring."""

    def __init__(self, seed: int):
        self._r = random.Random(int(seed) & 0xFFFFFFFFFFFFFFFF)

    def uniform(self, lo=0.0, hi=1.0) -> float:
        return lo + (hi - lo) * self._r.random()

    def below(self, n: int) -> int:
        return min(int(self._r.random() * n), n - 1)

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def bernoulli(self, p: float) -> bool:
        return self._r.random() < p

    def normal(self, mean=0.0, std=1.0) -> float:
        s = 0.0
        for _ in range(12):
            s += self._r.random()
        return mean + std * (s - 6.0)

    def truncated_normal(self, mean, std, lo, hi) -> float:
        for _ in range(1000):
            x = self.normal(mean, std)
            if lo <= x <= hi:
                return x
        return min(max(mean, lo), hi)

    def shuffled(self, seq) -> list:
        out = list(seq)
        for i in range(len(out) - 1, 0, -1):
            j = self.below(i + 1)
            out[i], out[j] = out[j], out[i]
        return out


def _ticks(seconds: float) -> int:
    return int(seconds * 1000 + 0.5)


def _vocabulary(size=2000):
    onsets = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "ch", "sh"]
    vowels = ["a", "e", "i", "o", "u", "ai", "ou"]
    codas = ["", "n", "r", "s", "t", "k"]
    words = []
    for o1 in onsets:
        for v1 in vowels:
            for c in codas:
                for o2 in ("", "m", "t"):
                    words.append(o1 + v1 + c + (o2 + "o" if o2 else ""))
    return words[:size]


VOCAB = _vocabulary()


@dataclass
class Bundle:
    spec: FixtureSpec
    file_id: str
    span: Interval
    speakers: list
    turns: list
    uem: list
    sad: list
    transcript: list
    sid_key: dict
    sid_durations: dict

    @property
    def speech(self) -> Timeline:
        return Timeline((t.onset, t.offset) for t in self.turns)


@dataclass
class SystemOutputs:
    sad: list
    rttm: list
    asr: list
    sentiment: list
    sid: list


def gen_reference(spec: FixtureSpec, sid_tag: str = "") -> Bundle:
    rng = FixtureRng(spec.seed)
    if spec.file_span is None:
        span = Interval(0, MIN_SPAN + rng.below(MAX_SPAN - MIN_SPAN + 1))
    else:
        span = Interval(*spec.file_span)
    span_s = span.duration / 1000
    if spec.n_speakers * max(spec.turn_dur_mean, MIN_TURN) > span_s:
        raise ValueError(
            f"cannot pack {spec.n_speakers} speakers with {spec.turn_dur_mean} s turns "
            f"into {span_s} s")

    prefix = spec.channel_preset or "SPK"
    speakers = [f"{prefix}{k + 1}" for k in range(spec.n_speakers)]
    intro = rng.shuffled(speakers)

    # A lone speaker talks to itself: keep its pauses outside the merge window.
    min_pause = MIN_PAUSE if spec.n_speakers > 1 else max(MIN_PAUSE, 1.1)
    max_pause = max(2 * spec.pause_mean - min_pause, min_pause)
    turns, transcript = [], []
    cursor = span.onset / 1000 + rng.uniform(min_pause, max_pause)
    prev = None
    while True:
        dur = rng.truncated_normal(spec.turn_dur_mean, spec.turn_dur_std, MIN_TURN, MAX_TURN)
        onset, offset = _ticks(cursor), _ticks(cursor + dur)
        if offset > span.offset:
            break
        if len(turns) < len(intro):
            speaker = intro[len(turns)]
        else:
            speaker = prev
            while speaker == prev and len(speakers) > 1:
                speaker = rng.choice(speakers)
        n_words = max(1, int(dur * WORDS_PER_SECOND * rng.uniform(0.8, 1.2)))
        words = " ".join(rng.choice(VOCAB) for _ in range(n_words))
        u = rng.uniform()
        sentiment = Sentiment.NEUTRAL if u < 0.6 else (Sentiment.POSITIVE if u < 0.8 else Sentiment.NEGATIVE)
        turns.append(RttmTurn(spec.file_id, onset, offset - onset, speaker))
        transcript.append(TranscriptUtterance(speaker, words, sentiment, onset, offset))
        prev = speaker
        cursor += dur + rng.uniform(min_pause, max_pause)
    if len({t.speaker_name for t in turns}) < spec.n_speakers:
        raise ValueError(f"only {len(turns)} turns fit in {span_s} s; "
                           f"{spec.n_speakers} speakers requested")

    speech = Timeline((t.onset, t.offset) for t in turns)
    sad = records_from_timeline(speech, span.offset, file_id="X")
    uem = [UemRegion(spec.file_id, 1, span.onset, span.offset)]

    sid_key, sid_durations = {}, {}
    counters = {}
    for _ in range(spec.n_sid_trials):
        spk = rng.choice(speakers)
        counters[spk] = counters.get(spk, 0) + 1
        seg = dev_segment_name(spk, f"{sid_tag}{counters[spk]:03d}")
        sid_key[seg] = spk
        sid_durations[seg] = _ticks(rng.truncated_normal(SID_MEAN, SID_STD, SID_MIN, SID_MAX))
    return Bundle(spec, spec.file_id, span, speakers, turns, uem, sad, transcript,
                  sid_key, sid_durations)


def _chunks(iv, size=CHUNK):
    a = iv[0]
    while a < iv[1]:
        b = min(a + size, iv[1])
        yield (a, b)
        a = b


def perturb_system(bundle: Bundle, planted: PlantedRates | None = None, seed: int | None = None) -> SystemOutputs:
    """Corrupt the reference at the planted rates to make system outputs."""
    planted = planted if planted is not None else bundle.spec.planted
    if not isinstance(planted, PlantedRates):
        planted = PlantedRates(**planted)
    rng = FixtureRng(bundle.spec.seed ^ 0x5DEECE66D if seed is None else seed)
    speech = bundle.speech
    span = bundle.span

    # Speech: drop 1 s chunks at p_miss.  Non-speech: add 1 s chunks at p_fa.
    kept_by_turn = []
    for t in bundle.turns:
        kept_by_turn.append([c for c in _chunks((t.onset, t.offset)) if not rng.bernoulli(planted.p_miss)])
    nonspeech = Timeline([span]) - speech
    false_alarms = [c for iv in nonspeech for c in _chunks(iv) if rng.bernoulli(planted.p_fa)]
    sys_speech = Timeline([c for kept in kept_by_turn for c in kept] + false_alarms)
    confidences = []
    for iv in sys_speech:
        real = bool(Timeline([iv]) & speech)
        u = rng.uniform(0.5, 1.0) if real else rng.uniform(0.0, 0.5)
        confidences.append(int(u * 1_000_000) / 1_000_000)
    sad = records_from_timeline(sys_speech, span.offset, file_id="X", confidences=confidences)

    names = [f"spk{k + 1:02d}" for k in range(len(bundle.speakers))]
    relabel = dict(zip(bundle.speakers, rng.shuffled(names)))
    rttm = []
    for t, kept in zip(bundle.turns, kept_by_turn):
        label = relabel[t.speaker_name]
        if len(names) > 1 and rng.bernoulli(planted.speaker_confusion):
            while label == relabel[t.speaker_name]:
                label = rng.choice(names)
        for a, b in Timeline(kept):
            rttm.append(RttmTurn(bundle.file_id, a, b - a, label))
    for a, b in false_alarms:
        rttm.append(RttmTurn(bundle.file_id, a, b - a, rng.choice(names)))
    rttm.sort(key=lambda t: (t.onset, t.speaker_name))

    asr, senti = [], []
    third = planted.wer_target / 3
    for u in bundle.transcript:
        out_words = []
        for w in u.words.split():
            x = rng.uniform()
            if x < third:
                out_words.append(_other_word(rng, w))
            elif x < 2 * third:
                continue
            elif x < 3 * third:
                out_words.append(w)
                out_words.append(rng.choice(VOCAB))
            else:
                out_words.append(w)
        asr.append(TranscriptUtterance(u.speaker_id, " ".join(out_words), None, u.start, u.end))
        pol = u.sentiment
        if pol is not None and rng.bernoulli(planted.sentiment_flip):
            others = [p for p in POLARITIES if p is not pol]
            pol = rng.choice(others)
        senti.append(replace(u, sentiment=pol))

    pool = list(bundle.speakers)
    k = 0
    while len(pool) < 6:
        k += 1
        pool.append(f"OTHER{k}")
    sid = []
    for seg, true in bundle.sid_key.items():
        distractors = rng.shuffled([s for s in pool if s != true])
        if rng.bernoulli(planted.speaker_confusion):
            preds = distractors[:5]
        else:
            preds = distractors[:4]
            preds.insert(rng.below(5), true)
        sid.append(SidPrediction(seg, tuple(preds)))
    return SystemOutputs(sad, rttm, asr, senti, sid)


def _other_word(rng, word):
    while True:
        w = rng.choice(VOCAB)
        if w != word:
            return w


def derive_seed(seed: int, index: int) -> int:
    return (int(seed) * 1_000_003 + index) & 0xFFFFFFFFFFFFFFFF


def generate_dev_set(n_files: int, seed: int, preset: str | None = None,
                     planted: PlantedRates | None = None, **spec_overrides):
    """``n_files`` bundles; without a preset the five channel presets rotate."""
    planted = planted or PlantedRates()
    names = list(PRESETS)
    out = []
    for i in range(n_files):
        name = preset or names[i % len(names)]
        fid = f"FS_P01_dev_{i + 1:03d}"
        spec = FixtureSpec.from_preset(name, derive_seed(seed, i), file_id=fid,
                                       planted=planted, **spec_overrides)
        bundle = gen_reference(spec, sid_tag=f"{i + 1:03d}")
        out.append((bundle, perturb_system(bundle)))
    return out


def difficulty_tier(preset: str | None) -> str:
    if preset is None:
        return "unspecified"
    snr = PRESETS[preset].snr_mean
    if snr >= 14.0:
        return "clean"
    if snr >= 10.0:
        return "moderate"
    return "degraded"


def write_dev_set(pairs, out_dir, seed=None) -> Path:
    """Write bundles and system outputs under ``out_dir/ref`` and ``out_dir/sys``."""
    out = Path(out_dir)
    dirs = {name: out / name for name in (
        "ref/sad", "ref/sd", "ref/uem", "ref/transcripts", "ref/sid",
        "sys/sad", "sys/sd", "sys/asr", "sys/sentiment", "sys/sid")}
    for d in dirs.values():
        d.mkdir(parents=True, exist_ok=True)
    key, durations, preds, files = {}, {}, [], []
    for bundle, system in pairs:
        fid = bundle.file_id
        _write(dirs["ref/sad"] / f"{fid}.txt", serialize_sad(bundle.sad, REFERENCE))
        _write(dirs["ref/sd"] / f"{fid}.rttm", serialize_rttm(bundle.turns))
        _write(dirs["ref/uem"] / f"{fid}.uem", serialize_uem(bundle.uem))
        _write(dirs["ref/transcripts"] / f"{fid}.json", serialize_transcript(bundle.transcript))
        _write(dirs["sys/sad"] / f"{fid}.txt", serialize_sad(system.sad, SYSTEM))
        _write(dirs["sys/sd"] / f"{fid}.rttm", serialize_rttm(system.rttm))
        _write(dirs["sys/asr"] / f"{fid}.json", serialize_transcript(system.asr))
        _write(dirs["sys/sentiment"] / f"{fid}.json", serialize_transcript(system.sentiment))
        key.update(bundle.sid_key)
        durations.update(bundle.sid_durations)
        preds.extend(system.sid)
        spec = bundle.spec
        files.append({
            "file_id": fid,
            "seed": spec.seed,
            "preset": spec.channel_preset,
            "difficulty": difficulty_tier(spec.channel_preset),
            "span": [ticks_to_seconds(bundle.span.onset), ticks_to_seconds(bundle.span.offset)],
            "speakers": len(bundle.speakers),
            "turns": len(bundle.turns),
            "speech_seconds": ticks_to_seconds(bundle.speech.duration),
            "planted": asdict(spec.planted),
            "audio": AUDIO_METADATA,
        })
    _write(dirs["ref/sid"] / "key.txt", serialize_sid_key(key))
    _write(dirs["sys/sid"] / "predictions.txt", serialize_sid_output(preds))
    manifest = {
        "seed": seed,
        "files": files,
        "sid": {"trials": len(key),
                "durations": {k: ticks_to_seconds(v) for k, v in durations.items()}},
    }
    _write(out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return out


def _write(path: Path, text: str):
    path.write_bytes(text.encode("utf-8"))
