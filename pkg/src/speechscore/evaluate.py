"""Per-task scoring over files and directories, producing report documents.

Each task is scored file by file (optionally in worker processes) and then
pooled from integer tick or token counts, so the aggregate never depends on
scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import asr, diarization, sad, sentiment, sid
from .errors import FormatError, ScoringError
from .formats.rttm import group_by_file, parse_rttm
from .formats.sad import REFERENCE, SYSTEM, parse_sad, speech_timeline
from .formats.sid import DEV, parse_sid_key, parse_sid_output
from .formats.transcript import POLARITIES, parse_transcript
from .formats.uem import parse_uem, uem_timelines
from .report import build_report, digest, rational
from .timeline import Interval, Timeline, ticks_to_seconds

TASKS = ("sad", "sd", "sid", "asr", "sentiment")
SUFFIXES = {
    "sad": (".txt", ".sad", ".tsv"),
    "sd": (".rttm",),
    "asr": (".json",),
    "sentiment": (".json",),
    "uem": (".uem",),
}
WORKERS_ENV = "SPEECHSCORE_WORKERS"


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class Inputs:
    """Files found under a path; ``root`` anchors the names used in reports."""

    files: dict  # stem -> Path
    root: Path
    single: bool

    def name(self, path: Path) -> str:
        return path.name if self.single else path.relative_to(self.root).as_posix()


def collect(path, suffixes) -> Inputs:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"no such file or directory: {p}")
    if p.is_file():
        return Inputs({_stem(p, suffixes): p}, p.parent, True)
    files = {}
    for f in sorted(p.rglob("*")):
        if f.is_file() and f.suffix.lower() in suffixes:
            stem = _stem(f, suffixes)
            if stem in files:
                raise FormatError(f"two files map to file id {stem!r}: {files[stem]} and {f}")
            files[stem] = f
    return Inputs(files, p, False)


def _stem(path: Path, suffixes) -> str:
    name = path.name
    for suf in suffixes:
        if name.lower().endswith(suf):
            return name[: -len(suf)]
    return path.stem


def _read(path) -> str:
    return Path(path).read_bytes().decode("utf-8")


def _digests(role, inputs: Inputs | None):
    if inputs is None:
        return []
    return [digest(p, inputs.name(p), role) for p in inputs.files.values()]


def _run(func, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, jobs))
    return [func(job) for job in jobs]


@dataclass
class TaskResult:
    report: dict
    figures: dict = field(default_factory=dict)  # data for plotting


# -- SAD ---------------------------------------------------------------------

def _sad_job(job):
    file_id, ref_path, sys_path, uem_text = job
    warnings = []
    ref = parse_sad(_read(ref_path), REFERENCE, source=Path(ref_path).name, warnings=warnings)
    records = []
    if sys_path is None:
        warnings.append("no system output; every speech frame counts as missed")
    else:
        records = parse_sad(_read(sys_path), SYSTEM, source=Path(sys_path).name, warnings=warnings)
    span = Interval(0, max((r.end for r in ref), default=0))
    regions = sad.build_scoring_regions(speech_timeline(ref), span)
    if uem_text is not None:
        keep = uem_timelines(parse_uem(uem_text)).get(file_id, Timeline())
        regions = sad.restrict_regions(regions, keep)
    score = sad.score_sad(regions, speech_timeline(records), warnings)
    return file_id, score, regions, records, warnings


def _sad_row(file_id, score: sad.SadScore, warnings):
    return {
        "file_id": file_id,
        "tp": score.tp, "tn": score.tn, "fp": score.fp, "fn": score.fn,
        "speech_time": score.speech_time, "nonspeech_time": score.nonspeech_time,
        "p_fp": rational(score.p_fp), "p_fn": rational(score.p_fn), "dcf": rational(score.dcf),
        "flags": list(score.flags), "warnings": warnings,
    }


def _sad_aggregate(score: sad.SadScore):
    row = _sad_row("ALL", score, [])
    del row["file_id"], row["warnings"]
    return row


def _sad_jobs(ref, system, uem):
    uem_text = None
    if uem is not None:
        uem_text = "".join(_read(p) for p in collect(uem, SUFFIXES["uem"]).files.values())
    refs = collect(ref, SUFFIXES["sad"])
    syss = collect(system, SUFFIXES["sad"])
    if refs.single and syss.single:
        pairs = {next(iter(refs.files)): next(iter(syss.files.values()))}
    else:
        pairs = syss.files
    jobs = [(fid, path, pairs.get(fid), uem_text) for fid, path in refs.files.items()]
    extra = sorted(set(pairs) - set(refs.files))
    return refs, syss, jobs, extra


def score_sad_task(ref, system, uem=None, workers=1) -> TaskResult:
    refs, syss, jobs, extra = _sad_jobs(ref, system, uem)
    results = _run(_sad_job, jobs, workers)
    rows, scores = [], []
    for file_id, score, _, _, warnings in results:
        rows.append(_sad_row(file_id, score, warnings))
        scores.append(score)
    pooled = sad.pooled(scores)
    report = build_report(
        "sad", rows, _sad_aggregate(pooled),
        _digests("ref", refs) + _digests("sys", syss),
        unmatched_system_files=extra,
    )
    return TaskResult(report, {"per_file_dcf": [(r["file_id"], scores[i].dcf) for i, r in enumerate(rows)]})


def sweep_sad_task(ref, system, uem=None, workers=1) -> TaskResult:
    refs, syss, jobs, extra = _sad_jobs(ref, system, uem)
    results = _run(_sad_job, jobs, workers)
    sweep = sad.sweep_dcf_pooled([(regions, records) for _, _, regions, records, _ in results])
    curve = [{"theta": _theta(t), "dcf": rational(d)} for t, d in sweep.curve]
    report = build_report(
        "sad", [{"file_id": r[0], "warnings": r[4]} for r in results],
        {"theta_star": _theta(sweep.theta), "dcf_star": rational(sweep.dcf)},
        _digests("ref", refs) + _digests("sys", syss),
        curve=curve, unmatched_system_files=extra,
    )
    return TaskResult(report, {"curve": sweep.curve, "theta": sweep.theta, "dcf": sweep.dcf})


def _theta(t):
    return "keep-nothing" if t == sad.KEEP_NOTHING else t


# -- SD ----------------------------------------------------------------------

def _load_rttm(path, system):
    inputs = collect(path, SUFFIXES["sd"])
    turns = []
    warnings = []
    for stem, f in inputs.files.items():
        expected = None if inputs.single else stem
        turns.extend(parse_rttm(_read(f), source=inputs.name(f), system=system,
                                expected_file_id=expected, warnings=warnings))
    return inputs, group_by_file(turns), warnings


def _sd_job(job):
    file_id, ref_turns, sys_turns, uem_regions, collar = job
    warnings = []
    if not sys_turns:
        warnings.append("no system turns for this file")
    if uem_regions:
        span = None
    else:
        end = max([t.offset for t in ref_turns] + [t.offset for t in sys_turns], default=0)
        span = Interval(0, end)
    ref = diarization.prepare_reference(ref_turns, uem_regions, collar=collar, file_span=span)
    mapping = diarization.map_speakers(ref, sys_turns)
    score = diarization.score_der(ref, sys_turns, mapping)
    return file_id, score, mapping, warnings


def score_sd_task(ref, system, uem=None, collar=diarization.FORGIVENESS_COLLAR, workers=1) -> TaskResult:
    refs, ref_turns, w_ref = _load_rttm(ref, system=False)
    syss, sys_turns, w_sys = _load_rttm(system, system=True)
    uem_inputs, uem_by_file = None, {}
    if uem is not None:
        uem_inputs = collect(uem, SUFFIXES["uem"])
        for f in uem_inputs.files.values():
            for r in parse_uem(_read(f), source=uem_inputs.name(f)):
                uem_by_file.setdefault(r.file_id, []).append(r)
    jobs = [(fid, turns, sys_turns.get(fid, []), uem_by_file.get(fid, []), collar)
            for fid, turns in sorted(ref_turns.items())]
    results = _run(_sd_job, jobs, workers)
    rows, scores = [], []
    for file_id, score, mapping, warnings in results:
        rows.append({
            "file_id": file_id,
            "fa": score.fa, "miss": score.miss, "error": score.error, "total": score.total,
            "der": rational(score.der),
            "mapping": dict(sorted(mapping.pairs.items())),
            "flags": list(score.flags), "warnings": warnings,
        })
        scores.append(score)
    pooled = diarization.pooled(scores)
    aggregate = {
        "note": "per-file DER is primary; pooled DER is supplementary",
        "fa": pooled.fa, "miss": pooled.miss, "error": pooled.error, "total": pooled.total,
        "pooled_der": rational(pooled.der),
    }
    inputs = _digests("ref", refs) + _digests("sys", syss) + _digests("uem", uem_inputs)
    report = build_report("sd", rows, aggregate, inputs,
                          unmatched_system_files=sorted(set(sys_turns) - set(ref_turns)),
                          warnings=w_ref + w_sys)
    return TaskResult(report, {"per_file": [(r["file_id"], s) for r, s in zip(rows, scores)]})


# -- SID ---------------------------------------------------------------------

def score_sid_task(system, key=None, split=DEV, durations=None) -> TaskResult:
    sys_path = Path(system)
    if not sys_path.is_file():
        raise FileNotFoundError(f"no such file: {sys_path}")
    predictions = parse_sid_output(_read(sys_path), source=sys_path.name)
    key_map = None
    inputs = [digest(sys_path, sys_path.name, "sys")]
    if key is not None:
        key_path = Path(key)
        if not key_path.is_file():
            raise FileNotFoundError(f"no such file: {key_path}")
        key_map = parse_sid_key(_read(key_path), source=key_path.name)
        inputs.append(digest(key_path, key_path.name, "ref"))
    warnings = []
    trials = sid.build_trials(predictions, key_map, split=split, durations=durations,
                              warnings=warnings)
    score = sid.score_top5(trials)
    trial_rows = [
        {"segment_id": t.segment_id, "reference": t.reference_label,
         "rank": (t.predictions.index(t.reference_label) + 1) if t.hit else None,
         "hit": t.hit}
        for t in trials
    ]
    row = {"file_id": sys_path.name, "m": score.m, "hits": score.hits,
           "accuracy": rational(score.accuracy), "warnings": warnings}
    aggregate = {"m": score.m, "hits": score.hits, "accuracy": rational(score.accuracy),
                 "missing_segments": list(score.missing)}
    report = build_report("sid", [row], aggregate, inputs, trials=trial_rows)
    return TaskResult(report, {"ranks": [r["rank"] for r in trial_rows]})


# -- ASR ---------------------------------------------------------------------

def _asr_job(job):
    file_id, ref_path, sys_path = job
    warnings = []
    ref = parse_transcript(_read(ref_path), source=Path(ref_path).name, require_sentiment=False)
    hyp = []
    if sys_path is None:
        warnings.append("no system transcript; every reference token is deleted")
    else:
        hyp = parse_transcript(_read(sys_path), source=Path(sys_path).name, require_sentiment=False)
    triples, extras = asr.pair_utterances(ref, hyp, file_id)
    result = asr.score_corpus(triples)
    result.unscored_extras.extend(
        f"{file_id}:{ticks_to_seconds(h.start)}-{ticks_to_seconds(h.end)}" for h in extras)
    return file_id, result, warnings


def _ops_text(ops):
    return "".join(op for op, _, _ in ops)


def score_asr_task(ref, system, workers=1) -> TaskResult:
    refs = collect(ref, SUFFIXES["asr"])
    syss = collect(system, SUFFIXES["asr"])
    pairs = _pair_single(refs, syss)
    jobs = [(fid, path, pairs.get(fid)) for fid, path in refs.files.items()]
    results = _run(_asr_job, jobs, workers)
    rows = []
    total = asr.AsrScore()
    for file_id, result, warnings in results:
        s = result.score
        total = total + s
        rows.append({
            "file_id": file_id,
            "n_del": s.n_del, "n_ins": s.n_ins, "n_subst": s.n_subst, "n_ref": s.n_ref,
            "wer": rational(s.wer),
            "segments": [
                {"segment": seg.segment, "n_ref": seg.score.n_ref, "errors": seg.score.errors,
                 "ops": _ops_text(seg.ops)}
                for seg in result.segments
            ],
            "skipped_unk_segments": result.skipped,
            "empty_reference_segments": result.empty,
            "unscored_extras": result.unscored_extras,
            "flags": [], "warnings": warnings,
        })
    aggregate = {"n_del": total.n_del, "n_ins": total.n_ins, "n_subst": total.n_subst,
                 "n_ref": total.n_ref, "wer": rational(total.wer)}
    report = build_report("asr", rows, aggregate, _digests("ref", refs) + _digests("sys", syss),
                          unmatched_system_files=sorted(set(pairs) - set(refs.files)))
    return TaskResult(report, {"per_file": [(r["file_id"], r) for r in rows]})


def _pair_single(refs: Inputs, syss: Inputs):
    if refs.single and syss.single:
        return {next(iter(refs.files)): next(iter(syss.files.values()))}
    return syss.files


# -- Sentiment ---------------------------------------------------------------

def _sentiment_job(job):
    file_id, ref_path, sys_path, collar = job
    warnings = []
    ref = parse_transcript(_read(ref_path), source=Path(ref_path).name)
    system = []
    if sys_path is None:
        warnings.append("no system output; every scored frame is uncovered")
    else:
        system = parse_transcript(_read(sys_path), source=Path(sys_path).name)
    frames = sentiment.build_frames(ref, collar=collar)
    score = sentiment.score_sentiment(frames, system)
    if score.conflict_time:
        warnings.append(f"{score.conflict_time} ms of scored frames had overlapping system "
                        "utterances with different polarities; latest start wins")
    return file_id, score, warnings


def _confusion(score: sentiment.SentimentScore):
    return {p.value: {q.value: score.confusion.get((p, q), 0) for q in POLARITIES}
            for p in POLARITIES}


def score_sentiment_task(ref, system, collar=sentiment.FORGIVENESS_COLLAR, workers=1) -> TaskResult:
    refs = collect(ref, SUFFIXES["sentiment"])
    syss = collect(system, SUFFIXES["sentiment"])
    pairs = _pair_single(refs, syss)
    jobs = [(fid, path, pairs.get(fid), collar) for fid, path in refs.files.items()]
    results = _run(_sentiment_job, jobs, workers)
    rows = []
    total = None
    for file_id, score, warnings in results:
        total = score if total is None else total + score
        rows.append(_sentiment_row(file_id, score, warnings))
    if total is None:
        total = sentiment.SentimentScore({}, {})
    aggregate = _sentiment_row("ALL", total, [])
    del aggregate["file_id"], aggregate["warnings"]
    aggregate["note"] = ("denominator is scored speech time after [unk], overlap and "
                         "collar exclusions")
    report = build_report("sentiment", rows, aggregate,
                          _digests("ref", refs) + _digests("sys", syss),
                          unmatched_system_files=sorted(set(pairs) - set(refs.files)))
    return TaskResult(report, {"confusion": _confusion(total),
                               "uncovered": {p.value: total.uncovered.get(p, 0) for p in POLARITIES}})


def _sentiment_row(file_id, score, warnings):
    return {
        "file_id": file_id,
        "tp_time": score.tp_time,
        "scored_speech_time": score.scored_speech_time,
        "accuracy": rational(score.accuracy),
        "conflict_time": score.conflict_time,
        "confusion": _confusion(score),
        "uncovered": {p.value: score.uncovered.get(p, 0) for p in POLARITIES},
        "flags": [] if score.scored_speech_time else ["no scored frames"],
        "warnings": warnings,
    }


def score_task(task, ref=None, system=None, uem=None, workers=1, **kw) -> TaskResult:
    if task == "sad":
        return score_sad_task(ref, system, uem, workers=workers)
    if task == "sd":
        return score_sd_task(ref, system, uem, workers=workers, **kw)
    if task == "sid":
        return score_sid_task(system, key=ref, **kw)
    if task == "asr":
        return score_asr_task(ref, system, workers=workers)
    if task == "sentiment":
        return score_sentiment_task(ref, system, workers=workers, **kw)
    raise ScoringError(f"unknown task {task!r}")
