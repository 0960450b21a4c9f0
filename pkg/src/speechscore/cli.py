"""Command-line front end.

Exit status: 0 on success, 1 when inputs fail validation or cannot be
scored, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__, evaluate
from .errors import FormatError, PackagingError, ScoringError
from .report import rational_text, to_tsv, write_report
from .timeline import seconds_to_ticks

log = logging.getLogger("speechscore")

VALIDATE_SUFFIXES = {
    "sad": (".txt", ".sad", ".tsv"),
    "sd": (".rttm",),
    "uem": (".uem",),
    "sid": (".txt",),
    "asr": (".json",),
    "sentiment": (".json",),
}


def _seconds(text):
    try:
        return seconds_to_ticks(text)
    except FormatError as exc:
        raise argparse.ArgumentTypeError(exc.message) from None


def _rate(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is outside [0, 1]")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="speechscore", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check label files for format errors")
    p.add_argument("--task", required=True, choices=sorted(VALIDATE_SUFFIXES))
    p.add_argument("--reference", action="store_true",
                   help="validate reference files (SAD S/NS vocabulary, UNK allowed in RTTM)")
    p.add_argument("paths", nargs="+", type=Path)

    p = sub.add_parser("score", help="score system output against a reference")
    p.add_argument("task", choices=evaluate.TASKS)
    _add_io(p)
    p.add_argument("--collar", type=_seconds, default=None,
                   help="forgiveness collar in seconds (sd: 0.25, sentiment: 2)")
    p.add_argument("--split", choices=("dev", "eval"), default="dev",
                   help="sid: derive labels from dev segment names when no --ref key is given")

    p = sub.add_parser("sweep-dcf", help="find the SAD confidence threshold minimizing DCF")
    _add_io(p)

    p = sub.add_parser("gen-fixtures", help="write a seeded synthetic dev set")
    p.add_argument("--out", required=True, type=Path, help="directory to create")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--files", type=int, default=5)
    p.add_argument("--preset", choices=("EECOM", "FD", "GNC", "MOCR", "NTWK"),
                   help="channel preset for every file (default: rotate through all)")
    p.add_argument("--sid-trials", type=int, default=40, help="SID segments per file")
    planted = {
        "p-miss": "fraction of reference speech the system drops",
        "p-fa": "fraction of non-speech the system labels as speech",
        "speaker-confusion": "fraction of turns given a wrong speaker",
        "wer-target": "word error rate planted in ASR output",
        "sentiment-flip": "fraction of utterances with a flipped polarity",
    }
    for name, text in planted.items():
        p.add_argument(f"--{name}", type=_rate, default=0.0, help=text)

    p = sub.add_parser("package", help="validate outputs and build a submission archive")
    p.add_argument("--outputs", required=True, type=Path, help="directory of system output files")
    p.add_argument("--description", required=True, type=Path, help="system description JSON")
    p.add_argument("--out", required=True, type=Path, help="archive path (.tar.gz)")
    p.add_argument("--task", type=str.upper, choices=("SAD", "SD", "SID", "ASR", "SENTIMENT"))
    p.add_argument("--trials", type=Path, help="SID key or segment list that must be predicted")
    p.add_argument("--created", help="ISO-8601 creation time to stamp (default: now)")
    return parser


def _add_io(p):
    p.add_argument("-r", "--ref", type=Path, help="reference file or directory (sid: key file)")
    p.add_argument("-s", "--sys", type=Path, required=True, help="system file or directory")
    p.add_argument("-u", "--uem", type=Path, help="UEM file or directory")
    p.add_argument("--report", type=Path, help="write the JSON report here")
    p.add_argument("--tsv", type=Path, help="write the per-file table here")
    p.add_argument("--figures", type=Path, help="directory for PNG figures")
    p.add_argument("--workers", type=int, default=None,
                   help=f"worker processes (default: ${evaluate.WORKERS_ENV} or 1)")


def _emit_outputs(args, task, result, sweep=False):
    doc = result.report
    if args.report:
        write_report(doc, args.report)
    if args.tsv:
        args.tsv.parent.mkdir(parents=True, exist_ok=True)
        args.tsv.write_text(to_tsv(doc), encoding="utf-8")
    if args.figures:
        from . import plotting  # matplotlib is slow to import

        for path in plotting.render(task, result.figures, args.figures, sweep=sweep):
            log.info("wrote %s", path)
    for entry in doc["per_file"]:
        for w in entry.get("warnings", []):
            print(f"warning: {entry.get('file_id')}: {w}", file=sys.stderr)
    for w in doc.get("warnings", []):
        print(f"warning: {w}", file=sys.stderr)
    if sweep:
        agg = doc["aggregate"]
        print(f"theta*\t{agg['theta_star']}\nDCF*\t{agg['dcf_star']['decimal']}")
        return
    if not args.report:
        sys.stdout.write(to_tsv(doc))
    headline = {"sad": "dcf", "sd": "pooled_der", "sid": "accuracy", "asr": "wer",
                "sentiment": "accuracy"}[task]
    value = doc["aggregate"].get(headline)
    print(f"{task}\t{headline}\t{rational_text(_as_fraction(value))}")


def _as_fraction(value):
    if value is None:
        return None
    from fractions import Fraction
    return Fraction(value["numerator"], value["denominator"])


def cmd_score(args) -> int:
    workers = args.workers or evaluate.default_workers()
    kw = {}
    if args.task in ("sd", "sentiment") and args.collar is not None:
        kw["collar"] = args.collar
    if args.task == "sid":
        kw["split"] = args.split
    elif args.ref is None:
        raise _Usage("--ref is required for this task")
    result = evaluate.score_task(args.task, args.ref, args.sys, args.uem, workers=workers, **kw)
    _emit_outputs(args, args.task, result)
    return 0


def cmd_sweep(args) -> int:
    if args.ref is None:
        raise _Usage("--ref is required")
    workers = args.workers or evaluate.default_workers()
    result = evaluate.sweep_sad_task(args.ref, args.sys, args.uem, workers=workers)
    _emit_outputs(args, "sad", result, sweep=True)
    return 0


def cmd_validate(args) -> int:
    from .formats import parse_rttm, parse_sad, parse_sid_output, parse_transcript, parse_uem
    from .formats.sad import REFERENCE, SYSTEM

    suffixes = VALIDATE_SUFFIXES[args.task]
    files = []
    for p in args.paths:
        if p.is_dir():
            files.extend(f for f in sorted(p.rglob("*")) if f.is_file() and f.suffix.lower() in suffixes)
        elif p.is_file():
            files.append(p)
        else:
            print(f"error: no such file or directory: {p}", file=sys.stderr)
            return 1
    if not files:
        print(f"error: no {args.task} files found", file=sys.stderr)
        return 1
    failures = 0
    for f in files:
        text = f.read_bytes()
        name = str(f)
        warnings = []
        try:
            if args.task == "sad":
                parse_sad(text, REFERENCE if args.reference else SYSTEM, source=name, warnings=warnings)
            elif args.task == "sd":
                parse_rttm(text, source=name, system=not args.reference, warnings=warnings)
            elif args.task == "uem":
                parse_uem(text, source=name)
            elif args.task == "sid":
                parse_sid_output(text, source=name)
            else:
                parse_transcript(text.decode("utf-8"), source=name,
                                 require_sentiment=args.task == "sentiment")
        except (FormatError, UnicodeDecodeError) as exc:
            failures += 1
            print(f"error: {exc}", file=sys.stderr)
            continue
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)
    print(f"{len(files) - failures}/{len(files)} {args.task} files valid")
    return 1 if failures else 0


def cmd_gen_fixtures(args) -> int:
    from .fixtures import PlantedRates, generate_dev_set, write_dev_set

    planted = PlantedRates(args.p_miss, args.p_fa, args.speaker_confusion,
                           args.wer_target, args.sentiment_flip)
    pairs = generate_dev_set(args.files, args.seed, preset=args.preset, planted=planted,
                             n_sid_trials=args.sid_trials)
    out = write_dev_set(pairs, args.out, seed=args.seed)
    print(f"wrote {len(pairs)} files to {out}")
    return 0


def cmd_package(args) -> int:
    from .package import load_description, load_trials, package

    desc = load_description(args.description)
    trials = load_trials(args.trials) if args.trials else None
    out = package(args.outputs, desc, args.out, task=args.task, trials=trials, created=args.created)
    print(f"wrote {out}")
    return 0


class _Usage(Exception):
    pass


COMMANDS = {
    "score": cmd_score,
    "sweep-dcf": cmd_sweep,
    "validate": cmd_validate,
    "gen-fixtures": cmd_gen_fixtures,
    "package": cmd_package,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except PackagingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for problem in exc.problems:
            print(f"  {problem}", file=sys.stderr)
        return 1
    except (FormatError, ScoringError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
