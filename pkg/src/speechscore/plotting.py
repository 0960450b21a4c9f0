"""Matplotlib figures written next to score reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .sad import KEEP_NOTHING  # noqa: E402

FIGSIZE = (8, 4.5)
# Fixed metadata keeps PNG bytes stable between runs.
_META = {"Software": None}


def _finish(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_META)
    plt.close(fig)
    return path


def _bar(labels, values, ylabel, title, path):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    xs = range(len(labels))
    ax.bar(xs, values, color="#4a7ab5")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    return _finish(fig, path)


def sad_per_file(per_file_dcf, out_dir) -> Path:
    labels = [fid for fid, _ in per_file_dcf]
    values = [float(d) for _, d in per_file_dcf]
    return _bar(labels, values, "DCF", "SAD detection cost per file", Path(out_dir) / "sad_dcf.png")


def sad_sweep(curve, theta, dcf, out_dir) -> Path:
    pts = [(t, float(d)) for t, d in curve if t != KEEP_NOTHING]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    if pts:
        ax.plot([t for t, _ in pts], [d for _, d in pts], marker=".", drawstyle="steps-post")
    if theta != KEEP_NOTHING:
        ax.axvline(theta, color="#b5504a", linestyle="--", label=f"min DCF {float(dcf):.4f}")
        ax.legend()
    ax.set_xlabel("confidence threshold")
    ax.set_ylabel("DCF")
    ax.set_title("SAD threshold sweep")
    return _finish(fig, Path(out_dir) / "sad_sweep.png")


def sd_per_file(per_file, out_dir) -> Path:
    labels = [fid for fid, _ in per_file]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    xs = list(range(len(labels)))
    bottom = [0.0] * len(labels)
    for name, color in (("miss", "#4a7ab5"), ("fa", "#e3a33b"), ("error", "#b5504a")):
        vals = [getattr(s, name) / s.total if s.total else 0.0 for _, s in per_file]
        ax.bar(xs, vals, bottom=bottom, color=color, label=name.upper())
        bottom = [b + v for b, v in zip(bottom, vals)]
    ax.set_xticks(xs)
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("share of scored speaker time")
    ax.set_title("Diarization error by file")
    ax.legend()
    return _finish(fig, Path(out_dir) / "sd_der.png")


def sid_ranks(ranks, out_dir) -> Path:
    counts = [sum(1 for r in ranks if r == k) for k in range(1, 6)]
    counts.append(sum(1 for r in ranks if r is None))
    return _bar(["1", "2", "3", "4", "5", "miss"], counts, "segments",
                "Rank of the reference speaker in the top-5 list", Path(out_dir) / "sid_ranks.png")


def asr_per_file(per_file, out_dir) -> Path:
    labels = [fid for fid, _ in per_file]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    xs = list(range(len(labels)))
    bottom = [0.0] * len(labels)
    for key, name, color in (("n_subst", "SUB", "#b5504a"), ("n_del", "DEL", "#4a7ab5"),
                             ("n_ins", "INS", "#e3a33b")):
        vals = [row[key] / row["n_ref"] if row["n_ref"] else 0.0 for _, row in per_file]
        ax.bar(xs, vals, bottom=bottom, color=color, label=name)
        bottom = [b + v for b, v in zip(bottom, vals)]
    ax.set_xticks(xs)
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("errors per reference token")
    ax.set_title("Word error rate by file")
    ax.legend()
    return _finish(fig, Path(out_dir) / "asr_wer.png")


def sentiment_confusion(confusion, uncovered, out_dir) -> Path:
    rows = list(confusion)
    cols = list(next(iter(confusion.values()))) + ["none"]
    grid = [[confusion[r][c] / 1000 for c in cols[:-1]] + [uncovered[r] / 1000] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    im = ax.imshow(grid, cmap="Blues")
    for i, row in enumerate(grid):
        for j, v in enumerate(row):
            ax.text(j, i, f"{v:.1f}", ha="center", va="center", fontsize=8)
    ax.set_xticks(range(len(cols)))
    ax.set_xticklabels(cols)
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels(rows)
    ax.set_xlabel("system polarity")
    ax.set_ylabel("reference polarity")
    ax.set_title("Scored seconds by polarity")
    fig.colorbar(im, ax=ax)
    return _finish(fig, Path(out_dir) / "sentiment_confusion.png")


def render(task: str, figures: dict, out_dir, sweep=False) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if task == "sad" and sweep:
        return [sad_sweep(figures["curve"], figures["theta"], figures["dcf"], out)]
    if task == "sad":
        return [sad_per_file(figures["per_file_dcf"], out)]
    if task == "sd":
        return [sd_per_file(figures["per_file"], out)]
    if task == "sid":
        return [sid_ranks(figures["ranks"], out)]
    if task == "asr":
        return [asr_per_file(figures["per_file"], out)]
    if task == "sentiment":
        return [sentiment_confusion(figures["confusion"], figures["uncovered"], out)]
    return []
