"""Scoring and validation toolkit for a five-task speech challenge.

Tasks: speech activity detection (DCF), speaker diarization (DER), speaker
identification (top-5 accuracy), speech recognition (WER) and frame-level
sentiment accuracy.
"""

__version__ = "0.1.0"
