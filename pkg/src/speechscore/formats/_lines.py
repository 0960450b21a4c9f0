"""Shared line handling for the text formats."""

from __future__ import annotations

import codecs


def iter_lines(text):
    """Yield ``(line_number, stripped_line)`` for non-blank lines.

    Accepts ``str`` or UTF-8 ``bytes``; a leading BOM and CR-LF endings are
    tolerated.
    """
    if isinstance(text, bytes):
        if text.startswith(codecs.BOM_UTF8):
            text = text[len(codecs.BOM_UTF8):]
        text = text.decode("utf-8")
    elif text.startswith("\ufeff"):
        text = text[1:]
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if line.strip():
            yield lineno, line


def emit(warnings, message):
    if warnings is not None:
        warnings.append(message)
