"""Exceptions raised by parsers, validators and scorers."""


class FormatError(ValueError):
    """A label file (or a value inside one) violates its format.

    Carries the provenance of the offending input so the CLI can point at it.
    Any of ``source``, ``line`` and ``field`` may be ``None`` when unknown.
    """

    def __init__(self, message, *, source=None, line=None, field=None):
        self.message = message
        self.source = source
        self.line = line
        self.field = field
        super().__init__(self._render())

    def _render(self):
        prefix = ""
        if self.source is not None:
            prefix += f"{self.source}:"
        if self.line is not None:
            prefix += f"{self.line}:"
        if self.field is not None:
            prefix += f" [{self.field}]"
        return f"{prefix} {self.message}".strip()

    def __reduce__(self):
        return (_rebuild, (self.message, self.source, self.line, self.field))


def _rebuild(message, source, line, field):
    return FormatError(message, source=source, line=line, field=field)


class OverlapError(FormatError):
    """Two records of one file cover intersecting time."""

    def __init__(self, message, *, source=None, line=None, other_line=None, field=None):
        self.other_line = other_line
        super().__init__(message, source=source, line=line, field=field)

    def __reduce__(self):
        return (
            _rebuild_overlap,
            (self.message, self.source, self.line, self.other_line, self.field),
        )


def _rebuild_overlap(message, source, line, other_line, field):
    return OverlapError(message, source=source, line=line, other_line=other_line, field=field)


class ScoringError(ValueError):
    """Inputs are well formed but cannot be scored together."""


class PackagingError(ValueError):
    """A submission package is incomplete or inconsistent."""

    def __init__(self, message, problems=()):
        self.problems = list(problems)
        super().__init__(message)
