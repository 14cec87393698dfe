"""Exception hierarchy.

Every error carries a ``category`` used by the command-line front end to pick
an exit status: ``config``, ``ingest`` or ``pipeline``.
"""

from __future__ import annotations


class ProcTextError(Exception):
    category = "pipeline"


class InvalidArgument(ProcTextError, ValueError):
    pass


class ConfigError(ProcTextError):
    category = "config"

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where = f"{source}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


class IngestError(ProcTextError):
    category = "ingest"


class StructuralError(IngestError):
    """Input is not shaped like an event log (missing column, malformed XML)."""


class TimestampError(IngestError):
    pass


class EmptyLogError(IngestError):
    pass


class UnknownActivity(ProcTextError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class ReplayMismatch(ProcTextError):
    pass


class UndefinedComparison(ProcTextError):
    pass


class UndefinedTruth(ProcTextError):
    pass


class MissingTemplate(ProcTextError):
    pass


class TemplateSlotError(ProcTextError):
    pass
