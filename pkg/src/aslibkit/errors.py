"""Exception types shared across the toolkit."""

from __future__ import annotations


class AslibError(Exception):
    """Base error carrying a machine-readable ``code``.

    ``file`` and ``line`` are filled in when the error can be attributed to a
    location in a scenario file.
    """

    def __init__(self, code: str, message: str, file: str | None = None, line: int | None = None):
        self.code = code
        self.message = message
        self.file = file
        self.line = line
        super().__init__(str(self))

    def __str__(self) -> str:
        where = ""
        if self.file is not None:
            where = self.file
            if self.line is not None:
                where += f":{self.line}"
            where += ": "
        elif self.line is not None:
            where = f"line {self.line}: "
        return f"{where}{self.code}: {self.message}"

    def located(self, file: str) -> "AslibError":
        """Return a copy of this error annotated with ``file``."""
        err = type(self)(self.code, self.message, file=file, line=self.line)
        return err


class FormatError(AslibError):
    """Raised by the ARFF/description parsers and the scenario loader."""


class FetchError(AslibError):
    """Raised by the repository fetcher (NETWORK, NOT_FOUND, CHECKSUM)."""


class PreprocessError(AslibError):
    pass


class EvaluationError(AslibError):
    pass


class LearnerError(AslibError):
    pass


class SelectorError(AslibError):
    pass


class SubmissionError(AslibError):
    """Malformed submission file; always carries a line number when possible."""
