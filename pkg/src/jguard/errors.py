"""Exception hierarchy shared across the package.

DataError subclasses map to CLI exit code 3, NumericError to exit code 4.
"""


class JGuardError(Exception):
    pass


class DataError(JGuardError):
    """Malformed or inconsistent input data."""


class MalformedRecord(DataError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicateId(DataError):
    def __init__(self, article_id: str):
        super().__init__(f"duplicate article id {article_id!r}")
        self.article_id = article_id


class EmptyCorpus(DataError):
    pass


class UnknownId(DataError):
    pass


class SingleClassError(DataError):
    pass


class ModelFormatError(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class ReportError(DataError):
    pass


class NumericError(JGuardError):
    """Non-finite values where finite math is required (NaN loss, inf features)."""
