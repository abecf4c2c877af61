"""
Exception hierarchy

Every error carries the exit code the CLI reports for it:
1 usage, 2 data, 3 numeric failure.
"""
from typing import Optional


class SentopicError(Exception):
    """Base error"""
    exit_code = 2


class DataError(SentopicError):
    """Input data is malformed or inconsistent"""
    exit_code = 2


class DimensionMismatchError(DataError, ValueError):
    """Array shapes disagree with the model or vocabulary dimensions"""


class ModeError(SentopicError, ValueError):
    """A joint-only operation received RS parameters (or the reverse)"""
    exit_code = 2


class LexiconFormatError(DataError):
    """A lexicon file line could not be parsed or validated"""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class DocumentFormatError(DataError):
    """A document file line could not be parsed"""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class EmptyDocumentError(DataError):
    """A document with no in-vocabulary tokens reached an operation that needs one"""


class StratificationError(DataError):
    """A source corpus cannot satisfy the requested class balance"""


class MissingLengthError(DataError, KeyError):
    """No partition estimate exists for a document length"""

    def __str__(self):
        return Exception.__str__(self)


class EnumerationBoundError(SentopicError):
    """Exact enumeration requested above the state-space bound"""
    exit_code = 2


class NumericalInstabilityError(SentopicError, ArithmeticError):
    """Parameters became non-finite"""
    exit_code = 3

    def __init__(self, message: str, block: Optional[str] = None, update: Optional[int] = None):
        self.block = block
        self.update = update
        super().__init__(message)
