"""Exception types shared across the toolkit.

``ValueError`` is reserved for violated call contracts (bad parameters);
the classes here cover malformed or inconsistent *data* so the CLI can
map them to a distinct exit code.
"""

from __future__ import annotations


class MtlaugError(Exception):
    """Base class for toolkit errors."""


class DataError(MtlaugError):
    """Malformed or mutually inconsistent input data."""


class CorpusError(DataError):
    """Parallel corpus files that cannot be read as such."""


class SubwordError(DataError):
    """Merge tables or subword sequences that violate the file contract."""


class AlignmentError(DataError):
    """Alignment lines or link sets that are out of bounds or ambiguous."""


class StreamError(DataError):
    """Stream assembly failed because required resources are missing."""


class AnalysisError(DataError):
    """Dumps or statistics inputs that cannot be analysed."""
