"""Error taxonomy: BridgeError for bad input data, ValueError for bad calls."""

from __future__ import annotations


class BridgeError(Exception):
    """Malformed stream, dump or corpus content."""
