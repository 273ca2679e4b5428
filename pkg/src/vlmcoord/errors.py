"""Exception hierarchy shared across the harness."""

from __future__ import annotations


class HarnessError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(HarnessError):
    """Caller misuse: bad arguments, bad config, violated preconditions."""


class TransportError(HarnessError):
    """Network-level failure after all retries were exhausted."""


class ProtocolError(HarnessError):
    """A response was delivered but is malformed or carries an error envelope."""


class DegenerateInput(HarnessError):
    """An input that cannot be scored, e.g. a zero embedding vector."""


class ParseError(HarnessError):
    """A dataset file could not be parsed; message carries file and line."""


class ValidationError(HarnessError):
    """Dataset records violate invariants; message lists offending ids."""
