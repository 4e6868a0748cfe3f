"""
Exception hierarchy shared by every core module

PreconditionError is a ValueError (bad input); InvariantViolation is a
RuntimeError and always means a bug.
"""


class NielsenError(Exception):
    """Base class for toolkit errors"""


class PreconditionError(NielsenError, ValueError):
    """An operation was called outside its domain"""


class ParseError(PreconditionError):
    """Malformed text input"""


class EmptySupportError(PreconditionError):
    """A constrained random model has nothing to sample"""


class OracleLimitError(PreconditionError):
    """Brute-force oracle asked for more than its hard cap"""


class InvariantViolation(NielsenError, RuntimeError):
    """An internal invariant failed"""
