"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes, so every failure a user can trigger
should surface as one of them.
"""


class YBError(Exception):
    """Base class for library errors."""


class MalformedTableError(YBError, ValueError):
    """Table shape or entries are out of range; distinct from a failed check."""


class NondegeneracyError(YBError, ValueError):
    pass


class BraidError(YBError, ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class StructureError(YBError, ValueError):
    pass


class UnionError(YBError, ValueError):
    def __init__(self, message, flag=None, witness=None):
        super().__init__(message)
        self.flag = flag
        self.witness = witness


class FaithfulnessError(YBError, ValueError):
    pass


class DomainError(YBError, ValueError):
    pass


class DiagramError(YBError, ValueError):
    pass


class ParseError(YBError, ValueError):
    """Input text could not be read; ``location`` says where."""

    def __init__(self, message, location=None):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


class ResourceError(YBError, RuntimeError):
    """A configured budget would be exceeded."""


class InternalInvariantViolation(YBError, AssertionError):
    """Something that must hold on valid input did not."""


DEFAULT_BUDGETS = {
    "j_map": 10**6,
    "structure": 10**5,
    "monoid": 10**6,
    "relabel": 2 * 10**6,
    "endomorphisms": 10**5,
    "enumerate": 10**7,
}


def budget(name: str) -> int:
    """Resource budget for ``name``; ``YBSET_BUDGET`` overrides every default."""
    import os

    raw = os.environ.get("YBSET_BUDGET")
    if raw:
        try:
            val = int(float(raw))
        except ValueError as exc:
            raise ValueError(f"YBSET_BUDGET must be a positive integer, got {raw!r}") from exc
        if val <= 0:
            raise ValueError("YBSET_BUDGET must be positive")
        return val
    return DEFAULT_BUDGETS[name]
