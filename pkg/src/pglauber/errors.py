"""Exception types shared across the package."""


class PGlauberError(Exception):
    """Base class for all package errors."""


class GraphFormatError(PGlauberError, ValueError):
    """Malformed or out-of-range graph input."""


class ValidationError(PGlauberError, ValueError):
    """An input violates a documented precondition."""


class CapExceededError(PGlauberError, RuntimeError):
    """A state-space enumeration grew past its configured cap.

    Attributes:
        cap: the cap that was hit.
        lower_bound: a lower bound on the true count (at least ``cap + 1``).
    """

    def __init__(self, what: str, cap: int, lower_bound: int | None = None):
        self.cap = cap
        self.lower_bound = cap + 1 if lower_bound is None else lower_bound
        super().__init__(f"{what}: count exceeds cap {cap} (at least {self.lower_bound})")


class ReducibleChainError(PGlauberError, RuntimeError):
    """The chain is not irreducible and aperiodic, so mixing is undefined."""
