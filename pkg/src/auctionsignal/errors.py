"""Exception types shared across the library.

The CLI maps these onto process exit codes, so solver and model code should
raise the most specific class that applies.
"""


class AuctionSignalError(Exception):
    """Base class for all library errors."""


class ValidationError(AuctionSignalError):
    """Malformed input data: bad dimensions, invalid probabilities, bad files."""


class GuardExceededError(AuctionSignalError):
    """A combinatorial enumeration would exceed its configured cap."""


class NumericFailureError(AuctionSignalError):
    """A numerical routine lost reliability (stalled pivots, broken tolerance)."""


class InfeasibleAtBetaError(AuctionSignalError):
    """The welfare-floor constrained program admits no solution at this beta."""
