"""Exception types shared across the library."""


class UavbcError(Exception):
    """Base class for all uavbc errors."""


class InvalidParams(UavbcError, ValueError):
    """A physical parameter is out of range. Carries the offending field name."""

    def __init__(self, field, message=None):
        self.field = field
        super().__init__(message or f"invalid value for parameter {field!r}")


class PowerBudgetExceeded(UavbcError, ValueError):
    """Requested transmit powers violate the per-instant power budget."""


class TimeOutOfRange(UavbcError, ValueError):
    """Time instant outside the flight duration [0, T]."""


class ZeroSpeedLeg(UavbcError, ValueError):
    """A flight leg of nonzero length was requested with V = 0."""


class DegenerateLocations(UavbcError, ValueError):
    """Two hover locations coincide where distinct ones are required."""


class InfeasibleFlight(UavbcError, ValueError):
    """The UAV cannot traverse the inter-user distance within the flight time."""


class DiscretizationInvalid(UavbcError, ValueError):
    """A discretized trajectory violates speed, span or duration constraints."""


class GridTooCoarse(UavbcError, ValueError):
    """DP position grid too coarse to represent the per-slot motion budget."""


class NoSignChange(UavbcError, RuntimeError):
    """Numeric intersection search found no sign change (uniqueness violated)."""


class ValidityError(UavbcError, ValueError):
    """Asymptotic formula requested far outside its validity regime."""


class SolverError(UavbcError, RuntimeError):
    """A solver failed to produce a solution."""
