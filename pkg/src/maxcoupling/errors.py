"""Exception hierarchy. Every error is a ``ValueError`` so callers can catch broadly."""


class MaxCouplingError(ValueError):
    pass


class EmptyMeasure(MaxCouplingError):
    pass


class NonFinite(MaxCouplingError):
    pass


class BadInterval(MaxCouplingError):
    pass


class TooFewQuotes(MaxCouplingError):
    pass


class NonConvexQuotes(MaxCouplingError):
    """Quote sheet admits static arbitrage (negative butterfly or rising calls)."""


class AboveSupport(MaxCouplingError):
    pass


class OutOfRange(MaxCouplingError):
    pass


class NotCentered(MaxCouplingError):
    pass


class BadGrid(MaxCouplingError):
    pass


class NotUnimodal(MaxCouplingError):
    pass


class MissingDerivative(MaxCouplingError):
    pass


class SupportTooLarge(MaxCouplingError):
    pass


class NotCrossed(MaxCouplingError):
    pass


class InsufficientMass(MaxCouplingError):
    pass


class BadGeometry(MaxCouplingError):
    pass


class RidgeUnavailable(MaxCouplingError):
    pass


class GridTooCoarse(MaxCouplingError):
    pass


class IterationLimit(MaxCouplingError):
    pass


class OffLattice(MaxCouplingError):
    pass


class NoStoppedSamples(MaxCouplingError):
    pass


class GridMismatch(MaxCouplingError):
    pass


class SolverFailure(MaxCouplingError):
    """LP ended infeasible or unbounded."""


class ParseError(MaxCouplingError):
    pass
