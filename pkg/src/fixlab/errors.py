"""Exception hierarchy shared by every module."""


class FixlabError(Exception):
    """Base class for all library errors."""


class DomainError(FixlabError, ValueError):
    """A point or index lies outside the object it was looked up in."""


class BoundaryError(FixlabError):
    """A map was applied at (or would step past) the edge of a truncated carrier.

    Callers treat this as a request to shrink the certification scope, not as
    a defect in the map.
    """


class ParameterError(FixlabError, ValueError):
    """A constructor or operation received an out-of-range parameter."""


class DegenerateInputError(FixlabError, ValueError):
    pass


class TestFunctionError(FixlabError):
    """A test function returned a value outside its declared codomain."""

    __test__ = False  # keep pytest from collecting this


class MetricAxiomError(FixlabError, ValueError):
    """A distance table failed the metric axioms at load time."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
