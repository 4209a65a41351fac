"""Exception hierarchy shared by every admlab module."""


class AdmlabError(Exception):
    """Base class for all admlab errors."""


class NonFinite(AdmlabError):
    """An integrand or evaluator produced NaN/inf at an interior node."""


class NoConvergence(AdmlabError):
    """An iterative procedure hit its iteration or subdivision limit."""


class DomainTooSmall(AdmlabError):
    pass


class DomainError(AdmlabError):
    """Evaluation requested outside the domain of a sampled object."""


class NotMonotone(AdmlabError):
    """A sequence or profile that must be monotone is not.

    ``location`` is the abscissa of the worst violation, ``amount`` its size.
    """

    def __init__(self, message, location=None, amount=None):
        super().__init__(message)
        self.location = location
        self.amount = amount


class Singular(AdmlabError):
    pass


class MassBoundViolation(AdmlabError):
    """|h'| > 1 somewhere: the profile has negative Hawking mass there."""


class DimensionUnsupported(AdmlabError):
    pass


class SmoothingFailed(AdmlabError):
    pass


class GlueInfeasible(AdmlabError):
    pass


class NoSuchSphere(AdmlabError):
    pass


class DomainMismatch(AdmlabError):
    pass


class NotCauchy(AdmlabError):
    pass


class NotDifferentiable(AdmlabError):
    pass


class ParseError(AdmlabError):
    """Scenario or spec file failed to parse; carries line/field when known."""

    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.field = field


class ProbeFailed(AdmlabError):
    def __init__(self, probe_id, diagnostic):
        super().__init__(f"probe {probe_id!r} failed: {diagnostic}")
        self.probe_id = probe_id
        self.diagnostic = diagnostic
