"""Exception hierarchy.

Every mathematical precondition failure derives from :class:`FoliationLociError`;
the CLI reports ``type(err).__name__`` and exits with status 2.
"""


class FoliationLociError(Exception):
    """Base class for mathematical precondition failures."""


class ParseError(ValueError):
    """Malformed polynomial text or job file (CLI exit status 1)."""


class NotGroebnerBasis(FoliationLociError):
    pass


class CommutationFailure(FoliationLociError):
    def __init__(self, pair, component, value):
        self.pair = pair
        self.component = component
        self.value = value
        super().__init__(
            f"[xi_{pair[0] + 1}, xi_{pair[1] + 1}] has nonzero component "
            f"along d/d{component}: {value}"
        )


class TangencyFailure(FoliationLociError):
    def __init__(self, field_index, generator, value):
        self.field_index = field_index
        self.generator = generator
        super().__init__(
            f"xi_{field_index + 1} is not tangent to the chart: "
            f"xi({generator}) = {value} is not in the ideal"
        )


class FlatnessFailure(FoliationLociError):
    def __init__(self, pair, entry, value):
        self.pair = pair
        self.entry = entry
        super().__init__(
            f"curvature of (Omega_{pair[0] + 1}, Omega_{pair[1] + 1}) is nonzero "
            f"at entry {entry}: {value}"
        )


class DependentFields(FoliationLociError):
    pass


class ChartDenominator(FoliationLociError):
    pass


class PointOffChart(FoliationLociError):
    pass


class ParameterNotConstant(FoliationLociError):
    pass


class SubsetCapExceeded(FoliationLociError):
    pass


class MinorBudgetExceeded(FoliationLociError):
    pass


class InvalidOrder(FoliationLociError):
    pass


class FamilyError(FoliationLociError):
    """The curve family violates the odd, monic, squarefree model."""


class PoleOrderParity(FoliationLociError):
    pass


class NotSecondKind(FoliationLociError):
    pass


class TruncationTooSmall(FoliationLociError):
    pass


class DegeneratePairing(FoliationLociError):
    pass


class BranchPointCollision(FoliationLociError):
    pass


class SingularBBlock(FoliationLociError):
    pass


class PeriodIntegrationError(FoliationLociError):
    """Quadrature or cycle bookkeeping failed its own consistency checks."""
