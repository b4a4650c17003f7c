"""Exception hierarchy shared by all modules."""


class SpinSqueezeError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SpinSqueezeError, ValueError):
    """An argument lies outside the domain of an operation."""


class ContractError(SpinSqueezeError):
    """An input violates a precondition (e.g. an unnormalized state)."""


class UnsupportedSizeError(DomainError):
    """The requested batch size exceeds what an operation supports."""


class GeometryError(DomainError):
    """Channel geometry is unphysical (e.g. overlapping cylinders)."""


class DegenerateOutcomeError(SpinSqueezeError):
    """A measurement outcome has numerically zero probability density."""


class MeanSpinDegenerateError(SpinSqueezeError):
    """The mean spin vanishes, so the Wineland parameter is undefined.

    Use the Fisher-information metrics for such states (GHZ states, for
    instance).
    """


class NumericalIntegrationError(SpinSqueezeError):
    """Quadrature over measurement outcomes failed to normalize."""


class OptimizerBracketError(SpinSqueezeError):
    """The objective is not unimodal on the search bracket."""


class UninformativeReadoutError(SpinSqueezeError):
    """The interferometer readout does not depend on the phase."""
