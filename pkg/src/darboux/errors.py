"""Exception taxonomy for the darboux package."""


class DarbouxError(Exception):
    """Base class for all package-specific failures."""


class PoleProximityError(DarbouxError):
    """Evaluation point is inside the exclusion radius of a lattice pole."""

    def __init__(self, z, distance, radius):
        self.z = z
        self.distance = distance
        self.radius = radius
        super().__init__(
            f"argument {z} is {distance:.3e} from a lattice point "
            f"(exclusion radius {radius:.1e})"
        )


class DomainError(DarbouxError):
    """Inputs outside the supported parameter domain."""


class DegeneratePairError(DarbouxError):
    """Addition-law arguments with coincident function values."""


class AccuracyError(DarbouxError):
    """A computation failed its internal accuracy check."""


class ConsistencyError(DarbouxError):
    """Two routes to the same quantity disagree beyond tolerance."""


class SingularStepError(DarbouxError):
    """A transformation step hit a vanishing denominator on the grid."""

    def __init__(self, message, abscissae=()):
        self.abscissae = list(abscissae)
        super().__init__(message)


class ConstructionError(DarbouxError):
    """A defect-potential construction could not produce a valid result."""


class VerificationError(DarbouxError):
    """A verification suite reported at least one failed check."""
