"""Exception hierarchy shared across the package."""


class GnslabError(Exception):
    """Base class for every error this package raises deliberately."""


class NotHermitian(GnslabError):
    """Matrix handed to a Hermitian-only routine is not Hermitian."""


class Singular(GnslabError):
    """Matrix is singular where an invertible one is required."""


class ClosureOverflow(GnslabError):
    """Algebra closure exceeded the ambient dimension bound (numerical degeneracy)."""


class DimensionMismatch(GnslabError):
    """Operands live over incompatible spaces or algebras."""


class NotUnitary(GnslabError):
    """Matrix expected to be unitary is not, beyond tolerance."""


class NotInAlgebra(GnslabError):
    """Matrix does not lie in the span of the algebra basis."""


class InvalidState(GnslabError):
    """Linear functional fails the state axioms (normalized, Hermitian, positive)."""


class InvalidAutomorphism(GnslabError):
    """Coordinate map fails the *-automorphism axioms."""


class NotUnit(GnslabError):
    """Vector expected to have norm one does not."""


class CapExceeded(GnslabError):
    """Problem size exceeds a documented hard cap of this implementation."""


class NotGns(GnslabError):
    """Representation fails the defining GNS conditions for the given state."""


class InconsistentState(GnslabError):
    """Representation's vector state disagrees with the state it should carry."""


class NotImplementable(GnslabError):
    """Symmetry admits no unitary implementer in the given representation."""


class UnknownScenario(GnslabError):
    """Scenario name not present in the catalog."""


class SpecFormatError(GnslabError):
    """Input specification file does not match the expected JSON schema."""
