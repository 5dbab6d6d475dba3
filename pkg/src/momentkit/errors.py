"""Exception types raised across the package.

Library code raises these instead of bare ValueError so that callers (and
the command line front end) can map failure modes to exit codes.
"""


class MomentKitError(Exception):
    """Base class for all momentkit errors."""


class ParseError(MomentKitError):
    """Malformed input file or scalar literal."""


class InsufficientTerms(MomentKitError):
    """An operation needed more sequence terms than are available."""

    def __init__(self, needed, available, what="sequence"):
        self.needed = needed
        self.available = available
        super().__init__(
            f"{what} provides {available} terms but {needed} are required"
        )


class NotPositiveDefinite(MomentKitError):
    """A computation required strict positivity that the input lacks."""


class NotPositiveInput(MomentKitError):
    """The input sequence fails its positivity precondition."""


class PrecisionLoss(MomentKitError):
    """Floating-point residuals exceeded the configured tolerance."""


class RealLambda(MomentKitError):
    """A spectral parameter on the real axis where Im != 0 is required."""


class DegenerateCircle(MomentKitError):
    """Weyl circle denominator vanished (numerical breakdown)."""


class PoleError(MomentKitError):
    """A Moebius-type transform was evaluated at a pole."""


class EigenFailure(MomentKitError):
    """Eigenvalue routine failed to converge."""


class QuadratureFailure(MomentKitError):
    """A constructed quadrature did not reproduce the input moments."""


class NegativeAtomEvenRoot(MomentKitError):
    """Even-order root of a negative atom was requested."""


class AtomAtZero(MomentKitError):
    """Pullback weight division hit an atom at zero."""


class IndexOutOfRange(MomentKitError):
    """Submatrix index set exceeds the available matrix."""


class TooFewIndices(MomentKitError):
    """Pattern detection needs at least two specified indices."""
