"""Exception hierarchy shared by the symbolic kernel, the calculus layer and
the numeric lab."""


class HirotalabError(Exception):
    """Base class for all package-specific errors."""


# --- symbolic kernel ---------------------------------------------------------

class ZeroDenominator(HirotalabError):
    """A denominator normalized to the zero polynomial."""


class JetInDenominator(HirotalabError):
    """An operation tried to place a jet variable inside a denominator."""


class EssentialDependence(HirotalabError):
    """A Laurent expansion was requested in a parameter that occurs inside an
    exponential atom."""


class PoleRemains(HirotalabError):
    """A limit was taken with a premultiplier power too small to clear the
    pole; the offending orders are reported in the message."""

    def __init__(self, message, orders=()):
        super().__init__(message)
        self.orders = tuple(orders)


# --- exterior calculus / model library --------------------------------------

class ChartMismatch(HirotalabError):
    """Two operands live on different charts."""


class DegenerateSpectrum(HirotalabError):
    """Two constant spectral points coincide; degenerations must be taken
    through a small parameter instead."""


class UnknownPde(HirotalabError):
    """Catalog lookup with an id that is not registered."""


class DependentFields(HirotalabError):
    """A distribution was handed generators that are linearly dependent at a
    generic point."""


class MalformedSystem(HirotalabError):
    """A first-order system does not have the expected transport shape."""


class SingularChange(HirotalabError):
    """A coordinate change whose jacobian is singular on the whole chart."""


# --- numeric lab --------------------------------------------------------------

class BoundaryNode(HirotalabError):
    """A finite-difference stencil was requested at a node too close to the
    grid boundary."""


class ShapeMismatch(HirotalabError):
    """Grids passed to a residual evaluation do not share axes."""


class SmallDenominator(HirotalabError):
    """A reconstruction divides by a sampled value below the safety bound."""


class CharacteristicEscape(HirotalabError):
    """A characteristic curve left the sample box before reaching the initial
    manifold."""


class EvaluationDomain(HirotalabError):
    """A closed-form solution is singular or non-finite on the sample box."""


# --- expression mini-language --------------------------------------------------

class ExpressionSyntaxError(HirotalabError):
    """Parse failure; carries 1-based line and column of the offence."""

    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownIdentifier(HirotalabError):
    """An identifier that is neither a coordinate, parameter nor unknown."""


class TranscendentalInSymbolicContext(HirotalabError):
    """sin/cos (or a float literal) used where an exact expression is
    required."""
