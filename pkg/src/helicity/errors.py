"""Domain errors raised by the helicity toolkit.

Every error carries a stable ``name`` so the CLI can report it on stderr.
"""


class HelicityError(Exception):
    name = "HelicityError"

    def __init__(self, message=""):
        super().__init__(message)
        self.message = message

    def __str__(self):
        return f"{self.name}: {self.message}" if self.message else self.name


def _make(name, doc):
    return type(name, (HelicityError,), {"name": name, "__doc__": doc})


InvalidResolution = _make("InvalidResolution", "Grid resolution below the minimum of 4.")
UnknownIdentifier = _make("UnknownIdentifier", "Identifier not allowed in this expression.")
DegreeOverflow = _make("DegreeOverflow", "Exterior derivative of a top-degree form.")
ManifoldMismatch = _make("ManifoldMismatch", "Objects live on different manifolds.")
NotTopDegree = _make("NotTopDegree", "Only top-degree forms can be integrated.")
NotZonal = _make("NotZonal", "Function depends on more than the polar angle.")
NotBasic = _make("NotBasic", "Function is not invariant under the Reeb flow.")
ChartDegeneracy = _make("ChartDegeneracy", "Frame solve is singular at a node.")
NotExact = _make("NotExact", "Field has nonzero flux (first Fourier mode present).")
ResidualTooLarge = _make("ResidualTooLarge", "Primitive residual exceeds tolerance.")
CrossCheckFailed = _make("CrossCheckFailed", "Two independent routes disagree.")
NotCompactlySupported = _make("NotCompactlySupported", "Hamiltonian does not vanish near the boundary.")
NotNullHomologous = _make("NotNullHomologous", "Signed point set does not sum to zero.")
ResonantDivisor = _make("ResonantDivisor", "Small divisor 1 - exp(2 pi i n theta) vanishes numerically.")
PrecisionExhausted = _make("PrecisionExhausted", "Requested construction exceeds double precision.")
NotFlat = _make("NotFlat", "Function does not decay super-polynomially at the origin.")
InsufficientPairs = _make("InsufficientPairs", "Too few admissible radius pairs were found.")


class ExprSyntaxError(HelicityError):
    """Parse failure; ``offset`` is the byte offset of the offending token."""

    name = "ExprSyntaxError"

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
