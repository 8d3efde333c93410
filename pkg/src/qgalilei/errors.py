"""Exception hierarchy shared by every layer of the workbench."""


class QGalileiError(Exception):
    """Base class for all workbench errors."""


# scalar kernel ---------------------------------------------------------------

class DivisionByZero(QGalileiError):
    pass


class ModeMismatch(QGalileiError):
    """Multivariate and scaled scalars were mixed in one expression."""


class DegenerateInstantiation(QGalileiError):
    """A case denominator vanishes under the requested parameter assignment."""


class NotAPerfectSquare(QGalileiError):
    pass


# noncommutative engine -------------------------------------------------------

class TerminationBudgetExceeded(QGalileiError):
    """Rewrite step count exceeded the configured bound."""


class SlotMismatch(QGalileiError):
    pass


class AlphabetMismatch(QGalileiError):
    pass


class MissingTruncation(QGalileiError):
    pass


class NonzeroConstantTerm(QGalileiError):
    pass


class NotDivisible(QGalileiError):
    """A series-level parameter division was requested on a non-divisible input."""


# case registry ---------------------------------------------------------------

class CaseSyntaxError(QGalileiError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class UnknownSymbol(CaseSyntaxError):
    pass


class TerminationViolation(QGalileiError):
    """No admissible termination measure exists for the declared rule set."""


class TailOrderViolation(QGalileiError):
    """A dual-side coefficient has parameter valuation below (degree - 1)."""


class UnknownCase(QGalileiError):
    pass


class NotDefinedAtZero(QGalileiError):
    """The classical limit does not exist for some coefficient."""


# hopf / duality --------------------------------------------------------------

class NotInvertibleAtTruncation(QGalileiError):
    pass


class StructureViolation(QGalileiError):
    """The pairing matrix lost its certified block structure."""


class SingularSolve(QGalileiError):
    pass
