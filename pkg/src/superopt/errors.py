"""Exception types raised across the package."""


class SuperoptError(Exception):
    pass


class InvalidFunction(SuperoptError, ValueError):
    pass


class PoleEvaluation(SuperoptError, ZeroDivisionError):
    pass


class NumericalFailure(SuperoptError, ArithmeticError):
    pass


class PoleOnCircle(SuperoptError, ValueError):
    pass


class OnCircleSingularity(PoleOnCircle):
    pass


class InvalidBlaschkeZero(SuperoptError, ValueError):
    pass


class NotPositive(SuperoptError, ValueError):
    pass


class NotSelfReflective(SuperoptError, ValueError):
    pass


class ShapeError(SuperoptError, ValueError):
    pass


class InvalidUnitary(SuperoptError, ValueError):
    pass


class TruncationTooSmall(NumericalFailure):
    pass


class NonUnitarySymbol(SuperoptError, ValueError):
    pass


class InvalidThematicData(SuperoptError, ValueError):
    pass


class TheoremViolation(SuperoptError, AssertionError):
    """A proven inequality failed numerically; always an artifact bug."""

    def __init__(self, clause, detail=""):
        self.clause = clause
        self.detail = detail
        super().__init__(f"{clause}: {detail}" if detail else clause)


class IdentityCase(SuperoptError):
    """The symbol is analytic, so it is its own superoptimal approximant."""

    def __init__(self, approximant):
        self.approximant = approximant
        super().__init__("symbol has no antianalytic part; approximant = symbol")


class ConstructionFailure(SuperoptError, ValueError):
    pass


class InfeasibleInterpolation(SuperoptError, ValueError):
    pass
