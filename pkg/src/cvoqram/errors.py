"""Exception hierarchy shared by all cvoqram modules."""


class CvoqramError(Exception):
    """Base class for every error raised by this package."""


# circuit IR
class CircuitError(CvoqramError, ValueError):
    pass


class OperandOutOfRange(CircuitError):
    pass


class DuplicateOperand(CircuitError):
    pass


class NonUnitaryMatrix(CircuitError):
    pass


class NotLowered(CircuitError):
    pass


class ParseError(CircuitError):
    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


# lowering
class LoweringError(CvoqramError, ValueError):
    pass


class InsufficientAncillas(LoweringError):
    pass


class OperandClash(LoweringError):
    pass


class NonSpecialUnitary(LoweringError):
    pass


# datasets and synthesis
class DatasetError(CvoqramError, ValueError):
    pass


class DuplicatePattern(DatasetError):
    pass


class LengthMismatch(DatasetError):
    pass


class NotNormalized(DatasetError):
    pass


class EmptyDataset(DatasetError):
    pass


class InvalidPattern(DatasetError):
    pass


class GammaUnderflow(CvoqramError, ArithmeticError):
    pass


class AmplitudeExceedsGamma(CvoqramError, ArithmeticError):
    pass


class GammaNotExhausted(CvoqramError, ArithmeticError):
    pass


# simulation
class TooManyQubits(CvoqramError, ValueError):
    pass


class DimensionMismatch(CvoqramError, ValueError):
    pass


# dataset generation / benchmarking
class TooManyPatterns(DatasetError):
    pass


class SamplingSaturated(DatasetError):
    pass


class ConfigError(CvoqramError, ValueError):
    pass
