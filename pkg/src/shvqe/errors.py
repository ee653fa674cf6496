"""Exception types shared across the package."""


class ShvqeError(Exception):
    """Base class for package errors."""


class DimensionError(ShvqeError, ValueError):
    """Operands act on different numbers of qubits."""


class CapacityError(ShvqeError):
    """Requested size exceeds the dense-simulation ceiling."""


class NumericalIntegrityError(ShvqeError, ArithmeticError):
    """A quantity that must be real/finite came out otherwise."""


class HamiltonianParseError(ShvqeError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class SchemaError(ShvqeError, ValueError):
    """File content disagrees with its declared header."""
