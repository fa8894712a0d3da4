"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the set of values an operation accepts."""


class ShapeError(ValueError):
    """Array dimensions do not agree with the circuit or dataset."""


class PreconditionError(ValueError):
    """An operator failed a unitarity or Hermiticity check."""


class CsvParseError(ValueError):
    """A dataset file could not be parsed."""

    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


class TrainingError(RuntimeError):
    """Training produced a non-finite loss.

    ``model`` holds the last parameters for which the loss was finite and
    ``curve`` the points recorded up to that moment.
    """

    def __init__(self, message, model, curve):
        super().__init__(message)
        self.model = model
        self.curve = curve
