"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid input: dimension mismatch, non-Hermitian matrix, bad state, ..."""


class TruncationError(InputError):
    """A state does not fit the requested Fock-space truncation.

    ``required_dim`` carries an estimate of the smallest dimension that
    would satisfy the tail bound, when one could be determined.
    """

    def __init__(self, message: str, required_dim: int | None = None):
        super().__init__(message)
        self.required_dim = required_dim


class NumericError(RuntimeError):
    """Numerical failure: eigensolver breakdown, realness audit violation."""


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""
