"""Exception types. The CLI maps each family onto a process exit code."""


class ArgumentError(ValueError):
    """Invalid argument or configuration value."""


class ClassificationError(ValueError):
    """Operator is not an eigenoperator of the number commutator."""


class SectorViolationError(ValueError):
    """Operation would leave the fixed particle-number sector."""


class ResourceError(RuntimeError):
    """A dense-memory or dimension guard was exceeded."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class ConsistencyError(ArithmeticError):
    """A numerical invariant (trace, norm, residual) failed."""


class DegenerateEnsembleError(ConsistencyError):
    """Every trajectory of an ensemble had vanishing probability."""
