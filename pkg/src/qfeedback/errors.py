"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A required key is missing or a setting cannot be parsed."""


class ParameterConflictError(ConfigurationError):
    """Two settings that must be consistent (e.g. L and tau) disagree."""


class PhysicalDomainError(ValueError):
    """A parameter value lies outside its physical domain."""


class GridTooCoarseError(ValueError):
    """The mode grid recurs before the requested end time.

    Carries the minimal number of modes that would push the recurrence
    horizon past the requested end time.
    """

    def __init__(self, message, required_n_modes=None):
        super().__init__(message)
        self.required_n_modes = required_n_modes


class MemoryBudgetError(MemoryError):
    """A state or operator would exceed the configured memory budget."""

    def __init__(self, message, required_bytes=None):
        super().__init__(message)
        self.required_bytes = required_bytes


class IntegrationDivergedError(ArithmeticError):
    """A non-finite amplitude appeared during time stepping."""

    def __init__(self, message, t=None, dt=None):
        super().__init__(message)
        self.t = t
        self.dt = dt


class DegenerateStateError(ValueError):
    """An operation needs a state with nonzero weight (e.g. unit trace)."""


class SweepValidationError(ConfigurationError):
    """A sweep specification is malformed (duplicate or unordered points)."""
