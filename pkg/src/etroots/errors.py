"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside the range an operation accepts."""


class DegenerateInputError(ValueError):
    """The input is well-formed but the requested quantity is undefined for it."""


class SingularInputError(ValueError):
    """A root or evaluation point sits on a singularity of the integrand."""
