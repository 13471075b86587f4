"""
Exception hierarchy for the intermediate-lines envelope toolkit.

Every module raises subclasses of one of two families:

- InputError: the caller handed over something the maths cannot accept
  (bad configuration, unknown curve, violated jet invariant). The CLI maps
  these to exit code 2.
- NumericalError: the input was fine but a computation could not deliver a
  trustworthy answer (degenerate denominator, no branch, lost precision).
  The CLI maps these to exit code 3.
"""


class EILError(Exception):
    """Base class for all toolkit errors."""
    pass


class InputError(EILError):
    """Invalid user input, configuration or invariant violation."""
    exit_code = 2


class NumericalError(EILError):
    """A numerical procedure failed or lost precision."""
    exit_code = 3


class InvariantViolation(InputError):
    """Raised when a data object fails validation."""

    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__(f"Invariant violation: {'; '.join(errors)}")


class DenominatorDegenerate(NumericalError):
    """A closed-form point lies at infinity (denominator below threshold)."""

    def __init__(self, what: str, value: float, threshold: float):
        self.what = what
        self.value = value
        self.threshold = threshold
        super().__init__(f"{what}: denominator {value:.3e} below {threshold:.3e}")
