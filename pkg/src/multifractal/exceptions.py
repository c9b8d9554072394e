"""Exception types shared across the library.

The CLI maps these onto exit codes: validation/schema problems exit 2,
strong-separation failures exit 3, oracle disagreements exit 1.
"""


class ValidationError(ValueError):
    """Input fails a structural check (bad vector, bad model, bad schema)."""


class DomainError(ValueError):
    """Input is structurally fine but outside an operation's domain."""


class InfiniteCrossEntropyError(DomainError):
    """H(w, p) diverges: some w_i > 0 where p_i = 0."""


class RangeCapError(DomainError):
    """|q| beyond the solver cap; use the asymptote data instead."""


class ResourceLimitError(RuntimeError):
    """An enumeration would exceed its hard size guard."""


class IntegrityError(RuntimeError):
    """A numerical self-check failed (non-concave input, broken identity)."""


class SSCViolationError(ValueError):
    """Two first-level images of the hull overlap or touch."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair
