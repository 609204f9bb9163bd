"""Exception types shared across the package.

The split matters for the CLI exit-code contract: bad caller input and
invalid data map to exit 2, algorithmic failures to exit 4.
"""


class UsageError(ValueError):
    """The caller asked for something the operation cannot do."""


class ValidationError(ValueError):
    """Input data violates a stated invariant (names the invariant)."""


class NumericError(ArithmeticError):
    """A numerical routine failed to reach its accuracy contract."""
