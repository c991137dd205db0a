"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """An argument violates an operation's precondition."""


class SizeLimitError(ValueError):
    """An exhaustive enumeration would exceed its configured guard."""
