"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Arguments violate an operation's preconditions (degree or shape mismatch, bad range)."""


class ResourceLimitError(RuntimeError):
    """A configured enumeration cap would be exceeded."""
