"""Exception types shared across the package."""


class ChannelFormatError(ValueError):
    """Channel-spec document is malformed or violates a probability invariant."""


class OffSupportError(ValueError):
    """A density or conditional probability was queried outside its support."""


class UndefinedConditionalError(ValueError):
    """A conditional distribution was requested for a zero-probability condition."""


class BudgetExceededError(RuntimeError):
    """An exact enumeration would exceed the configured work or memory budget."""
