"""Exception types shared across the package."""


class DegenerateChainError(ValueError):
    """Raised when an operation needs q + r > 0 but both transition rates are zero."""


class InsufficientDataError(ValueError):
    """Raised when a series lacks the transition pairs needed for estimation."""


class ParameterDomainError(ValueError):
    """Raised when chain or noise parameters are outside an operation's open domain."""


class EnumerationLimitError(ValueError):
    """Raised when an exhaustive oracle is asked to enumerate beyond its size guard."""
