"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation accepts."""


class PostselectionError(DomainError):
    """Post-selection was requested on an outcome of zero probability."""


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its requested accuracy."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
