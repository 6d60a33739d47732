"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A constructor argument is outside the supported range (e.g. even q)."""


class DomainError(ValueError):
    """An operation was called outside its mathematical domain (eta(0), r = 0, ...)."""


class DimensionMismatchError(ValueError):
    pass


class InvalidFormError(ValueError):
    """Degenerate or malformed quadratic form."""


class ResourceError(RuntimeError):
    """A brute-force sweep would exceed the configured character-evaluation budget."""

    def __init__(self, required: int, budget: int, what: str = "sweep"):
        self.required = required
        self.budget = budget
        super().__init__(
            f"{what} needs {required} character evaluations, budget is {budget}; "
            f"raise the budget to at least {required}"
        )


class InternalConsistencyError(RuntimeError):
    """An exact identity failed to reduce (e.g. a non-exact division). Signals a bug."""
