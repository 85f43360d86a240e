class InputError(ValueError):
    """Malformed arguments: wrong space shape, dimension mismatch, bad range."""


class DomainError(ValueError):
    """Mathematically undefined request, e.g. normalizing the zero vector."""


class ResourceError(RuntimeError):
    """A construction would exceed the configured cardinality cap."""

    def __init__(self, message: str, required: int, cap: int):
        super().__init__(f"{message} (requires {required} points, cap is {cap})")
        self.required = required
        self.cap = cap
