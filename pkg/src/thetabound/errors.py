"""Exception types shared across the package."""


class DomainError(ValueError):
    """An operation was applied outside the domain where it is defined."""


class PrecisionError(ValueError):
    """A requested working precision is not supported."""


class ResourceError(RuntimeError):
    """A computation needs more data or memory than is available."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class RegistryError(KeyError):
    """Lookup of an unknown claim or expression id."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown id"
