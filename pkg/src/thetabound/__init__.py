"""Certified enclosures of theta(p_n) and checks of explicit bounds built on it."""

__version__ = "0.1.0"

from .errors import DomainError, PrecisionError, RegistryError, ResourceError
from .rigor import Enclosure, Verdict

__all__ = [
    "DomainError",
    "Enclosure",
    "PrecisionError",
    "RegistryError",
    "ResourceError",
    "Verdict",
    "__version__",
]
