"""Detect whether Java code was written by a human or generated by a chat model."""

from .errors import CodeOriginError, InputError
from .snippet import CLASS_ORDER, Origin, Snippet

__version__ = "0.1.0"

__all__ = ["CLASS_ORDER", "CodeOriginError", "InputError", "Origin", "Snippet", "__version__"]
