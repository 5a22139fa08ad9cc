"""padlab: exact p-adic computations, group-law certification and finite quotients."""

from .errors import PadlabError
from .field import (
    Ball,
    LocalFieldContext,
    PElement,
    PVector,
    ResidueRing,
    make_context,
    parse_element,
)

__version__ = "0.1.0"

__all__ = [
    "Ball", "LocalFieldContext", "PElement", "PVector", "PadlabError",
    "ResidueRing", "make_context", "parse_element",
]
