"""Exact computations in the Lie algebras W, W~ and W(2,2)."""

from .algebra import (
    C1,
    C2,
    AlgebraKind,
    BasisSymbol,
    Element,
    I,
    L,
    OutOfWindowError,
    ParseError,
    WittlabError,
    bracket,
    check_jacobi,
    degree,
    format_element,
    parse_element,
)

__version__ = "0.1.0"

__all__ = [
    "C1", "C2", "AlgebraKind", "BasisSymbol", "Element", "I", "L",
    "OutOfWindowError", "ParseError", "WittlabError",
    "bracket", "check_jacobi", "degree", "format_element", "parse_element",
]
