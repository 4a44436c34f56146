"""Exact nonnegativity certificates on finite rational point sets."""

from .ring import (
    Interpolator,
    Point,
    PointSet,
    Poly,
    QuotientBasis,
    cayley_bacharach_defect,
    cube_dimension,
    hilbert_function,
    hilbert_regularity,
    interpolator,
    interpolator_decomposition,
    mainbound_k,
    quotient_basis,
    restrict,
)

__all__ = [
    "Interpolator",
    "Point",
    "PointSet",
    "Poly",
    "QuotientBasis",
    "cayley_bacharach_defect",
    "cube_dimension",
    "hilbert_function",
    "hilbert_regularity",
    "interpolator",
    "interpolator_decomposition",
    "mainbound_k",
    "quotient_basis",
    "restrict",
]

__version__ = "0.1.0"
