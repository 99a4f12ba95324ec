"""Exact symbolic and arbitrary-precision verification of rank-1 L-operators
for the two quadratic exchange algebras and of the parameter-shift ladders
they induce on hypergeometric-type special functions."""

from .symcore import BigRational, MultiPoly, RatFunc, ratfunc_eq
from .diffop import BandedBasisOp, BiOp, DiffOp, SpectralOp

__version__ = "0.1.0"

__all__ = [
    "BigRational",
    "MultiPoly",
    "RatFunc",
    "ratfunc_eq",
    "DiffOp",
    "SpectralOp",
    "BiOp",
    "BandedBasisOp",
    "__version__",
]
