"""Siegel series of quadratic lattices over Z_p (p odd), computed two ways.

One route counts integral overlattices by brute force and assembles the
polynomial from those counts; the other evaluates closed formulas valid when
the residue form has corank at most two. ``siegel.verify`` compares them.
"""

from .arith import PrimeCtx, PadicScalar, delta, hilbert_pi
from .lattice import QuadLattice, b_invariants, diagonalize, gk_invariant, residue_classify

__all__ = [
    "PrimeCtx",
    "PadicScalar",
    "QuadLattice",
    "b_invariants",
    "delta",
    "diagonalize",
    "gk_invariant",
    "hilbert_pi",
    "residue_classify",
]
