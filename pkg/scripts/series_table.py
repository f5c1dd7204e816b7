#!/usr/bin/env python3
"""Print F_L(X), the normalized coefficients and the count table for small tail shapes.

For each diag(1, ..., 1, v1 p^d1, v2 p^d2) the enumeration route and the
closed-form route are shown side by side so the agreement can be read off.
"""

from __future__ import annotations

import argparse

from siegel.arith import least_nonresidue
from siegel.closed import TailParams, closed_coefficients
from siegel.lattice import QuadLattice, b_invariants
from siegel.overlat import count_table, table_to_text
from siegel.series import coefficients, siegel_poly


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--d-max", type=int, default=3)
    args = ap.parse_args()
    r = least_nonresidue(args.p)
    for d1 in range(args.d_max + 1):
        for d2 in range(d1, args.d_max + 1):
            for v2 in (1, r):
                L = QuadLattice.from_diag(args.p, [(1, 0)] * (args.n - 2) + [(1, d1), (v2, d2)])
                table = count_table(L)
                inv = b_invariants(L)
                F = siegel_poly(L, table)
                print(f"d=({d1},{d2}) v2={v2}  eB={inv.eB} zeta={inv.zetaB}")
                print(f"  F_L = {F.integer_coeffs()}")
                print(f"  c (counts) = {coefficients(L, table)}")
                print(f"  c (closed) = {closed_coefficients(TailParams.from_lattice(L))}")
                for line in table_to_text(table).splitlines():
                    print(f"  {line}")


if __name__ == "__main__":
    main()
