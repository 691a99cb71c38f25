"""Far-field decay exponents of localized pieces.

Localizes a compactly supported bump against a partition of unity, picks
an off-center cell, and fits log-log slopes of the potential gradient,
the potential minus its leading term, and minus the full first-order
part.  Expected exponents are -1 / -2 / -3.  Usage:

    python3 scripts/farfield_slopes.py --delta 0.125 --op 1,0,1
"""

import argparse

import numpy as np

from ecap.grids import GridFunction
from ecap.localization import (build_partition, density_potential,
                               farfield_decay_check, laurent_coeffs,
                               piece_density)
from ecap.operators import new_operator


def bump(center: complex, radius: float, power: int = 4):
    def fn(z):
        rho2 = (np.abs(np.asarray(z, dtype=complex) - center) / radius) ** 2
        return np.where(rho2 < 1.0, (1.0 - rho2) ** power, 0.0)
    return fn


def parse_op(text: str):
    vals = [complex(p.replace("i", "j")) for p in text.split(",")]
    if len(vals) != 3:
        raise SystemExit("op spec needs three comma-separated numbers")
    return vals


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--op", default="1,0,1", help='e.g. "0.25,0.25i,-0.25"')
    ap.add_argument("--delta", type=float, default=0.125)
    ap.add_argument("--cell", default="2,1", help="lattice index j1,j2")
    ap.add_argument("--m-max", type=int, default=8)
    args = ap.parse_args()

    op = new_operator(*parse_op(args.op))
    delta = args.delta
    spacing = delta / 16
    half = 1.0
    n = 2 * int(round(half / spacing)) + 1
    f = GridFunction.from_function(bump(0.03 + 0.01j, 0.3),
                                   origin=-half * (1 + 1j),
                                   spacing=spacing, nx=n, ny=n)
    f = f.fill_gradients(order=4)
    part = build_partition((-0.9, -0.9, 0.9, 0.9), delta, spacing=spacing)
    j1, j2 = (int(v) for v in args.cell.split(","))
    cell = next(c for c in part.cells if (c.j1, c.j2) == (j1, j2))

    dens = piece_density(op, f, part, cell)
    co = laurent_coeffs(op, dens, cell.center, m_max=args.m_max)
    pot = density_potential(op, dens)
    rep = farfield_decay_check(op, pot, co, r_support=3 * delta)

    print(f"cell ({j1},{j2}) center {cell.center:.4g}, "
          f"|c0| = {abs(co.c0):.4e}, "
          f"radii {rep.radii[0]:.3g}..{rep.radii[-1]:.3g}")
    for label, want, sl in (("|grad g|", -1, rep.gradient),
                            ("|g - c0 Phi|", -2, rep.minus_c0),
                            ("|g - first order|", -3, rep.minus_first)):
        print(f"{label:>18}: slope {sl.slope:+.3f} +- {sl.ci95:.3f} "
              f"(expected {want:+d})")


if __name__ == "__main__":
    main()
