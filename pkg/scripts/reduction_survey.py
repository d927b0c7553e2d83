#!/usr/bin/env python3
"""Survey the reduction of a curve at every place of Q(mu_m) above its bad
primes and above a chosen p: Kodaira types, Tamagawa numbers, counts, and
Euler factors at s = 1.

Example: python scripts/reduction_survey.py --curve 1,0,0,-1,-1 --prime 7 --conductor 7
"""

import argparse
import sys
from fractions import Fraction

from eulerchar.curves import WeierstrassModel, invariants
from eulerchar.cyclotomic import splitting
from eulerchar.euler import bad_primes_of_curve, local_data_at
from eulerchar.tate import euler_factor_at_one
from eulerchar.valuations import vp


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--curve", required=True, help="a1,a2,a3,a4,a6")
    ap.add_argument("--prime", type=int, required=True)
    ap.add_argument("--conductor", type=int, default=1)
    args = ap.parse_args()

    model = WeierstrassModel.from_rationals(
        [Fraction(c) for c in args.curve.split(",")]
    )
    inv = invariants(model)
    print(f"curve {args.curve}: disc = {inv.disc}, j = {inv.j}")
    primes = sorted(set(bad_primes_of_curve(model)) | {args.prime})
    print(f"{'ell':>5} {'(e,f,g)':>10} {'q_v':>8} {'type':>6} {'c_v':>4} "
          f"{'class':<18} {'N_v':>8}  L(E,1)      |L|_p exp")
    for ell in primes:
        sp = splitting(ell, args.conductor)
        data = local_data_at(model, ell, args.conductor)
        L = euler_factor_at_one(data)
        exp = -vp(L, args.prime)
        print(
            f"{ell:>5} {f'({sp.e},{sp.f},{sp.g})':>10} {data.q_v:>8} "
            f"{data.kodaira.symbol:>6} {data.c_v:>4} {data.reduction_class:<18} "
            f"{str(data.N_v):>8}  {str(L):<11} {exp:>3}   (x{sp.g} places)"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
