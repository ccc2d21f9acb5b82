#!/usr/bin/env python3
"""Sweep the coherent-field strength and print the lambda/vee convergence table."""

import argparse
import math

from trilevel.hilbert import SpaceSpec
from trilevel.hamiltonian import LAMBDA, HamiltonianSpec
from trilevel.dynamics import semiclassical_sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-bars", type=float, nargs="+",
                        default=[4.0, 8.0, 16.0, 32.0])
    args = parser.parse_args()

    h = HamiltonianSpec(LAMBDA, (0.0, 0.0, 3.0), 1.0, g31=0.1, g32=0.1)
    specs = [SpaceSpec(1, max(2, math.ceil(nb + 8.0 * math.sqrt(nb)) + 4))
             for nb in args.n_bars]
    result = semiclassical_sweep(specs, h, args.n_bars)

    print(f"{'n_bar':>8} {'n_max':>6} {'factor_lambda':>14} {'factor_vee':>12} "
          f"{'rel_diff':>10}")
    for row in result.rows:
        rel = "---" if row.rel_difference is None else f"{row.rel_difference:.6f}"
        print(f"{row.n_bar:8.1f} {row.n_max:6d} {row.factor_lambda:14.6f} "
              f"{row.factor_vee:12.6f} {rel:>10}")
    if result.slope is not None:
        print(f"\nlog-log slope: {result.slope:.4f} (the schemes converge as 1/n_bar)")


if __name__ == "__main__":
    main()
