"""Probability and W3 fidelity for every ancilla wiring of the distillation step."""

import argparse
from math import sqrt

from wclass.protocols import distill_wiring_search


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, default=0.8)
    ap.add_argument("--c", type=float, default=0.3)
    args = ap.parse_args()
    b = sqrt(1 - args.a**2 - args.c**2)
    print(f"a={args.a} b={b:.10f} c={args.c}  target 3c^2={3 * args.c**2:.6f}")
    for r in distill_wiring_search(args.a, b, args.c):
        print(f"  ancilla_first={r['ancilla_first']!s:5} swap_targets={r['swap_targets']!s:5} "
              f"keep={r['keep']}  p={r['probability']:.6f}  F={r['fidelity']:.6f}")


if __name__ == "__main__":
    main()
