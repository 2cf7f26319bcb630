"""Minimum partial-transpose eigenvalue and negativity of the reduced W_n pair."""

import argparse

from wclass.entanglement import BipartitionSpec, negativity, ppt_closed_form_w, reduced_w


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=30)
    args = ap.parse_args()
    part = BipartitionSpec((0,), (1,))
    print(f"{'n':>8} {'min eigenvalue':>16} {'negativity':>14}")
    for n in range(3, args.n_max + 1):
        rho = reduced_w(n, 2)
        print(f"{n:8d} {ppt_closed_form_w(n)[0]:16.6e} {negativity(rho, part):14.6e}")
    for n in (10**3, 10**6, 10**9):
        print(f"{n:8.0e} {ppt_closed_form_w(n)[0]:16.6e} {'(closed form)':>14}")


if __name__ == "__main__":
    main()
