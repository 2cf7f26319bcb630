"""Empirical QKD and QSS acceptance against the exact rates as rounds grow."""

import argparse

from wclass.protocols import qkd_simulate, qss_simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for rounds in (10**3, 10**4, 10**5, 10**6):
        q, s = qkd_simulate(rounds, args.seed), qss_simulate(rounds, args.seed)
        print(f"{rounds:>8}  qkd {q.success_rate:.5f} +/- {q.stderr:.5f}  "
              f"qss {s.success_rate:.5f} +/- {s.stderr:.5f}  qss errors {s.errors}")


if __name__ == "__main__":
    main()
