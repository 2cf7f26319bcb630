"""Run every verification suite and print a one-line summary per check."""

import argparse

from wclass.verify import VerifyConfig, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    report = run_suite("all", VerifyConfig(seed=args.seed))
    for c in sorted(report.checks, key=lambda c: c.id):
        mark = "info" if c.kind == "info" else ("pass" if c.passed else "FAIL")
        print(f"{mark:4}  {c.id:<42} {c.note}")
    print("overall:", "pass" if report.passed else "fail")


if __name__ == "__main__":
    main()
