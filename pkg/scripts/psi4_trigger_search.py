"""Trigger-analyzer sweep for heralded schemes that carry a trigger half-wave plate."""

import argparse

from wclass.optics import SchemeError, load_scheme, run_scheme, shipped_scheme, trigger_search


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("schemes", nargs="*", default=["psi4_w3v", "collinear_w3v"])
    args = ap.parse_args()
    for name in args.schemes:
        scheme = load_scheme(shipped_scheme(name))
        try:
            found = trigger_search(scheme)
        except SchemeError:
            rep = run_scheme(scheme)
            print(f"{name}: fixed trigger, probability {rep.probability:.6f}  fidelity {rep.fidelity:.6f}")
            continue
        print(name)
        for label, r in found["settings"].items():
            print(f"  trigger {label:>4}: probability {r['probability']:.6f}  fidelity {r['fidelity']:.6f}")
        print(f"  best: {found['best']}")


if __name__ == "__main__":
    main()
