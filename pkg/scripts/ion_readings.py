"""Five-pulse ion sequence under both pulse orders and both sideband conventions."""

from wclass.dynamics import ion_w_readings


def main():
    out = ion_w_readings()
    print(f"{'reading':<24} {'first pulse':>12} {'final':>10} {'purity':>10} {'leakage':>10}")
    for key, r in sorted(out["runs"].items()):
        print(f"{key:<24} {r.first_pulse_fidelity:12.6f} {r.final_fidelity:10.6f} "
              f"{r.ion_purity:10.6f} {r.max_leakage:10.2e}")
    print(f"sigma+ = |S><D| reading that works: {out['chosen']}")
    print(f"sigma+ = |D><S| reading that works: {out['alternative']}")


if __name__ == "__main__":
    main()
