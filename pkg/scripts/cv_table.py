"""Simulated 90/95/99% critical values for ADF, SADF, GSADF and RADF over a grid of T.

    python3 scripts/cv_table.py --T 100 200 400 1000 --replications 2000
"""
import argparse
import warnings

from rtadf.mc_critical import simulate_null
from rtadf.recursive import TestConfig, psy_min_window

TESTS = ("adf", "sadf", "gsadf", "radf")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=int, nargs="+", default=[100, 200, 400, 1000])
    ap.add_argument("--replications", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    warnings.simplefilter("ignore", UserWarning)

    print(f"{'T':>6} {'w0':>4} {'test':>6} {'90%':>8} {'95%':>8} {'99%':>8}")
    for T in args.T:
        w0 = psy_min_window(T)
        cfg = TestConfig(rolling_width=w0)
        d = simulate_null(T, cfg, replications=args.replications, seed=args.seed, tests=TESTS,
                          workers=args.workers)
        for t in TESTS:
            cv = d.critical_values(t)
            print(f"{T:>6} {w0:>4} {t:>6} {cv[0.90]:>8.3f} {cv[0.95]:>8.3f} {cv[0.99]:>8.3f}")


if __name__ == "__main__":
    main()
