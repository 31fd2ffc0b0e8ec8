"""Wall-clock time of one full GSADF/BSADF sweep as T grows.

    python3 scripts/bench_gsadf.py --T 500 1000 2000 5000
"""
import argparse
import time

import numpy as np

from rtadf.recursive import TestConfig, all_statistics, gsadf


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=int, nargs="+", default=[500, 1000, 2000, 5000])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    gsadf(np.cumsum(np.random.default_rng(0).standard_normal(100)))  # compile outside the clock
    print(f"{'T':>6} {'gsadf s':>9} {'all tests s':>12}")
    for T in args.T:
        y = np.cumsum(np.random.default_rng(T).standard_normal(T))
        cfg = TestConfig(rolling_width=TestConfig().resolve_min_window(T))
        best = [np.inf, np.inf]
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            gsadf(y)
            t1 = time.perf_counter()
            all_statistics(y, cfg)
            t2 = time.perf_counter()
            best = [min(best[0], t1 - t0), min(best[1], t2 - t1)]
        print(f"{T:>6} {best[0]:>9.3f} {best[1]:>12.3f}")


if __name__ == "__main__":
    main()
