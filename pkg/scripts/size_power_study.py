"""Rejection rates of ADF, SADF and GSADF at the simulated 95% level.

Runs three designs: driftless random walks (size), explosive AR(1) tails and
Evans collapsing bubbles (power). For the bubble designs it also reports how
often a stamped BSADF episode overlaps the generator's true regime.

    python3 scripts/size_power_study.py --T 400 --series 200
"""
import argparse
import warnings

import numpy as np

from rtadf.datestamp import default_min_duration, stamp_episodes
from rtadf.mc_critical import NullSpec, simulate_null
from rtadf.recursive import TestConfig, all_statistics
from rtadf.synth import EvansSpec, evans_path, gen_explosive_ar1, gen_random_walk, regime_intervals


def designs(T, n, pi):
    rw = NullSpec(drift_scale=0.0)
    start = 3 * T // 4
    yield "random walk", ((gen_random_walk(T, rw, s).values, None) for s in range(n))
    yield f"AR(1) rho=1.05 from {start}", (
        (gen_explosive_ar1(T, 1.05, 1.0, start, s).values, np.arange(T) >= start) for s in range(n)
    )
    spec = EvansSpec(T=T, pi=pi)
    yield f"Evans pi={pi} (log)", (
        (np.log(p.bubble), p.regime_mask) for p in (evans_path(spec, s) for s in range(n))
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=int, default=400)
    ap.add_argument("--series", type=int, default=200)
    ap.add_argument("--replications", type=int, default=2000)
    ap.add_argument("--pi", type=float, default=0.85)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    warnings.simplefilter("ignore", UserWarning)

    T = args.T
    cfg = TestConfig()
    d = simulate_null(T, cfg, replications=args.replications, seed=args.seed,
                      tests=("adf", "sadf", "gsadf"), keep_bsadf=True)
    cv = {t: d.critical_values(t)[0.95] for t in ("adf", "sadf", "gsadf")}
    seq = d.cv_sequence(0.95)
    print(f"T={T}, 95% CVs: " + ", ".join(f"{t} {v:.3f}" for t, v in cv.items()))
    print(f"{'design':<28} {'ADF':>6} {'SADF':>6} {'GSADF':>6} {'overlap':>8}")
    for name, draws in designs(T, args.series, args.pi):
        hits = {t: 0 for t in cv}
        overlap = rejected = 0
        for y, mask in draws:
            st = all_statistics(y, cfg)
            for t in cv:
                hits[t] += getattr(st, t) > cv[t]
            if mask is not None and st.gsadf > cv["gsadf"]:
                rejected += 1
                eps = stamp_episodes(st.bsadf, seq, default_min_duration(T))
                overlap += any(e.overlaps(a, b) for e in eps for a, b in regime_intervals(mask))
        rates = [hits[t] / args.series for t in ("adf", "sadf", "gsadf")]
        ov = f"{overlap / rejected:.2f}" if rejected else "-"
        print(f"{name:<28} {rates[0]:>6.3f} {rates[1]:>6.3f} {rates[2]:>6.3f} {ov:>8}")


if __name__ == "__main__":
    main()
