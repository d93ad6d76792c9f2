"""Empirical coverage of one-step bootstrap prediction intervals on the benchmark process."""

import argparse
import time

from gnarx.experiments import bootstrap_coverage_study


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outer", type=int, default=200, help="simulated series")
    ap.add_argument("--B", type=int, default=300, help="bootstrap replicates per series")
    ap.add_argument("--T", type=int, default=200)
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args(argv)

    t0 = time.perf_counter()
    cov = bootstrap_coverage_study(args.outer, args.B, args.T, args.alpha, args.seed, args.threads)
    print(f"nominal {1 - args.alpha:.2f}  empirical {cov:.3f}  "
          f"({args.outer} series, B={args.B}, {time.perf_counter() - t0:.0f}s)")


if __name__ == "__main__":
    main()
