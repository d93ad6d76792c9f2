"""How often BIC picks the true order of the benchmark GNARX(1,[1],1) process.

    python3 scripts/selection_study.py --T 64 128 --reps 1000 --method global stagewise
"""

import argparse
import time

from gnarx.experiments import BENCHMARK_ORDER, selection_study


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=int, nargs="+", default=[64, 128])
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--method", nargs="+", choices=["global", "stagewise"], default=["global", "stagewise"])
    ap.add_argument("--penalty", choices=["cells", "time"], default="cells")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--top", type=int, default=3, help="runner-up orders to list")
    args = ap.parse_args(argv)

    print("method,T,reps,true_share,seconds")
    for method in args.method:
        for T in args.T:
            t0 = time.perf_counter()
            res = selection_study(T, args.reps, args.seed, method, threads=args.threads, penalty=args.penalty)
            print(f"{method},{T},{args.reps},{res.share(BENCHMARK_ORDER):.3f},{time.perf_counter() - t0:.1f}")
            for order, count in res.counts.most_common(args.top):
                print(f"#   {order.label():<28} {order.alpha:<6} {count}")


if __name__ == "__main__":
    main()
