"""Monte Carlo calibration of FGLS estimates and asymptotic standard errors.

For each sample size, reports per-parameter bias, Monte Carlo sd, mean
reported SE and the share of replicates with the truth inside +-3 SE, then
the ratio of mean squared parameter errors between consecutive sizes.
"""

import argparse

import numpy as np

from gnarx.design import param_names
from gnarx.experiments import BENCHMARK_ORDER, benchmark_params, estimator_study
from gnarx.network import five_net


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=int, nargs="+", default=[256, 512])
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--seed", type=int, default=4)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args(argv)

    truth = benchmark_params().to_gamma()
    names = param_names(BENCHMARK_ORDER, five_net().nodes)
    mse = {}
    for T in args.T:
        est, se = estimator_study(T, args.reps, args.seed, args.threads)
        mse[T] = np.mean(np.sum((est - truth) ** 2, axis=1))
        print(f"T={T}  reps={args.reps}")
        print(f"  {'parameter':<14}{'truth':>8}{'bias':>10}{'mc_sd':>9}{'mean_se':>9}{'sd/se':>7}{'in3se':>7}")
        for k, name in enumerate(names):
            sd, m = est[:, k].std(ddof=1), se[:, k].mean()
            inside = np.mean(np.abs(est[:, k] - truth[k]) <= 3 * se[:, k])
            print(f"  {name:<14}{truth[k]:8.3f}{est[:, k].mean() - truth[k]:10.4f}{sd:9.4f}{m:9.4f}"
                  f"{sd / m:7.3f}{inside:7.3f}")
    sizes = sorted(mse)
    for a, b in zip(sizes, sizes[1:]):
        print(f"MSE(T={b}) / MSE(T={a}) = {mse[b] / mse[a]:.3f}  (root-T rate predicts {a / b:.3f})")


if __name__ == "__main__":
    main()
