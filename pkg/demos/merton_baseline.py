"""Sanity check: with no contribution and constant volatility the optimal
equity fraction is flat in time and wealth.

The closed form is pi* = (mu - r) / (gamma * sigma^2). At the default
calibration that is 0.04 / (3 * 0.0169) = 0.78895, and mean terminal wealth
compounds near r + pi*(mu - r) = 5% per year. The solver knows none of this;
it fits the allocation by regression on simulated paths, so agreement here
exercises the whole backward/forward pipeline.

Runs in under a minute at the default reduced path count.
"""

import argparse

import numpy as np

import glidepath as g


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--paths", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    target = g.merton_ratio(0.06, 0.02, 0.13, 3.0)
    sc = g.Scenario(
        market=g.MarketParams(vol_spec=g.ConstantVol()),
        contribution=g.ContributionParams(enabled=False),
        fund=g.FundParams(),
        algo=g.AlgoParams(n_r=args.paths),
        label="flat-benchmark",
        seed=args.seed,
    )
    res = g.run_scenario(sc, keep_paths=False)

    yearly = np.asarray(res.mean_pi).reshape(-1, sc.algo.N).mean(axis=1)
    print(f"closed-form allocation: {target:.5f}")
    print("year  mean allocation  deviation")
    for year, pi in enumerate(yearly):
        print(f"{year:4d}  {pi:15.4f}  {pi - target:+9.4f}")
    print(f"\nmax deviation over all {len(res.mean_pi)} steps: "
          f"{np.max(np.abs(res.mean_pi - target)):.4f}")
    print(f"mean terminal wealth {res.stats.mean:.3f} "
          f"(5%/year compounding gives {5 * np.exp(0.5):.3f})")


if __name__ == "__main__":
    main()
