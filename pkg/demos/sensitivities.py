"""Risk aversion and contribution-volatility sweeps.

Two one-axis studies on the default stochastic-volatility setup:

  gamma    higher risk aversion lowers mean, variance, and certainty
           equivalent together; the whole distribution contracts.
  sigma_C  a noisier contribution stream adds unhedgeable background risk,
           raising terminal variance and costing certainty equivalent.

Reduced path counts keep each cell to a few seconds; pass --paths 50000
for desk-scale numbers.
"""

import argparse

import glidepath as g


def show(title, sweep):
    print(title)
    print("  value    mean  variance      ce")
    for value, s in sweep.table():
        print(f"{value:7.2f}  {s.mean:6.2f}  {s.variance:8.2f}  {s.ce:6.2f}")
    for cell in sweep.cells:
        if cell.error is not None:
            print(f"{cell.value:7.2f}  failed: {cell.error}")
    print()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--paths", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    base = g.Scenario(
        market=g.MarketParams(),
        contribution=g.ContributionParams(),
        fund=g.FundParams(),
        algo=g.AlgoParams(n_r=args.paths),
        label="sens",
        seed=args.seed,
    )

    show("risk aversion",
         g.run_sweep(g.SweepSpec(base=base, axis="gamma",
                                 values=(0.5, 1.5, 2.0, 3.0, 6.0))))
    show("contribution volatility",
         g.run_sweep(g.SweepSpec(base=base, axis="sigma_C",
                                 values=(0.0, 0.05, 0.10, 0.15))))


if __name__ == "__main__":
    main()
