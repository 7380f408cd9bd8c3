#!/usr/bin/env python3
"""Grid-search the adverse market model against a vault portfolio.

Sweeps volatility / jump parameters and prints the seeded mean loss ratio for
each combination, so a scenario file can ship a config whose ratio lands in a
target band. Tooling only — not part of the library.

Example:
    python tools/calibrate_market_model.py \
        --vaults fixtures/makerdao_2023-12-31/vaults.json \
        --target-low 0.0287 --target-high 0.0290
"""

from __future__ import annotations

import argparse
from decimal import Decimal

from stablecoin_alm import MonteCarloConfig, expected_loss_ratio, load_vault_portfolio


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--vaults", required=True, help="vault portfolio file")
    parser.add_argument("--n-paths", type=int, default=10_000)
    parser.add_argument("--horizon-days", type=int, default=30)
    parser.add_argument("--seed", type=int, default=20231231)
    parser.add_argument("--drift", default="0")
    parser.add_argument("--vol", nargs="+", default=["0.045", "0.05", "0.055", "0.06"])
    parser.add_argument("--jump-prob", nargs="+", default=["0.01", "0.015", "0.02", "0.03"])
    parser.add_argument("--jump-size", nargs="+", default=["0.25", "0.30", "0.35", "0.40"])
    parser.add_argument("--target-low", type=Decimal, default=None)
    parser.add_argument("--target-high", type=Decimal, default=None)
    return parser.parse_args()


def main() -> None:
    args = parse_args()
    _, portfolio = load_vault_portfolio(args.vaults)
    hits = []
    for vol in args.vol:
        for jump_prob in args.jump_prob:
            for jump_size in args.jump_size:
                cfg = MonteCarloConfig(
                    n_paths=args.n_paths,
                    horizon_days=args.horizon_days,
                    daily_volatility=Decimal(vol),
                    daily_drift=Decimal(args.drift),
                    jump_probability=Decimal(jump_prob),
                    jump_size=Decimal(jump_size),
                    seed=args.seed,
                )
                ratio = expected_loss_ratio(portfolio, cfg)
                in_band = (
                    args.target_low is not None
                    and args.target_high is not None
                    and args.target_low <= ratio <= args.target_high
                )
                marker = "  <-- in band" if in_band else ""
                print(f"vol={vol} jump_prob={jump_prob} jump_size={jump_size} ratio={ratio}{marker}")
                if in_band:
                    hits.append((vol, jump_prob, jump_size, ratio))
    if hits:
        print(f"\n{len(hits)} combination(s) in band:")
        for vol, jump_prob, jump_size, ratio in hits:
            print(f"  vol={vol} jump_prob={jump_prob} jump_size={jump_size} ratio={ratio}")


if __name__ == "__main__":
    main()
