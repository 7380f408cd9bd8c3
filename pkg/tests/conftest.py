"""Shared fixtures: the MakerDAO 2023-12-31 files and small builders."""

from __future__ import annotations

from datetime import date
from decimal import Decimal
from pathlib import Path

import pytest

from stablecoin_alm import (
    AssetClass,
    AssetPosition,
    BalanceSheetSnapshot,
    Bucket,
    LiabilityKind,
    LiabilityPosition,
    load_holders,
    load_scenario,
    load_snapshot,
    load_vault_portfolio,
)
from stablecoin_alm.capital_risk import car_report

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures" / "makerdao_2023-12-31"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def maker_scenario():
    return load_scenario(FIXTURE_DIR / "scenario.json")


@pytest.fixture(scope="session")
def maker_snapshot(maker_scenario):
    return load_snapshot(
        FIXTURE_DIR / "snapshot.json", balance_tolerance=maker_scenario.balance_tolerance
    )


@pytest.fixture(scope="session")
def maker_holders():
    return load_holders(FIXTURE_DIR / "holders.json")


@pytest.fixture(scope="session")
def maker_portfolios():
    portfolio_id, portfolio = load_vault_portfolio(FIXTURE_DIR / "vaults.json")
    return {portfolio_id: portfolio}


@pytest.fixture(scope="session")
def maker_car_report(maker_snapshot, maker_scenario, maker_portfolios):
    return car_report(
        maker_snapshot,
        maker_scenario.risk_params,
        maker_portfolios,
        reference_total_car=maker_scenario.reference_total_car,
    )


def make_asset(
    pid: str,
    exposure: str,
    asset_class: AssetClass = AssetClass.OTHER,
    maturity: str = "0",
    tenor: Bucket = Bucket.MONTH,
    rating=None,
    collateral_ref=None,
) -> AssetPosition:
    return AssetPosition(
        id=pid,
        asset_class=asset_class,
        exposure=Decimal(exposure),
        avg_maturity=Decimal(maturity),
        liquidity_tenor=tenor,
        rating=rating,
        collateral_ref=collateral_ref,
    )


def make_snapshot(assets, non_equity: str, equity: str, as_of=date(2024, 1, 31)):
    liabilities = [
        LiabilityPosition(id="coin", kind=LiabilityKind.CIRCULATING_STABLECOIN, amount=Decimal(non_equity)),
        LiabilityPosition(id="equity", kind=LiabilityKind.EQUITY, amount=Decimal(equity)),
    ]
    return BalanceSheetSnapshot(as_of=as_of, assets=assets, liabilities=liabilities)
