"""File ingestion: strict schemas, violation collection, defaults, round-trips."""

import dataclasses
import json
from decimal import Decimal
from pathlib import Path

import pytest

from stablecoin_alm import (
    AssetClass,
    Bucket,
    ConfigurationError,
    DOCUMENTED_DEFAULTS,
    LossStatistic,
    PdLgd,
    Rating,
    SchemaError,
    load_holders,
    load_scenario,
    load_snapshot,
    load_vault_portfolio,
)
from stablecoin_alm.ingestion import (
    dump_holders,
    dump_scenario,
    dump_snapshot,
    dump_vault_portfolio,
    validate_scenario_for_snapshot,
)

D = Decimal

MINIMAL_SNAPSHOT = {
    "schema_version": 1,
    "kind": "balance_sheet_snapshot",
    "as_of": "2024-01-31",
    "assets": [],
    "liabilities": [{"id": "equity", "kind": "equity", "amount": "0"}],
}


def write(tmp_path: Path, name: str, document) -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


def snapshot_doc(**changes):
    document = json.loads(json.dumps(MINIMAL_SNAPSHOT))
    document.update(changes)
    return document


# -- snapshot ------------------------------------------------------------------


def test_fixture_snapshot_loads(fixture_dir):
    snapshot = load_snapshot(fixture_dir / "snapshot.json", balance_tolerance=D("1000000"))
    assert snapshot.total_assets() == D("5220971376.00")
    assert len({p.asset_class for p in snapshot.assets}) == 4
    crypto = [p for p in snapshot.assets if p.asset_class is AssetClass.CRYPTO_BACKED_LOAN]
    assert all(p.collateral_ref == "maker_vaults" for p in crypto)


def test_empty_asset_list_is_a_valid_vacuous_snapshot(tmp_path):
    snapshot = load_snapshot(write(tmp_path, "s.json", MINIMAL_SNAPSHOT))
    assert snapshot.assets == ()


def test_negative_exposure_is_reported_on_the_record(tmp_path):
    document = snapshot_doc(
        assets=[
            {
                "id": "bad",
                "class": "public_credit",
                "exposure": "-1",
                "avg_maturity": "0",
                "liquidity_tenor": "month",
            }
        ]
    )
    with pytest.raises(SchemaError) as excinfo:
        load_snapshot(write(tmp_path, "s.json", document))
    assert any("assets[0]" in v and "-1" in v for v in excinfo.value.violations)


def test_unknown_field_is_named(tmp_path):
    document = snapshot_doc(surprise=1)
    with pytest.raises(SchemaError) as excinfo:
        load_snapshot(write(tmp_path, "s.json", document))
    assert any("surprise" in v and "unknown field" in v for v in excinfo.value.violations)


def test_unknown_asset_class_is_an_error(tmp_path):
    document = snapshot_doc(
        assets=[
            {
                "id": "a",
                "class": "meme_coins",
                "exposure": "1",
                "avg_maturity": "0",
                "liquidity_tenor": "day",
            }
        ]
    )
    with pytest.raises(SchemaError) as excinfo:
        load_snapshot(write(tmp_path, "s.json", document))
    assert any("meme_coins" in v for v in excinfo.value.violations)


def test_malformed_decimal_carries_record_context(tmp_path):
    document = snapshot_doc(
        assets=[
            {
                "id": "a",
                "class": "cash",
                "exposure": "12,5",
                "avg_maturity": "0",
                "liquidity_tenor": "day",
            }
        ]
    )
    with pytest.raises(SchemaError) as excinfo:
        load_snapshot(write(tmp_path, "s.json", document))
    assert any("assets[0].exposure" in v for v in excinfo.value.violations)


def test_numeric_money_is_rejected(tmp_path):
    document = snapshot_doc(
        liabilities=[{"id": "equity", "kind": "equity", "amount": 0}]
    )
    with pytest.raises(SchemaError) as excinfo:
        load_snapshot(write(tmp_path, "s.json", document))
    assert any("decimal string" in v for v in excinfo.value.violations)


def test_every_violation_is_collected_not_just_the_first(tmp_path):
    document = snapshot_doc(
        assets=[
            {"id": "a", "class": "cash", "exposure": "-1", "avg_maturity": "0", "liquidity_tenor": "day"},
            {"id": "a", "class": "nope", "exposure": "x", "avg_maturity": "0", "liquidity_tenor": "day"},
        ],
        liabilities=[
            {"id": "equity", "kind": "equity", "amount": "0", "extra": 1},
        ],
    )
    with pytest.raises(SchemaError) as excinfo:
        load_snapshot(write(tmp_path, "s.json", document))
    assert len(excinfo.value.violations) >= 3


def test_identity_violation_respects_tolerance(tmp_path):
    document = snapshot_doc(
        assets=[
            {"id": "a", "class": "cash", "exposure": "100", "avg_maturity": "0", "liquidity_tenor": "day"}
        ],
        liabilities=[
            {"id": "coin", "kind": "circulating_stablecoin", "amount": "95"},
            {"id": "equity", "kind": "equity", "amount": "10"},
        ],
    )
    path = write(tmp_path, "s.json", document)
    with pytest.raises(SchemaError):
        load_snapshot(path, balance_tolerance=D("1"))
    snapshot = load_snapshot(path, balance_tolerance=D("10"))
    assert snapshot.total_assets() == D("100")


def test_stablecoin_tenor_default_is_recorded(tmp_path):
    document = snapshot_doc(
        assets=[
            {"id": "usdc", "class": "stablecoin", "exposure": "5", "avg_maturity": "0"}
        ],
        liabilities=[
            {"id": "coin", "kind": "circulating_stablecoin", "amount": "5"},
            {"id": "equity", "kind": "equity", "amount": "0"},
        ],
    )
    applied: list[str] = []
    snapshot = load_snapshot(write(tmp_path, "s.json", document), applied_defaults=applied)
    assert snapshot.assets[0].liquidity_tenor is Bucket.DAY
    assert applied == ["assets[0].liquidity_tenor"]


def test_missing_tenor_elsewhere_is_an_error(tmp_path):
    document = snapshot_doc(
        assets=[{"id": "tb", "class": "public_credit", "exposure": "5", "avg_maturity": "0.25"}],
        liabilities=[
            {"id": "coin", "kind": "circulating_stablecoin", "amount": "5"},
            {"id": "equity", "kind": "equity", "amount": "0"},
        ],
    )
    with pytest.raises(SchemaError) as excinfo:
        load_snapshot(write(tmp_path, "s.json", document))
    assert any("liquidity_tenor" in v for v in excinfo.value.violations)


def test_missing_file_and_bad_json(tmp_path):
    with pytest.raises(SchemaError):
        load_snapshot(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(SchemaError) as excinfo:
        load_snapshot(bad)
    assert any("invalid JSON" in v for v in excinfo.value.violations)


def test_wrong_kind_is_rejected(tmp_path):
    with pytest.raises(SchemaError):
        load_holders(write(tmp_path, "s.json", MINIMAL_SNAPSHOT))


# -- holders -------------------------------------------------------------------


def test_fixture_holders_load(fixture_dir):
    holders = load_holders(fixture_dir / "holders.json")
    assert len(holders) == 4
    assert {h.holder_kind.value for h in holders} == {"contract", "externally_owned"}


def test_holder_errors_are_collected(tmp_path):
    document = {
        "schema_version": 1,
        "kind": "holder_history",
        "holders": [
            {"address_id": "a", "holder_kind": "contract", "balances": [["2023-01-05", "1"], ["2023-01-01", "2"]]},
            {"address_id": "a", "holder_kind": "contract", "balances": []},
            {"address_id": "b", "holder_kind": "robot", "balances": []},
            {"address_id": "c", "holder_kind": "contract", "balances": [["2023-01-01"]]},
        ],
    }
    with pytest.raises(SchemaError) as excinfo:
        load_holders(write(tmp_path, "h.json", document))
    text = "\n".join(excinfo.value.violations)
    assert "strictly increasing" in text
    assert "duplicate address_id" in text
    assert "robot" in text
    assert "[date, balance]" in text


# -- vaults --------------------------------------------------------------------


def test_fixture_vaults_load(fixture_dir):
    portfolio_id, portfolio = load_vault_portfolio(fixture_dir / "vaults.json")
    assert portfolio_id == "maker_vaults"
    assert len(portfolio.vaults) == 6
    assert portfolio.total_debt() == D("2380252303.00")


def test_vault_invariants_surface_as_schema_errors(tmp_path):
    document = {
        "schema_version": 1,
        "kind": "vault_portfolio",
        "portfolio_id": "p",
        "market_depth": "1000",
        "slippage_coefficient": "0.5",
        "vaults": [
            {
                "collateral_units": "1",
                "collateral_price": "100",
                "debt": "100",
                "liquidation_ratio": "1.5",
            }
        ],
    }
    with pytest.raises(SchemaError) as excinfo:
        load_vault_portfolio(write(tmp_path, "v.json", document))
    assert any("collateralization" in v for v in excinfo.value.violations)


# -- scenario ------------------------------------------------------------------


def test_fixture_scenario_parameterization(fixture_dir, maker_scenario):
    params = maker_scenario.risk_params
    assert params.rate_shock_bps == D("200")
    assert params.credit_rating_table[Rating.AAA] == D("0.01")
    assert params.credit_class_overrides["mortgages"] == D("0.05")
    assert params.credit_class_overrides["other_credit"] == D("0.10")
    assert params.credit_class_overrides[AssetClass.PUBLIC_CREDIT] == D("0")
    assert params.market_model.seed == 20231231
    assert maker_scenario.reference_total_car == D("128900000.00")
    assert maker_scenario.applied_defaults == ()


def test_negative_rate_shock_is_a_domain_error(tmp_path):
    document = {"schema_version": 1, "kind": "scenario", "rate_shock_bps": "-1"}
    with pytest.raises(SchemaError) as excinfo:
        load_scenario(write(tmp_path, "sc.json", document))
    assert any("rate_shock_bps" in v for v in excinfo.value.violations)


def test_omitted_blocks_apply_documented_defaults(tmp_path):
    scenario = load_scenario(write(tmp_path, "sc.json", {"schema_version": 1, "kind": "scenario"}))
    params = scenario.risk_params
    assert params.rate_shock_bps == DOCUMENTED_DEFAULTS["rate_shock_bps"]
    assert dict(params.credit_rating_table) == DOCUMENTED_DEFAULTS["credit_rating_table"]
    assert dict(params.credit_class_overrides) == DOCUMENTED_DEFAULTS["credit_class_overrides"]
    assert dict(params.operational_table) == DOCUMENTED_DEFAULTS["operational_table"]
    mc = params.market_model
    assert mc.n_paths == DOCUMENTED_DEFAULTS["monte_carlo.n_paths"]
    assert mc.horizon_days == DOCUMENTED_DEFAULTS["monte_carlo.horizon_days"]
    assert mc.daily_volatility == DOCUMENTED_DEFAULTS["monte_carlo.daily_volatility"]
    assert mc.daily_drift == DOCUMENTED_DEFAULTS["monte_carlo.daily_drift"]
    assert mc.jump_probability == DOCUMENTED_DEFAULTS["monte_carlo.jump_probability"]
    assert mc.jump_size == DOCUMENTED_DEFAULTS["monte_carlo.jump_size"]
    assert mc.seed == DOCUMENTED_DEFAULTS["monte_carlo.seed"]
    assert mc.loss_statistic == DOCUMENTED_DEFAULTS["monte_carlo.loss_statistic"]
    assert scenario.bucket_drawdown_overrides == DOCUMENTED_DEFAULTS["bucket_drawdown_overrides"]
    assert dict(scenario.haircuts) == DOCUMENTED_DEFAULTS["haircuts"]
    assert scenario.balance_tolerance == DOCUMENTED_DEFAULTS["tolerances.balance_identity"]
    assert scenario.cr_target == DOCUMENTED_DEFAULTS["tolerances.cr_target"]
    # every applied default is recorded for provenance
    for name in (
        "rate_shock_bps",
        "credit_rating_table",
        "credit_class_overrides",
        "operational_table",
        "monte_carlo",
        "bucket_drawdown_overrides",
        "haircuts",
        "tolerances",
    ):
        assert name in scenario.applied_defaults


def test_partial_monte_carlo_block_records_each_default(tmp_path):
    document = {
        "schema_version": 1,
        "kind": "scenario",
        "monte_carlo": {"seed": 7, "daily_volatility": "0.05"},
    }
    scenario = load_scenario(write(tmp_path, "sc.json", document))
    assert scenario.risk_params.market_model.seed == 7
    assert "monte_carlo.n_paths" in scenario.applied_defaults
    assert "monte_carlo.seed" not in scenario.applied_defaults


def test_unknown_scenario_keys_and_tokens(tmp_path):
    document = {
        "schema_version": 1,
        "kind": "scenario",
        "rate_shok_bps": "200",
        "credit_rating_table": {"AAA+": "0.01"},
        "haircuts": {"meme_coins": "0"},
        "bucket_drawdown_overrides": {"decade": "0.5"},
    }
    with pytest.raises(SchemaError) as excinfo:
        load_scenario(write(tmp_path, "sc.json", document))
    text = "\n".join(excinfo.value.violations)
    assert "rate_shok_bps" in text
    assert "AAA+" in text
    assert "meme_coins" in text
    assert "decade" in text


def test_pd_lgd_override_parses(tmp_path):
    document = {
        "schema_version": 1,
        "kind": "scenario",
        "credit_class_overrides": {"private_credit": {"pd": "0.162", "lgd": "0.5"}},
    }
    scenario = load_scenario(write(tmp_path, "sc.json", document))
    override = scenario.risk_params.credit_class_overrides[AssetClass.PRIVATE_CREDIT]
    assert override == PdLgd(pd=D("0.162"), lgd=D("0.5"))


def test_percentile_statistic_parses(tmp_path):
    document = {
        "schema_version": 1,
        "kind": "scenario",
        "monte_carlo": {"loss_statistic": {"percentile": "95"}},
    }
    scenario = load_scenario(write(tmp_path, "sc.json", document))
    mc = scenario.risk_params.market_model
    assert mc.loss_statistic is LossStatistic.PERCENTILE
    assert mc.percentile == D("95")


def test_seed_override(fixture_dir):
    scenario = load_scenario(fixture_dir / "scenario.json", seed_override=42)
    assert scenario.risk_params.market_model.seed == 42


def test_unsupported_schema_version(tmp_path):
    document = {"schema_version": 99, "kind": "scenario"}
    with pytest.raises(SchemaError) as excinfo:
        load_scenario(write(tmp_path, "sc.json", document))
    assert any("schema_version" in v for v in excinfo.value.violations)


def test_cross_validation_catches_stray_override_keys(maker_scenario, maker_snapshot):
    validate_scenario_for_snapshot(maker_scenario, maker_snapshot)  # fixture is coherent
    params = maker_scenario.risk_params
    stray = dataclasses.replace(
        params,
        credit_class_overrides={**params.credit_class_overrides, "pubic_credit": D("0")},
    )
    broken = dataclasses.replace(maker_scenario, risk_params=stray)
    with pytest.raises(ConfigurationError, match="pubic_credit"):
        validate_scenario_for_snapshot(broken, maker_snapshot)


# -- round trips ---------------------------------------------------------------


def test_snapshot_round_trip(fixture_dir, maker_snapshot, tmp_path):
    dumped = tmp_path / "again.json"
    dumped.write_text(dump_snapshot(maker_snapshot), encoding="utf-8")
    again = load_snapshot(dumped, balance_tolerance=D("1000000"))
    assert again == maker_snapshot


def test_holders_round_trip(maker_holders, tmp_path):
    dumped = tmp_path / "again.json"
    dumped.write_text(dump_holders(maker_holders), encoding="utf-8")
    assert load_holders(dumped) == maker_holders


def test_vaults_round_trip(fixture_dir, tmp_path):
    portfolio_id, portfolio = load_vault_portfolio(fixture_dir / "vaults.json")
    dumped = tmp_path / "again.json"
    dumped.write_text(dump_vault_portfolio(portfolio_id, portfolio), encoding="utf-8")
    assert load_vault_portfolio(dumped) == (portfolio_id, portfolio)


def test_scenario_round_trip(maker_scenario, tmp_path):
    dumped = tmp_path / "again.json"
    dumped.write_text(dump_scenario(maker_scenario), encoding="utf-8")
    again = load_scenario(dumped)
    assert again.risk_params == maker_scenario.risk_params
    assert again.bucket_drawdown_overrides == maker_scenario.bucket_drawdown_overrides
    assert again.haircuts == maker_scenario.haircuts
    assert again.balance_tolerance == maker_scenario.balance_tolerance
    assert again.cr_target == maker_scenario.cr_target
    assert again.reference_total_car == maker_scenario.reference_total_car
