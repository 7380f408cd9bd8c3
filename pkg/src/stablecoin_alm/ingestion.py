"""Strict, versioned file ingestion for the four input kinds.

Snapshot, holder-history, vault-portfolio, and scenario files are UTF-8 JSON
with closed schemas: unknown keys are errors, money and fractions are decimal
strings, dates are ISO-8601. Parsing collects every violation in a file and
raises one :class:`SchemaError` naming them all — a risk config with typos
must never silently weaken a stress test.

Omitted scenario blocks fall back to the documented defaults in
:data:`DOCUMENTED_DEFAULTS`; every applied default is recorded so reports can
carry it in their provenance section.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any, Mapping

from .balance_sheet import (
    AssetClass,
    AssetPosition,
    BalanceSheetSnapshot,
    Bucket,
    LiabilityKind,
    LiabilityPosition,
    Rating,
    snapshot_violations,
)
from .capital_risk import PdLgd, RiskParameterSet
from .collateral_mc import LossStatistic, MonteCarloConfig, Vault, VaultPortfolio
from .errors import ConfigurationError, DomainError, SchemaError
from .liquidity import HolderKind, HolderRecord
from .money import ZERO

SCHEMA_VERSION = 1

#: Defaults applied when a scenario omits a field. Keys use dotted paths into
#: the scenario document; values are what loading produces. This is the one
#: authorized set of silent-capable defaults — each application is still
#: recorded in ``Scenario.applied_defaults``.
DOCUMENTED_DEFAULTS: Mapping[str, Any] = {
    "rate_shock_bps": Decimal("200"),
    "credit_rating_table": {},
    "credit_class_overrides": {},
    "operational_table": {},
    "monte_carlo.n_paths": 10_000,
    "monte_carlo.horizon_days": 30,
    "monte_carlo.daily_volatility": Decimal("0"),
    "monte_carlo.daily_drift": Decimal("0"),
    "monte_carlo.jump_probability": Decimal("0"),
    "monte_carlo.jump_size": Decimal("0"),
    "monte_carlo.seed": 0,
    "monte_carlo.loss_statistic": LossStatistic.MEAN,
    "bucket_drawdown_overrides": None,
    "haircuts": {cls: ZERO for cls in AssetClass},
    "tolerances.balance_identity": Decimal("1.00"),
    "tolerances.cr_target": Decimal("1"),
}

#: Snapshot-side default: stablecoin positions may omit ``liquidity_tenor``
#: and land in the day bucket (par redemption in a liquid primary market).
STABLECOIN_DEFAULT_TENOR = Bucket.DAY


@dataclass(frozen=True)
class Scenario:
    """A parsed scenario file: risk parameters plus liquidity configuration."""

    risk_params: RiskParameterSet
    bucket_drawdown_overrides: Mapping[Bucket, Decimal] | None
    haircuts: Mapping[AssetClass, Decimal]
    balance_tolerance: Decimal
    cr_target: Decimal
    reference_total_car: Decimal | None
    applied_defaults: tuple[str, ...]


class _Collector:
    """Accumulates violations with document paths for one file."""

    def __init__(self) -> None:
        self.items: list[str] = []

    def add(self, context: str, message: str) -> None:
        self.items.append(f"{context}: {message}")

    def raise_if_any(self, path: str | Path) -> None:
        if self.items:
            raise SchemaError(str(path), self.items)


def _read_document(path: str | Path, expected_kind: str, errors: _Collector) -> dict | None:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        errors.add("file", f"cannot read: {exc}")
        return None
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        errors.add(f"line {exc.lineno}", f"invalid JSON: {exc.msg}")
        return None
    if not isinstance(document, dict):
        errors.add("document", "top level must be an object")
        return None
    version = document.get("schema_version")
    if version != SCHEMA_VERSION:
        errors.add("schema_version", f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    kind = document.get("kind")
    if kind != expected_kind:
        errors.add("kind", f"expected {expected_kind!r}, got {kind!r}")
        return None
    return document


def _check_keys(obj: dict, context: str, required: tuple, optional: tuple, errors: _Collector) -> bool:
    for key in sorted(set(obj) - set(required) - set(optional)):
        errors.add(f"{context}.{key}", "unknown field")
    complete = True
    for key in required:
        if key not in obj:
            errors.add(f"{context}.{key}", "required field missing")
            complete = False
    return complete


def _decimal(value: Any, context: str, errors: _Collector) -> Decimal | None:
    if not isinstance(value, str):
        errors.add(context, f"must be a decimal string, got {type(value).__name__}")
        return None
    try:
        parsed = Decimal(value)
    except InvalidOperation:
        errors.add(context, f"malformed decimal {value!r}")
        return None
    if not parsed.is_finite():
        errors.add(context, f"non-finite decimal {value!r}")
        return None
    return parsed


def _integer(value: Any, context: str, errors: _Collector) -> int | None:
    if not isinstance(value, int) or isinstance(value, bool):
        errors.add(context, f"must be an integer, got {type(value).__name__}")
        return None
    return value


def _string(value: Any, context: str, errors: _Collector) -> str | None:
    if not isinstance(value, str):
        errors.add(context, f"must be a string, got {type(value).__name__}")
        return None
    return value


def _date(value: Any, context: str, errors: _Collector) -> date | None:
    if not isinstance(value, str):
        errors.add(context, f"must be an ISO-8601 date string, got {type(value).__name__}")
        return None
    try:
        return date.fromisoformat(value)
    except ValueError:
        errors.add(context, f"invalid ISO-8601 date {value!r}")
        return None


def _enum(value: Any, enum_cls, context: str, errors: _Collector):
    if isinstance(value, str):
        for member in enum_cls:
            if member.value == value:
                return member
    known = ", ".join(m.value for m in enum_cls)
    errors.add(context, f"unknown {enum_cls.__name__.lower()} {value!r} (known: {known})")
    return None


def _list(value: Any, context: str, errors: _Collector) -> list | None:
    if not isinstance(value, list):
        errors.add(context, f"must be a list, got {type(value).__name__}")
        return None
    return value


def _object(value: Any, context: str, errors: _Collector) -> dict | None:
    if not isinstance(value, dict):
        errors.add(context, f"must be an object, got {type(value).__name__}")
        return None
    return value


# ---------------------------------------------------------------------------
# Snapshot
# ---------------------------------------------------------------------------

_ASSET_REQUIRED = ("id", "class", "exposure", "avg_maturity")
_ASSET_OPTIONAL = ("liquidity_tenor", "rating", "collateral_ref")
_LIABILITY_REQUIRED = ("id", "kind", "amount")


def _parse_asset(record: Any, context: str, errors: _Collector,
                 applied_defaults: list[str]) -> AssetPosition | None:
    obj = _object(record, context, errors)
    if obj is None:
        return None
    if not _check_keys(obj, context, _ASSET_REQUIRED, _ASSET_OPTIONAL, errors):
        return None
    pid = _string(obj["id"], f"{context}.id", errors)
    asset_class = _enum(obj["class"], AssetClass, f"{context}.class", errors)
    exposure = _decimal(obj["exposure"], f"{context}.exposure", errors)
    maturity = _decimal(obj["avg_maturity"], f"{context}.avg_maturity", errors)
    rating = None
    if obj.get("rating") is not None:
        rating = _enum(obj["rating"], Rating, f"{context}.rating", errors)
        if rating is None:
            return None
    tenor = None
    if obj.get("liquidity_tenor") is not None:
        tenor = _enum(obj["liquidity_tenor"], Bucket, f"{context}.liquidity_tenor", errors)
        if tenor is None:
            return None
    elif asset_class is AssetClass.STABLECOIN:
        tenor = STABLECOIN_DEFAULT_TENOR
        applied_defaults.append(f"{context}.liquidity_tenor")
    else:
        errors.add(f"{context}.liquidity_tenor", "required field missing")
        return None
    collateral_ref = None
    if obj.get("collateral_ref") is not None:
        collateral_ref = _string(obj["collateral_ref"], f"{context}.collateral_ref", errors)
    if None in (pid, asset_class, exposure, maturity):
        return None
    try:
        return AssetPosition(
            id=pid,
            asset_class=asset_class,
            exposure=exposure,
            avg_maturity=maturity,
            liquidity_tenor=tenor,
            rating=rating,
            collateral_ref=collateral_ref,
        )
    except DomainError as exc:
        errors.add(context, str(exc))
        return None


def _parse_liability(record: Any, context: str, errors: _Collector) -> LiabilityPosition | None:
    obj = _object(record, context, errors)
    if obj is None:
        return None
    if not _check_keys(obj, context, _LIABILITY_REQUIRED, (), errors):
        return None
    pid = _string(obj["id"], f"{context}.id", errors)
    kind = _enum(obj["kind"], LiabilityKind, f"{context}.kind", errors)
    amount = _decimal(obj["amount"], f"{context}.amount", errors)
    if None in (pid, kind, amount):
        return None
    try:
        return LiabilityPosition(id=pid, kind=kind, amount=amount)
    except DomainError as exc:
        errors.add(context, str(exc))
        return None


def load_snapshot(
    path: str | Path,
    balance_tolerance: Decimal = Decimal("1.00"),
    *,
    applied_defaults: list[str] | None = None,
) -> BalanceSheetSnapshot:
    """Parse and fully validate a balance-sheet snapshot file.

    Raises :class:`SchemaError` carrying every violation found — parse
    problems, type invariants, duplicate ids, and the accounting identity
    checked against ``balance_tolerance``.
    """
    errors = _Collector()
    defaults = applied_defaults if applied_defaults is not None else []
    document = _read_document(path, "balance_sheet_snapshot", errors)
    if document is None:
        errors.raise_if_any(path)
    _check_keys(document, "document", ("schema_version", "kind", "as_of", "assets", "liabilities"), (), errors)
    as_of = _date(document.get("as_of"), "as_of", errors)
    assets = []
    for index, record in enumerate(_list(document.get("assets", []), "assets", errors) or []):
        parsed = _parse_asset(record, f"assets[{index}]", errors, defaults)
        if parsed is not None:
            assets.append(parsed)
    liabilities = []
    for index, record in enumerate(_list(document.get("liabilities", []), "liabilities", errors) or []):
        parsed = _parse_liability(record, f"liabilities[{index}]", errors)
        if parsed is not None:
            liabilities.append(parsed)
    if as_of is None or errors.items:
        errors.raise_if_any(path)
    snapshot = BalanceSheetSnapshot(as_of=as_of, assets=assets, liabilities=liabilities)
    for violation in snapshot_violations(snapshot, balance_tolerance):
        errors.add("validation", violation.message)
    errors.raise_if_any(path)
    return snapshot


# ---------------------------------------------------------------------------
# Holder history
# ---------------------------------------------------------------------------


def load_holders(path: str | Path) -> list[HolderRecord]:
    """Parse a holder-history file into a list of :class:`HolderRecord`."""
    errors = _Collector()
    document = _read_document(path, "holder_history", errors)
    if document is None:
        errors.raise_if_any(path)
    _check_keys(document, "document", ("schema_version", "kind", "holders"), (), errors)
    holders: list[HolderRecord] = []
    seen: set[str] = set()
    for index, record in enumerate(_list(document.get("holders", []), "holders", errors) or []):
        context = f"holders[{index}]"
        obj = _object(record, context, errors)
        if obj is None:
            continue
        if not _check_keys(obj, context, ("address_id", "holder_kind", "balances"), (), errors):
            continue
        address = _string(obj["address_id"], f"{context}.address_id", errors)
        kind = _enum(obj["holder_kind"], HolderKind, f"{context}.holder_kind", errors)
        series = []
        ok = True
        for j, pair in enumerate(_list(obj["balances"], f"{context}.balances", errors) or []):
            pair_ctx = f"{context}.balances[{j}]"
            if not isinstance(pair, list) or len(pair) != 2:
                errors.add(pair_ctx, "must be a [date, balance] pair")
                ok = False
                continue
            when = _date(pair[0], f"{pair_ctx}[0]", errors)
            balance = _decimal(pair[1], f"{pair_ctx}[1]", errors)
            if when is None or balance is None:
                ok = False
                continue
            series.append((when, balance))
        if address is None or kind is None or not ok:
            continue
        if address in seen:
            errors.add(context, f"duplicate address_id {address!r}")
            continue
        seen.add(address)
        try:
            holders.append(HolderRecord(address_id=address, holder_kind=kind, balance_series=series))
        except DomainError as exc:
            errors.add(context, str(exc))
    errors.raise_if_any(path)
    return holders


# ---------------------------------------------------------------------------
# Vault portfolio
# ---------------------------------------------------------------------------

_VAULT_REQUIRED = ("collateral_units", "collateral_price", "debt", "liquidation_ratio")
_VAULT_OPTIONAL = ("liquidation_penalty",)


def load_vault_portfolio(path: str | Path) -> tuple[str, VaultPortfolio]:
    """Parse a vault-portfolio file; returns (portfolio_id, portfolio)."""
    errors = _Collector()
    document = _read_document(path, "vault_portfolio", errors)
    if document is None:
        errors.raise_if_any(path)
    _check_keys(
        document,
        "document",
        ("schema_version", "kind", "portfolio_id", "market_depth", "slippage_coefficient", "vaults"),
        (),
        errors,
    )
    portfolio_id = _string(document.get("portfolio_id"), "portfolio_id", errors)
    depth = _decimal(document.get("market_depth"), "market_depth", errors)
    slippage = _decimal(document.get("slippage_coefficient"), "slippage_coefficient", errors)
    vaults = []
    for index, record in enumerate(_list(document.get("vaults", []), "vaults", errors) or []):
        context = f"vaults[{index}]"
        obj = _object(record, context, errors)
        if obj is None:
            continue
        if not _check_keys(obj, context, _VAULT_REQUIRED, _VAULT_OPTIONAL, errors):
            continue
        fields = {
            name: _decimal(obj[name], f"{context}.{name}", errors)
            for name in _VAULT_REQUIRED
        }
        penalty = ZERO
        if "liquidation_penalty" in obj:
            penalty = _decimal(obj["liquidation_penalty"], f"{context}.liquidation_penalty", errors)
        if None in fields.values() or penalty is None:
            continue
        try:
            vaults.append(
                Vault(
                    collateral_units=fields["collateral_units"],
                    collateral_price=fields["collateral_price"],
                    debt=fields["debt"],
                    liquidation_ratio=fields["liquidation_ratio"],
                    liquidation_penalty=penalty,
                )
            )
        except DomainError as exc:
            errors.add(context, str(exc))
    if portfolio_id is None or depth is None or slippage is None:
        errors.raise_if_any(path)
    try:
        portfolio = VaultPortfolio(vaults=vaults, market_depth=depth, slippage_coefficient=slippage)
    except DomainError as exc:
        errors.add("document", str(exc))
        errors.raise_if_any(path)
    errors.raise_if_any(path)
    return portfolio_id, portfolio


# ---------------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------------

_SCENARIO_KEYS = (
    "rate_shock_bps",
    "credit_rating_table",
    "credit_class_overrides",
    "operational_table",
    "monte_carlo",
    "bucket_drawdown_overrides",
    "haircuts",
    "tolerances",
    "reference",
)

_MC_KEYS = (
    "n_paths",
    "horizon_days",
    "daily_volatility",
    "daily_drift",
    "jump_probability",
    "jump_size",
    "seed",
    "loss_statistic",
)


def _parse_credit_override(value: Any, context: str, errors: _Collector) -> Decimal | PdLgd | None:
    if isinstance(value, dict):
        if not _check_keys(value, context, ("pd", "lgd"), (), errors):
            return None
        pd = _decimal(value["pd"], f"{context}.pd", errors)
        lgd = _decimal(value["lgd"], f"{context}.lgd", errors)
        if pd is None or lgd is None:
            return None
        try:
            return PdLgd(pd=pd, lgd=lgd)
        except DomainError as exc:
            errors.add(context, str(exc))
            return None
    return _decimal(value, context, errors)


def _parse_monte_carlo(
    block: Any, errors: _Collector, applied: list[str], seed_override: int | None
) -> MonteCarloConfig | None:
    obj = _object(block, "monte_carlo", errors)
    if obj is None:
        return None
    _check_keys(obj, "monte_carlo", (), _MC_KEYS, errors)
    values: dict[str, Any] = {}
    for key, parse in (
        ("n_paths", _integer),
        ("horizon_days", _integer),
        ("seed", _integer),
        ("daily_volatility", _decimal),
        ("daily_drift", _decimal),
        ("jump_probability", _decimal),
        ("jump_size", _decimal),
    ):
        if key in obj:
            values[key] = parse(obj[key], f"monte_carlo.{key}", errors)
        else:
            values[key] = DOCUMENTED_DEFAULTS[f"monte_carlo.{key}"]
            applied.append(f"monte_carlo.{key}")
    statistic = LossStatistic.MEAN
    percentile = None
    if "loss_statistic" in obj:
        raw = obj["loss_statistic"]
        if raw == "mean":
            statistic = LossStatistic.MEAN
        elif isinstance(raw, dict) and set(raw) == {"percentile"}:
            statistic = LossStatistic.PERCENTILE
            percentile = _decimal(raw["percentile"], "monte_carlo.loss_statistic.percentile", errors)
        else:
            errors.add("monte_carlo.loss_statistic", f"must be \"mean\" or {{\"percentile\": level}}, got {raw!r}")
    else:
        applied.append("monte_carlo.loss_statistic")
    if seed_override is not None:
        values["seed"] = seed_override
    if None in values.values():
        return None
    try:
        return MonteCarloConfig(
            n_paths=values["n_paths"],
            horizon_days=values["horizon_days"],
            daily_volatility=values["daily_volatility"],
            daily_drift=values["daily_drift"],
            jump_probability=values["jump_probability"],
            jump_size=values["jump_size"],
            seed=values["seed"],
            loss_statistic=statistic,
            percentile=percentile,
        )
    except DomainError as exc:
        errors.add("monte_carlo", str(exc))
        return None


def load_scenario(path: str | Path, *, seed_override: int | None = None) -> Scenario:
    """Parse a scenario file; omitted blocks use :data:`DOCUMENTED_DEFAULTS`.

    ``seed_override`` replaces the Monte Carlo seed (the CLI --seed flag).
    """
    errors = _Collector()
    applied: list[str] = []
    document = _read_document(path, "scenario", errors)
    if document is None:
        errors.raise_if_any(path)
    _check_keys(document, "document", ("schema_version", "kind"), _SCENARIO_KEYS, errors)

    if "rate_shock_bps" in document:
        rate_shock = _decimal(document["rate_shock_bps"], "rate_shock_bps", errors)
    else:
        rate_shock = DOCUMENTED_DEFAULTS["rate_shock_bps"]
        applied.append("rate_shock_bps")

    rating_table: dict[Rating, Decimal] = {}
    if "credit_rating_table" in document:
        obj = _object(document["credit_rating_table"], "credit_rating_table", errors) or {}
        for key in sorted(obj):
            rating = _enum(key, Rating, f"credit_rating_table.{key}", errors)
            fraction = _decimal(obj[key], f"credit_rating_table.{key}", errors)
            if rating is not None and fraction is not None:
                rating_table[rating] = fraction
    else:
        applied.append("credit_rating_table")

    class_overrides: dict = {}
    if "credit_class_overrides" in document:
        obj = _object(document["credit_class_overrides"], "credit_class_overrides", errors) or {}
        class_tokens = {cls.value: cls for cls in AssetClass}
        for key in sorted(obj):
            parsed = _parse_credit_override(obj[key], f"credit_class_overrides.{key}", errors)
            if parsed is not None:
                class_overrides[class_tokens.get(key, key)] = parsed
    else:
        applied.append("credit_class_overrides")

    operational: dict[str, Decimal] = {}
    if "operational_table" in document:
        obj = _object(document["operational_table"], "operational_table", errors) or {}
        for key in sorted(obj):
            fraction = _decimal(obj[key], f"operational_table.{key}", errors)
            if fraction is not None:
                operational[key] = fraction
    else:
        applied.append("operational_table")

    if "monte_carlo" in document:
        market_model = _parse_monte_carlo(document["monte_carlo"], errors, applied, seed_override)
    else:
        applied.append("monte_carlo")
        market_model = MonteCarloConfig(
            seed=seed_override if seed_override is not None else DOCUMENTED_DEFAULTS["monte_carlo.seed"]
        )

    drawdown_overrides: dict[Bucket, Decimal] | None = None
    if "bucket_drawdown_overrides" in document:
        obj = _object(document["bucket_drawdown_overrides"], "bucket_drawdown_overrides", errors) or {}
        drawdown_overrides = {}
        for key in sorted(obj):
            bucket = _enum(key, Bucket, f"bucket_drawdown_overrides.{key}", errors)
            fraction = _decimal(obj[key], f"bucket_drawdown_overrides.{key}", errors)
            if bucket is not None and fraction is not None:
                drawdown_overrides[bucket] = fraction
    else:
        applied.append("bucket_drawdown_overrides")

    haircuts = dict(DOCUMENTED_DEFAULTS["haircuts"])
    if "haircuts" in document:
        obj = _object(document["haircuts"], "haircuts", errors) or {}
        for key in sorted(obj):
            cls = _enum(key, AssetClass, f"haircuts.{key}", errors)
            fraction = _decimal(obj[key], f"haircuts.{key}", errors)
            if cls is not None and fraction is not None:
                haircuts[cls] = fraction
    else:
        applied.append("haircuts")

    balance_tolerance = DOCUMENTED_DEFAULTS["tolerances.balance_identity"]
    cr_target = DOCUMENTED_DEFAULTS["tolerances.cr_target"]
    if "tolerances" in document:
        obj = _object(document["tolerances"], "tolerances", errors) or {}
        _check_keys(obj, "tolerances", (), ("balance_identity", "cr_target"), errors)
        if "balance_identity" in obj:
            balance_tolerance = _decimal(obj["balance_identity"], "tolerances.balance_identity", errors)
        else:
            applied.append("tolerances.balance_identity")
        if "cr_target" in obj:
            cr_target = _decimal(obj["cr_target"], "tolerances.cr_target", errors)
        else:
            applied.append("tolerances.cr_target")
    else:
        applied.append("tolerances")

    reference_total_car = None
    if "reference" in document:
        obj = _object(document["reference"], "reference", errors) or {}
        _check_keys(obj, "reference", (), ("total_car",), errors)
        if "total_car" in obj:
            reference_total_car = _decimal(obj["total_car"], "reference.total_car", errors)

    errors.raise_if_any(path)
    try:
        params = RiskParameterSet(
            rate_shock_bps=rate_shock,
            credit_rating_table=rating_table,
            credit_class_overrides=class_overrides,
            operational_table=operational,
            market_model=market_model,
        )
        if balance_tolerance < ZERO:
            raise DomainError(f"tolerances.balance_identity {balance_tolerance} is negative")
        if cr_target < ZERO:
            raise DomainError(f"tolerances.cr_target {cr_target} is negative")
    except DomainError as exc:
        errors.add("document", str(exc))
        errors.raise_if_any(path)
    return Scenario(
        risk_params=params,
        bucket_drawdown_overrides=drawdown_overrides,
        haircuts=haircuts,
        balance_tolerance=balance_tolerance,
        cr_target=cr_target,
        reference_total_car=reference_total_car,
        applied_defaults=tuple(applied),
    )


def validate_scenario_for_snapshot(scenario: Scenario, snapshot: BalanceSheetSnapshot) -> None:
    """Cross-check scenario references against the snapshot's position ids.

    String keys in the credit overrides and every operational-table key must
    name a real position — a typo'd class token must not silently become an
    inert position-id override.
    """
    position_ids = {p.id for p in snapshot.assets}
    problems = []
    for key in scenario.risk_params.credit_class_overrides:
        if isinstance(key, str) and key not in position_ids:
            problems.append(
                f"credit_class_overrides key {key!r} is neither an asset class nor a position id"
            )
    for key in scenario.risk_params.operational_table:
        if key not in position_ids:
            problems.append(f"operational_table key {key!r} does not match any position id")
    if problems:
        raise ConfigurationError("; ".join(problems))


# ---------------------------------------------------------------------------
# Serialization (canonical form; round-trips semantically)
# ---------------------------------------------------------------------------


def _dumps(document: dict) -> str:
    return json.dumps(document, indent=2) + "\n"


def dump_snapshot(snapshot: BalanceSheetSnapshot) -> str:
    assets = []
    for p in snapshot.assets:
        record: dict[str, Any] = {
            "id": p.id,
            "class": p.asset_class.value,
            "exposure": str(p.exposure),
            "avg_maturity": str(p.avg_maturity),
            "liquidity_tenor": p.liquidity_tenor.value,
        }
        if p.rating is not None:
            record["rating"] = p.rating.value
        if p.collateral_ref is not None:
            record["collateral_ref"] = p.collateral_ref
        assets.append(record)
    liabilities = [
        {"id": p.id, "kind": p.kind.value, "amount": str(p.amount)} for p in snapshot.liabilities
    ]
    return _dumps(
        {
            "schema_version": SCHEMA_VERSION,
            "kind": "balance_sheet_snapshot",
            "as_of": snapshot.as_of.isoformat(),
            "assets": assets,
            "liabilities": liabilities,
        }
    )


def dump_holders(holders: list[HolderRecord]) -> str:
    return _dumps(
        {
            "schema_version": SCHEMA_VERSION,
            "kind": "holder_history",
            "holders": [
                {
                    "address_id": h.address_id,
                    "holder_kind": h.holder_kind.value,
                    "balances": [[when.isoformat(), str(balance)] for when, balance in h.balance_series],
                }
                for h in holders
            ],
        }
    )


def dump_vault_portfolio(portfolio_id: str, portfolio: VaultPortfolio) -> str:
    return _dumps(
        {
            "schema_version": SCHEMA_VERSION,
            "kind": "vault_portfolio",
            "portfolio_id": portfolio_id,
            "market_depth": str(portfolio.market_depth),
            "slippage_coefficient": str(portfolio.slippage_coefficient),
            "vaults": [
                {
                    "collateral_units": str(v.collateral_units),
                    "collateral_price": str(v.collateral_price),
                    "debt": str(v.debt),
                    "liquidation_ratio": str(v.liquidation_ratio),
                    "liquidation_penalty": str(v.liquidation_penalty),
                }
                for v in portfolio.vaults
            ],
        }
    )


def dump_scenario(scenario: Scenario) -> str:
    params = scenario.risk_params
    mc = params.market_model
    overrides: dict[str, Any] = {}
    for key, value in params.credit_class_overrides.items():
        name = key.value if isinstance(key, AssetClass) else key
        if isinstance(value, PdLgd):
            overrides[name] = {"pd": str(value.pd), "lgd": str(value.lgd)}
        else:
            overrides[name] = str(value)
    loss_statistic: Any = "mean"
    if mc.loss_statistic is LossStatistic.PERCENTILE:
        loss_statistic = {"percentile": str(mc.percentile)}
    document: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "kind": "scenario",
        "rate_shock_bps": str(params.rate_shock_bps),
        "credit_rating_table": {r.value: str(f) for r, f in params.credit_rating_table.items()},
        "credit_class_overrides": overrides,
        "operational_table": {k: str(v) for k, v in params.operational_table.items()},
        "monte_carlo": {
            "n_paths": mc.n_paths,
            "horizon_days": mc.horizon_days,
            "daily_volatility": str(mc.daily_volatility),
            "daily_drift": str(mc.daily_drift),
            "jump_probability": str(mc.jump_probability),
            "jump_size": str(mc.jump_size),
            "seed": mc.seed,
            "loss_statistic": loss_statistic,
        },
        "haircuts": {cls.value: str(f) for cls, f in scenario.haircuts.items()},
        "tolerances": {
            "balance_identity": str(scenario.balance_tolerance),
            "cr_target": str(scenario.cr_target),
        },
    }
    if scenario.bucket_drawdown_overrides is not None:
        document["bucket_drawdown_overrides"] = {
            b.value: str(f) for b, f in scenario.bucket_drawdown_overrides.items()
        }
    if scenario.reference_total_car is not None:
        document["reference"] = {"total_car": str(scenario.reference_total_car)}
    return _dumps(document)
