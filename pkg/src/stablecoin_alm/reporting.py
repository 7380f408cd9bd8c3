"""Report assembly: tables, machine-readable documents, recommendations.

Human tables follow the published display precision (millions to one decimal
for capital-at-risk tables, whole currency units for the funding-gap table,
percentages to one decimal). Machine reports keep full precision and carry a
provenance section: inputs, applied defaults, seed, tool version. Outputs are
byte-deterministic for identical inputs, seeds, and tool version.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import os
import tempfile
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_EVEN
from pathlib import Path
from typing import Any, Mapping

from . import __version__
from .balance_sheet import (
    BUCKET_ORDER,
    AssetClass,
    BalanceSheetSnapshot,
    validate_snapshot,
)
from .capital_risk import CaRReport, car_report
from .collateral_mc import VaultPortfolio
from .errors import SchemaError, StructuralError
from .ingestion import (
    SCHEMA_VERSION,
    Scenario,
    load_holders,
    load_snapshot,
    load_vault_portfolio,
    validate_scenario_for_snapshot,
)
from .liquidity import (
    FundingGapReport,
    asset_liquidity_schedule,
    bucket_liabilities,
    funding_gap,
)
from .money import ZERO, ONE, to_whole_units
from .plots import save_funding_gap_chart, save_timeseries_lines

_MILLION = Decimal("1000000")
_TENTH = Decimal("0.1")

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_RISK_BREACH = 2


def musd(amount: Decimal) -> Decimal:
    """Money in millions, one decimal, half-even (table display precision)."""
    return (amount / _MILLION).quantize(_TENTH, rounding=ROUND_HALF_EVEN)


def pct(fraction: Decimal) -> Decimal:
    """Fraction as one-decimal percent, half-even (table display precision)."""
    return (fraction * 100).quantize(_TENTH, rounding=ROUND_HALF_EVEN)


# ---------------------------------------------------------------------------
# Recommendations
# ---------------------------------------------------------------------------


class RecommendationKind(enum.Enum):
    RETAIN_EARNINGS = "retain_earnings"
    RELEASE_CAPITAL = "release_capital"
    INCREASE_DAY_LIQUIDITY = "increase_day_liquidity"
    EXTEND_MATURITY = "extend_maturity"


@dataclass(frozen=True)
class Recommendation:
    kind: RecommendationKind
    amount: Decimal
    rationale: str


def recommend(car: CaRReport, gap: FundingGapReport) -> list[Recommendation]:
    """Policy actions implied by the two reports (only non-zero amounts).

    At or below a 100% capitalization ratio, earnings should be retained until
    capital covers capital at risk; above it, the excess can be released. A
    negative day-bucket gap calls for that much extra day liquidity; a
    persistent surplus in later buckets means maturity exposure can be
    extended by the largest cumulative surplus.
    """
    if car.as_of != gap.as_of:
        raise StructuralError(
            f"capital report is as of {car.as_of} but funding-gap report is as of {gap.as_of}"
        )
    recommendations: list[Recommendation] = []
    if car.cr <= ONE:
        amount = max(ZERO, car.total_car - car.capital)
        if amount > ZERO:
            recommendations.append(
                Recommendation(
                    kind=RecommendationKind.RETAIN_EARNINGS,
                    amount=amount,
                    rationale=(
                        "expected stress losses exceed the capital buffer; channel income "
                        "into capital until it covers capital at risk"
                    ),
                )
            )
    else:
        amount = car.capital - car.total_car
        if amount > ZERO:
            recommendations.append(
                Recommendation(
                    kind=RecommendationKind.RELEASE_CAPITAL,
                    amount=amount,
                    rationale=(
                        "capital exceeds capital at risk; the excess buffer can be released"
                    ),
                )
            )
    day_shortfall = max(ZERO, -gap.cumulative_gap[BUCKET_ORDER[0]])
    if day_shortfall > ZERO:
        recommendations.append(
            Recommendation(
                kind=RecommendationKind.INCREASE_DAY_LIQUIDITY,
                amount=day_shortfall,
                rationale=(
                    "stressed outflows in the day bucket exceed same-day liquidity; "
                    "add day-bucket liquidity to close the shortfall"
                ),
            )
        )
    if gap.terminal_gap >= ZERO:
        surplus = max((gap.cumulative_gap[b] for b in BUCKET_ORDER), default=ZERO)
        if surplus > ZERO:
            recommendations.append(
                Recommendation(
                    kind=RecommendationKind.EXTEND_MATURITY,
                    amount=surplus,
                    rationale=(
                        "longer buckets carry a persistent liquidity surplus; maturity "
                        "exposure can be extended to improve returns"
                    ),
                )
            )
    return recommendations


# ---------------------------------------------------------------------------
# Aggregations and table rendering
# ---------------------------------------------------------------------------

_SOURCES = ("duration", "credit", "market", "operational")


def source_car_totals(report: CaRReport) -> dict[str, Decimal]:
    """Capital at risk per risk source (exposure-weighted components)."""
    totals = {name: ZERO for name in _SOURCES}
    for line in report.lines:
        totals["duration"] += line.exposure * line.duration_carr
        totals["credit"] += line.exposure * line.credit_carr
        totals["market"] += line.exposure * line.market_carr
        totals["operational"] += line.exposure * line.operational_carr
    return totals


def class_car_totals(report: CaRReport) -> dict[AssetClass, dict[str, Decimal]]:
    """Per-class exposure, capital at risk, and per-source breakdown."""
    by_class: dict[AssetClass, dict[str, Decimal]] = {}
    for line in report.lines:
        row = by_class.setdefault(
            line.asset_class,
            {"exposure": ZERO, "car": ZERO} | {name: ZERO for name in _SOURCES},
        )
        row["exposure"] += line.exposure
        row["car"] += line.car
        row["duration"] += line.exposure * line.duration_carr
        row["credit"] += line.exposure * line.credit_carr
        row["market"] += line.exposure * line.market_carr
        row["operational"] += line.exposure * line.operational_carr
    return by_class


def _csv_text(header: list[str], rows: list[list[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def car_by_class_table(report: CaRReport) -> str:
    """Table-shaped per-class exposure / CaR / CaRR (millions, one decimal)."""
    by_class = class_car_totals(report)
    rows = []
    for cls in AssetClass:
        if cls not in by_class:
            continue
        row = by_class[cls]
        ratio = row["car"] / row["exposure"] if row["exposure"] > ZERO else ZERO
        rows.append([cls.value, musd(row["exposure"]), musd(row["car"]), pct(ratio)])
    rows.append(
        ["balance_sheet", musd(report.total_exposure), musd(report.total_car), pct(report.aggregate_carr)]
    )
    return _csv_text(["asset_class", "exposure_musd", "car_musd", "carr_pct"], rows)


def car_components_table(report: CaRReport) -> str:
    """Per-class risk-component percentages (one decimal)."""
    by_class = class_car_totals(report)
    rows = []
    for cls in AssetClass:
        if cls not in by_class:
            continue
        row = by_class[cls]
        cells = [cls.value]
        for name in _SOURCES:
            ratio = row[name] / row["exposure"] if row["exposure"] > ZERO else ZERO
            cells.append(pct(ratio))
        rows.append(cells)
    header = ["asset_class"] + [f"{name}_pct" for name in _SOURCES]
    return _csv_text(header, rows)


def funding_gap_table(report: FundingGapReport) -> str:
    """Per-bucket outflow / liquidity / cumulative gap in whole currency units."""
    rows = [
        [
            bucket.value,
            to_whole_units(report.outflow[bucket]),
            to_whole_units(report.liquidity[bucket]),
            to_whole_units(report.cumulative_gap[bucket]),
        ]
        for bucket in BUCKET_ORDER
    ]
    return _csv_text(["bucket", "possible_outflow", "available_liquidity", "cumulative_gap"], rows)


# ---------------------------------------------------------------------------
# Machine-readable documents
# ---------------------------------------------------------------------------


def _provenance(inputs: Mapping[str, Any], scenario: Scenario, *, seed_overridden: bool) -> dict:
    return {
        "tool": "stablecoin-alm",
        "tool_version": __version__,
        "inputs": dict(inputs),
        "applied_defaults": list(scenario.applied_defaults),
        "monte_carlo_seed": scenario.risk_params.market_model.seed,
        "seed_overridden": seed_overridden,
    }


def car_report_document(report: CaRReport, provenance: dict) -> dict:
    lines = [
        {
            "position_id": line.position_id,
            "asset_class": line.asset_class.value,
            "exposure": str(line.exposure),
            "duration_carr": str(line.duration_carr),
            "credit_carr": str(line.credit_carr),
            "market_carr": str(line.market_carr),
            "operational_carr": str(line.operational_carr),
            "carr": str(line.carr),
            "car": str(line.car),
            "clamped": line.clamped,
        }
        for line in report.lines
    ]
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "car_report",
        "as_of": report.as_of.isoformat(),
        "lines": lines,
        "totals": {
            "exposure": str(report.total_exposure),
            "car": str(report.total_car),
            "aggregate_carr": str(report.aggregate_carr),
        },
        "capital": str(report.capital),
        "cr": str(report.cr),
        "classification": report.classification.value,
        "flags": {
            "reference_total_car": (
                None if report.reference_total_car is None else str(report.reference_total_car)
            ),
            "reference_mismatch": report.reference_mismatch,
            "clamped_positions": [line.position_id for line in report.lines if line.clamped],
        },
        "provenance": provenance,
    }


def funding_gap_document(report: FundingGapReport, provenance: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "funding_gap_report",
        "as_of": report.as_of.isoformat(),
        "sign_convention": report.sign_convention,
        "buckets": [
            {
                "bucket": bucket.value,
                "outflow": str(report.outflow[bucket]),
                "liquidity": str(report.liquidity[bucket]),
                "cumulative_gap": str(report.cumulative_gap[bucket]),
            }
            for bucket in BUCKET_ORDER
        ],
        "terminal_gap": str(report.terminal_gap),
        "provenance": provenance,
    }


def recommendations_document(
    as_of, recommendations: list[Recommendation], provenance: dict
) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "recommendations",
        "as_of": as_of.isoformat(),
        "recommendations": [
            {"kind": r.kind.value, "amount": str(r.amount), "rationale": r.rationale}
            for r in recommendations
        ],
        "provenance": provenance,
    }


def write_text(path: Path, text: str) -> Path:
    """Atomic text write (temp file + rename)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)
    return path


def write_json(path: Path, document: dict) -> Path:
    return write_text(path, json.dumps(document, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Pipelines behind the CLI subcommands
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CarRun:
    report: CaRReport
    breach: bool
    outputs: tuple[Path, ...]


@dataclass(frozen=True)
class LiquidityRun:
    report: FundingGapReport
    breach: bool
    outputs: tuple[Path, ...]


def _load_portfolios(vault_paths: tuple[str, ...]) -> dict[str, VaultPortfolio]:
    portfolios: dict[str, VaultPortfolio] = {}
    for vault_path in vault_paths:
        portfolio_id, portfolio = load_vault_portfolio(vault_path)
        if portfolio_id in portfolios:
            raise SchemaError(str(vault_path), [f"duplicate portfolio_id {portfolio_id!r}"])
        portfolios[portfolio_id] = portfolio
    return portfolios


def _checked_snapshot(path: str, scenario: Scenario) -> BalanceSheetSnapshot:
    snapshot = load_snapshot(path, balance_tolerance=scenario.balance_tolerance)
    validate_snapshot(snapshot, scenario.balance_tolerance)
    validate_scenario_for_snapshot(scenario, snapshot)
    return snapshot


def run_car(
    snapshot_path: str,
    scenario: Scenario,
    out_dir: Path,
    *,
    vault_paths: tuple[str, ...] = (),
    inputs: Mapping[str, Any] | None = None,
    seed_overridden: bool = False,
) -> CarRun:
    """Capital-at-risk pipeline: tables, machine report, breach decision."""
    snapshot = _checked_snapshot(snapshot_path, scenario)
    portfolios = _load_portfolios(vault_paths)
    report = car_report(
        snapshot,
        scenario.risk_params,
        portfolios,
        reference_total_car=scenario.reference_total_car,
    )
    provenance = _provenance(inputs or {}, scenario, seed_overridden=seed_overridden)
    outputs = (
        write_text(out_dir / "car_by_class.csv", car_by_class_table(report)),
        write_text(out_dir / "car_components_by_class.csv", car_components_table(report)),
        write_json(out_dir / "car_report.json", car_report_document(report, provenance)),
    )
    breach = report.cr <= scenario.cr_target
    return CarRun(report=report, breach=breach, outputs=outputs)


def run_liquidity(
    snapshot_path: str,
    holders_path: str,
    scenario: Scenario,
    out_dir: Path,
    *,
    inputs: Mapping[str, Any] | None = None,
) -> LiquidityRun:
    """Funding-gap pipeline: table, machine report, gap chart, breach decision."""
    snapshot = _checked_snapshot(snapshot_path, scenario)
    holders = load_holders(holders_path)
    profile = bucket_liabilities(
        holders, snapshot.as_of, overrides=scenario.bucket_drawdown_overrides
    )
    schedule = asset_liquidity_schedule(snapshot, scenario.haircuts)
    report = funding_gap(profile, schedule)
    provenance = _provenance(inputs or {}, scenario, seed_overridden=False)
    chart = out_dir / "funding_gap.svg"
    save_funding_gap_chart(report, chart)
    outputs = (
        write_text(out_dir / "funding_gap.csv", funding_gap_table(report)),
        write_json(out_dir / "funding_gap_report.json", funding_gap_document(report, provenance)),
        chart,
    )
    breach = any(report.cumulative_gap[b] < ZERO for b in BUCKET_ORDER)
    return LiquidityRun(report=report, breach=breach, outputs=outputs)


@dataclass(frozen=True)
class TimeseriesRun:
    rows: tuple[dict, ...]
    skipped: tuple[tuple[str, str], ...]
    outputs: tuple[Path, ...]


def _timeseries_row(
    snapshot: BalanceSheetSnapshot,
    scenario: Scenario,
    portfolios: Mapping[str, VaultPortfolio],
    holders_path: Path | None,
) -> dict:
    report = car_report(
        snapshot,
        scenario.risk_params,
        portfolios,
        reference_total_car=None,
    )
    sources = source_car_totals(report)
    classes = class_car_totals(report)
    row: dict[str, Any] = {
        "date": report.as_of,
        "total_exposure": report.total_exposure,
        "total_car": report.total_car,
        "capital": report.capital,
        "cr": report.cr,
    }
    for name in _SOURCES:
        row[f"car_{name}"] = sources[name]
    for cls in AssetClass:
        row[f"car_{cls.value}"] = classes[cls]["car"] if cls in classes else ZERO
    if holders_path is not None:
        holders = load_holders(holders_path)
        profile = bucket_liabilities(
            holders, snapshot.as_of, overrides=scenario.bucket_drawdown_overrides
        )
        schedule = asset_liquidity_schedule(snapshot, scenario.haircuts)
        gap = funding_gap(profile, schedule)
        for bucket in BUCKET_ORDER:
            row[f"gap_{bucket.value}"] = gap.cumulative_gap[bucket]
    else:
        for bucket in BUCKET_ORDER:
            row[f"gap_{bucket.value}"] = None
    return row


_TIMESERIES_COLUMNS = (
    ["date", "total_exposure", "total_car"]
    + [f"car_{name}" for name in _SOURCES]
    + [f"car_{cls.value}" for cls in AssetClass]
    + ["capital", "cr"]
    + [f"gap_{b.value}" for b in BUCKET_ORDER]
)


def run_timeseries(
    snapshot_dir: str,
    scenario: Scenario,
    out_dir: Path,
    *,
    vault_paths: tuple[str, ...] = (),
    inputs: Mapping[str, Any] | None = None,
    seed_overridden: bool = False,
) -> TimeseriesRun:
    """Dated series of capital and liquidity metrics from a snapshot directory.

    Expects ``<stem>.snapshot.json`` files, each optionally paired with
    ``<stem>.holders.json``. A bad file skips that date (reported) and the run
    continues.
    """
    portfolios = _load_portfolios(vault_paths)
    rows: list[dict] = []
    skipped: list[tuple[str, str]] = []
    for snapshot_path in sorted(Path(snapshot_dir).glob("*.snapshot.json")):
        holders_path = snapshot_path.with_name(
            snapshot_path.name.replace(".snapshot.json", ".holders.json")
        )
        try:
            snapshot = _checked_snapshot(str(snapshot_path), scenario)
            row = _timeseries_row(
                snapshot,
                scenario,
                portfolios,
                holders_path if holders_path.exists() else None,
            )
        except Exception as exc:  # a single bad date must not kill the run
            skipped.append((snapshot_path.name, str(exc)))
            continue
        rows.append(row)
    rows.sort(key=lambda r: r["date"])

    csv_rows = []
    for row in rows:
        cells: list[Any] = []
        for column in _TIMESERIES_COLUMNS:
            value = row[column]
            if value is None:
                cells.append("")
            elif column == "date":
                cells.append(value.isoformat())
            else:
                cells.append(str(value))
        csv_rows.append(cells)
    outputs = [write_text(out_dir / "timeseries.csv", _csv_text(list(_TIMESERIES_COLUMNS), csv_rows))]

    provenance = _provenance(inputs or {}, scenario, seed_overridden=seed_overridden)
    document = {
        "schema_version": SCHEMA_VERSION,
        "kind": "timeseries_report",
        "rows": [
            {
                column: (
                    None
                    if row[column] is None
                    else row[column].isoformat() if column == "date" else str(row[column])
                )
                for column in _TIMESERIES_COLUMNS
            }
            for row in rows
        ],
        "skipped": [{"file": name, "reason": reason} for name, reason in skipped],
        "provenance": provenance,
    }
    outputs.append(write_json(out_dir / "timeseries_report.json", document))

    if rows:
        dates = [row["date"] for row in rows]
        outputs.append(out_dir / "car_by_source.svg")
        save_timeseries_lines(
            dates,
            {name: [float(row[f"car_{name}"]) / 1e6 for row in rows] for name in _SOURCES},
            "Capital at risk by source",
            "$M",
            outputs[-1],
        )
        present = [cls for cls in AssetClass if any(row[f"car_{cls.value}"] != ZERO for row in rows)]
        outputs.append(out_dir / "car_by_class.svg")
        save_timeseries_lines(
            dates,
            {
                cls.value: [float(row[f"car_{cls.value}"]) / 1e6 for row in rows]
                for cls in present
            },
            "Capital at risk by asset class",
            "$M",
            outputs[-1],
        )
        outputs.append(out_dir / "capitalization_ratio.svg")
        save_timeseries_lines(
            dates,
            {"cr": [float(row["cr"]) if row["cr"].is_finite() else float("nan") for row in rows]},
            "Capitalization ratio",
            "capital / capital at risk",
            outputs[-1],
        )
    return TimeseriesRun(rows=tuple(rows), skipped=tuple(skipped), outputs=tuple(outputs))
