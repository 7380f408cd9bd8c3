"""Command-line surface.

Exit-status contract, stable across releases:
0 healthy, 1 input error, 2 risk-threshold breach.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .balance_sheet import BUCKET_ORDER
from .errors import AlmError
from .ingestion import load_scenario
from .reporting import (
    EXIT_INPUT_ERROR,
    EXIT_OK,
    EXIT_RISK_BREACH,
    musd,
    pct,
    recommend,
    recommendations_document,
    run_car,
    run_liquidity,
    run_timeseries,
    write_json,
    _provenance,
)


@click.group()
@click.version_option()
def main() -> None:
    """Capital-at-risk and funding-gap analytics for stablecoin protocol balance sheets."""


def _fail(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(EXIT_INPUT_ERROR)


def _scenario(scenario_path: str, seed: int | None):
    return load_scenario(scenario_path, seed_override=seed)


_snapshot_opt = click.option("--snapshot", required=True, type=click.Path(), help="Snapshot file.")
_holders_opt = click.option("--holders", required=True, type=click.Path(), help="Holder-history file.")
_scenario_opt = click.option("--scenario", required=True, type=click.Path(), help="Scenario file.")
_vaults_opt = click.option(
    "--vaults", multiple=True, type=click.Path(), help="Vault-portfolio file (repeatable)."
)
_out_opt = click.option("--out", required=True, type=click.Path(file_okay=False), help="Output directory.")
_seed_opt = click.option("--seed", type=int, default=None, help="Override the Monte Carlo seed.")


@main.command("car")
@_snapshot_opt
@_scenario_opt
@_vaults_opt
@_out_opt
@_seed_opt
def car_command(snapshot: str, scenario: str, vaults: tuple[str, ...], out: str, seed: int | None) -> None:
    """Capital at risk, capitalization ratio, and classification."""
    try:
        scn = _scenario(scenario, seed)
        run = run_car(
            snapshot,
            scn,
            Path(out),
            vault_paths=vaults,
            inputs={"snapshot": snapshot, "scenario": scenario, "vaults": list(vaults)},
            seed_overridden=seed is not None,
        )
    except AlmError as exc:
        _fail(exc)
    report = run.report
    click.echo(f"as of {report.as_of.isoformat()}")
    click.echo(f"total exposure: {musd(report.total_exposure)}M")
    click.echo(f"capital at risk: {musd(report.total_car)}M ({pct(report.aggregate_carr)}%)")
    cr_text = "inf" if not report.cr.is_finite() else f"{pct(report.cr)}%"
    click.echo(f"capitalization ratio: {cr_text} -> {report.classification.value}")
    if report.reference_mismatch:
        click.echo(
            f"note: computed total differs from the reference total "
            f"{musd(report.reference_total_car)}M", err=True
        )
    for path in run.outputs:
        click.echo(f"wrote {path}")
    sys.exit(EXIT_RISK_BREACH if run.breach else EXIT_OK)


@main.command("liquidity")
@_snapshot_opt
@_holders_opt
@_scenario_opt
@_out_opt
def liquidity_command(snapshot: str, holders: str, scenario: str, out: str) -> None:
    """Stressed outflows, available liquidity, and the cumulative funding gap."""
    try:
        scn = _scenario(scenario, None)
        run = run_liquidity(
            snapshot,
            holders,
            scn,
            Path(out),
            inputs={"snapshot": snapshot, "holders": holders, "scenario": scenario},
        )
    except AlmError as exc:
        _fail(exc)
    report = run.report
    click.echo(f"as of {report.as_of.isoformat()} (gap = liquidity - outflow)")
    for bucket in BUCKET_ORDER:
        click.echo(f"{bucket.value:>6}: cumulative gap {report.cumulative_gap[bucket]}")
    for path in run.outputs:
        click.echo(f"wrote {path}")
    sys.exit(EXIT_RISK_BREACH if run.breach else EXIT_OK)


@main.command("timeseries")
@click.option("--snapshot", "snapshot_dir", required=True, type=click.Path(file_okay=False),
              help="Directory of <stem>.snapshot.json (+ optional <stem>.holders.json) files.")
@_scenario_opt
@_vaults_opt
@_out_opt
@_seed_opt
def timeseries_command(
    snapshot_dir: str, scenario: str, vaults: tuple[str, ...], out: str, seed: int | None
) -> None:
    """Dated series of capital and liquidity metrics with line charts."""
    try:
        scn = _scenario(scenario, seed)
        run = run_timeseries(
            snapshot_dir,
            scn,
            Path(out),
            vault_paths=vaults,
            inputs={"snapshot_dir": snapshot_dir, "scenario": scenario, "vaults": list(vaults)},
            seed_overridden=seed is not None,
        )
    except AlmError as exc:
        _fail(exc)
    if not run.rows:
        click.echo("warning: no usable snapshot files found", err=True)
    for name, reason in run.skipped:
        click.echo(f"warning: skipped {name}: {reason}", err=True)
    click.echo(f"{len(run.rows)} date(s) processed, {len(run.skipped)} skipped")
    for path in run.outputs:
        click.echo(f"wrote {path}")
    sys.exit(EXIT_OK)


@main.command("recommend")
@_snapshot_opt
@_holders_opt
@_scenario_opt
@_vaults_opt
@_out_opt
@_seed_opt
def recommend_command(
    snapshot: str, holders: str, scenario: str, vaults: tuple[str, ...], out: str, seed: int | None
) -> None:
    """Policy recommendations from the capital and liquidity reports."""
    try:
        scn = _scenario(scenario, seed)
        inputs = {
            "snapshot": snapshot,
            "holders": holders,
            "scenario": scenario,
            "vaults": list(vaults),
        }
        car_run = run_car(
            snapshot, scn, Path(out), vault_paths=vaults, inputs=inputs,
            seed_overridden=seed is not None,
        )
        liq_run = run_liquidity(snapshot, holders, scn, Path(out), inputs=inputs)
        recommendations = recommend(car_run.report, liq_run.report)
        document = recommendations_document(
            car_run.report.as_of,
            recommendations,
            _provenance(inputs, scn, seed_overridden=seed is not None),
        )
        path = write_json(Path(out) / "recommendations.json", document)
    except AlmError as exc:
        _fail(exc)
    if not recommendations:
        click.echo("no action needed")
    for rec in recommendations:
        click.echo(f"{rec.kind.value}: {rec.amount} ({rec.rationale})")
    click.echo(f"wrote {path}")
    sys.exit(EXIT_RISK_BREACH if car_run.breach or liq_run.breach else EXIT_OK)


if __name__ == "__main__":
    main()
