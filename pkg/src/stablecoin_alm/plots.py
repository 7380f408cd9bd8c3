"""Static SVG chart output.

Charts are regenerated per run and written atomically. SVG ids are salted
with a fixed string and the creation date is stripped so identical inputs
produce identical bytes.
"""

from __future__ import annotations

import os
import tempfile
from datetime import date
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .balance_sheet import BUCKET_ORDER
from .liquidity import FundingGapReport

matplotlib.rcParams["svg.hashsalt"] = "stablecoin-alm"

_SHORTFALL = "#8c1c13"
_SURPLUS = "#2d6a4f"


def _save(fig, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, tmp = tempfile.mkstemp(dir=path.parent, suffix=".svg")
    os.close(handle)
    try:
        fig.savefig(tmp, format="svg", metadata={"Date": None})
        os.replace(tmp, path)
    finally:
        plt.close(fig)
        if os.path.exists(tmp):
            os.unlink(tmp)


def save_funding_gap_chart(report: FundingGapReport, path: Path) -> None:
    """Bar chart of the cumulative funding gap per bucket."""
    labels = [b.value for b in BUCKET_ORDER]
    values = [float(report.cumulative_gap[b]) / 1e6 for b in BUCKET_ORDER]
    colors = [_SHORTFALL if v < 0 else _SURPLUS for v in values]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(labels, values, color=colors)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_ylabel("cumulative gap ($M)")
    ax.set_title(f"Funding gap by bucket as of {report.as_of.isoformat()}")
    _save(fig, path)


def save_timeseries_lines(
    dates: Sequence[date],
    series: Mapping[str, Sequence[float]],
    title: str,
    ylabel: str,
    path: Path,
) -> None:
    """One line per named series over the given dates."""
    fig, ax = plt.subplots(figsize=(8, 4))
    for name in series:
        ax.plot(dates, series[name], marker="o", label=name)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if len(series) > 1:
        ax.legend()
    fig.autofmt_xdate()
    _save(fig, path)
