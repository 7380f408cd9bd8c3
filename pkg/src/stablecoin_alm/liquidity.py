"""Holder classification, stressed outflow bucketing, and the funding gap.

Stablecoin holdings split into volatile (smart-contract wallets) and organic
(externally-owned wallets). Historical maximum drawdowns of the aggregate
balance over each bucket's stress window give the fraction expected to flee
within that horizon; outflows are slotted incrementally into day/week/month
buckets with the year bucket absorbing the remainder so every liability is
matched. Asset liquidity is slotted by each position's stress tenor after a
per-class haircut. The cumulative difference is the funding gap.

Sign convention: a reported gap is liquidity minus outflow, so negative means
shortfall. The convention is recorded on the report.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from datetime import date, timedelta
from decimal import Decimal
from typing import Iterable, Mapping, Sequence

from .balance_sheet import (
    BUCKET_ORDER,
    AssetClass,
    BalanceSheetSnapshot,
    Bucket,
)
from .errors import DomainError, StructuralError
from .money import ZERO, ONE, ensure_fraction, to_cents

SIGN_CONVENTION = "liquidity_minus_outflow"


class HolderKind(enum.Enum):
    EXTERNALLY_OWNED = "externally_owned"
    CONTRACT = "contract"


class HoldingClass(enum.Enum):
    VOLATILE = "volatile"
    ORGANIC = "organic"


@dataclass(frozen=True)
class HolderRecord:
    """Dated balance history of one address."""

    address_id: str
    holder_kind: HolderKind
    balance_series: tuple[tuple[date, Decimal], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "balance_series", tuple(self.balance_series))
        previous = None
        for when, balance in self.balance_series:
            if previous is not None and when <= previous:
                raise DomainError(
                    f"holder {self.address_id}: balance dates must be strictly increasing "
                    f"({when} after {previous})"
                )
            if balance < ZERO:
                raise DomainError(f"holder {self.address_id}: negative balance on {when}")
            previous = when

    def balance_as_of(self, as_of: date) -> Decimal:
        """Last observed balance on or before ``as_of`` (0 before first observation)."""
        balance = ZERO
        for when, value in self.balance_series:
            if when > as_of:
                break
            balance = value
        return balance


def classify_holder(holder: HolderRecord) -> HoldingClass:
    """Contract wallets are volatile, externally-owned wallets are organic."""
    if holder.holder_kind is HolderKind.CONTRACT:
        return HoldingClass.VOLATILE
    return HoldingClass.ORGANIC


def max_drawdown(series: Sequence[tuple[date, Decimal]], window_days: int) -> Decimal:
    """Worst fractional balance drop within ``window_days`` of any start date.

    For each observation with a positive balance, take the minimum balance
    among later observations dated at most ``window_days`` after it; the
    drawdown is (start - min) / start. The result is the maximum over all
    starts, floored at 0; starts with no later observation in the window
    contribute nothing. Invariant under uniform positive scaling.
    """
    if not series:
        raise DomainError("balance series must be non-empty")
    if window_days < 1:
        raise DomainError(f"window_days {window_days} must be >= 1")
    dates = [when for when, _ in series]
    balances = [balance for _, balance in series]
    worst = ZERO
    window: deque[int] = deque()  # indices of increasing balances within the window
    right = 0
    n = len(series)
    for i in range(n):
        while window and window[0] <= i:
            window.popleft()
        limit = dates[i] + timedelta(days=window_days)
        while right < n and dates[right] <= limit:
            if right > i:
                while window and balances[window[-1]] >= balances[right]:
                    window.pop()
                window.append(right)
            right += 1
        if balances[i] > ZERO and window:
            drawdown = (balances[i] - balances[window[0]]) / balances[i]
            if drawdown > worst:
                worst = drawdown
    return min(ONE, worst)


@dataclass(frozen=True)
class BucketedLiabilityProfile:
    """Stressed expected outflow newly attributable to each bucket (non-cumulative).

    Outflows sum exactly to ``total``. ``by_class`` carries the volatile/organic
    split when requested; the headline map is their sum in that case.
    """

    as_of: date
    outflow: Mapping[Bucket, Decimal]
    total: Decimal
    by_class: Mapping[HoldingClass, "BucketedLiabilityProfile"] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "outflow", dict(self.outflow))
        _require_all_buckets(self.outflow, "outflow")
        for bucket, amount in self.outflow.items():
            if amount < ZERO:
                raise DomainError(f"outflow[{bucket.value}] {amount} is negative")
        if sum(self.outflow.values(), ZERO) != self.total:
            raise DomainError("bucket outflows must sum to the total holdings covered")


@dataclass(frozen=True)
class LiquiditySchedule:
    """Liquidity newly available in each bucket after haircuts."""

    as_of: date
    available: Mapping[Bucket, Decimal]

    def __post_init__(self) -> None:
        object.__setattr__(self, "available", dict(self.available))
        _require_all_buckets(self.available, "available")
        for bucket, amount in self.available.items():
            if amount < ZERO:
                raise DomainError(f"available[{bucket.value}] {amount} is negative")


@dataclass(frozen=True)
class FundingGapReport:
    """Per-bucket outflows, liquidity, and the cumulative gap.

    ``cumulative_gap[b]`` sums liquidity minus outflow over every bucket up to
    and including ``b``; negative means shortfall.
    """

    as_of: date
    outflow: Mapping[Bucket, Decimal]
    liquidity: Mapping[Bucket, Decimal]
    cumulative_gap: Mapping[Bucket, Decimal]
    terminal_gap: Decimal
    sign_convention: str = SIGN_CONVENTION


def _require_all_buckets(mapping: Mapping[Bucket, Decimal], name: str) -> None:
    if set(mapping) != set(BUCKET_ORDER):
        missing = [b.value for b in BUCKET_ORDER if b not in mapping]
        extra = [getattr(b, "value", b) for b in mapping if b not in BUCKET_ORDER]
        raise StructuralError(f"{name} must cover exactly the four buckets "
                              f"(missing {missing}, unexpected {extra})")


def _aggregate_series(holders: Iterable[HolderRecord]) -> list[tuple[date, Decimal]]:
    """Date-union, forward-filled sum of the holders' balance series."""
    holders = list(holders)
    dates = sorted({when for h in holders for when, _ in h.balance_series})
    series: list[tuple[date, Decimal]] = []
    cursors = [0] * len(holders)
    levels = [ZERO] * len(holders)
    for when in dates:
        for k, holder in enumerate(holders):
            points = holder.balance_series
            while cursors[k] < len(points) and points[cursors[k]][0] <= when:
                levels[k] = points[cursors[k]][1]
                cursors[k] += 1
        series.append((when, sum(levels, ZERO)))
    return series


def _drawdown_fractions(
    holders: list[HolderRecord],
    stress_windows: Mapping[Bucket, int],
    overrides: Mapping[Bucket, Decimal] | None,
) -> dict[Bucket, Decimal]:
    """Cumulative drawdown fraction per bucket (year is the full remainder)."""
    overrides = dict(overrides or {})
    for bucket, fraction in overrides.items():
        ensure_fraction(fraction, f"drawdown override[{bucket.value}]")
    previous_bucket: Bucket | None = None
    for bucket in BUCKET_ORDER:
        if previous_bucket in overrides and bucket in overrides:
            if overrides[bucket] < overrides[previous_bucket]:
                raise DomainError(
                    f"drawdown overrides must be non-decreasing: "
                    f"{previous_bucket.value}={overrides[previous_bucket]} > "
                    f"{bucket.value}={overrides[bucket]}"
                )
        previous_bucket = bucket
    aggregate = None
    fractions: dict[Bucket, Decimal] = {}
    for bucket in (Bucket.DAY, Bucket.WEEK, Bucket.MONTH):
        if bucket in overrides:
            fractions[bucket] = overrides[bucket]
            continue
        if aggregate is None:
            aggregate = _aggregate_series(holders)
        if not aggregate:
            fractions[bucket] = ZERO
        else:
            fractions[bucket] = max_drawdown(aggregate, stress_windows[bucket])
    return fractions


def _profile_from_fractions(
    total: Decimal, fractions: Mapping[Bucket, Decimal]
) -> dict[Bucket, Decimal]:
    # Quantize the cumulative amounts, then difference: monotone fractions give
    # non-negative incremental outflows and an exact telescoping total.
    cum_day = to_cents(total * fractions[Bucket.DAY])
    cum_week = max(cum_day, to_cents(total * fractions[Bucket.WEEK]))
    cum_month = max(cum_week, to_cents(total * fractions[Bucket.MONTH]))
    return {
        Bucket.DAY: cum_day,
        Bucket.WEEK: cum_week - cum_day,
        Bucket.MONTH: cum_month - cum_week,
        Bucket.YEAR: total - cum_month,
    }


DEFAULT_STRESS_WINDOWS: Mapping[Bucket, int] = {b: b.span_days for b in BUCKET_ORDER}


def bucket_liabilities(
    holders: Iterable[HolderRecord],
    as_of: date,
    stress_windows: Mapping[Bucket, int] | None = None,
    overrides: Mapping[Bucket, Decimal] | None = None,
    *,
    split_by_holder_kind: bool = False,
) -> BucketedLiabilityProfile:
    """Slot total holdings into stressed-outflow buckets.

    Per bucket, the cumulative drawdown fraction is the override when given,
    otherwise the historical :func:`max_drawdown` of the aggregate balance
    series over the bucket's stress window (default: the bucket span over the
    full history). Outflows are the increments of the cumulative fractions and
    the year bucket absorbs the remainder, so they sum exactly to the holdings.

    With ``split_by_holder_kind`` the volatile and organic books are profiled
    separately (same overrides) and the headline is their sum; the default
    merges all holders, matching the headline treatment of liabilities.
    """
    holders = list(holders)
    windows = dict(DEFAULT_STRESS_WINDOWS)
    windows.update(stress_windows or {})
    if split_by_holder_kind:
        by_class = {}
        for cls in (HoldingClass.VOLATILE, HoldingClass.ORGANIC):
            members = [h for h in holders if classify_holder(h) is cls]
            by_class[cls] = bucket_liabilities(members, as_of, windows, overrides)
        outflow = {
            b: sum((p.outflow[b] for p in by_class.values()), ZERO) for b in BUCKET_ORDER
        }
        total = sum((p.total for p in by_class.values()), ZERO)
        return BucketedLiabilityProfile(
            as_of=as_of, outflow=outflow, total=total, by_class=by_class
        )
    total = sum((h.balance_as_of(as_of) for h in holders), ZERO)
    fractions = _drawdown_fractions(holders, windows, overrides)
    outflow = _profile_from_fractions(total, fractions)
    return BucketedLiabilityProfile(as_of=as_of, outflow=outflow, total=total)


DEFAULT_HAIRCUTS: Mapping[AssetClass, Decimal] = {cls: ZERO for cls in AssetClass}


def asset_liquidity_schedule(
    snapshot: BalanceSheetSnapshot,
    haircuts: Mapping[AssetClass, Decimal] | None = None,
) -> LiquiditySchedule:
    """Liquidity obtainable per bucket: exposure net of the class haircut,
    slotted at each position's stress tenor.

    Default haircuts are zero for every class (fiat-backed stablecoins in
    particular sell at par in their primary market); scenarios override per
    class.
    """
    table = dict(DEFAULT_HAIRCUTS)
    table.update(haircuts or {})
    for cls, haircut in table.items():
        ensure_fraction(haircut, f"haircut[{cls.value}]")
    available: dict[Bucket, Decimal] = {b: ZERO for b in BUCKET_ORDER}
    for position in snapshot.assets:
        value = to_cents(position.exposure * (ONE - table[position.asset_class]))
        available[position.liquidity_tenor] += value
    return LiquiditySchedule(as_of=snapshot.as_of, available=available)


def funding_gap(
    outflows: BucketedLiabilityProfile, liquidity: LiquiditySchedule
) -> FundingGapReport:
    """Cumulative liquidity-minus-outflow per bucket (negative = shortfall)."""
    if outflows.as_of != liquidity.as_of:
        raise StructuralError(
            f"outflow profile is as of {outflows.as_of} but liquidity schedule "
            f"is as of {liquidity.as_of}"
        )
    cumulative: dict[Bucket, Decimal] = {}
    running = ZERO
    for bucket in BUCKET_ORDER:
        running += liquidity.available[bucket] - outflows.outflow[bucket]
        cumulative[bucket] = running
    return FundingGapReport(
        as_of=outflows.as_of,
        outflow=dict(outflows.outflow),
        liquidity=dict(liquidity.available),
        cumulative_gap=cumulative,
        terminal_gap=running,
    )
