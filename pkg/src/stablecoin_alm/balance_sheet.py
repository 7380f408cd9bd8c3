"""Balance-sheet data model for a stablecoin protocol.

A snapshot is a dated list of asset and liability positions. Equity is carried
as a liability-side position so the accounting identity is a single sum check:
total assets = non-equity liabilities + equity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import date
from decimal import Decimal

from .errors import DomainError, StructuralError
from .money import ZERO


class AssetClass(enum.Enum):
    CRYPTO_BACKED_LOAN = "crypto_backed_loan"
    PUBLIC_CREDIT = "public_credit"
    PRIVATE_CREDIT = "private_credit"
    STABLECOIN = "stablecoin"
    CASH = "cash"
    OTHER = "other"


class Rating(enum.Enum):
    AAA = "AAA"
    AA = "AA"
    A = "A"
    BBB = "BBB"
    BB = "BB"
    B = "B"
    UNRATED = "unrated"


class Bucket(enum.Enum):
    """Liquidity/maturity buckets, ordered shortest to longest."""

    DAY = "day"
    WEEK = "week"
    MONTH = "month"
    YEAR = "year"

    @property
    def span_days(self) -> int:
        return _BUCKET_SPAN_DAYS[self]


BUCKET_ORDER: tuple[Bucket, ...] = (Bucket.DAY, Bucket.WEEK, Bucket.MONTH, Bucket.YEAR)

_BUCKET_SPAN_DAYS = {Bucket.DAY: 1, Bucket.WEEK: 7, Bucket.MONTH: 30, Bucket.YEAR: 365}


class LiabilityKind(enum.Enum):
    CIRCULATING_STABLECOIN = "circulating_stablecoin"
    SAVINGS_DEPOSIT = "savings_deposit"
    EQUITY = "equity"


@dataclass(frozen=True)
class AssetPosition:
    """One asset position.

    ``exposure`` is USD, exact decimal. ``avg_maturity`` is in years; books
    with mixed maturities are split into several positions by the data
    preparer. ``liquidity_tenor`` is the bucket in which the position can
    realistically be liquidated under stress. Crypto-backed loans must carry a
    ``collateral_ref`` naming a vault portfolio; no other class may.
    """

    id: str
    asset_class: AssetClass
    exposure: Decimal
    avg_maturity: Decimal
    liquidity_tenor: Bucket
    rating: Rating | None = None
    collateral_ref: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise DomainError("asset position id must be non-empty")
        if self.exposure < ZERO:
            raise DomainError(f"position {self.id}: exposure {self.exposure} is negative")
        if self.avg_maturity < ZERO:
            raise DomainError(f"position {self.id}: avg_maturity {self.avg_maturity} is negative")
        if self.asset_class is AssetClass.CRYPTO_BACKED_LOAN:
            if not self.collateral_ref:
                raise DomainError(
                    f"position {self.id}: crypto-backed loans require a collateral_ref"
                )
        elif self.collateral_ref is not None:
            raise DomainError(
                f"position {self.id}: collateral_ref is only valid on crypto-backed loans"
            )


@dataclass(frozen=True)
class LiabilityPosition:
    """One liability-side position; equity may be negative, the others may not."""

    id: str
    kind: LiabilityKind
    amount: Decimal

    def __post_init__(self) -> None:
        if not self.id:
            raise DomainError("liability position id must be non-empty")
        if self.kind is not LiabilityKind.EQUITY and self.amount < ZERO:
            raise DomainError(
                f"position {self.id}: {self.kind.value} amount {self.amount} is negative"
            )


@dataclass(frozen=True)
class BalanceSheetSnapshot:
    """Dated asset/liability positions of a protocol. Immutable."""

    as_of: date
    assets: tuple[AssetPosition, ...]
    liabilities: tuple[LiabilityPosition, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "assets", tuple(self.assets))
        object.__setattr__(self, "liabilities", tuple(self.liabilities))

    def total_assets(self) -> Decimal:
        return sum((p.exposure for p in self.assets), ZERO)


@dataclass(frozen=True)
class Violation:
    """One validation finding; ``imbalance`` is set for identity violations."""

    message: str
    position_id: str | None = None
    imbalance: Decimal | None = None


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    violations: tuple[Violation, ...]


DEFAULT_BALANCE_TOLERANCE = Decimal("1.00")


def structural_issues(snapshot: BalanceSheetSnapshot) -> list[Violation]:
    """Duplicate-id and equity-count problems. Empty list when sound."""
    issues: list[Violation] = []
    seen: set[str] = set()
    for pid in [p.id for p in snapshot.assets] + [p.id for p in snapshot.liabilities]:
        if pid in seen:
            issues.append(Violation(f"duplicate position id {pid!r}", position_id=pid))
        seen.add(pid)
    equity_count = sum(1 for p in snapshot.liabilities if p.kind is LiabilityKind.EQUITY)
    if equity_count != 1:
        issues.append(Violation(f"expected exactly one equity position, found {equity_count}"))
    return issues


def snapshot_violations(
    snapshot: BalanceSheetSnapshot, tolerance: Decimal = DEFAULT_BALANCE_TOLERANCE
) -> list[Violation]:
    """Every violation in the snapshot: structural issues plus the identity check."""
    issues = structural_issues(snapshot)
    if any(p.kind is LiabilityKind.EQUITY for p in snapshot.liabilities):
        total_assets = snapshot.total_assets()
        non_equity = sum(
            (p.amount for p in snapshot.liabilities if p.kind is not LiabilityKind.EQUITY), ZERO
        )
        equity = sum(
            (p.amount for p in snapshot.liabilities if p.kind is LiabilityKind.EQUITY), ZERO
        )
        imbalance = total_assets - non_equity - equity
        if abs(imbalance) > tolerance:
            issues.append(
                Violation(
                    f"balance identity broken: assets - liabilities - equity = {imbalance} "
                    f"(tolerance {tolerance})",
                    imbalance=imbalance,
                )
            )
    return issues


def validate_snapshot(
    snapshot: BalanceSheetSnapshot, tolerance: Decimal = DEFAULT_BALANCE_TOLERANCE
) -> ValidationResult:
    """Check snapshot invariants and the accounting identity against ``tolerance``.

    Value-level findings come back as a result; structural problems (duplicate
    ids, equity count) raise :class:`StructuralError` because nothing
    downstream can interpret such a snapshot.
    """
    if tolerance < ZERO:
        raise DomainError(f"tolerance {tolerance} is negative")
    structural = structural_issues(snapshot)
    if structural:
        raise StructuralError("; ".join(v.message for v in structural))
    violations = tuple(snapshot_violations(snapshot, tolerance))
    return ValidationResult(ok=not violations, violations=violations)


def capital(snapshot: BalanceSheetSnapshot) -> Decimal:
    """The equity position's amount (the protocol's current capital)."""
    amounts = [p.amount for p in snapshot.liabilities if p.kind is LiabilityKind.EQUITY]
    if len(amounts) != 1:
        raise StructuralError(f"expected exactly one equity position, found {len(amounts)}")
    return amounts[0]
