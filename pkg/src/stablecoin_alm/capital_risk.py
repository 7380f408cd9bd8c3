"""Capital-at-risk engine.

Each asset position gets a loss fraction built from four components —
duration, credit, crypto-market, operational — and contributes
``exposure x fraction`` to the aggregate capital at risk. Capital divided by
that aggregate is the capitalization ratio; at or below 100% the protocol is
undercapitalized.

All arithmetic is exact decimal. Per-line ``car`` keeps full precision so that
exposure scaling is exactly linear; rounding to cents happens at the
rendering/serialization layer (:func:`stablecoin_alm.money.to_cents`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import date
from decimal import Decimal
from typing import Mapping

from .balance_sheet import AssetClass, AssetPosition, BalanceSheetSnapshot, Rating, capital
from .collateral_mc import MonteCarloConfig, VaultPortfolio, expected_loss_ratio
from .errors import ConfigurationError, DomainError
from .money import ZERO, ONE, ensure_fraction, to_cents

INFINITE = Decimal("Infinity")

#: Classes with no credit component by construction.
_NO_CREDIT_RISK = frozenset({AssetClass.CRYPTO_BACKED_LOAN, AssetClass.CASH})

#: Computed totals further than this from a scenario-supplied reference total
#: are flagged (half of the 0.1M display unit).
REFERENCE_TOLERANCE = Decimal("50000")


@dataclass(frozen=True)
class PdLgd:
    """Probability-of-default x loss-given-default credit parameterization.

    Alternative to a flat credit fraction; a position uses one or the other,
    never both.
    """

    pd: Decimal
    lgd: Decimal

    def __post_init__(self) -> None:
        ensure_fraction(self.pd, "pd")
        ensure_fraction(self.lgd, "lgd")

    def fraction(self) -> Decimal:
        return self.pd * self.lgd


@dataclass(frozen=True)
class RiskParameterSet:
    """Stress parameterization for a capital-at-risk run.

    ``credit_class_overrides`` is keyed by asset class or by position id
    (ids win); values are flat fractions or :class:`PdLgd`.
    """

    rate_shock_bps: Decimal = Decimal("200")
    credit_rating_table: Mapping[Rating, Decimal] | None = None
    credit_class_overrides: Mapping[AssetClass | str, Decimal | PdLgd] | None = None
    operational_table: Mapping[str, Decimal] | None = None
    market_model: MonteCarloConfig | None = None

    def __post_init__(self) -> None:
        if self.rate_shock_bps < ZERO:
            raise DomainError(f"rate_shock_bps {self.rate_shock_bps} is negative")
        object.__setattr__(self, "credit_rating_table", dict(self.credit_rating_table or {}))
        object.__setattr__(self, "credit_class_overrides", dict(self.credit_class_overrides or {}))
        object.__setattr__(self, "operational_table", dict(self.operational_table or {}))
        if self.market_model is None:
            object.__setattr__(self, "market_model", MonteCarloConfig())
        for rating, frac in self.credit_rating_table.items():
            ensure_fraction(frac, f"credit_rating_table[{rating.value}]")
        for key, spec in self.credit_class_overrides.items():
            if isinstance(spec, Decimal):
                name = key.value if isinstance(key, AssetClass) else key
                ensure_fraction(spec, f"credit_class_overrides[{name}]")
        for pid, frac in self.operational_table.items():
            ensure_fraction(frac, f"operational_table[{pid}]")


@dataclass(frozen=True)
class CaRLine:
    """Per-position capital-at-risk decomposition.

    ``carr`` is the clamped sum of the four components; ``clamped`` records
    whether the raw sum exceeded 1. ``car`` is the exact decimal product
    ``exposure x carr``.
    """

    position_id: str
    asset_class: AssetClass
    exposure: Decimal
    duration_carr: Decimal
    credit_carr: Decimal
    market_carr: Decimal
    operational_carr: Decimal
    carr: Decimal
    car: Decimal
    clamped: bool = False


class Classification(enum.Enum):
    UNDERCAPITALIZED = "undercapitalized"
    SUFFICIENTLY_CAPITALIZED = "sufficiently_capitalized"


@dataclass(frozen=True)
class CaRReport:
    """Aggregate capital-at-risk report for one snapshot.

    ``cr`` is ``Decimal('Infinity')`` when total CaR is zero with non-negative
    capital (an empty risk book is trivially capitalized).
    """

    as_of: date
    lines: tuple[CaRLine, ...]
    total_exposure: Decimal
    total_car: Decimal
    aggregate_carr: Decimal
    capital: Decimal
    cr: Decimal
    classification: Classification
    reference_total_car: Decimal | None = None
    reference_mismatch: bool = False


def duration_carr(position: AssetPosition, shock_bps: Decimal) -> Decimal:
    """Duration component: modified-duration proxy x parallel rate shock.

    Modified duration is approximated by average maturity in years
    (zero-coupon proxy), linear in the shock, clamped to [0, 1]. Zero-maturity
    positions (crypto loans, stablecoins, cash) contribute nothing.
    """
    if shock_bps < ZERO:
        raise DomainError(f"rate shock {shock_bps}bps is negative")
    raw = position.avg_maturity * shock_bps / Decimal(10000)
    return min(ONE, raw)


def credit_loss_pd_lgd(exposure: Decimal, pd: Decimal, lgd: Decimal) -> Decimal:
    """Expected credit loss as exposure x PD x LGD, rounded to cents."""
    ensure_fraction(pd, "pd")
    ensure_fraction(lgd, "lgd")
    return to_cents(exposure * pd * lgd)


def credit_carr(position: AssetPosition, params: RiskParameterSet) -> Decimal:
    """Credit component for one position.

    Lookup order: position-id override, asset-class override, rating table.
    After that, classes without credit risk get 0, stablecoins default to 1%
    issuer risk, and anything else is a configuration error — a credit-bearing
    position must never silently score 0.
    """
    override = params.credit_class_overrides.get(position.id)
    if override is None:
        override = params.credit_class_overrides.get(position.asset_class)
    if override is not None:
        return override.fraction() if isinstance(override, PdLgd) else override
    if position.rating is not None:
        fraction = params.credit_rating_table.get(position.rating)
        if fraction is None:
            raise ConfigurationError(
                f"position {position.id}: rating {position.rating.value} is not in the "
                f"credit rating table and no override is configured"
            )
        return fraction
    if position.asset_class in _NO_CREDIT_RISK:
        return ZERO
    if position.asset_class is AssetClass.STABLECOIN:
        return Decimal("0.01")
    raise ConfigurationError(
        f"position {position.id}: class {position.asset_class.value} carries credit risk "
        f"but the position has no rating and no override is configured"
    )


def market_carr(
    position: AssetPosition,
    params: RiskParameterSet,
    portfolios: Mapping[str, VaultPortfolio] | None = None,
    *,
    _cache: dict | None = None,
) -> Decimal:
    """Crypto-market component: expected collateral-liquidation loss ratio.

    Zero for everything except crypto-backed loans, which delegate to the
    Monte Carlo engine on their referenced vault portfolio.
    """
    if position.asset_class is not AssetClass.CRYPTO_BACKED_LOAN:
        return ZERO
    ref = position.collateral_ref
    if ref is None:
        raise ConfigurationError(f"position {position.id}: crypto-backed loan has no collateral_ref")
    if _cache is not None and ref in _cache:
        return _cache[ref]
    portfolio = (portfolios or {}).get(ref)
    if portfolio is None:
        raise ConfigurationError(
            f"position {position.id}: collateral_ref {ref!r} does not match any loaded "
            f"vault portfolio"
        )
    ratio = expected_loss_ratio(portfolio, params.market_model)
    if _cache is not None:
        _cache[ref] = ratio
    return ratio


def carr(
    position: AssetPosition,
    params: RiskParameterSet,
    portfolios: Mapping[str, VaultPortfolio] | None = None,
    *,
    _cache: dict | None = None,
) -> CaRLine:
    """Full four-component decomposition for one position."""
    duration = duration_carr(position, params.rate_shock_bps)
    credit = credit_carr(position, params)
    market = market_carr(position, params, portfolios, _cache=_cache)
    operational = params.operational_table.get(position.id, ZERO)
    raw = duration + credit + market + operational
    clamped = raw > ONE
    total = ONE if clamped else raw
    return CaRLine(
        position_id=position.id,
        asset_class=position.asset_class,
        exposure=position.exposure,
        duration_carr=duration,
        credit_carr=credit,
        market_carr=market,
        operational_carr=operational,
        carr=total,
        car=position.exposure * total,
        clamped=clamped,
    )


def car_report(
    snapshot: BalanceSheetSnapshot,
    params: RiskParameterSet,
    portfolios: Mapping[str, VaultPortfolio] | None = None,
    *,
    reference_total_car: Decimal | None = None,
) -> CaRReport:
    """Capital at risk, capitalization ratio, and classification for a snapshot.

    Expects a validated snapshot. Lines are ordered by position id, which
    fixes the summation order regardless of how they are evaluated. When a
    reference total is supplied (a published headline figure), the report
    flags any disagreement beyond :data:`REFERENCE_TOLERANCE`.
    """
    cache: dict[str, Decimal] = {}
    lines = tuple(
        carr(p, params, portfolios, _cache=cache)
        for p in sorted(snapshot.assets, key=lambda p: p.id)
    )
    total_exposure = sum((line.exposure for line in lines), ZERO)
    total_car = sum((line.car for line in lines), ZERO)
    aggregate = total_car / total_exposure if total_exposure > ZERO else ZERO
    cap = capital(snapshot)
    if total_car > ZERO:
        cr = cap / total_car
    else:
        cr = INFINITE if cap >= ZERO else -INFINITE
    classification = (
        Classification.UNDERCAPITALIZED if cr <= ONE else Classification.SUFFICIENTLY_CAPITALIZED
    )
    mismatch = (
        reference_total_car is not None
        and abs(total_car - reference_total_car) > REFERENCE_TOLERANCE
    )
    return CaRReport(
        as_of=snapshot.as_of,
        lines=lines,
        total_exposure=total_exposure,
        total_car=total_car,
        aggregate_carr=aggregate,
        capital=cap,
        cr=cr,
        classification=classification,
        reference_total_car=reference_total_car,
        reference_mismatch=mismatch,
    )
