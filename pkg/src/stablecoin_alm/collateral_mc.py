"""Monte Carlo engine for collateral-liquidation losses on crypto-backed loans.

Over-collateralized loans lose money when the collateral price crashes faster
than it can be sold: the vault breaches its liquidation ratio, the collateral
is dumped at a slippage-discounted price, and any residual debt is bad debt.
This module simulates daily collateral prices (geometric returns plus a
downward jump mixture), replays the liquidation rule on each path, and reduces
per-path losses to a loss ratio used as the crypto-market risk fraction.

Determinism contract: the random stream for path ``i`` is a fixed-size slice
of a Philox counter stream keyed by the config seed, so any chunking of paths
across workers reproduces identical numbers. Normals come from inverse-CDF
transformed open-interval uniforms, which keeps per-path stream consumption
fixed (rejection samplers would not).
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from typing import Sequence

import numpy as np
from scipy.special import ndtri

from .errors import DomainError
from .money import ZERO, ONE, ensure_fraction, fraction_from_float, to_cents

_U64_MASK = 0xFFFFFFFFFFFFFFFF
_RAWS_PER_DAY = 2  # one normal + one jump uniform per simulated day
_PHILOX_BLOCK = 4  # Philox-4x64 emits four 64-bit words per counter increment


class LossStatistic(enum.Enum):
    MEAN = "mean"
    PERCENTILE = "percentile"


@dataclass(frozen=True)
class Vault:
    """One over-collateralized loan vault.

    The position is liquidated on the first day its collateral value falls
    below ``debt * liquidation_ratio``.
    """

    collateral_units: Decimal
    collateral_price: Decimal
    debt: Decimal
    liquidation_ratio: Decimal
    liquidation_penalty: Decimal = ZERO

    def __post_init__(self) -> None:
        if self.collateral_units < ZERO:
            raise DomainError(f"collateral_units {self.collateral_units} is negative")
        if self.collateral_price < ZERO:
            raise DomainError(f"collateral_price {self.collateral_price} is negative")
        if self.debt < ZERO:
            raise DomainError(f"debt {self.debt} is negative")
        if self.liquidation_ratio <= ONE:
            raise DomainError(f"liquidation_ratio {self.liquidation_ratio} must exceed 1")
        if self.liquidation_penalty < ZERO:
            raise DomainError(f"liquidation_penalty {self.liquidation_penalty} is negative")
        if self.debt > ZERO:
            collateralization = self.collateral_units * self.collateral_price / self.debt
            if collateralization < self.liquidation_ratio:
                raise DomainError(
                    f"initial collateralization {collateralization} is below the "
                    f"liquidation ratio {self.liquidation_ratio}"
                )


@dataclass(frozen=True)
class VaultPortfolio:
    """A book of vaults plus the market-impact parameters for forced sales.

    Selling ``market_depth`` of collateral in one shot moves the price by
    ``slippage_coefficient``; impact scales linearly with sale size and is
    capped at a total wipe-out.
    """

    vaults: tuple[Vault, ...]
    market_depth: Decimal
    slippage_coefficient: Decimal

    def __post_init__(self) -> None:
        object.__setattr__(self, "vaults", tuple(self.vaults))
        if self.market_depth <= ZERO:
            raise DomainError(f"market_depth {self.market_depth} must be positive")
        ensure_fraction(self.slippage_coefficient, "slippage_coefficient")

    def total_debt(self) -> Decimal:
        return sum((v.debt for v in self.vaults), ZERO)


@dataclass(frozen=True)
class MonteCarloConfig:
    """Price-path and reduction parameters for the loss simulation.

    ``jump_size`` is an instantaneous downward move applied on days where an
    independent uniform draw falls under ``jump_probability``. ``percentile``
    is required when ``loss_statistic`` is PERCENTILE (level in (0, 100]).
    """

    n_paths: int = 10_000
    horizon_days: int = 30
    daily_volatility: Decimal = ZERO
    daily_drift: Decimal = ZERO
    jump_probability: Decimal = ZERO
    jump_size: Decimal = ZERO
    seed: int = 0
    loss_statistic: LossStatistic = LossStatistic.MEAN
    percentile: Decimal | None = None

    def __post_init__(self) -> None:
        if self.n_paths < 1:
            raise DomainError(f"n_paths {self.n_paths} must be >= 1")
        if self.horizon_days < 1:
            raise DomainError(f"horizon_days {self.horizon_days} must be >= 1")
        if self.daily_volatility < ZERO:
            raise DomainError(f"daily_volatility {self.daily_volatility} is negative")
        ensure_fraction(self.jump_probability, "jump_probability")
        if not (ZERO <= self.jump_size < ONE):
            raise DomainError(f"jump_size {self.jump_size} outside [0, 1)")
        if not (-(2**63) <= self.seed < 2**64):
            raise DomainError(f"seed {self.seed} does not fit in 64 bits")
        if self.loss_statistic is LossStatistic.PERCENTILE:
            if self.percentile is None or not (ZERO < self.percentile <= Decimal(100)):
                raise DomainError("percentile level must be in (0, 100]")


def _raws_per_path(horizon_days: int) -> int:
    # Pad each path's stream to a whole number of Philox blocks so every path
    # starts on a counter boundary and chunks are independently addressable.
    need = _RAWS_PER_DAY * horizon_days
    return -(-need // _PHILOX_BLOCK) * _PHILOX_BLOCK


def _uniforms(cfg: MonteCarloConfig, start: int, stop: int) -> np.ndarray:
    """Open-interval (0, 1) uniforms for paths [start, stop), fixed layout."""
    start, stop = int(start), int(stop)
    per_path = _raws_per_path(cfg.horizon_days)
    bit_gen = np.random.Philox(key=cfg.seed & _U64_MASK)
    bit_gen.advance(start * per_path // _PHILOX_BLOCK)
    raw = bit_gen.random_raw((stop - start) * per_path).reshape(stop - start, per_path)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def _multipliers(cfg: MonteCarloConfig, start: int, stop: int) -> np.ndarray:
    """Daily price multipliers for paths [start, stop), shape (paths, horizon)."""
    horizon = cfg.horizon_days
    u = _uniforms(cfg, start, stop)
    z = ndtri(u[:, :horizon])
    vol = float(cfg.daily_volatility)
    drift = float(cfg.daily_drift)
    mult = np.exp(drift - 0.5 * vol * vol + vol * z)
    jumped = u[:, horizon : 2 * horizon] < float(cfg.jump_probability)
    return np.where(jumped, mult * (1.0 - float(cfg.jump_size)), mult)


def simulate_price_path(cfg: MonteCarloConfig, path_index: int) -> np.ndarray:
    """Daily price multipliers for one path, derived solely from (seed, path_index)."""
    if not 0 <= path_index < cfg.n_paths:
        raise DomainError(f"path_index {path_index} outside [0, {cfg.n_paths})")
    return _multipliers(cfg, path_index, path_index + 1)[0]


def _sale_proceeds(sale_value: float, portfolio: VaultPortfolio) -> float:
    slip = min(
        1.0, float(portfolio.slippage_coefficient) * sale_value / float(portfolio.market_depth)
    )
    return sale_value * (1.0 - slip)


def liquidation_loss(
    vault: Vault, path: Sequence[float] | np.ndarray, portfolio: VaultPortfolio
) -> Decimal:
    """Bad debt realized by one vault along one price path.

    Walks the path day by day; on the first day the collateral value drops
    below ``debt * liquidation_ratio`` the whole position is sold at that
    day's slippage-discounted price and the shortfall against
    ``debt * (1 + liquidation_penalty)`` is the loss. No trigger, no loss.
    """
    if len(path) == 0:
        raise DomainError("price path must be non-empty")
    if vault.debt == ZERO:
        return Decimal("0.00")
    debt = float(vault.debt)
    base_value = float(vault.collateral_units) * float(vault.collateral_price)
    # Same arithmetic shape as the vectorized kernel so knife-edge breaches agree.
    threshold_mult = debt * float(vault.liquidation_ratio) / base_value
    cum = 1.0
    for mult in path:
        cum *= float(mult)
        if cum < threshold_mult:
            recovered = _sale_proceeds(base_value * cum, portfolio)
            loss = max(0.0, debt * (1.0 + float(vault.liquidation_penalty)) - recovered)
            return to_cents(Decimal(repr(loss)))
    return Decimal("0.00")


def _chunk_losses(portfolio: VaultPortfolio, cfg: MonteCarloConfig, start: int, stop: int) -> np.ndarray:
    """Total portfolio loss per path for paths [start, stop)."""
    cum = np.cumprod(_multipliers(cfg, start, stop), axis=1)
    losses = np.zeros(stop - start)
    rows = np.arange(stop - start)
    for vault in portfolio.vaults:
        debt = float(vault.debt)
        if debt == 0.0:
            continue
        base_value = float(vault.collateral_units) * float(vault.collateral_price)
        threshold_mult = debt * float(vault.liquidation_ratio) / base_value
        breached = cum < threshold_mult
        hit = breached.any(axis=1)
        first = breached.argmax(axis=1)
        sale_value = base_value * cum[rows, first]
        slip = np.minimum(
            1.0,
            float(portfolio.slippage_coefficient) * sale_value / float(portfolio.market_depth),
        )
        recovered = sale_value * (1.0 - slip)
        loss = np.maximum(0.0, debt * (1.0 + float(vault.liquidation_penalty)) - recovered)
        losses += np.where(hit, loss, 0.0)
    return losses


def path_loss_ratios(
    portfolio: VaultPortfolio, cfg: MonteCarloConfig, *, workers: int = 1
) -> np.ndarray:
    """Per-path loss / total debt, ordered by path index.

    Paths are embarrassingly parallel; the counter-stream seeding makes the
    result identical for any ``workers`` count.
    """
    total_debt = float(portfolio.total_debt())
    if total_debt == 0.0:
        return np.zeros(cfg.n_paths)
    if workers < 1:
        raise DomainError(f"workers {workers} must be >= 1")
    n = cfg.n_paths
    if workers == 1 or n < 2 * workers:
        losses = _chunk_losses(portfolio, cfg, 0, n)
    else:
        bounds = np.linspace(0, n, workers + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    lambda se: _chunk_losses(portfolio, cfg, se[0], se[1]),
                    zip(bounds[:-1], bounds[1:]),
                )
            )
        losses = np.concatenate(parts)
    return losses / total_debt


def expected_loss_ratio(
    portfolio: VaultPortfolio, cfg: MonteCarloConfig, *, workers: int = 1
) -> Decimal:
    """Loss statistic of (path loss / total debt) over ``cfg.n_paths`` paths.

    Zero total debt returns 0: without debt there is nothing to lose. The
    result is clamped to [0, 1] (penalties can push individual paths above 1).
    """
    if portfolio.total_debt() == ZERO:
        return ZERO
    ratios = path_loss_ratios(portfolio, cfg, workers=workers)
    if cfg.loss_statistic is LossStatistic.PERCENTILE:
        value = float(np.percentile(ratios, float(cfg.percentile), method="linear"))
    else:
        value = float(np.mean(ratios))
    return min(ONE, max(ZERO, fraction_from_float(value)))
