"""Monte Carlo engine: path generation, liquidation rule, reduction, properties."""

import math
from decimal import Decimal

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stablecoin_alm import (
    DomainError,
    LossStatistic,
    MonteCarloConfig,
    Vault,
    VaultPortfolio,
    expected_loss_ratio,
    liquidation_loss,
    simulate_price_path,
)
from stablecoin_alm.collateral_mc import _chunk_losses, _multipliers, path_loss_ratios

D = Decimal


def vault(units="1", price="200", debt="100", ratio="1.7", penalty="0") -> Vault:
    return Vault(
        collateral_units=D(units),
        collateral_price=D(price),
        debt=D(debt),
        liquidation_ratio=D(ratio),
        liquidation_penalty=D(penalty),
    )


def portfolio(*vaults, depth="1000000000", slippage="0") -> VaultPortfolio:
    return VaultPortfolio(
        vaults=list(vaults), market_depth=D(depth), slippage_coefficient=D(slippage)
    )


ADVERSE = MonteCarloConfig(
    n_paths=2000,
    horizon_days=20,
    daily_volatility=D("0.05"),
    jump_probability=D("0.03"),
    jump_size=D("0.35"),
    seed=777,
)


# -- price paths -------------------------------------------------------------


def test_degenerate_config_gives_unit_multipliers():
    cfg = MonteCarloConfig(n_paths=3, horizon_days=5, seed=1)
    assert np.array_equal(simulate_price_path(cfg, 0), np.ones(5))


def test_forced_jump_halves_price():
    cfg = MonteCarloConfig(
        n_paths=1, horizon_days=1, jump_probability=D("1"), jump_size=D("0.5"), seed=3
    )
    assert np.array_equal(simulate_price_path(cfg, 0), np.array([0.5]))


def test_path_is_a_pure_function_of_seed_and_index():
    first = simulate_price_path(ADVERSE, 123)
    second = simulate_price_path(ADVERSE, 123)
    assert np.array_equal(first, second)
    batch = _multipliers(ADVERSE, 0, 200)
    assert np.array_equal(batch[123], first)
    # chunked generation reproduces the same row
    offset = _multipliers(ADVERSE, 100, 200)
    assert np.array_equal(offset[23], first)


def test_different_seeds_differ():
    other = MonteCarloConfig(
        n_paths=ADVERSE.n_paths,
        horizon_days=ADVERSE.horizon_days,
        daily_volatility=ADVERSE.daily_volatility,
        jump_probability=ADVERSE.jump_probability,
        jump_size=ADVERSE.jump_size,
        seed=778,
    )
    assert not np.array_equal(simulate_price_path(ADVERSE, 0), simulate_price_path(other, 0))


def test_path_index_bounds_checked():
    cfg = MonteCarloConfig(n_paths=10, horizon_days=2, seed=1)
    with pytest.raises(DomainError):
        simulate_price_path(cfg, 10)


# -- liquidation rule --------------------------------------------------------


def test_no_breach_no_loss():
    v = vault()
    assert liquidation_loss(v, [0.95, 0.92, 1.0], portfolio(v)) == 0


def test_zero_debt_no_loss():
    v = vault(debt="0", units="0", price="200")
    assert liquidation_loss(v, [0.1], portfolio(v)) == 0


def test_single_step_liquidation_hand_walked():
    # price 200 -> 90 in one day, threshold 170: sell at 90, loss 100 - 90 = 10
    v = vault()
    assert liquidation_loss(v, [0.45], portfolio(v)) == D("10.00")


def test_empty_path_rejected():
    v = vault()
    with pytest.raises(DomainError):
        liquidation_loss(v, [], portfolio(v))


def test_liquidation_penalty_raises_the_shortfall():
    v = vault(penalty="0.13")
    assert liquidation_loss(v, [0.45], portfolio(v)) == D("23.00")


def test_slippage_discounts_the_sale():
    # sale value 90, slippage 0.5 * 90/100 = 0.45 -> recover 49.5, loss 50.5
    v = vault()
    p = portfolio(v, depth="100", slippage="0.5")
    assert liquidation_loss(v, [0.45], p) == D("50.50")


def test_slippage_caps_at_total_wipeout():
    v = vault()
    p = portfolio(v, depth="10", slippage="1")
    assert liquidation_loss(v, [0.45], p) == D("100.00")


# -- expected loss ratio -----------------------------------------------------


def test_zero_volatility_zero_loss():
    cfg = MonteCarloConfig(n_paths=500, horizon_days=10, seed=11)
    assert expected_loss_ratio(portfolio(vault()), cfg) == 0


def test_single_jump_closed_form():
    cfg = MonteCarloConfig(
        n_paths=64, horizon_days=1, jump_probability=D("1"), jump_size=D("0.99"), seed=5
    )
    assert expected_loss_ratio(portfolio(vault()), cfg) == D("0.98")


def test_zero_total_debt_returns_zero():
    empty = portfolio(vault(debt="0", units="0"))
    assert expected_loss_ratio(empty, ADVERSE) == 0


def test_calibrated_config_on_the_maker_loan_book(maker_portfolios, maker_scenario):
    ratio = expected_loss_ratio(
        maker_portfolios["maker_vaults"], maker_scenario.risk_params.market_model
    )
    assert abs(ratio - D("0.029")) <= D("0.005")


def test_percentile_statistic():
    cfg = MonteCarloConfig(
        n_paths=2000,
        horizon_days=20,
        daily_volatility=D("0.05"),
        jump_probability=D("0.03"),
        jump_size=D("0.35"),
        seed=777,
        loss_statistic=LossStatistic.PERCENTILE,
        percentile=D("95"),
    )
    p95 = expected_loss_ratio(portfolio(vault()), cfg)
    mean = expected_loss_ratio(portfolio(vault()), ADVERSE)
    ratios = path_loss_ratios(portfolio(vault()), ADVERSE)
    expected = Decimal(repr(float(np.percentile(ratios, 95.0, method="linear"))))
    assert abs(p95 - expected) <= D("1e-12")
    assert p95 >= 0 and mean >= 0


# -- properties --------------------------------------------------------------


def test_determinism_across_worker_counts():
    book = portfolio(vault(), vault(units="2", price="150", debt="120", ratio="1.5"))
    one = expected_loss_ratio(book, ADVERSE, workers=1)
    eight = expected_loss_ratio(book, ADVERSE, workers=8)
    assert one == eight


def test_mean_loss_is_monotone_in_jump_size():
    v = vault()
    means = []
    for size in ("0.15", "0.25", "0.35", "0.45"):
        cfg = MonteCarloConfig(
            n_paths=4000,
            horizon_days=20,
            daily_volatility=D("0.05"),
            jump_probability=D("0.03"),
            jump_size=D(size),
            seed=777,
        )
        means.append(expected_loss_ratio(portfolio(v), cfg))
    assert all(a <= b for a, b in zip(means, means[1:]))


def test_mean_loss_is_monotone_in_volatility():
    v = vault()
    means = []
    for vol in ("0.03", "0.05", "0.07"):
        cfg = MonteCarloConfig(
            n_paths=4000,
            horizon_days=20,
            daily_volatility=D(vol),
            jump_probability=D("0.03"),
            jump_size=D("0.35"),
            seed=777,
        )
        means.append(expected_loss_ratio(portfolio(v), cfg))
    assert all(a <= b for a, b in zip(means, means[1:]))


def test_losses_bounded_by_penalty_adjusted_debt():
    book = portfolio(
        vault(penalty="0.13"),
        vault(units="2", price="150", debt="120", ratio="1.5", penalty="0.13"),
        depth="100",
        slippage="1",
    )
    losses = _chunk_losses(book, ADVERSE, 0, ADVERSE.n_paths)
    cap = (100 + 120) * 1.13
    assert losses.max() <= cap + 1e-9
    ratio = expected_loss_ratio(book, ADVERSE)
    assert 0 <= ratio <= 1


@settings(max_examples=60, deadline=None)
@given(
    cushion=st.floats(min_value=1.01, max_value=3.0),
    ratio=st.floats(min_value=1.05, max_value=2.5),
    penalty=st.floats(min_value=0.0, max_value=0.3),
    jump=st.floats(min_value=0.05, max_value=0.95),
    debt=st.floats(min_value=1.0, max_value=1e9),
)
def test_zero_slippage_single_jump_matches_closed_form(cushion, ratio, penalty, jump, debt):
    """With zero slippage and one forced jump, loss is exactly
    max(0, debt*(1+penalty) - units*breach_price) when the jump breaches."""
    price = 1000.0
    units = debt * ratio * cushion / price
    v = Vault(
        collateral_units=D(repr(units)),
        collateral_price=D(repr(price)),
        debt=D(repr(debt)),
        liquidation_ratio=D(repr(ratio)),
        liquidation_penalty=D(repr(penalty)),
    )
    book = portfolio(v)
    cfg = MonteCarloConfig(
        n_paths=8, horizon_days=1, jump_probability=D("1"), jump_size=D(repr(jump)), seed=99
    )
    observed = float(expected_loss_ratio(book, cfg))
    base_value = units * price
    threshold = debt * ratio
    value_after = base_value * (1.0 - jump)
    if value_after < threshold:
        # the reported statistic is clamped to [0, 1]
        expected = min(1.0, max(0.0, debt * (1.0 + penalty) - value_after) / debt)
    else:
        expected = 0.0
    assert math.isclose(observed, expected, rel_tol=1e-9, abs_tol=1e-12)


def test_vault_invariants():
    with pytest.raises(DomainError):
        vault(ratio="1")  # liquidation ratio must exceed 1
    with pytest.raises(DomainError):
        vault(units="0.5")  # under-collateralized at inception
    with pytest.raises(DomainError):
        portfolio(vault(), depth="0")
    with pytest.raises(DomainError):
        MonteCarloConfig(n_paths=0)
    with pytest.raises(DomainError):
        MonteCarloConfig(jump_size=D("1"))
    with pytest.raises(DomainError):
        MonteCarloConfig(loss_statistic=LossStatistic.PERCENTILE)
