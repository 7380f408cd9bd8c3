"""Capital-at-risk and funding-gap analytics for stablecoin protocol balance sheets."""

__version__ = "0.1.0"

from .balance_sheet import (
    AssetClass,
    AssetPosition,
    BalanceSheetSnapshot,
    Bucket,
    BUCKET_ORDER,
    LiabilityKind,
    LiabilityPosition,
    Rating,
    ValidationResult,
    Violation,
    capital,
    validate_snapshot,
)
from .capital_risk import (
    CaRLine,
    CaRReport,
    Classification,
    PdLgd,
    RiskParameterSet,
    car_report,
    carr,
    credit_carr,
    credit_loss_pd_lgd,
    duration_carr,
    market_carr,
)
from .collateral_mc import (
    LossStatistic,
    MonteCarloConfig,
    Vault,
    VaultPortfolio,
    expected_loss_ratio,
    liquidation_loss,
    simulate_price_path,
)
from .errors import AlmError, ConfigurationError, DomainError, SchemaError, StructuralError
from .ingestion import (
    DOCUMENTED_DEFAULTS,
    Scenario,
    load_holders,
    load_scenario,
    load_snapshot,
    load_vault_portfolio,
)
from .liquidity import (
    BucketedLiabilityProfile,
    FundingGapReport,
    HolderKind,
    HolderRecord,
    HoldingClass,
    LiquiditySchedule,
    asset_liquidity_schedule,
    bucket_liabilities,
    classify_holder,
    funding_gap,
    max_drawdown,
)
from .reporting import Recommendation, RecommendationKind, recommend

__all__ = [
    "__version__",
    "AlmError",
    "AssetClass",
    "AssetPosition",
    "BalanceSheetSnapshot",
    "Bucket",
    "BUCKET_ORDER",
    "BucketedLiabilityProfile",
    "CaRLine",
    "CaRReport",
    "Classification",
    "ConfigurationError",
    "DomainError",
    "DOCUMENTED_DEFAULTS",
    "FundingGapReport",
    "HolderKind",
    "HolderRecord",
    "HoldingClass",
    "LiabilityKind",
    "LiabilityPosition",
    "LiquiditySchedule",
    "LossStatistic",
    "MonteCarloConfig",
    "PdLgd",
    "Rating",
    "Recommendation",
    "RecommendationKind",
    "RiskParameterSet",
    "Scenario",
    "SchemaError",
    "StructuralError",
    "ValidationResult",
    "Vault",
    "VaultPortfolio",
    "Violation",
    "asset_liquidity_schedule",
    "bucket_liabilities",
    "capital",
    "car_report",
    "carr",
    "classify_holder",
    "credit_carr",
    "credit_loss_pd_lgd",
    "duration_carr",
    "expected_loss_ratio",
    "funding_gap",
    "liquidation_loss",
    "load_holders",
    "load_scenario",
    "load_snapshot",
    "load_vault_portfolio",
    "market_carr",
    "max_drawdown",
    "recommend",
    "simulate_price_path",
    "validate_snapshot",
]
