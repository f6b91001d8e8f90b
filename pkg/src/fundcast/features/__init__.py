"""Feature computation: financial ratios, stock type, trading, and macro."""

from .assemble import FeatureRow, FeatureTable, StockTypeFeatures, Vocabulary, assemble_feature_vector, feature_columns
from .macro import MacroFeatures, compute_macro_features
from .ratios import (
    RATIO_NAMES,
    FeatureConfig,
    RatioSet,
    StockSnapshot,
    TtmAggregate,
    compute_beta,
    compute_ratios,
    ttm_aggregate,
)
from .trading import TradingFeatures, compute_trading_features

__all__ = [
    "RATIO_NAMES",
    "FeatureConfig",
    "FeatureRow",
    "FeatureTable",
    "MacroFeatures",
    "RatioSet",
    "StockSnapshot",
    "StockTypeFeatures",
    "TradingFeatures",
    "TtmAggregate",
    "Vocabulary",
    "assemble_feature_vector",
    "compute_beta",
    "compute_macro_features",
    "compute_ratios",
    "compute_trading_features",
    "feature_columns",
    "ttm_aggregate",
]
