"""Fundamentals decision-support pipeline.

Parses quarterly financial statements, computes point-in-time ratio,
trading, and macro features, trains a stock-vs-fixed-income classifier,
aggregates per-stock probabilities into a market outlook, and backtests
rule-based gold/bond/stock allocation strategies.
"""

__version__ = "0.1.0"
