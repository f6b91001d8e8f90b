"""Two-scenario gold/bond/stock allocation and its quarterly backtest.

Scenario 1 (market growth probability above the threshold) weights the
stock leg; scenario 2 weights the bond leg; gold holds a fifth of the
portfolio in both. Equality at the threshold routes to the defensive
scenario. Rebalancing is exact with zero transaction costs and perfect
divisibility; between boundaries holdings drift with prices.
"""

from __future__ import annotations

import csv
import datetime
import math
from dataclasses import dataclass, field
from pathlib import Path

from .dates import add_months, format_date
from .errors import DomainError, MissingForecast, NonPositivePrice
from .marketdata import DatedSeries
from .outlook import MarketForecast

ASSETS = ("gold", "bond", "stock")


@dataclass
class StrategyConfig:
    threshold: float = 0.5
    weights_scenario1: dict[str, float] = field(
        default_factory=lambda: {"gold": 0.20, "bond": 0.10, "stock": 0.70}
    )
    weights_scenario2: dict[str, float] = field(
        default_factory=lambda: {"gold": 0.20, "bond": 0.70, "stock": 0.10}
    )
    rebalance_months: int = 3
    # a forecast older than this at a boundary counts as missing
    forecast_staleness_days: int = 31

    def validate(self) -> None:
        for name, weights in (("scenario1", self.weights_scenario1), ("scenario2", self.weights_scenario2)):
            if set(weights) != set(ASSETS):
                raise DomainError(f"{name}: weights must cover exactly {ASSETS}")
            if any(w < 0 for w in weights.values()):
                raise DomainError(f"{name}: negative weight")
            if math.fsum(weights.values()) != 1.0:
                raise DomainError(f"{name}: weights must sum to exactly 1")
        if self.rebalance_months < 1:
            raise DomainError("rebalance_months must be >= 1")


def choose_scenario(p_market: float, config: StrategyConfig) -> tuple[int, dict[str, float]]:
    """Scenario 1 iff p_market strictly exceeds the threshold."""
    if p_market > config.threshold:
        return 1, dict(config.weights_scenario1)
    return 2, dict(config.weights_scenario2)


@dataclass
class PortfolioState:
    """Holdings in units per asset; value = units x price."""

    date: datetime.date
    units: dict[str, float]

    def value(self, prices: dict[str, float]) -> float:
        return math.fsum(self.units[a] * prices[a] for a in ASSETS)


def rebalance(state: PortfolioState, weights: dict[str, float], prices: dict[str, float]) -> PortfolioState:
    """Reset asset values to weight x total exactly; total value conserved."""
    for a in ASSETS:
        if prices[a] <= 0:
            raise NonPositivePrice(f"{a} price {prices[a]} at {state.date}")
    total = state.value(prices)
    units = {a: weights[a] * total / prices[a] for a in ASSETS}
    return PortfolioState(date=state.date, units=units)


def real_return(nominal: float, inflation: float) -> float:
    """Invert nominal = (1 + real) * (1 + inflation) - 1."""
    if inflation <= -1.0:
        raise DomainError(f"inflation must exceed -1, got {inflation}")
    return (1.0 + nominal) / (1.0 + inflation) - 1.0


def nominal_return(real: float, inflation: float) -> float:
    if inflation <= -1.0:
        raise DomainError(f"inflation must exceed -1, got {inflation}")
    return (1.0 + real) * (1.0 + inflation) - 1.0


def cumulative_return(period_returns: list[float]) -> float:
    """Compounded total: prod(1 + r) - 1; empty input compounds to 0."""
    total = 1.0
    for r in period_returns:
        if r <= -1.0:
            raise DomainError(f"period return {r} <= -1")
        total *= 1.0 + r
    return total - 1.0


@dataclass
class PeriodRecord:
    start: datetime.date
    end: datetime.date
    p_market: float | None
    scenario: int | None
    asset_returns: dict[str, float]
    nominal: float
    real: float
    cum_nominal: float
    cum_real: float


@dataclass
class StrategyReport:
    periods: list[PeriodRecord] = field(default_factory=list)
    events: list[str] = field(default_factory=list)

    def cumulative_nominal(self) -> float:
        return cumulative_return([p.nominal for p in self.periods])

    def cumulative_real(self) -> float:
        return cumulative_return([p.real for p in self.periods])


def period_inflation(inflation: DatedSeries, start: datetime.date, end: datetime.date) -> float:
    """Compound the period-aligned inflation prints dated in (start, end]."""
    rates = inflation.window_values(start, end)
    total = 1.0
    for r in rates:
        total *= 1.0 + float(r)
    return total - 1.0


def run_backtest(
    forecasts: list[MarketForecast],
    asset_prices: dict[str, DatedSeries],
    config: StrategyConfig,
    inflation: DatedSeries,
    start: datetime.date,
    end: datetime.date,
    boundaries: list[datetime.date] | None = None,
) -> StrategyReport:
    """Quarterly scenario-switching backtest over [start, end].

    At each boundary the nearest prior forecast within the staleness bound
    picks the scenario and the portfolio rebalances; a missing forecast
    skips the rebalance and holds prior weights, logged as an event. The
    first boundary must have a forecast.
    """
    config.validate()
    if boundaries is None:
        boundaries = []
        b = start
        while b <= end:
            boundaries.append(b)
            b = add_months(b, config.rebalance_months)
    if boundaries[-1] < end:
        boundaries = boundaries + [end]
    staleness = config.forecast_staleness_days

    by_date = sorted(forecasts, key=lambda f: f.as_of)

    def forecast_at(d: datetime.date) -> MarketForecast | None:
        best = None
        for f in by_date:
            if f.as_of <= d:
                best = f
            else:
                break
        if best is None or (d - best.as_of).days > staleness:
            return None
        return best

    def prices_at(d: datetime.date) -> dict[str, float]:
        return {a: asset_prices[a].value_at(d) for a in ASSETS}

    report = StrategyReport()
    first = forecast_at(boundaries[0])
    if first is None:
        raise MissingForecast(f"no forecast at or before the first boundary {boundaries[0]}")

    # seed with unit capital allocated per the first scenario
    p0 = prices_at(boundaries[0])
    scenario, weights = choose_scenario(first.p_market, config)
    state = PortfolioState(
        date=boundaries[0], units={a: weights[a] * 1.0 / p0[a] for a in ASSETS}
    )
    current_forecast: MarketForecast | None = first

    cum_nom = 1.0
    cum_real = 1.0
    for b_start, b_end in zip(boundaries, boundaries[1:]):
        start_prices = prices_at(b_start)
        end_prices = prices_at(b_end)
        v0 = state.value(start_prices)
        v1 = state.value(end_prices)
        nominal = v1 / v0 - 1.0
        infl = period_inflation(inflation, b_start, b_end)
        real = real_return(nominal, infl)
        cum_nom *= 1.0 + nominal
        cum_real *= 1.0 + real
        report.periods.append(
            PeriodRecord(
                start=b_start,
                end=b_end,
                p_market=current_forecast.p_market if current_forecast else None,
                scenario=scenario,
                asset_returns={
                    a: end_prices[a] / start_prices[a] - 1.0 for a in ASSETS
                },
                nominal=nominal,
                real=real,
                cum_nominal=cum_nom - 1.0,
                cum_real=cum_real - 1.0,
            )
        )
        # rebalance decision for the next period
        state = PortfolioState(date=b_end, units=dict(state.units))
        nxt = forecast_at(b_end)
        if nxt is None:
            report.events.append(f"{b_end}: no usable forecast, holding prior weights")
            current_forecast = None
        else:
            scenario, weights = choose_scenario(nxt.p_market, config)
            state = rebalance(state, weights, end_prices)
            current_forecast = nxt
    return report


STRATEGY_HEADER = (
    "period_start",
    "period_end",
    "p_market",
    "scenario",
    "gold_return",
    "bond_return",
    "stock_return",
    "nominal_return",
    "real_return",
    "cumulative_nominal",
    "cumulative_real",
)


def write_strategy_report(path: Path | str, report: StrategyReport) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(STRATEGY_HEADER)
        for p in report.periods:
            w.writerow(
                [
                    format_date(p.start),
                    format_date(p.end),
                    "" if p.p_market is None else repr(float(p.p_market)),
                    "" if p.scenario is None else p.scenario,
                    repr(float(p.asset_returns["gold"])),
                    repr(float(p.asset_returns["bond"])),
                    repr(float(p.asset_returns["stock"])),
                    repr(float(p.nominal)),
                    repr(float(p.real)),
                    repr(float(p.cum_nominal)),
                    repr(float(p.cum_real)),
                ]
            )


def write_plot_series(out_dir: Path | str, report: StrategyReport) -> list[Path]:
    """x/y series files behind the periodic and cumulative return charts."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    series = {
        "strategy_nominal_periodic": [(p.end, p.nominal) for p in report.periods],
        "strategy_real_periodic": [(p.end, p.real) for p in report.periods],
        "strategy_nominal_cumulative": [(p.end, p.cum_nominal) for p in report.periods],
        "strategy_real_cumulative": [(p.end, p.cum_real) for p in report.periods],
    }
    for asset in ASSETS:
        series[f"{asset}_nominal_periodic"] = [
            (p.end, p.asset_returns[asset]) for p in report.periods
        ]
    paths = []
    for name, points in series.items():
        path = out / f"{name}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y"])
            for d, v in points:
                w.writerow([format_date(d), repr(float(v))])
        paths.append(path)
    return paths


# --- top-k stock strategy -------------------------------------------------------


def top_k_portfolio(
    predictions: list, k: int = 20
) -> tuple[list[tuple[str, float]], bool]:
    """Equal-weight portfolio of the k highest-probability stocks.

    Ties break toward the lexicographically smaller symbol. With fewer than
    k predictions the whole set is used at weight 1/n and the portfolio is
    flagged degenerate.
    """
    if not predictions:
        return [], True
    ranked = sorted(predictions, key=lambda p: (-p.probability, p.symbol))
    chosen = ranked[:k]
    weight = 1.0 / len(chosen)
    return [(p.symbol, weight) for p in chosen], len(chosen) < k
