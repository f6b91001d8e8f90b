"""Seed-deterministic synthetic market with a planted learnable signal.

Everything downstream needs ground truth, so the generator builds a full
market from one seed: quarterly statements that satisfy the accounting
identities exactly (values are integers, totals derived from rounded
components), weekday price/trade bars, macro series, and a fixed-income
yield path.

Signal mechanism. For each stock-quarter a score is a fixed linear
combination of a known subset of the financial ratios (computed from the
generated statements, so the parser and feature factory sit on the
verification path). The stock's log-price drift between consecutive report
usable-dates is the fixed-income drift plus a term proportional to
eta = k * score + logistic noise, so the probability that the stock beats
the bond benchmark over the signal horizon is approximately
sigmoid(k * score): returns are a logistic function of ratios plus noise.
signal_strength 0 makes eta pure noise; signal_strength 1 drops the noise
and forces a margin, making the planted rule deterministic.

The ground-truth record stores the rule, per-sample scores and realized
labels, and the realized accuracy of the Bayes rule; the pipeline under
test never reads it.

Point-in-time hygiene: a day's price move is assigned to the segment
(u_q, u_{q+1}] that STARTS at the report usable-date, so features computed
from data at or before u_q contain nothing of the drift that decides the
label at u_q.
"""

from __future__ import annotations

import datetime
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cleaning import MappingTable
from .dataset import HorizonBeyondData, label_example
from .dates import add_months, format_date, quarter_end, to_ordinal
from .errors import InvalidConfig
from .marketdata import (
    DatedSeries,
    PriceHistory,
    UniverseEntry,
    write_prices_csv,
    write_series_csv,
    write_single_series_csv,
    write_universe_csv,
)
from .store import Announcement, RawReport, StatementType
from .features.assemble import Vocabulary

SIGNAL_RATIOS = ("revenue_growth", "gross_profit_growth", "net_income_margin", "roe", "debt_ratio")
SIGNAL_WEIGHTS = (1.2, 1.0, 0.8, 0.6, -0.8)
K_PER_ODDS = 1.7  # slope = K_PER_ODDS * s / (1 - s)
NOISELESS_MARGIN = 5.0
DRIFT_PER_ETA = 0.12  # quarterly log-drift per unit eta
DAILY_NOISE = 0.002
QUARTER_DAYS = 365.25 / 4.0


@dataclass
class SynthConfig:
    n_stocks: int = 200
    n_quarters: int = 16
    rng_seed: int = 0
    signal_strength: float = 0.75
    start_year: int = 2018
    price_tail_months: int = 13
    lag_months: int = 1
    signal_horizon_months: int = 3
    inflation_annual: float = 0.30
    bond_ytm: float = 0.22
    gold_drift_annual: float = 0.15
    usd_drift_annual: float = 0.25
    industries: tuple[str, ...] = ("metals", "chemicals", "autos", "food", "pharma", "cement")
    exchanges: tuple[str, ...] = ("primary", "secondary")
    format_versions: tuple[int, ...] = (1, 2, 3)
    revision_rate: float = 0.02
    missing_rate: float = 0.03

    def validate(self) -> None:
        if self.n_stocks < 1:
            raise InvalidConfig("n_stocks must be >= 1")
        if self.n_quarters < 8:
            raise InvalidConfig("n_quarters must be >= 8 (TTM plus year-ago history)")
        if not 0.0 <= self.signal_strength <= 1.0:
            raise InvalidConfig("signal_strength must lie in [0, 1]")
        if self.bond_ytm <= -1.0 or self.inflation_annual <= -1.0:
            raise InvalidConfig("rates must exceed -1")
        if not self.format_versions:
            raise InvalidConfig("at least one format version required")

    def to_json(self) -> dict:
        return {
            "n_stocks": self.n_stocks,
            "n_quarters": self.n_quarters,
            "rng_seed": self.rng_seed,
            "signal_strength": self.signal_strength,
            "start_year": self.start_year,
            "price_tail_months": self.price_tail_months,
            "lag_months": self.lag_months,
            "signal_horizon_months": self.signal_horizon_months,
            "inflation_annual": self.inflation_annual,
            "bond_ytm": self.bond_ytm,
            "gold_drift_annual": self.gold_drift_annual,
            "usd_drift_annual": self.usd_drift_annual,
            "industries": list(self.industries),
            "exchanges": list(self.exchanges),
            "format_versions": list(self.format_versions),
            "revision_rate": self.revision_rate,
            "missing_rate": self.missing_rate,
        }


# --- statement rendering ------------------------------------------------------

_TABLE_NAMES = {
    1: {
        StatementType.INCOME_STATEMENT: "Income Statement",
        StatementType.BALANCE_SHEET: "Balance Sheet",
        StatementType.CASH_FLOW: "Cash Flow Statement",
    },
    2: {
        StatementType.INCOME_STATEMENT: "Statement of Income",
        StatementType.BALANCE_SHEET: "Statement of Financial Position",
        StatementType.CASH_FLOW: "Statement of Cash Flows",
    },
    3: {
        StatementType.INCOME_STATEMENT: "صورت سود و زیان",
        StatementType.BALANCE_SHEET: "ترازنامه",
        StatementType.CASH_FLOW: "صورت جریان وجوه نقد",
    },
}

_MISSING_GLYPH = {1: "-", 2: "—", 3: "ـ"}

_FA_DIGITS = str.maketrans("0123456789", "۰۱۲۳۴۵۶۷۸۹")

_STATEMENT_ORDER = {
    StatementType.INCOME_STATEMENT: (
        "revenue",
        "cogs",
        "gross_profit",
        "operating_profit",
        "ebit",
        "interest_expense",
        "net_income",
    ),
    StatementType.BALANCE_SHEET: (
        "cash",
        "cash_equivalents",
        "inventory",
        "current_assets",
        "fixed_assets",
        "total_assets",
        "current_liabilities",
        "long_term_debt",
        "total_debt",
        "total_equity",
        "retained_earnings",
        "shares_outstanding",
    ),
    StatementType.CASH_FLOW: ("operating_cash_flow",),
}


def render_value(value: float, format_version: int) -> str:
    """Render one integer-valued figure in the version's numeric style."""
    magnitude = int(round(abs(value)))
    if format_version == 1:
        text = f"{magnitude:,}"
        return f"({text})" if value < 0 else text
    if format_version == 2:
        return f"-{magnitude}" if value < 0 else str(magnitude)
    text = f"{magnitude:,}".replace(",", "٬").translate(_FA_DIGITS)
    return f"−{text}" if value < 0 else text


def render_statement(
    statement_type: StatementType,
    items: dict[str, float],
    format_version: int,
    mapping: MappingTable,
) -> dict[str, list[tuple[str, str]]]:
    """Rows in canonical order; absent items render as the missing glyph."""
    labels = mapping.labels_for(format_version)
    rows: list[tuple[str, str]] = []
    for code in _STATEMENT_ORDER[statement_type]:
        label = labels[code]
        if code in items:
            rows.append((label, render_value(items[code], format_version)))
        else:
            rows.append((label, _MISSING_GLYPH[format_version]))
    return {_TABLE_NAMES[format_version][statement_type]: rows}


# --- per-stock fundamentals -----------------------------------------------------


def _ar1(rng: np.random.Generator, n: int, rho: float, sigma: float) -> np.ndarray:
    x = np.empty(n)
    x[0] = rng.normal(0.0, sigma / math.sqrt(max(1e-9, 1.0 - rho * rho)))
    eps = rng.normal(0.0, sigma, size=n)
    for i in range(1, n):
        x[i] = rho * x[i - 1] + eps[i]
    return x


@dataclass
class _StockFundamentals:
    symbol: str
    shares: int
    statements: list[dict[StatementType, dict[str, float]]]  # per quarter
    ratios: list[dict[str, float | None]]  # signal subset per quarter (None until q>=4)


def _generate_fundamentals(symbol: str, rng: np.random.Generator, n_quarters: int, ytm: float) -> _StockFundamentals:
    q = n_quarters
    base_rev = math.exp(rng.uniform(math.log(1e9), math.log(5e11)))
    trend = rng.uniform(-0.01, 0.04)
    season = rng.uniform(-0.05, 0.05, size=4)
    x_rev = _ar1(rng, q, rho=0.7, sigma=0.06)
    cogs_share = np.clip(rng.uniform(0.5, 0.8) + _ar1(rng, q, 0.8, 0.02), 0.30, 0.95)
    opex_share = np.clip(rng.uniform(0.05, 0.15) + _ar1(rng, q, 0.8, 0.01), 0.02, 0.30)
    asset_turn = rng.uniform(0.5, 1.5)
    debt_ratio = np.clip(rng.uniform(0.25, 0.65) + _ar1(rng, q, 0.85, 0.03), 0.05, 0.90)
    fixed_share = np.clip(rng.uniform(0.35, 0.70) + _ar1(rng, q, 0.9, 0.02), 0.10, 0.90)
    cl_share = np.clip(rng.uniform(0.4, 0.8) + _ar1(rng, q, 0.9, 0.02), 0.10, 0.99)
    inv_share = np.clip(rng.uniform(0.15, 0.45) + _ar1(rng, q, 0.9, 0.02), 0.02, 0.60)
    cash_share = np.clip(rng.uniform(0.10, 0.30) + _ar1(rng, q, 0.9, 0.02), 0.02, 0.35)
    ceq_share = np.clip(rng.uniform(0.03, 0.12) + _ar1(rng, q, 0.9, 0.01), 0.01, 0.20)
    re_share = np.clip(rng.uniform(0.10, 0.60) + _ar1(rng, q, 0.9, 0.03), 0.0, 0.90)
    ocf_mult = 1.0 + rng.uniform(-0.3, 0.4, size=q)
    spread = rng.uniform(0.01, 0.05)
    shares = int(round(math.exp(rng.uniform(math.log(1e7), math.log(1e9)))))

    statements: list[dict[StatementType, dict[str, float]]] = []
    for i in range(q):
        revenue = int(round(base_rev * math.exp(trend * i + x_rev[i] + season[i % 4])))
        revenue = max(revenue, 1000)
        cogs = int(round(cogs_share[i] * revenue))
        gross = revenue - cogs
        opex = int(round(opex_share[i] * revenue))
        operating = gross - opex
        ebit = operating
        total_assets = int(round(4.0 * revenue / asset_turn))
        fixed_assets = int(round(fixed_share[i] * total_assets))
        current_assets = total_assets - fixed_assets
        inventory = int(round(inv_share[i] * current_assets))
        cash = int(round(cash_share[i] * current_assets))
        ceq = int(round(ceq_share[i] * current_assets))
        total_debt = int(round(debt_ratio[i] * total_assets))
        current_liabilities = max(1, int(round(cl_share[i] * total_debt)))
        long_term_debt = total_debt - current_liabilities
        total_equity = total_assets - total_debt
        retained = int(round(re_share[i] * total_equity))
        interest = int(round(long_term_debt * (ytm + spread) / 4.0))
        pretax = ebit - interest
        tax = int(round(0.25 * pretax)) if pretax > 0 else 0
        net_income = pretax - tax
        ocf = int(round(ocf_mult[i] * net_income))
        statements.append(
            {
                StatementType.INCOME_STATEMENT: {
                    "revenue": float(revenue),
                    "cogs": float(cogs),
                    "gross_profit": float(gross),
                    "operating_profit": float(operating),
                    "ebit": float(ebit),
                    "interest_expense": float(interest),
                    "net_income": float(net_income),
                },
                StatementType.BALANCE_SHEET: {
                    "cash": float(cash),
                    "cash_equivalents": float(ceq),
                    "inventory": float(inventory),
                    "current_assets": float(current_assets),
                    "fixed_assets": float(fixed_assets),
                    "total_assets": float(total_assets),
                    "current_liabilities": float(current_liabilities),
                    "long_term_debt": float(long_term_debt),
                    "total_debt": float(total_debt),
                    "total_equity": float(total_equity),
                    "retained_earnings": float(retained),
                    "shares_outstanding": float(shares),
                },
                StatementType.CASH_FLOW: {"operating_cash_flow": float(ocf)},
            }
        )

    ratios: list[dict[str, float | None]] = []
    for i in range(q):
        if i < 4:
            ratios.append({name: None for name in SIGNAL_RATIOS})
            continue
        inc = statements[i][StatementType.INCOME_STATEMENT]
        inc_prev = statements[i - 4][StatementType.INCOME_STATEMENT]
        bs = statements[i][StatementType.BALANCE_SHEET]
        bs_prev = statements[i - 4][StatementType.BALANCE_SHEET]
        avg_eq = (bs["total_equity"] + bs_prev["total_equity"]) / 2.0
        ratios.append(
            {
                "revenue_growth": inc["revenue"] / inc_prev["revenue"] - 1.0,
                "gross_profit_growth": (
                    inc["gross_profit"] / inc_prev["gross_profit"] - 1.0
                    if inc_prev["gross_profit"] != 0
                    else None
                ),
                "net_income_margin": inc["net_income"] / inc["revenue"],
                "roe": inc["net_income"] / avg_eq if avg_eq != 0 else None,
                "debt_ratio": bs["total_debt"] / bs["total_assets"],
            }
        )
    return _StockFundamentals(symbol=symbol, shares=shares, statements=statements, ratios=ratios)


# --- bundle ----------------------------------------------------------------------


@dataclass
class SynthBundle:
    config: SynthConfig
    reports: list[RawReport]
    universe: list[UniverseEntry]
    vocabulary: Vocabulary
    histories: dict[str, PriceHistory]
    macro: dict[str, DatedSeries]
    fi_quotes: DatedSeries
    inflation: DatedSeries
    ground_truth: dict

    def write(self, out_dir: Path | str) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        from .store import write_fixture_file

        write_fixture_file(out / "reports.jsonl", self.reports)
        write_prices_csv(out / "prices.csv", self.histories)
        write_series_csv(out / "macro.csv", self.macro)
        write_single_series_csv(out / "fixed_income.csv", self.fi_quotes, "ytm")
        write_single_series_csv(out / "inflation.csv", self.inflation, "rate")
        write_universe_csv(out / "universe.csv", self.universe)
        (out / "vocab.json").write_text(json.dumps(self.vocabulary.to_json(), indent=2, sort_keys=True) + "\n")
        # ground truth is reviewer metadata; pipeline stages never read it
        (out / "ground_truth.json").write_text(json.dumps(self.ground_truth, sort_keys=True))


def _weekday_ordinals(start: datetime.date, end: datetime.date) -> np.ndarray:
    o = np.arange(to_ordinal(start), to_ordinal(end) + 1, dtype=np.int64)
    dow = (o - 1) % 7  # ordinal 1 was a Monday
    return o[dow < 5]


def generate_market(config: SynthConfig) -> SynthBundle:
    """Build the full fixture bundle. Deterministic given config.rng_seed."""
    config.validate()
    root = np.random.SeedSequence(config.rng_seed)
    macro_ss, universe_ss, *stock_ss = root.spawn(config.n_stocks + 2)
    macro_rng = np.random.default_rng(macro_ss)
    universe_rng = np.random.default_rng(universe_ss)

    n_q = config.n_quarters
    period_ends = [
        quarter_end(config.start_year + i // 4, i % 4 + 1) for i in range(n_q)
    ]
    sim_start = datetime.date(config.start_year, 1, 1)
    sim_end = add_months(period_ends[-1], config.price_tail_months)
    days = _weekday_ordinals(sim_start, sim_end)
    n_days = len(days)
    deltas = np.diff(days).astype(np.float64)  # calendar days between bars

    # yield path: slow bounded walk around the configured level
    ytm_path = np.clip(
        config.bond_ytm + np.cumsum(macro_rng.normal(0.0, 0.0008, size=n_days) * np.sqrt(np.r_[1.0, deltas])),
        0.5 * config.bond_ytm,
        1.5 * config.bond_ytm,
    )
    fi_quotes = DatedSeries("ytm", days.copy(), ytm_path)
    bond_daily = np.empty(n_days)
    bond_daily[0] = 0.0
    bond_daily[1:] = (1.0 + ytm_path[:-1]) ** (deltas / 365.0) - 1.0
    bond_index = 1e6 * np.cumprod(1.0 + bond_daily)

    def _walk(level0: float, annual_drift: float, vol: float) -> np.ndarray:
        inc = np.empty(n_days)
        inc[0] = 0.0
        inc[1:] = math.log(1.0 + annual_drift) * deltas / 365.0 + macro_rng.normal(
            0.0, vol, size=n_days - 1
        ) * np.sqrt(deltas)
        return level0 * np.exp(np.cumsum(inc))

    usd_irr = _walk(400_000.0, config.usd_drift_annual, 0.006)
    gold_usd = _walk(1800.0, config.gold_drift_annual, 0.009)

    # monthly inflation prints dated at month ends
    infl_dates, infl_rates = [], []
    m = datetime.date(config.start_year, 1, 31)
    monthly = (1.0 + config.inflation_annual) ** (1.0 / 12.0) - 1.0
    while m <= sim_end:
        infl_dates.append(to_ordinal(m))
        infl_rates.append(monthly + macro_rng.normal(0.0, 0.002))
        nxt = add_months(m.replace(day=1), 1)
        m = add_months(nxt, 1) - datetime.timedelta(days=nxt.day)
    inflation = DatedSeries("inflation", np.asarray(infl_dates, dtype=np.int64), np.asarray(infl_rates))

    # signal slope
    s = config.signal_strength
    if s >= 1.0:
        mode = "noiseless"
        k = float("inf")
    elif s <= 0.0:
        mode = "null"
        k = 0.0
    else:
        mode = "logistic"
        k = K_PER_ODDS * s / (1.0 - s)

    symbols = [f"S{i:04d}" for i in range(config.n_stocks)]
    universe: list[UniverseEntry] = []
    fundamentals: list[_StockFundamentals] = []
    stock_rngs = [np.random.default_rng(ss) for ss in stock_ss]
    for sym, rng in zip(symbols, stock_rngs):
        fund = _generate_fundamentals(sym, rng, n_q, config.bond_ytm)
        fundamentals.append(fund)
        universe.append(
            UniverseEntry(
                symbol=sym,
                industry=config.industries[int(rng.integers(len(config.industries)))],
                market_exchange=config.exchanges[0] if rng.random() < 0.8 else config.exchanges[-1],
                activity_type="production" if rng.random() < 0.7 else "other",
                shares_outstanding=float(fund.shares),
            )
        )

    # publication calendar per stock
    publish_dates: list[list[datetime.date]] = []
    usable_dates: list[list[datetime.date]] = []
    for fund, rng in zip(fundamentals, stock_rngs):
        pubs, usables = [], []
        for pe in period_ends:
            pub = pe + datetime.timedelta(days=25 + int(rng.integers(0, 16)))
            pubs.append(pub)
            usables.append(add_months(pub, config.lag_months))
        publish_dates.append(pubs)
        usable_dates.append(usables)

    # raw scores for q >= 4, standardized across the whole panel
    raw_scores = np.full((config.n_stocks, n_q), np.nan)
    for i, fund in enumerate(fundamentals):
        for qi in range(4, n_q):
            r = fund.ratios[qi]
            if any(r[name] is None for name in SIGNAL_RATIOS):
                continue
            raw_scores[i, qi] = math.fsum(
                w * r[name] for w, name in zip(SIGNAL_WEIGHTS, SIGNAL_RATIOS)
            )
    valid = ~np.isnan(raw_scores)
    score_mean = float(np.mean(raw_scores[valid]))
    score_std = float(np.std(raw_scores[valid]))
    if score_std == 0.0:
        score_std = 1.0
    z_scores = (raw_scores - score_mean) / score_std

    # eta per stock-quarter drives the price drift
    etas = np.empty((config.n_stocks, n_q))
    p_true = np.full((config.n_stocks, n_q), 0.5)
    for i in range(config.n_stocks):
        rng = stock_rngs[i]
        noise = rng.logistic(0.0, 1.0, size=n_q)
        for qi in range(n_q):
            z = z_scores[i, qi]
            if math.isnan(z):
                etas[i, qi] = noise[qi]
                p_true[i, qi] = 0.5
            elif mode == "noiseless":
                etas[i, qi] = NOISELESS_MARGIN * (1.0 if z > 0 else -1.0) * (1.0 + abs(z))
                p_true[i, qi] = 1.0 if z > 0 else 0.0
            elif mode == "null":
                etas[i, qi] = noise[qi]
                p_true[i, qi] = 0.5
            else:
                etas[i, qi] = k * z + noise[qi]
                p_true[i, qi] = 1.0 / (1.0 + math.exp(-k * z))

    # price paths
    histories: dict[str, PriceHistory] = {}
    ln_fi_daily = np.zeros(n_days)
    ln_fi_daily[1:] = np.log(1.0 + ytm_path[:-1]) * deltas / 365.0
    closes_matrix = np.empty((config.n_stocks, n_days))
    for i, (sym, fund) in enumerate(zip(symbols, fundamentals)):
        rng = stock_rngs[i]
        u_ords = np.asarray([to_ordinal(u) for u in usable_dates[i]], dtype=np.int64)
        seg = np.searchsorted(u_ords, days, side="left") - 1  # day d in (u_q, u_{q+1}]
        eta_day = np.where(seg >= 0, etas[i, np.clip(seg, 0, n_q - 1)], rng.normal(0.0, 0.5))
        dln = np.zeros(n_days)
        dln[1:] = (
            ln_fi_daily[1:]
            + DRIFT_PER_ETA * eta_day[1:] * deltas / QUARTER_DAYS
            + rng.normal(0.0, DAILY_NOISE, size=n_days - 1) * np.sqrt(deltas)
        )
        p0 = math.exp(rng.uniform(math.log(1000.0), math.log(20000.0)))
        close = p0 * np.exp(np.cumsum(dln))
        closes_matrix[i] = close
        spread_hi = np.abs(rng.normal(0.0, 0.012, size=n_days))
        spread_lo = np.abs(rng.normal(0.0, 0.012, size=n_days))
        high = close * np.exp(spread_hi)
        low = close * np.exp(-spread_lo)
        cap = close * fund.shares
        turnover = np.exp(rng.normal(math.log(2e-3), 0.8, size=n_days))
        value = cap * turnover
        ind_share = np.clip(rng.normal(0.6, 0.15, size=n_days), 0.05, 0.95)
        ind_value = value * ind_share
        buy_frac = 1.0 / (1.0 + np.exp(-0.5 * eta_day + rng.normal(0.0, 0.4, size=n_days)))
        ind_buy = ind_value * buy_frac
        ind_sell = ind_value - ind_buy
        size_mu = math.log(max(1e3, float(np.mean(ind_value)) / 500.0))
        buy_size = np.exp(rng.normal(size_mu, 0.4, size=n_days))
        sell_size = np.exp(rng.normal(size_mu, 0.4, size=n_days))
        buy_count = np.maximum(1.0, np.round(ind_buy / buy_size))
        sell_count = np.maximum(1.0, np.round(ind_sell / sell_size))
        histories[sym] = PriceHistory(
            symbol=sym,
            dates=days.copy(),
            close=close,
            adj_close=close.copy(),  # no corporate actions in the synthetic market
            high=high,
            low=low,
            value_traded=value,
            ind_buy_value=ind_buy,
            ind_sell_value=ind_sell,
            ind_buy_count=buy_count,
            ind_sell_count=sell_count,
        )

    # indexes over the common day grid
    shares_vec = np.asarray([f.shares for f in fundamentals], dtype=np.float64)
    total_cap = shares_vec @ closes_matrix
    market_index = 1e6 * total_cap / total_cap[0]
    equal_weight = 1e6 * np.mean(closes_matrix / closes_matrix[:, :1], axis=0)

    macro = {
        "usd_irr": DatedSeries("usd_irr", days.copy(), usd_irr),
        "gold_usd": DatedSeries("gold_usd", days.copy(), gold_usd),
        "gold_irr": DatedSeries("gold_irr", days.copy(), gold_usd * usd_irr),
        "bond_daily_return": DatedSeries("bond_daily_return", days.copy(), bond_daily),
        "bond_index": DatedSeries("bond_index", days.copy(), bond_index),
        "market_index": DatedSeries("market_index", days.copy(), market_index),
        "equal_weight_index": DatedSeries("equal_weight_index", days.copy(), equal_weight),
    }

    # raw report documents
    mapping = MappingTable.load()
    reports: list[RawReport] = []
    for i, (sym, fund) in enumerate(zip(symbols, fundamentals)):
        rng = stock_rngs[i]
        for qi, pe in enumerate(period_ends):
            version = config.format_versions[(i + qi // 4) % len(config.format_versions)]
            items_by_type = {st: dict(vals) for st, vals in fund.statements[qi].items()}
            if rng.random() < config.missing_rate:
                items_by_type[StatementType.BALANCE_SHEET].pop("cash_equivalents", None)
            revise = rng.random() < config.revision_rate
            for st, items in items_by_type.items():
                tables = render_statement(st, items, version, mapping)
                for rev in (0, 1) if revise else (0,):
                    ann = Announcement(
                        announcement_id=f"A-{sym}-{st.value}-{format_date(pe)}-r{rev}",
                        symbol=sym,
                        statement_type=st,
                        period_end=pe,
                        publish_date=publish_dates[i][qi],
                        format_version=version,
                        revision=rev,
                    )
                    reports.append(RawReport(announcement=ann, tables=dict(tables)))

    # ground truth: the planted rule applied at every sample (q >= 4)
    samples = []
    n_correct = 0
    n_labeled = 0
    exp_sum = 0.0
    for i, (sym, fund) in enumerate(zip(symbols, fundamentals)):
        for qi in range(4, n_q):
            as_of = usable_dates[i][qi]
            try:
                realized, benchmark, label = label_example(
                    histories[sym], as_of, config.signal_horizon_months, fi_quotes
                )
            except HorizonBeyondData:
                continue
            z = z_scores[i, qi]
            p = p_true[i, qi]
            bayes_pred = 1 if p > 0.5 else 0
            n_labeled += 1
            n_correct += int(bayes_pred == label)
            exp_sum += max(p, 1.0 - p)
            samples.append(
                {
                    "symbol": sym,
                    "period_end": format_date(period_ends[qi]),
                    "as_of": format_date(as_of),
                    "ratios": {name: fund.ratios[qi][name] for name in SIGNAL_RATIOS},
                    "score_z": None if math.isnan(z) else z,
                    "p_true": p,
                    "eta": etas[i, qi],
                    "label": label,
                    "realized_return": realized,
                    "fi_return": benchmark,
                }
            )
    realized_bayes = n_correct / n_labeled if n_labeled else float("nan")
    expected_bayes = exp_sum / n_labeled if n_labeled else float("nan")

    ground_truth = {
        "config": config.to_json(),
        "rule": {
            "ratios": list(SIGNAL_RATIOS),
            "weights": list(SIGNAL_WEIGHTS),
            "score_mean": score_mean,
            "score_std": score_std,
            "k": None if math.isinf(k) else k,
            "mode": mode,
            "noiseless_margin": NOISELESS_MARGIN,
            "drift_per_eta": DRIFT_PER_ETA,
            "signal_horizon_months": config.signal_horizon_months,
        },
        "bayes_accuracy": realized_bayes,
        "expected_bayes_accuracy": expected_bayes,
        "label_share_positive": (
            sum(s["label"] for s in samples) / len(samples) if samples else float("nan")
        ),
        "n_samples": len(samples),
        "samples": samples,
    }

    vocabulary = Vocabulary(industries=config.industries, exchanges=config.exchanges)
    return SynthBundle(
        config=config,
        reports=reports,
        universe=universe,
        vocabulary=vocabulary,
        histories=histories,
        macro=macro,
        fi_quotes=fi_quotes,
        inflation=inflation,
        ground_truth=ground_truth,
    )


def recompute_bayes_accuracy(ground_truth: dict) -> float:
    """Apply the recorded rule to the recorded features; must reproduce the
    recorded Bayes accuracy exactly (self-consistency check)."""
    rule = ground_truth["rule"]
    correct = 0
    total = 0
    for s in ground_truth["samples"]:
        vals = [s["ratios"][name] for name in rule["ratios"]]
        if any(v is None for v in vals):
            p = 0.5
        else:
            raw = math.fsum(w * v for w, v in zip(rule["weights"], vals))
            z = (raw - rule["score_mean"]) / rule["score_std"]
            if rule["mode"] == "noiseless":
                p = 1.0 if z > 0 else 0.0
            elif rule["mode"] == "null":
                p = 0.5
            else:
                p = 1.0 / (1.0 + math.exp(-rule["k"] * z))
        pred = 1 if p > 0.5 else 0
        total += 1
        correct += int(pred == s["label"])
    return correct / total if total else float("nan")
