"""Stage bodies for the CLI: each one reads upstream artifacts, writes its
own directory, and records a run manifest. Stages are independently
re-runnable; deleting a stage directory and re-running reproduces it
byte-identically from upstream artifacts."""

from __future__ import annotations

import csv
import datetime
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import cleaning
from ..allocation import (
    cumulative_return,
    run_backtest,
    top_k_portfolio,
    write_plot_series,
    write_strategy_report,
)
from ..dataset import (
    ScalerParams,
    build_labeled_rows,
    chronological_split,
    fit_scaler,
    read_dataset_csv,
    transform,
    write_dataset_csv,
    write_dataset_manifest,
)
from ..dates import add_months, format_date, from_ordinal, parse_date
from ..errors import (
    EmptyUniverse,
    MissingUpstreamArtifact,
    NoTradingDays,
    SeriesGapTooLarge,
)
from ..features.assemble import FeatureTable, StockTypeFeatures, Vocabulary, assemble_feature_vector, feature_columns
from ..features.macro import MacroFeatures, compute_macro_features
from ..features.ratios import FeatureConfig, StockSnapshot, compute_ratios
from ..features.trading import TradingFeatures, compute_trading_features
from ..marketdata import read_prices_csv, read_series_csv, read_single_series_csv, read_universe_csv
from ..model import baselines as bl
from ..model import mlp as mlp_mod
from ..model.evaluate import accuracy_at_threshold, write_accuracy_table, write_average_table
from ..outlook import MarketForecast, Prediction, market_probability, read_forecast_csv, write_forecast_csv
from ..store import ReportStore, StatementType
from ..synth import generate_market
from .config import PipelineConfig
from .manifest import StageRunner

STAGES = ("synth", "ingest", "clean", "features", "dataset", "train", "evaluate", "outlook", "backtest", "report")


@dataclass
class Workspace:
    root: Path
    cfg: PipelineConfig

    @property
    def fixtures(self) -> Path:
        p = Path(self.cfg.fixtures_dir)
        return p if p.is_absolute() else self.root / p

    def dir(self, name: str) -> Path:
        return self.root / name


def _derive_seed(root_seed: int, *parts) -> int:
    digest = hashlib.sha256(json.dumps([root_seed, *parts]).encode()).digest()
    return int.from_bytes(digest[:4], "big")


# --- synth ---------------------------------------------------------------------


def run_synth(ws: Workspace, force: bool = False) -> bool:
    out = ws.fixtures
    runner = StageRunner(
        stage="synth",
        stage_dir=out,
        config_subset={"synth": ws.cfg.synth.to_json()},
        inputs={},
        produced_by={},
        upstream_dirs=[],
        force=force,
    )
    out.mkdir(parents=True, exist_ok=True)
    if runner.up_to_date():
        return False
    bundle = generate_market(ws.cfg.synth)
    bundle.write(out)
    runner.finish(
        [
            out / "reports.jsonl",
            out / "prices.csv",
            out / "macro.csv",
            out / "fixed_income.csv",
            out / "inflation.csv",
            out / "universe.csv",
            out / "vocab.json",
        ]
    )
    return True


# --- ingest --------------------------------------------------------------------


def run_ingest(ws: Workspace, force: bool = False) -> bool:
    fixtures = ws.fixtures
    store_dir = ws.dir("store")
    runner = StageRunner(
        stage="ingest",
        stage_dir=store_dir,
        config_subset={},
        inputs={"reports.jsonl": fixtures / "reports.jsonl"},
        produced_by={"reports.jsonl": "synth"},
        upstream_dirs=[],
        force=force,
    )
    store_dir.mkdir(parents=True, exist_ok=True)
    if runner.up_to_date():
        return False
    docs = store_dir / "documents"
    if docs.exists():
        import shutil

        shutil.rmtree(docs)
    store = ReportStore(store_dir)
    store.ingest_fixture_file(fixtures / "reports.jsonl")
    runner.finish([docs])
    return True


# --- clean ---------------------------------------------------------------------


def _clean_report_record(r: cleaning.CleanReport) -> dict:
    return {
        "symbol": r.symbol,
        "statement_type": r.statement_type.value,
        "period_end": format_date(r.period_end),
        "publish_date": format_date(r.publish_date),
        "revision": r.revision,
        "items": r.items,
    }


def _clean_report_from_record(rec: dict) -> cleaning.CleanReport:
    return cleaning.CleanReport(
        symbol=rec["symbol"],
        statement_type=StatementType(rec["statement_type"]),
        period_end=parse_date(rec["period_end"]),
        publish_date=parse_date(rec["publish_date"]),
        revision=int(rec["revision"]),
        items={k: float(v) for k, v in rec["items"].items()},
    )


def run_clean(ws: Workspace, force: bool = False) -> bool:
    store_dir = ws.dir("store")
    out = ws.dir("clean")
    runner = StageRunner(
        stage="clean",
        stage_dir=out,
        config_subset={"extra_mapping_files": list(ws.cfg.extra_mapping_files)},
        inputs={"documents": store_dir / "documents"},
        produced_by={"documents": "ingest"},
        upstream_dirs=[store_dir],
        force=force,
    )
    out.mkdir(parents=True, exist_ok=True)
    if runner.up_to_date():
        return False
    mapping = cleaning.MappingTable.load(list(ws.cfg.extra_mapping_files))
    store = ReportStore(store_dir)
    quarantine: list[cleaning.QuarantineRow] = []
    clean_path = out / "clean_reports.jsonl"
    with open(clean_path, "w", encoding="utf-8") as fh:
        for symbol in store.symbols():
            for st in StatementType:
                for raw in store.fetch_reports(symbol, st):
                    try:
                        report, rows = cleaning.map_to_unified(raw, mapping)
                    except cleaning.UnknownFormatVersion as exc:
                        quarantine.append(
                            cleaning.QuarantineRow(
                                symbol, st.value, raw.announcement.period_end, "*", "*", "", f"unknown_format_version:{exc}"
                            )
                        )
                        continue
                    except (cleaning.MandatoryItemMissing, cleaning.IdentityViolation) as exc:
                        quarantine.append(
                            cleaning.QuarantineRow(
                                symbol, st.value, raw.announcement.period_end, "*", "*", "", type(exc).__name__
                            )
                        )
                        continue
                    quarantine.extend(rows)
                    fh.write(json.dumps(_clean_report_record(report), sort_keys=True))
                    fh.write("\n")
    cleaning.write_quarantine_csv(out / "quarantine.csv", quarantine)
    runner.finish([clean_path, out / "quarantine.csv"])
    return True


def load_clean_reports(path: Path) -> dict[str, list[cleaning.CleanReport]]:
    by_symbol: dict[str, list[cleaning.CleanReport]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                r = _clean_report_from_record(json.loads(line))
                by_symbol.setdefault(r.symbol, []).append(r)
    return by_symbol


# --- features ------------------------------------------------------------------


def run_features(ws: Workspace, force: bool = False) -> bool:
    fixtures = ws.fixtures
    out = ws.dir("features")
    inputs = {
        "clean_reports.jsonl": ws.dir("clean") / "clean_reports.jsonl",
        "prices.csv": fixtures / "prices.csv",
        "macro.csv": fixtures / "macro.csv",
        "universe.csv": fixtures / "universe.csv",
        "vocab.json": fixtures / "vocab.json",
    }
    runner = StageRunner(
        stage="features",
        stage_dir=out,
        config_subset={"lag_months": ws.cfg.lag_months, "beta_mode": ws.cfg.beta_mode},
        inputs=inputs,
        produced_by={
            "clean_reports.jsonl": "clean",
            "prices.csv": "synth",
            "macro.csv": "synth",
            "universe.csv": "synth",
            "vocab.json": "synth",
        },
        upstream_dirs=[ws.dir("clean")],
        force=force,
    )
    out.mkdir(parents=True, exist_ok=True)
    if runner.up_to_date():
        return False

    by_symbol = load_clean_reports(inputs["clean_reports.jsonl"])
    histories = read_prices_csv(inputs["prices.csv"])
    macro = read_series_csv(inputs["macro.csv"])
    universe = read_universe_csv(inputs["universe.csv"])
    vocab = Vocabulary.from_json(json.loads(inputs["vocab.json"].read_text()))
    fconf = FeatureConfig(lag_months=ws.cfg.lag_months, beta_mode=ws.cfg.beta_mode)
    market_index = macro["market_index"]
    columns = feature_columns(vocab)
    table = FeatureTable(columns=columns, rows=[])

    for symbol in sorted(by_symbol):
        if symbol not in universe or symbol not in histories:
            continue
        entry = universe[symbol]
        series = cleaning.merge_quarterlies(by_symbol[symbol])
        history = histories[symbol]
        stock_type = StockTypeFeatures(
            industry=entry.industry,
            market_exchange=entry.market_exchange,
            activity_type=entry.activity_type,
        )
        for inc in series.of_type(StatementType.INCOME_STATEMENT):
            as_of = add_months(inc.publish_date, ws.cfg.lag_months)
            snapshot = StockSnapshot.at(history, entry.shares_outstanding, as_of)
            if snapshot is None:
                continue
            ratios = compute_ratios(series, snapshot, as_of, market_index, fconf)
            try:
                trading = compute_trading_features(history, as_of)
            except NoTradingDays:
                trading = TradingFeatures()
            try:
                macro_feats = compute_macro_features(macro, as_of, fconf.macro_staleness_days)
            except SeriesGapTooLarge:
                macro_feats = MacroFeatures()
            table.rows.append(
                assemble_feature_vector(ratios, stock_type, trading, macro_feats, vocab, symbol, as_of)
            )

    table.rows.sort(key=lambda r: (r.symbol, r.as_of))
    table.write_csv(out / "features.csv")
    table.write_manifest(out / "columns.json", vocab)
    runner.finish([out / "features.csv", out / "columns.json"])
    return True


# --- dataset -------------------------------------------------------------------


def run_dataset(ws: Workspace, force: bool = False) -> bool:
    fixtures = ws.fixtures
    out = ws.dir("dataset")
    inputs = {
        "features.csv": ws.dir("features") / "features.csv",
        "columns.json": ws.dir("features") / "columns.json",
        "prices.csv": fixtures / "prices.csv",
        "fixed_income.csv": fixtures / "fixed_income.csv",
    }
    runner = StageRunner(
        stage="dataset",
        stage_dir=out,
        config_subset={
            "horizons": list(ws.cfg.horizons),
            "train_fraction": ws.cfg.train_fraction,
        },
        inputs=inputs,
        produced_by={
            "features.csv": "features",
            "columns.json": "features",
            "prices.csv": "synth",
            "fixed_income.csv": "synth",
        },
        upstream_dirs=[ws.dir("features")],
        force=force,
    )
    out.mkdir(parents=True, exist_ok=True)
    if runner.up_to_date():
        return False

    table = FeatureTable.read_csv(inputs["features.csv"])
    histories = read_prices_csv(inputs["prices.csv"])
    fi_curve = read_single_series_csv(inputs["fixed_income.csv"], "ytm")
    outputs: list[Path] = []
    for horizon in ws.cfg.horizons:
        hdir = out / f"h{horizon}"
        hdir.mkdir(parents=True, exist_ok=True)
        labeled, skip = build_labeled_rows(table.rows, histories, fi_curve, horizon)
        train, test, boundary, tie_warning = chronological_split(labeled, ws.cfg.train_fraction)
        X_train = np.vstack([ex.feature_row.values for ex in train])
        params = fit_scaler(X_train, table.columns)
        Z_train = transform(X_train, params)
        if test:
            X_test = np.vstack([ex.feature_row.values for ex in test])
            Z_test = transform(X_test, params)
        else:
            Z_test = np.empty((0, len(params.kept)))
        write_dataset_csv(hdir / "train.csv", train, Z_train, params.kept_columns())
        write_dataset_csv(hdir / "test.csv", test, Z_test, params.kept_columns())
        (hdir / "scaler.json").write_text(json.dumps(params.to_json(), indent=2, sort_keys=True) + "\n")
        write_dataset_manifest(
            hdir / "manifest.json", horizon, params, boundary, skip, len(train), len(test), tie_warning
        )
        outputs += [hdir / "train.csv", hdir / "test.csv", hdir / "scaler.json", hdir / "manifest.json"]
    runner.finish(outputs)
    return True


# --- train ---------------------------------------------------------------------


def run_train(ws: Workspace, force: bool = False) -> bool:
    out = ws.dir("models")
    inputs = {
        f"h{h}/train.csv": ws.dir("dataset") / f"h{h}" / "train.csv" for h in ws.cfg.horizons
    }
    runner = StageRunner(
        stage="train",
        stage_dir=out,
        config_subset={
            "model_kinds": list(ws.cfg.model_kinds),
            "mlp": ws.cfg.mlp.to_json(),
            "knn_neighbors": ws.cfg.knn_neighbors,
            "seed": ws.cfg.seed,
        },
        inputs=inputs,
        produced_by={k: "dataset" for k in inputs},
        upstream_dirs=[ws.dir("dataset")],
        force=force,
    )
    out.mkdir(parents=True, exist_ok=True)
    if runner.up_to_date():
        return False

    outputs: list[Path] = []
    for horizon in ws.cfg.horizons:
        hdir = out / f"h{horizon}"
        hdir.mkdir(parents=True, exist_ok=True)
        ds = read_dataset_csv(ws.dir("dataset") / f"h{horizon}" / "train.csv")
        scaler_ref = f"dataset/h{horizon}/scaler.json"
        for kind in ws.cfg.model_kinds:
            seed = _derive_seed(ws.cfg.seed, horizon, kind)
            if kind == "mlp":
                model = mlp_mod.train_mlp(
                    ds.X,
                    ds.y,
                    ws.cfg.mlp_for(horizon, seed),
                    columns=ds.columns,
                    horizon_months=horizon,
                    scaler_ref=scaler_ref,
                )
                path = hdir / "mlp.json"
                mlp_mod.save_mlp(model, path)
                log_path = hdir / "mlp_training_log.csv"
                with open(log_path, "w", newline="") as fh:
                    w = csv.writer(fh)
                    w.writerow(["epoch", "loss"])
                    for i, loss in enumerate(model.epoch_losses):
                        w.writerow([i + 1, repr(loss)])
                outputs += [path, log_path]
            else:
                hyper = {"n_neighbors": ws.cfg.knn_neighbors} if kind == "knn" else {}
                model = bl.train_baseline(
                    kind,
                    ds.X,
                    ds.y.astype(int),
                    hyperparams=hyper,
                    seed=seed,
                    columns=ds.columns,
                    horizon_months=horizon,
                    scaler_ref=scaler_ref,
                )
                path = hdir / f"{kind}.pkl"
                bl.save_baseline(model, path)
                outputs.append(path)
    runner.finish(outputs)
    return True


def _load_model(ws: Workspace, horizon: int, kind: str):
    hdir = ws.dir("models") / f"h{horizon}"
    if kind == "mlp":
        path = hdir / "mlp.json"
        if not path.exists():
            raise MissingUpstreamArtifact(f"missing model {path.name!r}: run the `train` step first")
        return mlp_mod.load_mlp(path)
    path = hdir / f"{kind}.pkl"
    if not path.exists():
        raise MissingUpstreamArtifact(f"missing model {path.name!r}: run the `train` step first")
    return bl.load_baseline(path)


def _model_proba(model, X: np.ndarray) -> np.ndarray:
    if isinstance(model, mlp_mod.MlpModel):
        return mlp_mod.predict_proba(model, X)
    return bl.predict_proba(model, X)


# --- evaluate --------------------------------------------------------------------


def run_evaluate(ws: Workspace, force: bool = False) -> bool:
    out = ws.dir("eval")
    inputs = {}
    for h in ws.cfg.horizons:
        inputs[f"h{h}/train.csv"] = ws.dir("dataset") / f"h{h}" / "train.csv"
        inputs[f"h{h}/test.csv"] = ws.dir("dataset") / f"h{h}" / "test.csv"
        for kind in ws.cfg.model_kinds:
            name = "mlp.json" if kind == "mlp" else f"{kind}.pkl"
            inputs[f"h{h}/{name}"] = ws.dir("models") / f"h{h}" / name
    produced = {
        k: ("dataset" if k.endswith(".csv") else "train") for k in inputs
    }
    runner = StageRunner(
        stage="evaluate",
        stage_dir=out,
        config_subset={"model_kinds": list(ws.cfg.model_kinds)},
        inputs=inputs,
        produced_by=produced,
        upstream_dirs=[ws.dir("models")],
        force=force,
    )
    out.mkdir(parents=True, exist_ok=True)
    if runner.up_to_date():
        return False

    train_acc: dict[str, dict[int, float]] = {}
    test_acc: dict[str, dict[int, float]] = {}
    for h in ws.cfg.horizons:
        ds_train = read_dataset_csv(ws.dir("dataset") / f"h{h}" / "train.csv")
        ds_test = read_dataset_csv(ws.dir("dataset") / f"h{h}" / "test.csv")
        for kind in ws.cfg.model_kinds:
            model = _load_model(ws, h, kind)
            train_acc.setdefault(kind, {})[h] = accuracy_at_threshold(_model_proba(model, ds_train.X), ds_train.y)
            if len(ds_test.y):
                test_acc.setdefault(kind, {})[h] = accuracy_at_threshold(_model_proba(model, ds_test.X), ds_test.y)
    order = list(ws.cfg.model_kinds)
    write_accuracy_table(out / "accuracy_table.csv", test_acc, list(ws.cfg.horizons), order)
    write_accuracy_table(out / "accuracy_table_train.csv", train_acc, list(ws.cfg.horizons), order)
    write_average_table(out / "accuracy_averages.csv", train_acc, test_acc, order)
    runner.finish(
        [out / "accuracy_table.csv", out / "accuracy_table_train.csv", out / "accuracy_averages.csv"]
    )
    return True


# --- outlook ----------------------------------------------------------------------


def _latest_rows_at(table: FeatureTable, at: datetime.date, staleness_days: int) -> dict[str, "np.ndarray"]:
    """Most recent feature row per symbol usable at `at`."""
    best: dict[str, tuple[datetime.date, np.ndarray]] = {}
    for row in table.rows:
        if row.as_of > at or (at - row.as_of).days > staleness_days:
            continue
        cur = best.get(row.symbol)
        if cur is None or row.as_of > cur[0]:
            best[row.symbol] = (row.as_of, row.values)
    return {s: v for s, (_d, v) in best.items()}


def _predict_universe(
    ws: Workspace,
    horizon: int,
    kind: str,
    at: datetime.date,
    table: FeatureTable,
    params,
    model,
    histories,
    universe,
) -> tuple[list[str], np.ndarray, dict[str, float]]:
    """Per-stock probabilities and market caps at one date."""
    rows = _latest_rows_at(table, at, ws.cfg.prediction_staleness_days)
    caps: dict[str, float] = {}
    for sym, entry in universe.items():
        h = histories.get(sym)
        if h is None:
            continue
        price = h.adj_close_at(at)
        if price is not None and price > 0:
            caps[sym] = price * entry.shares_outstanding
    symbols = sorted(set(rows) & set(caps))
    if not symbols:
        return [], np.empty(0), caps
    X = np.vstack([rows[s] for s in symbols])
    Z = transform(X, params)
    probs = _model_proba(model, Z)
    return symbols, probs, caps


def run_outlook(
    ws: Workspace,
    horizon: int,
    kind: str = "mlp",
    date_from: datetime.date | None = None,
    date_to: datetime.date | None = None,
    force: bool = False,
) -> bool:
    fixtures = ws.fixtures
    out = ws.dir("outlook")
    model_name = "mlp.json" if kind == "mlp" else f"{kind}.pkl"
    inputs = {
        "features.csv": ws.dir("features") / "features.csv",
        "scaler.json": ws.dir("dataset") / f"h{horizon}" / "scaler.json",
        "dataset_manifest.json": ws.dir("dataset") / f"h{horizon}" / "manifest.json",
        "model": ws.dir("models") / f"h{horizon}" / model_name,
        "prices.csv": fixtures / "prices.csv",
        "universe.csv": fixtures / "universe.csv",
        "macro.csv": fixtures / "macro.csv",
    }
    runner = StageRunner(
        stage="outlook",
        stage_dir=out,
        config_subset={
            "horizon": horizon,
            "kind": kind,
            "from": format_date(date_from) if date_from else None,
            "to": format_date(date_to) if date_to else None,
            "step_months": ws.cfg.strategy.rebalance_months,
            "staleness_days": ws.cfg.prediction_staleness_days,
        },
        inputs=inputs,
        produced_by={
            "features.csv": "features",
            "scaler.json": "dataset",
            "dataset_manifest.json": "dataset",
            "model": "train",
            "prices.csv": "synth",
            "universe.csv": "synth",
            "macro.csv": "synth",
        },
        upstream_dirs=[ws.dir("models")],
        force=force,
    )
    out.mkdir(parents=True, exist_ok=True)
    if runner.up_to_date():
        return False

    table = FeatureTable.read_csv(inputs["features.csv"])
    params = ScalerParams.from_json(json.loads(inputs["scaler.json"].read_text()))
    model = _load_model(ws, horizon, kind)
    histories = read_prices_csv(inputs["prices.csv"])
    universe = read_universe_csv(inputs["universe.csv"])
    macro = read_series_csv(inputs["macro.csv"])
    ds_manifest = json.loads(inputs["dataset_manifest.json"].read_text())

    start = date_from or parse_date(ds_manifest["split_boundary_date"])
    last_price = max(from_ordinal(h.dates[-1]) for h in histories.values())
    end = date_to or last_price
    grid: list[datetime.date] = []
    d = start
    while d <= end:
        grid.append(d)
        d = add_months(d, ws.cfg.strategy.rebalance_months)

    forecasts: list[MarketForecast] = []
    index_values: list[float | None] = []
    for at in grid:
        symbols, probs, caps = _predict_universe(
            ws, horizon, kind, at, table, params, model, histories, universe
        )
        if not caps:
            continue
        prob_by_symbol = dict(zip(symbols, probs))
        all_symbols = sorted(caps)
        aligned_probs = [prob_by_symbol.get(s) for s in all_symbols]
        aligned_caps = [caps[s] for s in all_symbols]
        try:
            fc = market_probability(aligned_probs, aligned_caps, at, horizon)
        except EmptyUniverse:
            continue
        forecasts.append(fc)
        try:
            index_values.append(macro["market_index"].value_at(at))
        except SeriesGapTooLarge:
            index_values.append(None)
    path = out / f"market_forecast_h{horizon}.csv"
    write_forecast_csv(path, forecasts, index_values)
    runner.finish([path])
    return True


# --- backtest ----------------------------------------------------------------------


def run_backtest_stage(
    ws: Workspace,
    horizon: int,
    date_from: datetime.date | None = None,
    date_to: datetime.date | None = None,
    force: bool = False,
) -> bool:
    fixtures = ws.fixtures
    out = ws.dir("backtest")
    inputs = {
        "forecast": ws.dir("outlook") / f"market_forecast_h{horizon}.csv",
        "macro.csv": fixtures / "macro.csv",
        "inflation.csv": fixtures / "inflation.csv",
        "prices.csv": fixtures / "prices.csv",
        "universe.csv": fixtures / "universe.csv",
        "features.csv": ws.dir("features") / "features.csv",
        "scaler.json": ws.dir("dataset") / f"h{horizon}" / "scaler.json",
    }
    runner = StageRunner(
        stage="backtest",
        stage_dir=out,
        config_subset={
            "horizon": horizon,
            "from": format_date(date_from) if date_from else None,
            "to": format_date(date_to) if date_to else None,
            "strategy": {
                "threshold": ws.cfg.strategy.threshold,
                "scenario1": ws.cfg.strategy.weights_scenario1,
                "scenario2": ws.cfg.strategy.weights_scenario2,
                "rebalance_months": ws.cfg.strategy.rebalance_months,
            },
            "topk": ws.cfg.topk,
            "model_kinds": list(ws.cfg.model_kinds),
        },
        inputs=inputs,
        produced_by={
            "forecast": "outlook",
            "macro.csv": "synth",
            "inflation.csv": "synth",
            "prices.csv": "synth",
            "universe.csv": "synth",
            "features.csv": "features",
            "scaler.json": "dataset",
        },
        upstream_dirs=[ws.dir("outlook")],
        force=force,
    )
    out.mkdir(parents=True, exist_ok=True)
    if runner.up_to_date():
        return False

    forecasts = read_forecast_csv(inputs["forecast"])
    if date_from:
        forecasts = [f for f in forecasts if f.as_of >= date_from]
    if date_to:
        forecasts = [f for f in forecasts if f.as_of <= date_to]
    if not forecasts:
        raise MissingUpstreamArtifact("no forecasts in range: run the `outlook` step first")
    macro = read_series_csv(inputs["macro.csv"])
    inflation = read_single_series_csv(inputs["inflation.csv"], "inflation")
    histories = read_prices_csv(inputs["prices.csv"])
    universe = read_universe_csv(inputs["universe.csv"])

    asset_prices = {
        "gold": macro["gold_irr"],
        "bond": macro["bond_index"],
        "stock": macro["market_index"],
    }
    boundaries = [f.as_of for f in forecasts]
    last_price = min(from_ordinal(s.dates[-1]) for s in asset_prices.values())
    end = min(add_months(boundaries[-1], ws.cfg.strategy.rebalance_months), last_price)
    report = run_backtest(
        forecasts,
        asset_prices,
        ws.cfg.strategy,
        inflation,
        start=boundaries[0],
        end=end,
        boundaries=boundaries,
    )
    strategy_path = out / f"strategy_report_h{horizon}.csv"
    write_strategy_report(strategy_path, report)
    events_path = out / f"events_h{horizon}.log"
    events_path.write_text("".join(f"{line}\n" for line in report.events))
    plot_paths = write_plot_series(out / "plot", report)

    # top-k equal-weight stock portfolios per model kind over the same periods
    table = FeatureTable.read_csv(inputs["features.csv"])
    params = ScalerParams.from_json(json.loads(inputs["scaler.json"].read_text()))
    models = {kind: _load_model(ws, horizon, kind) for kind in ws.cfg.model_kinds}
    period_edges = boundaries + [end]
    topk_rows = []
    for b_start, b_end in zip(period_edges, period_edges[1:]):
        rec: dict[str, float | None] = {}
        for kind, model in models.items():
            symbols, probs, _caps = _predict_universe(
                ws, horizon, kind, b_start, table, params, model, histories, universe
            )
            preds = [
                Prediction(symbol=s, as_of=b_start, horizon_months=horizon, probability=float(p))
                for s, p in zip(symbols, probs)
            ]
            portfolio, _degenerate = top_k_portfolio(preds, ws.cfg.topk)
            ret = 0.0
            got = False
            for sym, weight in portfolio:
                h = histories.get(sym)
                if h is None:
                    continue
                p0 = h.adj_close_at(b_start)
                p1 = h.adj_close_at(b_end)
                if p0 and p1 and p0 > 0:
                    ret += weight * (p1 / p0 - 1.0)
                    got = True
            rec[kind] = ret if got else None
        topk_rows.append((b_start, b_end, rec))

    kinds = list(ws.cfg.model_kinds)
    topk_path = out / f"topk_returns_h{horizon}.csv"
    with open(topk_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["period_start", "period_end"] + kinds)
        for b_start, b_end, rec in topk_rows:
            w.writerow(
                [format_date(b_start), format_date(b_end)]
                + ["" if rec[k] is None else repr(float(rec[k])) for k in kinds]
            )
    topk_cum_path = out / f"topk_cumulative_h{horizon}.csv"
    with open(topk_cum_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["period_end"] + kinds)
        running = {k: [] for k in kinds}
        for _b_start, b_end, rec in topk_rows:
            row = [format_date(b_end)]
            for k in kinds:
                if rec[k] is not None:
                    running[k].append(rec[k])
                row.append(repr(float(cumulative_return(running[k]))))
            w.writerow(row)
    runner.finish([strategy_path, events_path, topk_path, topk_cum_path] + plot_paths)
    return True


# --- report -----------------------------------------------------------------------


def run_report(ws: Workspace, horizon: int, force: bool = False) -> bool:
    out = ws.dir("report")
    inputs = {
        "accuracy_table.csv": ws.dir("eval") / "accuracy_table.csv",
        "accuracy_averages.csv": ws.dir("eval") / "accuracy_averages.csv",
        "strategy_report": ws.dir("backtest") / f"strategy_report_h{horizon}.csv",
        "topk_returns": ws.dir("backtest") / f"topk_returns_h{horizon}.csv",
        "topk_cumulative": ws.dir("backtest") / f"topk_cumulative_h{horizon}.csv",
    }
    runner = StageRunner(
        stage="report",
        stage_dir=out,
        config_subset={"horizon": horizon},
        inputs=inputs,
        produced_by={
            "accuracy_table.csv": "evaluate",
            "accuracy_averages.csv": "evaluate",
            "strategy_report": "backtest",
            "topk_returns": "backtest",
            "topk_cumulative": "backtest",
        },
        upstream_dirs=[ws.dir("backtest")],
        force=force,
    )
    out.mkdir(parents=True, exist_ok=True)
    if runner.up_to_date():
        return False

    # accuracy tables pass through unchanged
    (out / "accuracy_table.csv").write_bytes(inputs["accuracy_table.csv"].read_bytes())
    (out / "accuracy_averages.csv").write_bytes(inputs["accuracy_averages.csv"].read_bytes())
    (out / "methods_periodic_return.csv").write_bytes(inputs["topk_returns"].read_bytes())
    (out / "methods_cumulative_return.csv").write_bytes(inputs["topk_cumulative"].read_bytes())

    # strategy + per-asset return series, periodic and cumulative, nominal and real
    with open(inputs["strategy_report"], newline="") as fh:
        rows = list(csv.DictReader(fh))
    assets = ("gold", "bond", "stock")

    def asset_real(row: dict, asset: str) -> float:
        nominal = float(row["nominal_return"])
        real = float(row["real_return"])
        infl = (1.0 + nominal) / (1.0 + real) - 1.0
        return (1.0 + float(row[f"{asset}_return"])) / (1.0 + infl) - 1.0

    def write_fig(name: str, header: list[str], records: list[list]) -> Path:
        path = out / name
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(records)
        return path

    per_nom, per_real, cum_nom, cum_real = [], [], [], []
    nom_hist: dict[str, list[float]] = {a: [] for a in assets}
    real_hist: dict[str, list[float]] = {a: [] for a in assets}
    for row in rows:
        date = row["period_end"]
        per_nom.append(
            [date, row["nominal_return"]] + [row[f"{a}_return"] for a in assets]
        )
        reals = [asset_real(row, a) for a in assets]
        per_real.append([date, row["real_return"]] + [repr(v) for v in reals])
        for a in assets:
            nom_hist[a].append(float(row[f"{a}_return"]))
        for a, v in zip(assets, reals):
            real_hist[a].append(v)
        cum_nom.append(
            [date, row["cumulative_nominal"]]
            + [repr(cumulative_return(nom_hist[a])) for a in assets]
        )
        cum_real.append(
            [date, row["cumulative_real"]]
            + [repr(cumulative_return(real_hist[a])) for a in assets]
        )

    header = ["period_end", "strategy"] + list(assets)
    outputs = [
        out / "accuracy_table.csv",
        out / "accuracy_averages.csv",
        out / "methods_periodic_return.csv",
        out / "methods_cumulative_return.csv",
        write_fig("strategy_nominal_periodic.csv", header, per_nom),
        write_fig("strategy_real_periodic.csv", header, per_real),
        write_fig("strategy_nominal_cumulative.csv", header, cum_nom),
        write_fig("strategy_real_cumulative.csv", header, cum_real),
    ]
    runner.finish(outputs)
    return True
