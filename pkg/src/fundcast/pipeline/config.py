"""Pipeline configuration: one YAML file drives every stage."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..allocation import StrategyConfig
from ..dataset import HORIZONS
from ..errors import InvalidConfig
from ..model.mlp import TrainConfig
from ..synth import SynthConfig

DEFAULT_MODEL_KINDS = ("mlp", "logistic_regression", "knn", "decision_tree")
OPTIONAL_KINDS = ("random_forest", "linear_svm")


@dataclass
class PipelineConfig:
    seed: int = 0
    horizons: tuple[int, ...] = (3,)
    train_fraction: float = 0.75
    lag_months: int = 1
    beta_mode: str = "printed"
    model_kinds: tuple[str, ...] = DEFAULT_MODEL_KINDS
    knn_neighbors: int = 5
    topk: int = 20
    prediction_staleness_days: int = 124
    mlp: TrainConfig = field(default_factory=TrainConfig)
    strategy: StrategyConfig = field(default_factory=StrategyConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)
    extra_mapping_files: tuple[str, ...] = ()
    fixtures_dir: str = "fixtures"  # relative to the output root unless absolute

    def validate(self) -> None:
        if not self.horizons or any(h not in HORIZONS for h in self.horizons):
            raise InvalidConfig(f"horizons must be a non-empty subset of {HORIZONS}")
        if not 0.0 < self.train_fraction < 1.0:
            raise InvalidConfig("train_fraction must lie in (0, 1)")
        if self.lag_months < 0:
            raise InvalidConfig("lag_months must be >= 0")
        if self.beta_mode not in ("printed", "conventional"):
            raise InvalidConfig("beta_mode must be 'printed' or 'conventional'")
        unknown = set(self.model_kinds) - {"mlp"} - set(DEFAULT_MODEL_KINDS) - set(OPTIONAL_KINDS)
        if unknown:
            raise InvalidConfig(f"unknown model kinds: {sorted(unknown)}")
        if "mlp" not in self.model_kinds:
            raise InvalidConfig("model_kinds must include 'mlp'")
        self.strategy.validate()
        self.synth.validate()
        self.mlp.validate()

    @classmethod
    def from_yaml(cls, path: Path | str | None, seed: int | None = None) -> "PipelineConfig":
        raw: dict = {}
        if path is not None:
            loaded = yaml.safe_load(Path(path).read_text())
            if loaded is not None:
                if not isinstance(loaded, dict):
                    raise InvalidConfig(f"config root must be a mapping, got {type(loaded).__name__}")
                raw = loaded
        cfg = cls()
        if "seed" in raw:
            cfg.seed = int(raw["seed"])
        if seed is not None:
            cfg.seed = seed
        for key in ("train_fraction", "lag_months", "beta_mode", "knn_neighbors", "topk",
                    "prediction_staleness_days", "fixtures_dir"):
            if key in raw:
                setattr(cfg, key, raw[key])
        if "horizons" in raw:
            cfg.horizons = tuple(int(h) for h in raw["horizons"])
        if "model_kinds" in raw:
            cfg.model_kinds = tuple(raw["model_kinds"])
        if "extra_mapping_files" in raw:
            cfg.extra_mapping_files = tuple(raw["extra_mapping_files"])
        if "mlp" in raw:
            m = raw["mlp"]
            cfg.mlp = TrainConfig(
                hidden_layers=tuple(m.get("hidden_layers", (100,))),
                activation=m.get("activation", "relu"),
                learning_rate=float(m.get("learning_rate", 1e-3)),
                beta1=float(m.get("beta1", 0.9)),
                beta2=float(m.get("beta2", 0.999)),
                epsilon=float(m.get("epsilon", 1e-8)),
                batch_size=int(m.get("batch_size", 32)),
                epochs=int(m.get("epochs", 50)),
                rng_seed=int(m.get("rng_seed", 0)),
            )
        if "strategy" in raw:
            st = raw["strategy"]
            cfg.strategy = StrategyConfig(
                threshold=float(st.get("threshold", 0.5)),
                weights_scenario1=dict(st.get("scenario1", {"gold": 0.20, "bond": 0.10, "stock": 0.70})),
                weights_scenario2=dict(st.get("scenario2", {"gold": 0.20, "bond": 0.70, "stock": 0.10})),
                rebalance_months=int(st.get("rebalance_months", 3)),
                forecast_staleness_days=int(st.get("forecast_staleness_days", 31)),
            )
        if "synth" in raw:
            sy = dict(raw["synth"])
            base = SynthConfig()
            cfg.synth = SynthConfig(
                n_stocks=int(sy.get("n_stocks", base.n_stocks)),
                n_quarters=int(sy.get("n_quarters", base.n_quarters)),
                rng_seed=int(sy.get("rng_seed", cfg.seed)),
                signal_strength=float(sy.get("signal_strength", base.signal_strength)),
                start_year=int(sy.get("start_year", base.start_year)),
                price_tail_months=int(sy.get("price_tail_months", base.price_tail_months)),
                lag_months=int(sy.get("lag_months", cfg.lag_months)),
                signal_horizon_months=int(sy.get("signal_horizon_months", base.signal_horizon_months)),
                inflation_annual=float(sy.get("inflation_annual", base.inflation_annual)),
                bond_ytm=float(sy.get("bond_ytm", base.bond_ytm)),
                gold_drift_annual=float(sy.get("gold_drift_annual", base.gold_drift_annual)),
                usd_drift_annual=float(sy.get("usd_drift_annual", base.usd_drift_annual)),
                industries=tuple(sy.get("industries", base.industries)),
                exchanges=tuple(sy.get("exchanges", base.exchanges)),
                format_versions=tuple(int(v) for v in sy.get("format_versions", base.format_versions)),
                revision_rate=float(sy.get("revision_rate", base.revision_rate)),
                missing_rate=float(sy.get("missing_rate", base.missing_rate)),
            )
        else:
            cfg.synth = SynthConfig(rng_seed=cfg.seed, lag_months=cfg.lag_months)
        cfg.validate()
        return cfg

    def mlp_for(self, horizon: int, seed: int) -> TrainConfig:
        c = self.mlp
        return TrainConfig(
            hidden_layers=c.hidden_layers,
            activation=c.activation,
            learning_rate=c.learning_rate,
            beta1=c.beta1,
            beta2=c.beta2,
            epsilon=c.epsilon,
            batch_size=c.batch_size,
            epochs=c.epochs,
            rng_seed=seed,
        )
