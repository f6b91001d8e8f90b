"""One-hidden-layer sigmoid classifier trained with Adam on binary cross
entropy.

Determinism contract: given the same seed, data, and backend, two training
runs produce bitwise-identical parameters. Initialization is symmetric
uniform scaled by fan-in with zero biases, and the per-epoch shuffle
sequence comes from the same seeded generator.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import NonFiniteLoss, SchemaMismatch
from . import kernels

ACTIVATIONS = {"relu": 0, "tanh": 1}


@dataclass
class TrainConfig:
    hidden_layers: tuple[int, ...] = (100,)
    activation: str = "relu"
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 32
    epochs: int = 50
    rng_seed: int = 0

    def validate(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if len(self.hidden_layers) != 1 or self.hidden_layers[0] < 1:
            raise ValueError("exactly one hidden layer with >= 1 units is supported")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {sorted(ACTIVATIONS)}")

    def to_json(self) -> dict:
        return {
            "hidden_layers": list(self.hidden_layers),
            "activation": self.activation,
            "learning_rate": self.learning_rate,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "epsilon": self.epsilon,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TrainConfig":
        return cls(
            hidden_layers=tuple(obj["hidden_layers"]),
            activation=obj["activation"],
            learning_rate=obj["learning_rate"],
            beta1=obj["beta1"],
            beta2=obj["beta2"],
            epsilon=obj["epsilon"],
            batch_size=obj["batch_size"],
            epochs=obj["epochs"],
            rng_seed=obj["rng_seed"],
        )


@dataclass
class MlpModel:
    kind: str
    config: TrainConfig
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    columns: tuple[str, ...] | None = None
    column_hash: str | None = None
    horizon_months: int | None = None
    scaler_ref: str | None = None
    epoch_losses: list[float] = field(default_factory=list)

    @property
    def n_features(self) -> int:
        return self.W1.shape[0]


def columns_hash(columns: tuple[str, ...] | None) -> str | None:
    if columns is None:
        return None
    return hashlib.sha256(json.dumps(list(columns)).encode()).hexdigest()


def _init_params(n_features: int, hidden: int, seed: int):
    rng = np.random.default_rng(seed)
    s1 = 1.0 / np.sqrt(n_features)
    s2 = 1.0 / np.sqrt(hidden)
    W1 = rng.uniform(-s1, s1, size=(n_features, hidden))
    W2 = rng.uniform(-s2, s2, size=hidden)
    b1 = np.zeros(hidden)
    b2 = np.zeros(1)
    return W1, b1, W2, b2, rng


def train_mlp(
    X: np.ndarray,
    y: np.ndarray,
    config: TrainConfig = TrainConfig(),
    columns: tuple[str, ...] | None = None,
    horizon_months: int | None = None,
    scaler_ref: str | None = None,
    backend: str | None = None,
) -> MlpModel:
    """Train on scaled features with labels in {0, 1}.

    Logs the full-training-set loss at the end of every epoch; raises
    NonFiniteLoss with diagnostics if training diverges.
    """
    config.validate()
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("X must be a non-empty 2-D array")
    if set(np.unique(y)) - {0.0, 1.0}:
        raise ValueError("labels must be in {0, 1}")
    if columns is not None and len(columns) != X.shape[1]:
        raise SchemaMismatch(f"{len(columns)} columns for {X.shape[1]} features")

    impl = kernels.get_backend(backend) if backend else kernels.impl()
    act = ACTIVATIONS[config.activation]
    n, d = X.shape
    hidden = config.hidden_layers[0]
    W1, b1, W2, b2, rng = _init_params(d, hidden, config.rng_seed)
    mW1, vW1 = np.zeros_like(W1), np.zeros_like(W1)
    mb1, vb1 = np.zeros_like(b1), np.zeros_like(b1)
    mW2, vW2 = np.zeros_like(W2), np.zeros_like(W2)
    mb2, vb2 = np.zeros_like(b2), np.zeros_like(b2)

    losses: list[float] = []
    t = 0
    for epoch in range(config.epochs):
        perm = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = perm[start:start + config.batch_size]
            Xb = np.ascontiguousarray(X[idx])
            yb = np.ascontiguousarray(y[idx])
            t += 1
            impl.step_batch(
                W1, b1, W2, b2,
                mW1, vW1, mb1, vb1, mW2, vW2, mb2, vb2,
                Xb, yb,
                t, config.learning_rate, config.beta1, config.beta2, config.epsilon, act,
            )
        epoch_loss = float(impl.bce_loss(np.ascontiguousarray(impl.forward_proba(W1, b1, W2, b2, X, act)), y))
        if not np.isfinite(epoch_loss):
            raise NonFiniteLoss(
                f"epoch {epoch}: loss={epoch_loss}, max|W1|={np.max(np.abs(W1))}, "
                f"max|W2|={np.max(np.abs(W2))}, lr={config.learning_rate}"
            )
        losses.append(epoch_loss)

    return MlpModel(
        kind="mlp",
        config=config,
        W1=W1,
        b1=b1,
        W2=W2,
        b2=b2,
        columns=columns,
        column_hash=columns_hash(columns),
        horizon_months=horizon_months,
        scaler_ref=scaler_ref,
        epoch_losses=losses,
    )


def predict_proba(model: MlpModel, X: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Probabilities in [0, 1]; raw sigmoid output, no clamping."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.n_features:
        raise SchemaMismatch(
            f"row has {X.shape[1]} features, model expects {model.n_features}"
        )
    impl = kernels.get_backend(backend) if backend else kernels.impl()
    return np.asarray(
        impl.forward_proba(model.W1, model.b1, model.W2, model.b2, X, ACTIVATIONS[model.config.activation])
    )


# --- serialization -------------------------------------------------------------

MODEL_FORMAT = "fundcast-mlp/1"


def save_mlp(model: MlpModel, path: Path | str) -> None:
    payload = {
        "format": MODEL_FORMAT,
        "kind": model.kind,
        "config": model.config.to_json(),
        "columns": list(model.columns) if model.columns is not None else None,
        "column_hash": model.column_hash,
        "horizon_months": model.horizon_months,
        "scaler_ref": model.scaler_ref,
        "epoch_losses": model.epoch_losses,
        "W1": model.W1.tolist(),
        "b1": model.b1.tolist(),
        "W2": model.W2.tolist(),
        "b2": model.b2.tolist(),
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True))


def load_mlp(path: Path | str) -> MlpModel:
    obj = json.loads(Path(path).read_text())
    if obj.get("format") != MODEL_FORMAT:
        raise SchemaMismatch(f"unsupported model format {obj.get('format')!r}")
    return MlpModel(
        kind=obj["kind"],
        config=TrainConfig.from_json(obj["config"]),
        W1=np.asarray(obj["W1"], dtype=np.float64),
        b1=np.asarray(obj["b1"], dtype=np.float64),
        W2=np.asarray(obj["W2"], dtype=np.float64),
        b2=np.asarray(obj["b2"], dtype=np.float64),
        columns=tuple(obj["columns"]) if obj["columns"] is not None else None,
        column_hash=obj["column_hash"],
        horizon_months=obj["horizon_months"],
        scaler_ref=obj["scaler_ref"],
        epoch_losses=list(obj["epoch_losses"]),
    )
