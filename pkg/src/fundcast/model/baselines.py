"""Classical baseline classifiers behind the shared predict-probability
contract.

Backed by scikit-learn: these are standard methods used for comparison, not
the modeling contribution. KNN probabilities are neighbor vote fractions and
decision trees report leaf class fractions (sklearn semantics). The linear
SVM trains a sub-gradient hinge loss (SGD) and maps its margin through a
logistic link, sigma(margin); that link is a fixed documented convention,
not a fitted calibration.
"""

from __future__ import annotations

import pickle
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.ensemble import RandomForestClassifier
from sklearn.linear_model import LogisticRegression, SGDClassifier
from sklearn.neighbors import KNeighborsClassifier
from sklearn.tree import DecisionTreeClassifier

from ..errors import SchemaMismatch, UnknownKind
from .mlp import columns_hash

# rf and svm are optional baselines; pipeline configs enable them explicitly
BASELINE_KINDS = ("logistic_regression", "knn", "decision_tree", "random_forest", "linear_svm")
MANDATORY_BASELINES = ("logistic_regression", "knn", "decision_tree")


class _ConstantProb:
    """Degenerate single-class training sets predict the class share."""

    def __init__(self, p: float):
        self.p = p

    def fit(self, X, y):
        return self


def _make_estimator(kind: str, hyperparams: dict, seed: int):
    hp = dict(hyperparams or {})
    if kind == "logistic_regression":
        return LogisticRegression(max_iter=hp.pop("max_iter", 1000), **hp)
    if kind == "knn":
        return KNeighborsClassifier(n_neighbors=hp.pop("n_neighbors", 5), **hp)
    if kind == "decision_tree":
        return DecisionTreeClassifier(random_state=seed, **hp)
    if kind == "random_forest":
        return RandomForestClassifier(
            n_estimators=hp.pop("n_estimators", 100), random_state=seed, **hp
        )
    if kind == "linear_svm":
        return SGDClassifier(loss="hinge", random_state=seed, **hp)
    raise UnknownKind(kind)


@dataclass
class BaselineModel:
    kind: str
    estimator: object
    columns: tuple[str, ...] | None = None
    column_hash: str | None = None
    horizon_months: int | None = None
    scaler_ref: str | None = None
    n_features: int = 0


def train_baseline(
    kind: str,
    X: np.ndarray,
    y: np.ndarray,
    hyperparams: dict | None = None,
    seed: int = 0,
    columns: tuple[str, ...] | None = None,
    horizon_months: int | None = None,
    scaler_ref: str | None = None,
) -> BaselineModel:
    if kind not in BASELINE_KINDS:
        raise UnknownKind(kind)
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if len(np.unique(y)) < 2:
        est: object = _ConstantProb(float(np.mean(y)))
    else:
        est = _make_estimator(kind, hyperparams or {}, seed)
        est.fit(X, y)
    return BaselineModel(
        kind=kind,
        estimator=est,
        columns=columns,
        column_hash=columns_hash(columns),
        horizon_months=horizon_months,
        scaler_ref=scaler_ref,
        n_features=X.shape[1],
    )


def predict_proba(model: BaselineModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.n_features:
        raise SchemaMismatch(f"row has {X.shape[1]} features, model expects {model.n_features}")
    est = model.estimator
    if isinstance(est, _ConstantProb):
        return np.full(X.shape[0], est.p)
    if model.kind == "linear_svm":
        margin = est.decision_function(X)
        out = np.empty_like(margin)
        pos = margin >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-margin[pos]))
        ez = np.exp(margin[~pos])
        out[~pos] = ez / (1.0 + ez)
        return out
    probs = est.predict_proba(X)
    one_col = list(est.classes_).index(1)
    return probs[:, one_col]


def save_baseline(model: BaselineModel, path: Path | str) -> None:
    payload = {
        "format": "fundcast-baseline/1",
        "kind": model.kind,
        "columns": list(model.columns) if model.columns is not None else None,
        "column_hash": model.column_hash,
        "horizon_months": model.horizon_months,
        "scaler_ref": model.scaler_ref,
        "n_features": model.n_features,
        "estimator": model.estimator,
    }
    with open(path, "wb") as fh:
        pickle.dump(payload, fh, protocol=4)


def load_baseline(path: Path | str) -> BaselineModel:
    with open(path, "rb") as fh:
        obj = pickle.load(fh)
    if obj.get("format") != "fundcast-baseline/1":
        raise SchemaMismatch(f"unsupported baseline format {obj.get('format')!r}")
    return BaselineModel(
        kind=obj["kind"],
        estimator=obj["estimator"],
        columns=tuple(obj["columns"]) if obj["columns"] is not None else None,
        column_hash=obj["column_hash"],
        horizon_months=obj["horizon_months"],
        scaler_ref=obj["scaler_ref"],
        n_features=obj["n_features"],
    )
