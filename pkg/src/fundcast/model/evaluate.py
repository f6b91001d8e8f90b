"""Accuracy evaluation and the model-by-horizon accuracy tables.

Class threshold: p >= 0.5 maps to class 1. The main table has one row per
model and one column per horizon; the companion table carries per-model
train/test averages across horizons.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ..errors import EmptyTestSet


def classify(probs: np.ndarray, threshold: float = 0.5) -> np.ndarray:
    return (np.asarray(probs) >= threshold).astype(int)


def accuracy_at_threshold(probs: np.ndarray, y: np.ndarray, threshold: float = 0.5) -> float:
    y = np.asarray(y)
    if y.size == 0:
        raise EmptyTestSet("no labeled examples to score")
    return float(np.mean(classify(probs, threshold) == y.astype(int)))


def evaluate_accuracy(probs: np.ndarray, y: np.ndarray) -> float:
    return accuracy_at_threshold(probs, y)


def write_accuracy_table(
    path: Path | str,
    accuracies: dict[str, dict[int, float]],
    horizons: list[int],
    model_order: list[str],
) -> None:
    """Rows = models, columns = horizons (months); blank cell if untrained."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["model"] + [str(h) for h in horizons])
        for kind in model_order:
            row = [kind]
            for h in horizons:
                acc = accuracies.get(kind, {}).get(h)
                row.append("" if acc is None else repr(float(acc)))
            w.writerow(row)


def write_average_table(
    path: Path | str,
    train_acc: dict[str, dict[int, float]],
    test_acc: dict[str, dict[int, float]],
    model_order: list[str],
) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["model", "train_accuracy", "test_accuracy"])
        for kind in model_order:
            tr = list(train_acc.get(kind, {}).values())
            te = list(test_acc.get(kind, {}).values())
            w.writerow(
                [
                    kind,
                    repr(float(np.mean(tr))) if tr else "",
                    repr(float(np.mean(te))) if te else "",
                ]
            )
