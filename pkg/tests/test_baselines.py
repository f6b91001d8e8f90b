import numpy as np
import pytest

from fundcast.errors import EmptyTestSet, UnknownKind
from fundcast.model.baselines import (
    load_baseline,
    predict_proba,
    save_baseline,
    train_baseline,
)
from fundcast.model.evaluate import (
    accuracy_at_threshold,
    write_accuracy_table,
    write_average_table,
)

from test_mlp import separable_set


def test_logistic_regression_on_separable_fixture():
    X, y = separable_set()
    model = train_baseline("logistic_regression", X, y.astype(int))
    p = predict_proba(model, X)
    assert accuracy_at_threshold(p, y) >= 0.99


def test_knn_k1_scores_its_own_training_set_perfectly():
    X, y = separable_set(n=300)
    model = train_baseline("knn", X, y.astype(int), hyperparams={"n_neighbors": 1})
    p = predict_proba(model, X)
    assert accuracy_at_threshold(p, y) == 1.0


def test_depth_one_tree_cannot_solve_xor():
    # 4-cell XOR table: no single axis split exceeds 0.75 accuracy
    rng = np.random.default_rng(0)
    X = rng.uniform(-1, 1, size=(400, 2))
    y = ((X[:, 0] > 0) ^ (X[:, 1] > 0)).astype(int)
    model = train_baseline("decision_tree", X, y, hyperparams={"max_depth": 1})
    p = predict_proba(model, X)
    assert accuracy_at_threshold(p, y) <= 0.75


def test_unknown_kind():
    X, y = separable_set(n=50)
    with pytest.raises(UnknownKind):
        train_baseline("gradient_boosting", X, y.astype(int))


def test_optional_kinds_random_forest_and_linear_svm():
    X, y = separable_set(n=400)
    for kind in ("random_forest", "linear_svm"):
        model = train_baseline(kind, X, y.astype(int), seed=1)
        p = predict_proba(model, X)
        assert np.all((p >= 0.0) & (p <= 1.0))
        assert accuracy_at_threshold(p, y) >= 0.9


def test_single_class_training_set_predicts_class_share():
    X = np.zeros((10, 2))
    y = np.ones(10, dtype=int)
    model = train_baseline("logistic_regression", X, y)
    assert np.all(predict_proba(model, X) == 1.0)


def test_save_load_roundtrip(tmp_path):
    X, y = separable_set(n=200)
    model = train_baseline("decision_tree", X, y.astype(int), seed=3, columns=("f0", "f1"))
    path = tmp_path / "dt.pkl"
    save_baseline(model, path)
    back = load_baseline(path)
    assert back.kind == "decision_tree"
    assert np.array_equal(predict_proba(back, X), predict_proba(model, X))


# --- evaluate ---------------------------------------------------------------------


def test_all_correct_is_one():
    y = np.array([0, 1, 1, 0])
    p = np.array([0.1, 0.9, 0.8, 0.2])
    assert accuracy_at_threshold(p, y) == 1.0


def test_all_flipped_is_zero():
    y = np.array([0, 1, 1, 0])
    p = np.array([0.9, 0.1, 0.2, 0.8])
    assert accuracy_at_threshold(p, y) == 0.0


def test_constant_half_maps_to_class_one_share():
    # p >= 0.5 -> class 1, so constant 0.5 scores the share of 1-labels
    y = np.array([1, 1, 1, 0, 0, 1])
    p = np.full(6, 0.5)
    assert accuracy_at_threshold(p, y) == pytest.approx(4 / 6)


def test_empty_test_set_raises():
    with pytest.raises(EmptyTestSet):
        accuracy_at_threshold(np.array([]), np.array([]))


def test_accuracy_table_layout(tmp_path):
    acc = {"mlp": {1: 0.64, 3: 0.79}, "knn": {1: 0.57}}
    path = tmp_path / "table.csv"
    write_accuracy_table(path, acc, horizons=[1, 3], model_order=["mlp", "knn"])
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "model,1,3"
    assert lines[1].startswith("mlp,0.64,0.79")
    assert lines[2].startswith("knn,0.57,")  # missing horizon stays blank


def test_average_table(tmp_path):
    train = {"mlp": {1: 0.9, 3: 0.8}}
    test = {"mlp": {1: 0.7, 3: 0.6}}
    path = tmp_path / "avg.csv"
    write_average_table(path, train, test, ["mlp"])
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "model,train_accuracy,test_accuracy"
    _, tr, te = lines[1].split(",")
    assert float(tr) == pytest.approx(0.85)
    assert float(te) == pytest.approx(0.65)
