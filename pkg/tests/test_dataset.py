import datetime

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fundcast.dataset import (
    LabeledExample,
    apply_publication_lag,
    build_labeled_rows,
    chronological_split,
    fit_scaler,
    fixed_income_growth,
    fixed_income_return,
    label_example,
    transform,
)
from fundcast.errors import DomainError, EmptyInput, HorizonBeyondData
from fundcast.features.assemble import FeatureRow

from conftest import make_history, make_series

D = datetime.date


# --- fixed income growth ---------------------------------------------------------


def test_zero_ytm_factor_is_one():
    assert fixed_income_growth(0.0) == 1.0


def test_twelfth_root_high_precision():
    factor = fixed_income_growth(0.12)
    assert abs(factor**12 - 1.12) < 1e-12
    assert factor == pytest.approx(1.0094888, abs=5e-8)


@given(st.floats(min_value=-0.99, max_value=10.0))
def test_defining_identity(ytm):
    assert fixed_income_growth(ytm) ** 12 - 1.0 == pytest.approx(ytm, abs=1e-9)


def test_ytm_domain_error():
    with pytest.raises(DomainError):
        fixed_income_growth(-1.0)
    with pytest.raises(DomainError):
        fixed_income_growth(-1.5)


# --- publication lag ----------------------------------------------------------------


def test_lag_simple_shift():
    assert apply_publication_lag(D(2020, 4, 15)) == D(2020, 5, 15)


def test_lag_month_end_clamped():
    assert apply_publication_lag(D(2020, 1, 31)) == D(2020, 2, 29)
    assert apply_publication_lag(D(2021, 1, 31)) == D(2021, 2, 28)


def test_lag_zero_is_identity():
    assert apply_publication_lag(D(2020, 4, 15), lag_months=0) == D(2020, 4, 15)


# --- labeling ------------------------------------------------------------------------


def label_fixture(final_price: float, ytm: float = 0.0, n: int = 400):
    closes = np.full(n, 100.0)
    closes[200:] = final_price
    history = make_history("LBL", D(2020, 1, 1), closes)
    fi = make_series("ytm", D(2020, 1, 1), np.full(n, ytm))
    return history, fi


def test_stock_beats_benchmark_label_one():
    history, fi = label_fixture(110.0, ytm=0.0)
    # choose as_of before the price step so the horizon straddles it
    realized, benchmark, label = label_example(history, D(2020, 5, 1), 3, fi)
    assert realized == pytest.approx(0.10, rel=1e-12)
    assert benchmark == 0.0
    assert label == 1


def test_exact_tie_is_label_zero():
    history, fi = label_fixture(100.0, ytm=0.0)
    realized, benchmark, label = label_example(history, D(2020, 5, 1), 3, fi)
    assert realized == 0.0 and benchmark == 0.0
    assert label == 0  # strict inequality


def test_stock_below_benchmark_label_zero():
    history, fi = label_fixture(95.0, ytm=0.12)
    realized, benchmark, label = label_example(history, D(2020, 5, 1), 3, fi)
    assert label == 0


def test_benchmark_locked_at_as_of_quote():
    n = 400
    closes = np.full(n, 100.0)
    history = make_history("LBL", D(2020, 1, 1), closes)
    ytm = np.full(n, 0.12)
    ytm[130:] = 0.99  # later re-quote must not matter
    fi = make_series("ytm", D(2020, 1, 1), ytm)
    as_of = D(2020, 5, 1)  # day index 121
    _realized, benchmark, _label = label_example(history, as_of, 3, fi)
    assert benchmark == pytest.approx(fixed_income_return(0.12, 3), rel=1e-12)


def test_horizon_beyond_data_raises():
    history, fi = label_fixture(110.0)
    with pytest.raises(HorizonBeyondData):
        label_example(history, D(2020, 12, 1), 6, fi)


def test_labeling_matches_bruteforce_oracle():
    rng = np.random.default_rng(9)
    n = 900
    closes = 100.0 * np.exp(np.cumsum(rng.normal(0, 0.02, size=n)))
    history = make_history("ORA", D(2019, 1, 1), closes)
    ytms = np.clip(rng.normal(0.2, 0.05, size=n), 0.01, 0.5)
    fi = make_series("ytm", D(2019, 1, 1), ytms)
    for _ in range(1000):
        as_of = D(2019, 1, 1) + datetime.timedelta(days=int(rng.integers(30, 500)))
        horizon = int(rng.choice([1, 2, 3, 6, 12]))
        realized, benchmark, label = label_example(history, as_of, horizon, fi)
        # brute force both legs straight from the raw series
        i0 = history.idx_at_or_before(as_of)
        from fundcast.dates import add_months

        i1 = history.idx_at_or_before(add_months(as_of, horizon))
        exp_realized = closes[i1] / closes[i0] - 1.0
        q = ytms[fi.idx_at_or_before(as_of)]
        exp_benchmark = (1.0 + q) ** (horizon / 12.0) - 1.0
        assert realized == pytest.approx(exp_realized, rel=1e-12)
        assert benchmark == pytest.approx(exp_benchmark, rel=1e-12)
        assert label == int(exp_realized > exp_benchmark)


# --- chronological split ---------------------------------------------------------------


def example_at(as_of: datetime.date, tag: int = 0) -> LabeledExample:
    row = FeatureRow(symbol=f"S{tag}", as_of=as_of, values=np.zeros(3))
    return LabeledExample(
        feature_row=row, symbol=row.symbol, as_of=as_of, horizon_months=3,
        label=0, realized_stock_return=0.0, fi_benchmark_return=0.0,
    )


def test_split_75_25_on_distinct_dates():
    rows = [example_at(D(2020, 1, 1) + datetime.timedelta(days=i)) for i in range(100)]
    train, test, boundary, warn = chronological_split(rows, 0.75)
    assert len(train) == 75 and len(test) == 25
    assert max(r.as_of for r in train) <= min(r.as_of for r in test)
    assert not warn


def test_split_ceiling_rule():
    rows = [example_at(D(2020, 1, 1) + datetime.timedelta(days=i)) for i in range(4)]
    train, test, _, _ = chronological_split(rows, 0.75)
    assert len(train) == 3 and len(test) == 1


def test_split_all_same_date_goes_to_train_with_warning():
    rows = [example_at(D(2020, 6, 1), tag=i) for i in range(10)]
    train, test, boundary, warn = chronological_split(rows, 0.75)
    assert len(train) == 10 and test == []
    assert warn and boundary == D(2020, 6, 1)


def test_split_boundary_ties_all_in_train():
    dates = [D(2020, 1, 1)] * 3 + [D(2020, 2, 1)] * 3 + [D(2020, 3, 1)] * 2
    rows = [example_at(d, tag=i) for i, d in enumerate(dates)]
    train, test, boundary, _ = chronological_split(rows, 0.75)
    # ceil(0.75*8)=6 lands on the 2020-02-01 block; ties extend into train
    assert boundary == D(2020, 2, 1)
    assert len(train) == 6 and len(test) == 2
    assert all(r.as_of == D(2020, 3, 1) for r in test)


def test_split_is_partition_and_order_stable():
    rng = np.random.default_rng(1)
    rows = [
        example_at(D(2020, 1, 1) + datetime.timedelta(days=int(rng.integers(0, 50))), tag=i)
        for i in range(40)
    ]
    train, test, _, _ = chronological_split(rows)
    assert len(train) + len(test) == len(rows)
    ids = {id(r) for r in rows}
    assert {id(r) for r in train} | {id(r) for r in test} == ids
    assert {id(r) for r in train} & {id(r) for r in test} == set()
    # stability: equal dates preserve input order
    for part in (train, test):
        dates = [r.as_of for r in part]
        assert dates == sorted(dates)


def test_split_empty_raises():
    with pytest.raises(EmptyInput):
        chronological_split([])


# --- scaler -----------------------------------------------------------------------------


def test_scaler_population_moments_hand_computed():
    X = np.array([[1.0], [2.0], [3.0]])
    params = fit_scaler(X, ("a",))
    assert params.mean[0] == pytest.approx(2.0, rel=1e-15)
    assert params.std[0] == pytest.approx(np.sqrt(2.0 / 3.0), rel=1e-15)  # population
    Z = transform(X, params)
    expected = np.array([-1.224744871391589, 0.0, 1.224744871391589])
    assert np.allclose(Z[:, 0], expected, atol=1e-12)


def test_constant_column_dropped_and_recorded():
    X = np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
    params = fit_scaler(X, ("a", "b"))
    assert params.kept_columns() == ("a",)
    assert params.dropped == [{"column": "b", "reason": "constant"}]


def test_all_missing_column_dropped_and_recorded():
    X = np.array([[1.0, np.nan], [2.0, np.nan]])
    params = fit_scaler(X, ("a", "b"))
    assert params.kept_columns() == ("a",)
    assert params.dropped == [{"column": "b", "reason": "all_missing"}]


def test_test_value_at_train_mean_maps_to_zero():
    X = np.array([[1.0], [2.0], [3.0]])
    params = fit_scaler(X, ("a",))
    Z = transform(np.array([[2.0]]), params)
    assert Z[0, 0] == 0.0


def test_median_imputation_before_scaling():
    X = np.array([[1.0], [np.nan], [3.0]])
    params = fit_scaler(X, ("a",))
    assert params.median[0] == 2.0  # median of present values
    Z = transform(np.array([[np.nan]]), params)
    assert Z[0, 0] == 0.0  # imputed to median == mean here


def test_post_transform_train_moments():
    rng = np.random.default_rng(0)
    X = rng.normal(5.0, 3.0, size=(200, 8))
    X[rng.random(X.shape) < 0.1] = np.nan
    params = fit_scaler(X, tuple(f"c{i}" for i in range(8)))
    Z = transform(X, params)
    assert np.all(np.abs(Z.mean(axis=0)) < 1e-9)
    assert np.all(np.abs(Z.std(axis=0) - 1.0) < 1e-9)


def test_no_leakage_scaler_ignores_test_rows():
    rng = np.random.default_rng(1)
    X_train = rng.normal(size=(50, 4))
    X_test = rng.normal(size=(20, 4))
    cols = tuple("abcd")
    params1 = fit_scaler(X_train, cols)
    X_test_mutated = X_test * 1e6 + 123.0
    params2 = fit_scaler(X_train, cols)
    assert np.array_equal(params1.mean, params2.mean)
    assert np.array_equal(params1.std, params2.std)
    # transforms of the mutated test set differ, but params never move
    assert not np.allclose(transform(X_test, params1), transform(X_test_mutated, params1))


# --- build_labeled_rows skip accounting -----------------------------------------------


def test_skip_report_counts_beyond_data():
    history, fi = label_fixture(110.0)
    rows = [
        FeatureRow(symbol="LBL", as_of=D(2020, 5, 1), values=np.zeros(2)),
        FeatureRow(symbol="LBL", as_of=D(2020, 12, 1), values=np.zeros(2)),  # horizon exceeds data
        FeatureRow(symbol="GHOST", as_of=D(2020, 5, 1), values=np.zeros(2)),
    ]
    out, skip = build_labeled_rows(rows, {"LBL": history}, fi, 6)
    assert skip.total == 3 and skip.kept == 1
    assert skip.beyond_data == 1 and skip.no_history == 1
    assert len(out) == 1
