import json

import numpy as np
import pytest

from fundcast.cleaning import MappingTable, map_to_unified, merge_quarterlies
from fundcast.errors import InvalidConfig
from fundcast.store import StatementType
from fundcast.synth import SynthConfig, generate_market, recompute_bayes_accuracy


def tiny(seed=3, **over):
    base = dict(n_stocks=6, n_quarters=10, rng_seed=seed, signal_strength=0.6)
    base.update(over)
    return SynthConfig(**base)


def test_config_validation():
    with pytest.raises(InvalidConfig):
        SynthConfig(n_quarters=4).validate()
    with pytest.raises(InvalidConfig):
        SynthConfig(n_stocks=0).validate()
    with pytest.raises(InvalidConfig):
        SynthConfig(signal_strength=1.5).validate()


def test_same_seed_bitwise_identical_bundles(tmp_path):
    b1 = generate_market(tiny())
    b2 = generate_market(tiny())
    assert json.dumps([r.to_record() for r in b1.reports], sort_keys=True) == json.dumps(
        [r.to_record() for r in b2.reports], sort_keys=True
    )
    for sym in b1.histories:
        assert b1.histories[sym].adj_close.tobytes() == b2.histories[sym].adj_close.tobytes()
    assert b1.ground_truth == b2.ground_truth
    # and the written artifacts are byte-identical
    d1, d2 = tmp_path / "a", tmp_path / "b"
    b1.write(d1)
    b2.write(d2)
    for name in ("reports.jsonl", "prices.csv", "macro.csv", "ground_truth.json"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_different_seed_differs():
    b1 = generate_market(tiny(seed=1))
    b2 = generate_market(tiny(seed=2))
    sym = sorted(b1.histories)[0]
    assert not np.array_equal(b1.histories[sym].adj_close, b2.histories[sym].adj_close)


def test_statements_pass_cleaner_with_zero_quarantine():
    bundle = generate_market(tiny())
    mapping = MappingTable.load()
    total = 0
    for raw in bundle.reports:
        report, quarantine = map_to_unified(raw, mapping)
        assert quarantine == []
        total += 1
    assert total == len(bundle.reports)


def test_prices_positive_and_ordered():
    bundle = generate_market(tiny())
    for h in bundle.histories.values():
        assert np.all(h.adj_close > 0)
        assert np.all(h.low > 0)
        assert np.all(h.high >= h.low)
        assert np.all(np.diff(h.dates) > 0)


def test_merge_accepts_generated_series():
    bundle = generate_market(tiny())
    mapping = MappingTable.load()
    by_symbol = {}
    for raw in bundle.reports:
        clean, _ = map_to_unified(raw, mapping)
        by_symbol.setdefault(clean.symbol, []).append(clean)
    for sym, reports in by_symbol.items():
        series = merge_quarterlies(reports)
        incs = series.of_type(StatementType.INCOME_STATEMENT)
        assert len(incs) == 10  # one per quarter, revisions collapsed
        assert series.gaps == []


def test_bayes_accuracy_self_consistency():
    bundle = generate_market(tiny())
    recomputed = recompute_bayes_accuracy(bundle.ground_truth)
    assert recomputed == pytest.approx(bundle.ground_truth["bayes_accuracy"], abs=1e-12)


def test_noiseless_signal_records_bayes_one():
    bundle = generate_market(tiny(signal_strength=1.0))
    assert bundle.ground_truth["bayes_accuracy"] == 1.0
    assert bundle.ground_truth["expected_bayes_accuracy"] == 1.0


def test_zero_signal_labels_near_coin_flip():
    bundle = generate_market(tiny(n_stocks=40, n_quarters=12, signal_strength=0.0, seed=9))
    share = bundle.ground_truth["label_share_positive"]
    assert abs(share - 0.5) < 0.08
    assert bundle.ground_truth["bayes_accuracy"] == pytest.approx(
        max(share, 1 - share), abs=0.06
    )


def test_fixture_files_written(tmp_path):
    bundle = generate_market(tiny())
    bundle.write(tmp_path)
    for name in (
        "reports.jsonl",
        "prices.csv",
        "macro.csv",
        "fixed_income.csv",
        "inflation.csv",
        "universe.csv",
        "vocab.json",
        "ground_truth.json",
    ):
        assert (tmp_path / name).exists(), name
    vocab = json.loads((tmp_path / "vocab.json").read_text())
    assert set(vocab) == {"industries", "exchanges", "activities"}


def test_format_version_mix_spans_all_versions():
    bundle = generate_market(tiny(n_stocks=8, n_quarters=12))
    versions = {r.announcement.format_version for r in bundle.reports}
    assert versions == {1, 2, 3}
