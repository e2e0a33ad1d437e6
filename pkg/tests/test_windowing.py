import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gapless_series
from oracles import recompute_label
from linlaw.exceptions import BalancingError, DomainError, FormatError, SplitError
from linlaw.market_data import CandleSeries
from linlaw.windowing import (
    InstanceWindow,
    SamplingConfig,
    balance_classes,
    dump_instances,
    load_instances,
    make_instances,
    split_train_test,
)


def closes_with(final, n=840, mid=100.0):
    closes = np.full(n, 50.0)
    closes[719] = mid
    closes[n - 1] = final
    return closes


def test_single_window_rise():
    out = make_instances(gapless_series(closes_with(101.0)))
    assert len(out) == 1
    assert out[0].label == 1
    assert out[0].X.shape == (720, 6)
    assert out[0].anchor_ts == 0


def test_single_window_fall_and_tie():
    assert make_instances(gapless_series(closes_with(99.0)))[0].label == 0
    assert make_instances(gapless_series(closes_with(100.0))) == []


def test_incomplete_second_window():
    closes = np.concatenate([closes_with(101.0), np.full(839, 70.0)])
    assert len(closes) == 1679
    assert len(make_instances(gapless_series(closes))) == 1


def test_window_with_gap_is_skipped():
    series = gapless_series(np.concatenate([closes_with(101.0), closes_with(99.0)]))
    keep = np.ones(len(series), bool)
    keep[100] = False
    holed = CandleSeries("X", series.timestamps[keep], series.values[keep])
    out = make_instances(holed)
    assert [inst.instance_id for inst in out] == [1]
    assert out[0].label == 0


def test_config_validation():
    with pytest.raises(DomainError):
        SamplingConfig(window_minutes=800)
    with pytest.raises(DomainError):
        SamplingConfig(test_ratio=1.0)


def test_labels_and_nonoverlap_brute_force(rng):
    cfg = SamplingConfig(window_minutes=30, observe_minutes=20, horizon_minutes=10)
    closes = np.round(100 + np.cumsum(rng.normal(size=1000)), 1)
    series = gapless_series(closes)
    out = make_instances(series, cfg)
    assert out
    for inst in out:
        start = inst.anchor_ts // 60
        assert inst.label == recompute_label(closes[start:], 20, 30)
        assert np.array_equal(inst.X[:, 3], closes[start : start + 20])
    anchors = [inst.anchor_ts for inst in out]
    assert all(b - a >= 30 * 60 for a, b in zip(anchors, anchors[1:]))


def _instances(labels):
    return [InstanceWindow(i, np.full((3, 2), float(i)), lab) for i, lab in enumerate(labels)]


def test_balance_counts_and_order():
    inst = _instances([0] * 10 + [1] * 7)
    out = balance_classes(inst, seed=3)
    labels = [i.label for i in out]
    assert labels.count(0) == 7 and labels.count(1) == 7
    ids = [i.instance_id for i in out]
    assert ids == sorted(ids)
    assert balance_classes(inst, seed=3) == out


def test_balance_identity_and_degenerate():
    inst = _instances([0, 1, 1, 0])
    assert balance_classes(inst, seed=1) == inst
    with pytest.raises(BalancingError):
        balance_classes(_instances([1, 1]), seed=1)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40), st.integers(0, 2**31))
def test_balance_always_equal(n0, n1, seed):
    out = balance_classes(_instances([0] * n0 + [1] * n1), seed)
    labels = [i.label for i in out]
    assert labels.count(0) == labels.count(1) == min(n0, n1)


def test_split_full_scale():
    inst = _instances([0, 1] * 856)
    split = split_train_test(inst, SamplingConfig())
    assert len(split.test_ids) == 428 and len(split.train_ids) == 1284
    test_labels = [inst[i].label for i in split.test_ids]
    assert test_labels.count(0) == test_labels.count(1) == 214


def test_split_small_and_deterministic():
    inst = _instances([0, 1] * 4)
    cfg = SamplingConfig(seed=9)
    split = split_train_test(inst, cfg)
    assert len(split.test_ids) == 2 and len(split.train_ids) == 6
    assert sorted(inst[i].label for i in split.test_ids) == [0, 1]
    assert split_train_test(inst, cfg) == split
    assert set(split.train_ids) | set(split.test_ids) == set(range(8))
    assert not set(split.train_ids) & set(split.test_ids)


def test_split_needs_two_per_class():
    with pytest.raises(SplitError):
        split_train_test(_instances([0, 1, 0]), SamplingConfig())


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 200), st.floats(0.05, 0.95), st.integers(0, 1000))
def test_split_stratified_within_one(half, ratio, seed):
    inst = _instances([0, 1] * half)
    try:
        split = split_train_test(inst, SamplingConfig(test_ratio=ratio, seed=seed))
    except SplitError:
        return
    n = 2 * half
    assert len(split.test_ids) == int(np.floor(ratio * n + 0.5))
    labels = [inst[i].label for i in split.test_ids]
    assert abs(labels.count(0) - labels.count(1)) <= 1


def test_instance_cache_golden_bytes():
    import struct

    inst = [InstanceWindow(7, [[1.0, 2.0], [3.0, 4.0]], 1), InstanceWindow(9, [[0.5, -1], [0, 2]], 0)]
    expected = (
        b"LLTW1" + struct.pack("<III", 2, 2, 2)
        + struct.pack("<4d", 1, 2, 3, 4) + b"\x01"
        + struct.pack("<4d", 0.5, -1, 0, 2) + b"\x00"
    )
    data = dump_instances(inst)
    assert data == expected
    with open(__file__.replace("test_windowing.py", "data/instances_golden.lltw"), "rb") as fh:
        assert fh.read() == expected
    back = load_instances(data)
    assert [b.label for b in back] == [1, 0]
    assert np.array_equal(back[1].X, inst[1].X)


def test_instance_cache_rejects_bad_data():
    with pytest.raises(FormatError):
        load_instances(b"NOPE!" + bytes(12))
    with pytest.raises(FormatError):
        load_instances(dump_instances(_instances([0, 1]))[:-1])
