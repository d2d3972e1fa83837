import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from threshaug.discretizer import ThresholdSet, compute_thresholds, encode_classes


def oracle_thresholds(y, s):
    """Sort, cut with array_split (first n % (s+1) chunks get the extra element), take midpoints."""
    chunks = np.array_split(np.sort(y), s + 1)
    mids = [0.5 * (chunks[i][-1] + chunks[i + 1][0]) for i in range(s)]
    return np.unique(mids), [len(c) for c in chunks]


def test_uniform_data_midpoints():
    t = compute_thresholds(np.arange(1, 11), 4)
    np.testing.assert_array_equal(t.thresholds, [2.5, 4.5, 6.5, 8.5])
    assert t.effective_s == 4 and t.requested_s == 4
    assert t.warning is None
    assert np.mean(np.arange(1, 11) <= t.thresholds[0]) == pytest.approx(1 / 5)


def test_ties_are_merged_with_warning():
    y = [1, 1, 1, 1, 1, 1, 1, 1, 9, 10]
    t = compute_thresholds(y, 4)
    np.testing.assert_array_equal(t.thresholds, [1.0, 5.0])
    assert t.effective_s == 2
    assert "effective S = 2" in t.warning


@pytest.mark.parametrize("s", [0, -3])
def test_s_below_one_rejected(s):
    with pytest.raises(ValueError):
        compute_thresholds([1.0, 2.0, 3.0], s)


def test_too_few_values_rejected():
    with pytest.raises(ValueError):
        compute_thresholds([1.0, 2.0, 3.0], 3)


def test_unsorted_input_is_fine():
    rng = np.random.default_rng(3)
    y = rng.permutation(np.arange(1, 11))
    np.testing.assert_array_equal(compute_thresholds(y, 4).thresholds, [2.5, 4.5, 6.5, 8.5])


def test_encode_direct_comparison():
    t = ThresholdSet(np.array([1.5, 2.5, 3.5]), 3)
    np.testing.assert_array_equal(encode_classes([2.0], t), [[0, 1, 1]])


def test_encode_below_all_thresholds():
    y = np.arange(1.0, 11.0)
    t = compute_thresholds(y, 4)
    np.testing.assert_array_equal(encode_classes([y.min() - 1], t), [[1, 1, 1, 1]])
    np.testing.assert_array_equal(encode_classes([y.max() + 1], t), [[0, 0, 0, 0]])


def test_first_column_count():
    y = np.arange(1.0, 11.0)
    labels = encode_classes(y, compute_thresholds(y, 4))
    assert labels[:, 0].sum() == 2


def test_value_equal_to_threshold_is_class_one():
    t = ThresholdSet(np.array([2.0]), 1)
    assert encode_classes([2.0], t)[0, 0] == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 200), st.integers(1, 16), st.integers(0, 2**31 - 1))
def test_matches_oracle_and_bins_balanced(n, s, seed):
    if n < s + 1:
        n = s + 1
    y = np.random.default_rng(seed).permutation(n).astype(float) + 0.25
    t = compute_thresholds(y, s)
    expected, sizes = oracle_thresholds(y, s)
    np.testing.assert_array_equal(t.thresholds, expected)
    assert max(sizes) - min(sizes) <= 1
    assert t.effective_s == s


@settings(max_examples=200, deadline=None)
@given(st.integers(10, 200), st.integers(1, 16), st.integers(0, 2**31 - 1))
def test_minority_class_mass(n, s, seed):
    if n < s + 1:
        n = s + 1
    y = np.random.default_rng(seed).normal(size=n)
    t = compute_thresholds(y, s)
    labels = encode_classes(y, t)
    mass = labels.mean(axis=0)
    minority = np.minimum(mass, 1 - mass)
    assert np.all(minority >= 1 / (s + 1) - 1 / n)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=60), st.integers(1, 16),
       st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30))
def test_rows_monotone(train, s, y):
    if len(train) < s + 1:
        s = len(train) - 1
    labels = encode_classes(y, compute_thresholds(train, s))
    assert np.all(np.diff(labels.astype(int), axis=1) >= 0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=8, max_size=80), st.integers(1, 8))
def test_thresholds_increasing_and_within_range(values, s):
    y = np.array(values, dtype=float)
    if len(y) < s + 1:
        s = len(y) - 1
    t = compute_thresholds(y, s)
    assert np.all(np.diff(t.thresholds) > 0)
    assert t.thresholds.min() >= y.min() and t.thresholds.max() <= y.max()
    assert 1 <= t.effective_s <= s
