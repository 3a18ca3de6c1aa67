import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pvm.classifier import classify, test_error as error_rate
from pvm.data_model import InputError
from pvm.dissimilarity import euclidean_matrix

from instances import one_nn


def test_single_prototype_wins_everything():
    D = np.random.default_rng(0).random((6, 4))
    res = classify(D, ((), (2,)))
    assert res.labels.tolist() == [2] * 6
    assert res.nearest.tolist() == [2] * 6


def test_equidistant_query_goes_to_smaller_class():
    D = np.array([[1.0, 1.0]])
    res = classify(D, ((1,), (0,)))
    assert res.labels.tolist() == [1]
    assert res.nearest.tolist() == [1]
    assert res.distance.tolist() == [1.0]


def test_tie_within_class_goes_to_smaller_index():
    res = classify(np.array([[2.0, 1.0, 1.0]]), ((2, 1),))
    assert res.nearest.tolist() == [1]


def test_all_empty_is_an_error():
    with pytest.raises(InputError):
        classify(np.ones((1, 2)), ((), ()))


def test_full_prototype_sets_reproduce_one_nn():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(30, 3))
    y = rng.integers(0, 3, 30)
    Q = rng.normal(size=(50, 3))
    Dq = euclidean_matrix(Q, X)
    sets = tuple(np.flatnonzero(y == l) for l in range(3))
    res = classify(Dq, sets)
    assert np.array_equal(res.predicted, one_nn(Dq, y))
    np.testing.assert_array_equal(res.distance, Dq.min(axis=1))


@settings(max_examples=50)
@given(st.integers(0, 10_000))
def test_prediction_invariant_to_increasing_transform(seed):
    rng = np.random.default_rng(seed)
    D = rng.random((10, 8)) * 5
    sets = ([0, 3], [1, 5, 6], [7])
    a = classify(D, sets).predicted
    assert np.array_equal(a, classify(np.exp(D), sets).predicted)
    assert np.array_equal(a, classify(D ** 2 + 1, sets).predicted)


def test_removing_other_prototype_keeps_prediction():
    rng = np.random.default_rng(2)
    D = rng.random((40, 10))
    sets = [[0, 1, 2], [3, 4, 5], [6, 7, 8, 9]]
    base = classify(D, sets)
    for l in range(3):
        for j in sets[l]:
            reduced = [[k for k in P if k != j] for P in sets]
            res = classify(D, reduced)
            keep = base.nearest != j
            assert np.array_equal(res.predicted[keep], base.predicted[keep])


def test_error_rate():
    assert error_rate([1, 2, 3], [1, 2, 3]) == 0
    assert error_rate([1, 1], [2, 2]) == 1
    assert error_rate([1, 2, 1, 1], [1, 2, 1, 2]) == 0.25
    with pytest.raises(InputError):
        error_rate([1], [1, 2])
