import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relu_pwa.polyhedra import Polyhedron, normalize_rows


def test_split_interval():
    lower, upper = Polyhedron.box([0.0], [3.0]).split([1.0], -1.0)
    assert lower.as_box() == (np.array([0.0]), np.array([1.0]))
    lo, hi = upper.as_box()
    assert (lo[0], hi[0]) == (1.0, 3.0)


def test_split_missing_hyperplane_gives_empty_side():
    box = Polyhedron.box([0.0], [1.0])
    lower, upper = box.split([1.0], -5.0)   # x <= 5 holds everywhere
    assert lower.is_full_dim()
    assert upper.is_empty()


@pytest.mark.parametrize("beta,lower_keeps", [(-1.0, True), (0.0, True), (2.0, False)])
def test_split_zero_normal(beta, lower_keeps):
    box = Polyhedron.box([0.0, 0.0], [1.0, 1.0])
    lower, upper = box.split([0.0, 0.0], beta)
    kept, dropped = (lower, upper) if lower_keeps else (upper, lower)
    assert kept is box
    assert dropped.is_empty()


def test_full_dimensionality():
    box = Polyhedron.box([0.0, 0.0], [1.0, 1.0])
    assert box.is_full_dim()
    # a sliver of width 1e-10 is not full-dimensional at the default radius
    sliver = box.add_halfspace([1.0, 0.0], 1e-10)
    assert not sliver.is_empty()
    assert not sliver.is_full_dim()
    assert Polyhedron.empty(2).is_empty()


def test_contains_and_violation():
    box = Polyhedron.box([-1.0, -1.0], [1.0, 1.0])
    assert box.contains([1.0, -1.0])
    assert not box.contains([1.1, 0.0])
    assert box.violation([1.5, 0.0]) == pytest.approx(0.5)
    np.testing.assert_array_equal(box.contains_many([[0, 0], [2, 0]]), [True, False])


def test_rows_are_normalized():
    P = Polyhedron([[3.0, 4.0]], [10.0])
    np.testing.assert_allclose(P.A, [[0.6, 0.8]])
    np.testing.assert_allclose(P.b, [2.0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.floats(-10, 10), min_size=3, max_size=3), min_size=1, max_size=6))
def test_normalization_idempotent(rows):
    M = np.array(rows)
    A, b = normalize_rows(M[:, :2], M[:, 2])
    A2, b2 = normalize_rows(A, b)
    np.testing.assert_allclose(A2, A, atol=1e-15)
    np.testing.assert_allclose(b2, b, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_split_covers_parent(seed):
    rng = np.random.default_rng(seed)
    box = Polyhedron.box([-1.0, -1.0], [1.0, 1.0])
    w, beta = rng.normal(size=2), rng.normal()
    lower, upper = box.split(w, beta)
    X = rng.uniform(-1, 1, size=(500, 2))
    in_lower, in_upper = lower.contains_many(X), upper.contains_many(X)
    assert np.all(in_lower | in_upper)
    # the two sides share only the hyperplane
    both = X[in_lower & in_upper]
    assert np.all(np.abs(both @ w + beta) <= 1e-8 * (1 + np.linalg.norm(w)))


def test_remove_redundant_and_bounding_box():
    box = Polyhedron.box([0.0, 0.0], [1.0, 1.0])
    P = box.add_halfspace([1.0, 1.0], 5.0)       # redundant
    P = P.add_halfspace([1.0, 1.0], 1.0)         # cuts the corner
    R = P.remove_redundant()
    assert R.A.shape[0] == 3
    lo, hi = R.bounding_box()
    np.testing.assert_allclose(lo, [0, 0], atol=1e-12)
    np.testing.assert_allclose(hi, [1, 1], atol=1e-12)


def test_dict_round_trip():
    P = Polyhedron.box([0.0], [2.0]).add_halfspace([1.0], 1.5)
    Q = Polyhedron.from_dict(P.to_dict())
    assert Q == P


def test_box_rejects_inverted_bounds():
    with pytest.raises(ValueError):
        Polyhedron.box([1.0], [0.0])
