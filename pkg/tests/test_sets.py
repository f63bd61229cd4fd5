import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose, assert_array_equal
from scipy.spatial import ConvexHull

from conftest import random_zonotope, sign_vertices
from zonoreach.sets import (
    IntervalMatrix,
    MatrixZonotope,
    Zonotope,
    cartesian_product,
    coefficient_norm,
    contains_matrix,
    contains_point,
    interval_hull,
    interval_matrix_of,
    linear_map,
    matzono_affine,
    matzono_mul_matrix,
    matzono_mul_zonotope,
    minkowski_sum,
    polygon_area,
    polygon_contains,
    project,
    reduce_order,
    sample,
    sample_matrix,
    support_value,
    support_values,
    zonotope_from_interval,
)

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


@st.composite
def zonotopes(draw, n=None, max_gens=6):
    n = draw(st.integers(1, 4)) if n is None else n
    p = draw(st.integers(0, max_gens))
    c = draw(arrays(np.float64, n, elements=finite))
    G = draw(arrays(np.float64, (n, p), elements=finite))
    return Zonotope(c, G)


# -- construction -----------------------------------------------------------


def test_zero_generators_dropped():
    Z = Zonotope([1.0, 2.0], [[1.0, 0.0, 3.0], [0.0, 0.0, 0.0]])
    assert_array_equal(Z.generators, [[1.0, 3.0], [0.0, 0.0]])


def test_invalid_inputs_rejected():
    with pytest.raises(ValueError):
        Zonotope([0.0, 0.0], np.ones((3, 2)))
    with pytest.raises(ValueError):
        Zonotope([np.nan], [[1.0]])
    with pytest.raises(ValueError):
        MatrixZonotope(np.zeros((2, 2)), np.zeros((1, 2, 3)))
    with pytest.raises(ValueError):
        IntervalMatrix([[1.0]], [[0.0]])


def test_immutable():
    Z = Zonotope([0.0], [[1.0]])
    with pytest.raises(AttributeError):
        Z.center = np.zeros(1)
    with pytest.raises(ValueError):
        Z.center[0] = 3.0


# -- linear map / sums / products -----------------------------------------


def test_linear_map_scaling():
    Z = linear_map(2 * np.eye(2), Zonotope([1.0, 0.0], np.eye(2)))
    assert_array_equal(Z.center, [2.0, 0.0])
    assert_array_equal(Z.generators, 2 * np.eye(2))


def test_linear_map_zero():
    Z = linear_map(np.zeros((2, 2)), Zonotope([1.0, 5.0], [[1.0, 2.0], [3.0, 4.0]]))
    assert_array_equal(Z.center, [0.0, 0.0])
    assert Z.num_generators == 0


def test_linear_map_permutation(rng):
    M = np.array([[0.0, 1.0], [1.0, 0.0]])
    Z = Zonotope([1.0, 2.0], [[1.0, 0.0], [0.0, 3.0]])
    W = linear_map(M, Z)
    assert_array_equal(W.center, [2.0, 1.0])
    assert_array_equal(W.generators, [[0.0, 3.0], [1.0, 0.0]])
    for x in sample(Z, 100, rng):
        assert contains_point(W, M @ x)


def test_linear_map_dimension_mismatch():
    with pytest.raises(ValueError, match="shape"):
        linear_map(np.eye(3), Zonotope([0.0, 0.0]))


def test_minkowski_sum_interval():
    S = minkowski_sum(Zonotope([1.0], [[1.0]]), Zonotope([2.0], [[3.0]]))
    assert_array_equal(S.center, [3.0])
    assert_array_equal(S.generators, [[1.0, 3.0]])
    lo, hi = interval_hull(S)
    assert (lo[0], hi[0]) == (-1.0, 7.0)


def test_minkowski_sum_with_singleton_translates():
    Z = Zonotope([1.0, 1.0], [[1.0, 0.5], [0.0, 2.0]])
    S = Z + Zonotope([3.0, -1.0])
    assert_array_equal(S.center, [4.0, 0.0])
    assert_array_equal(S.generators, Z.generators)


def test_minkowski_sum_membership(rng):
    Z1, Z2 = random_zonotope(rng, 3, 4), random_zonotope(rng, 3, 3)
    S = Z1 + Z2
    for a, b in zip(sample(Z1, 1000, rng), sample(Z2, 1000, rng)):
        assert contains_point(S, a + b)


def test_minkowski_sum_dim_mismatch():
    with pytest.raises(ValueError):
        minkowski_sum(Zonotope([0.0]), Zonotope([0.0, 0.0]))


def test_cartesian_product_examples():
    P = cartesian_product(Zonotope([1.0], [[2.0]]), Zonotope([3.0], [[4.0]]))
    assert_array_equal(P.center, [1.0, 3.0])
    assert_array_equal(P.generators, [[2.0, 0.0], [0.0, 4.0]])
    S = cartesian_product(Zonotope([1.0]), Zonotope([2.0, 3.0]))
    assert S.is_singleton()
    assert_array_equal(S.center, [1.0, 2.0, 3.0])


def test_cartesian_product_lifted_dimension():
    R = Zonotope(np.ones(5), 0.1 * np.eye(5))
    U = Zonotope([10.0], [[0.25]])
    assert cartesian_product(Zonotope([1.0]), R, U).dim == 1 + 5 + 1


# -- interval conversions ----------------------------------------------------


def test_zonotope_from_interval_examples():
    Z = zonotope_from_interval([2.0, -1.0], [2.0, -1.0])
    assert Z.is_singleton()
    assert_array_equal(Z.center, [2.0, -1.0])
    Z = zonotope_from_interval([-1.0, -1.0], [1.0, 1.0])
    assert_array_equal(Z.center, [0.0, 0.0])
    assert_array_equal(Z.generators, np.eye(2))
    Z = zonotope_from_interval([0.0, -3.0], [2.0, 1.0])
    assert_array_equal(Z.center, [1.0, -1.0])
    assert_array_equal(Z.generators, np.diag([1.0, 2.0]))
    with pytest.raises(ValueError, match="lower > upper"):
        zonotope_from_interval([1.0], [0.0])


def test_interval_hull_examples(rng):
    lo, hi = interval_hull(Zonotope([1.0, 2.0]))
    assert_array_equal(lo, [1.0, 2.0])
    assert_array_equal(hi, [1.0, 2.0])
    lo, hi = interval_hull(Zonotope([0.0, 0.0], np.eye(2)))
    assert_array_equal(lo, [-1.0, -1.0])
    assert_array_equal(hi, [1.0, 1.0])
    Z = random_zonotope(rng, 3, 5)
    lo, hi = interval_hull(Z)
    pts = sample(Z, 10_000, rng)
    assert np.all(pts >= lo) and np.all(pts <= hi)
    V = sign_vertices(Z)
    assert_allclose(lo, V.min(axis=0), atol=1e-12)
    assert_allclose(hi, V.max(axis=0), atol=1e-12)


# -- support function --------------------------------------------------------


def test_support_value_examples():
    assert support_value(Zonotope([0.0, 0.0], np.eye(2)), [1.0, 0.0]) == 1.0
    assert support_value(Zonotope([2.0, 3.0]), [0.6, 0.8]) == pytest.approx(0.6 * 2 + 0.8 * 3)
    with pytest.raises(ValueError, match="zero direction"):
        support_value(Zonotope([0.0]), [0.0])


def test_support_dominates_samples(rng):
    Z = random_zonotope(rng, 4, 6)
    D = rng.normal(size=(64, 4))
    D /= np.linalg.norm(D, axis=1, keepdims=True)
    h = support_values(Z, D)
    pts = sample(Z, 1000, rng)
    assert np.all(pts @ D.T <= h + 1e-12)
    # exact value: maximum over sign vertices
    assert_allclose(h, (sign_vertices(Z) @ D.T).max(axis=0), rtol=1e-12, atol=1e-12)


# -- containment -------------------------------------------------------------


def test_contains_point_examples(rng):
    Z = random_zonotope(rng, 3, 5)
    assert contains_point(Z, Z.center, 0.0)
    assert not contains_point(Zonotope([0.0], [[1.0]]), [2.0], 0.0)
    assert contains_point(Zonotope([0.0], [[1.0]]), [1.0], 0.0)


def test_contains_point_constructive(rng):
    Z = random_zonotope(rng, 3, 6)
    for _ in range(50):
        beta = rng.uniform(-1, 1, 6)
        assert contains_point(Z, Z.center + Z.generators @ beta)


def test_contains_point_unique_coefficients(rng):
    # square invertible G: the coefficient vector is unique, so |b_i| = 1.5 is outside
    G = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    Z = Zonotope(rng.normal(size=3), G)
    for i in range(3):
        beta = rng.uniform(-0.9, 0.9, 3)
        beta[i] = 1.5
        assert not contains_point(Z, Z.center + G @ beta)
        t, _ = coefficient_norm(Z, Z.center + G @ beta)
        assert t == pytest.approx(1.5, abs=1e-7)


def test_contains_point_singleton_and_degenerate():
    assert contains_point(Zonotope([1.0, 2.0]), [1.0, 2.0], 0.0)
    assert not contains_point(Zonotope([1.0, 2.0]), [1.0, 2.1])
    seg = Zonotope([0.0, 0.0], [[1.0], [1.0]])
    assert contains_point(seg, [0.5, 0.5])
    assert not contains_point(seg, [0.5, 0.4])


def test_contains_point_dim_mismatch():
    with pytest.raises(ValueError):
        contains_point(Zonotope([0.0]), [0.0, 0.0])


# -- order reduction ---------------------------------------------------------


def test_reduce_order_noop():
    Z = Zonotope([0.0, 0.0], np.ones((2, 3)) + np.eye(2, 3))
    assert reduce_order(Z, 2) is Z


def test_reduce_order_1d_interval_exact():
    Z = reduce_order(Zonotope([0.5], [[1.0, 0.5, 0.25]]), 1)
    assert_array_equal(Z.center, [0.5])
    assert_array_equal(Z.generators, [[1.75]])


def test_reduce_order_membership(rng):
    Z = random_zonotope(rng, 2, 30)
    R = reduce_order(Z, 3)
    assert R.num_generators <= 6
    for x in sample(Z, 1000, rng):
        assert contains_point(R, x)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 25), st.floats(1, 4), st.integers(0, 2**32 - 1))
def test_reduce_order_support_dominance(n, p, order, seed):
    rng = np.random.default_rng(seed)
    Z = random_zonotope(rng, n, p)
    R = reduce_order(Z, order)
    assert R.num_generators <= np.ceil(order * n)
    D = rng.normal(size=(100, n))
    assert np.all(support_values(R, D) >= support_values(Z, D) - 1e-12 * (1 + np.abs(support_values(Z, D))))


# -- projection ---------------------------------------------------------------


def test_project_square():
    V = project(Zonotope([0.0, 0.0], np.eye(2)), (0, 1))
    assert len(V) == 4
    assert {tuple(v) for v in V} == {(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)}
    assert polygon_area(V) == pytest.approx(4.0)


def test_project_segment_and_point():
    V = project(Zonotope([1.0, 1.0], [[1.0], [2.0]]), (0, 1))
    assert len(V) == 2
    assert {tuple(v) for v in V} == {(0.0, -1.0), (2.0, 3.0)}
    assert len(project(Zonotope([1.0, 1.0, 5.0]), (2, 0))) == 1


def test_project_invalid_dims():
    with pytest.raises(ValueError):
        project(Zonotope([0.0, 0.0]), (0, 0))
    with pytest.raises(ValueError):
        project(Zonotope([0.0, 0.0]), (0, 2))


def _is_ccw(V):
    x, y = V[:, 0], V[:, 1]
    return np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)) > 0


def test_project_hexagon(rng):
    Z = Zonotope(rng.normal(size=2), rng.normal(size=(2, 3)))
    V = project(Z, (0, 1))
    assert len(V) == 6
    assert _is_ccw(V)
    hull = ConvexHull(sign_vertices(Z))
    assert_allclose(sorted(map(tuple, V)), sorted(map(tuple, hull.points[hull.vertices])), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 10), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_project_matches_sign_enumeration(p, n, seed):
    rng = np.random.default_rng(seed)
    Z = random_zonotope(rng, n, p)
    dims = tuple(rng.choice(n, 2, replace=False))
    V = project(Z, dims)
    pts = sign_vertices(Z)[:, list(dims)]
    if p == 1:
        assert len(V) == 2
        return
    hull = ConvexHull(pts)
    assert abs(polygon_area(V) - hull.volume) < 1e-9
    assert _is_ccw(V)
    assert polygon_contains(V, pts, 1e-9)


# -- matrix zonotopes -----------------------------------------------------------


def random_matzono(rng, shape, q, scale=1.0):
    return MatrixZonotope(rng.normal(size=shape), scale * rng.normal(size=(q,) + shape))


def test_matzono_affine_examples(rng):
    M = random_matzono(rng, (2, 3), 2)
    D = matzono_affine(M.center, M, "-")
    assert_array_equal(D.center, np.zeros((2, 3)))
    assert_array_equal(np.abs(D.generators), np.abs(M.generators))
    X = rng.normal(size=(2, 3))
    S = matzono_affine(X, MatrixZonotope(M.center), "+")
    assert S.is_singleton()
    assert_array_equal(S.center, X + M.center)
    for _ in range(20):
        W = sample_matrix(M, rng)
        assert contains_matrix(matzono_affine(X, M, "-"), X - W)
    with pytest.raises(ValueError):
        matzono_affine(np.zeros((3, 3)), M)


def test_matzono_mul_matrix(rng):
    M = random_matzono(rng, (2, 4), 3)
    assert matzono_mul_matrix(M, np.eye(4)) == M
    Z = matzono_mul_matrix(M, np.zeros((4, 2)))
    assert Z.is_singleton() and not np.any(Z.center)
    H = rng.normal(size=(4, 3))
    P = matzono_mul_matrix(M, H)
    for _ in range(20):
        beta = rng.uniform(-1, 1, 3)
        W = M.center + np.tensordot(beta, M.generators, axes=1)
        # same coefficients reproduce the product exactly
        assert_allclose(P.center + np.tensordot(beta, P.generators, axes=1), W @ H, atol=1e-12)
    with pytest.raises(ValueError):
        matzono_mul_matrix(M, np.eye(3))


def test_matzono_mul_zonotope_degenerate_cases(rng):
    C = rng.normal(size=(2, 3))
    Z = random_zonotope(rng, 3, 2)
    assert matzono_mul_zonotope(MatrixZonotope(C), Z) == linear_map(C, Z)
    M = random_matzono(rng, (2, 3), 2)
    c = rng.normal(size=3)
    P = matzono_mul_zonotope(M, Zonotope(c))
    assert_allclose(P.center, M.center @ c)
    assert_allclose(P.generators, np.column_stack([G @ c for G in M.generators]))
    with pytest.raises(ValueError):
        matzono_mul_zonotope(M, Zonotope([0.0, 0.0]))


def test_matzono_mul_zonotope_sampled(rng):
    M = random_matzono(rng, (2, 2), 1)
    Z = random_zonotope(rng, 2, 1)
    P = matzono_mul_zonotope(M, Z)
    for x in sample(Z, 500, rng):
        assert contains_point(P, sample_matrix(M, rng) @ x, 1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 3), st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_matzono_mul_zonotope_membership_closure(n, p, q, g, seed):
    rng = np.random.default_rng(seed)
    M = random_matzono(rng, (n, p), q)
    Z = random_zonotope(rng, p, g)
    P = matzono_mul_zonotope(M, Z)
    for x in sample(Z, 20, rng):
        assert contains_point(P, sample_matrix(M, rng) @ x, 1e-9)


def test_interval_matrix_of_examples(rng):
    C = rng.normal(size=(2, 2))
    I = interval_matrix_of(MatrixZonotope(C))
    assert_array_equal(I.lower, C)
    assert_array_equal(I.upper, C)
    G = rng.normal(size=(2, 3))
    I = interval_matrix_of(MatrixZonotope(np.zeros((2, 3)), G[None]))
    assert_array_equal(I.lower, -np.abs(G))
    assert_array_equal(I.upper, np.abs(G))


def test_interval_matrix_of_sound_and_tight(rng):
    M = random_matzono(rng, (3, 4), 5)
    I = interval_matrix_of(M)
    for _ in range(200):
        assert I.contains(sample_matrix(M, rng))
    # each entry's bound is attained by the sign pattern of that entry
    for i in range(3):
        for j in range(4):
            s = np.sign(M.generators[:, i, j])
            hi = M.center[i, j] + s @ M.generators[:, i, j]
            lo = M.center[i, j] - s @ M.generators[:, i, j]
            assert abs(hi - I.upper[i, j]) < 1e-12 and abs(lo - I.lower[i, j]) < 1e-12


# -- algebraic laws (hypothesis) ----------------------------------------------


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_minkowski_support_additivity(data):
    n = data.draw(st.integers(1, 4))
    Z1 = data.draw(zonotopes(n))
    Z2 = data.draw(zonotopes(n))
    d = data.draw(arrays(np.float64, n, elements=finite).filter(lambda v: np.linalg.norm(v) > 1e-3))
    lhs = support_value(Z1 + Z2, d)
    rhs = support_value(Z1, d) + support_value(Z2, d)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_linear_map_support_identity(data):
    n = data.draw(st.integers(1, 4))
    k = data.draw(st.integers(1, 4))
    Z = data.draw(zonotopes(n))
    M = data.draw(arrays(np.float64, (k, n), elements=finite))
    d = data.draw(arrays(np.float64, k, elements=finite).filter(lambda v: np.linalg.norm(v) > 1e-3))
    if not np.any(M.T @ d):
        return
    lhs = support_value(linear_map(M, Z), d)
    rhs = support_value(Z, M.T @ d)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs), np.abs(M).sum() * np.abs(Z.generators).sum())


# -- serialization ------------------------------------------------------------


def test_json_roundtrip_exact(rng):
    Z = Zonotope(rng.normal(size=3) / 3, rng.normal(size=(3, 4)) / 7)
    assert Zonotope.from_dict(json.loads(json.dumps(Z.to_dict()))) == Z
    S = Zonotope([0.1, 0.2])
    assert Zonotope.from_dict(json.loads(json.dumps(S.to_dict()))) == S
    M = random_matzono(rng, (2, 3), 4, 1 / 3)
    assert MatrixZonotope.from_dict(json.loads(json.dumps(M.to_dict()))) == M
    assert MatrixZonotope.from_dict(json.loads(json.dumps(MatrixZonotope(M.center).to_dict()))) == MatrixZonotope(M.center)
    I = interval_matrix_of(M)
    assert IntervalMatrix.from_dict(json.loads(json.dumps(I.to_dict()))) == I


def test_pickle_roundtrip(rng):
    import pickle

    Z = random_zonotope(rng, 2, 3)
    assert pickle.loads(pickle.dumps(Z)) == Z
    M = random_matzono(rng, (2, 2), 2)
    assert pickle.loads(pickle.dumps(M)) == M
