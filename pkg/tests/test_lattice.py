from math import gcd
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fqcrystal.lattice import (
    annihilator,
    int_det,
    lattice_index,
    matmul,
    smith_normal_form,
    unimodular_completion,
)


def _check_snf(A, r):
    assert matmul(matmul(r.U, A), r.V) == r.D
    assert abs(int_det(r.U)) == 1
    assert abs(int_det(r.V)) == 1
    d = r.invariant_factors
    nz = [x for x in d if x != 0]
    assert all(x > 0 for x in nz)
    assert d[:len(nz)] == nz  # zeros last
    for a, b in zip(nz, nz[1:]):
        assert b % a == 0
    for i, row in enumerate(r.D):
        for j, x in enumerate(row):
            if i != j:
                assert x == 0


def test_snf_diag_2_3():
    r = smith_normal_form([[2, 0], [0, 3]])
    assert r.invariant_factors == [1, 6]
    _check_snf([[2, 0], [0, 3]], r)


def test_snf_identity():
    I3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    r = smith_normal_form(I3)
    assert r.D == I3


def test_snf_2468():
    r = smith_normal_form([[2, 4], [6, 8]])
    assert r.invariant_factors == [2, 4]


def test_snf_rejects_zero_matrix():
    with pytest.raises(ValueError):
        smith_normal_form([[0, 0], [0, 0]])


def test_snf_big_integers_stay_exact():
    A = [[10 ** 30 + 1, 2], [3, 10 ** 25]]
    r = smith_normal_form(A)
    _check_snf(A, r)
    d = r.invariant_factors
    assert d[0] * d[1] == abs(int_det(A))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-20, 20), min_size=3, max_size=3), min_size=2, max_size=3))
def test_snf_properties(A):
    if all(x == 0 for row in A for x in row):
        return
    r = smith_normal_form(A)
    _check_snf(A, r)
    assert r.invariant_factors[0] == reduce(gcd, (abs(x) for row in A for x in row))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=3, max_size=3))
def test_snf_product_is_abs_det(A):
    det = int_det(A)
    if det == 0:
        return
    d = smith_normal_form(A).invariant_factors
    assert int(np.prod(d)) == abs(det)


def test_completion_examples():
    J = unimodular_completion([2, 1])
    assert matmul(J, [[2], [1]]) == [[0], [1]]
    assert abs(int_det(J)) == 1
    assert unimodular_completion([1]) == [[1]]
    J = unimodular_completion([3, 5, 7])
    assert matmul(J, [[3], [5], [7]]) == [[0], [0], [1]]
    assert abs(int_det(J)) == 1


def test_completion_not_primitive():
    with pytest.raises(ValueError, match="gamma not primitive"):
        unimodular_completion([2, 4])


def test_completion_random_primitive():
    rng = np.random.default_rng(7)
    done = 0
    while done < 200:
        m = int(rng.integers(1, 5))
        g = [int(x) for x in rng.integers(1, 51, size=m)]
        if reduce(gcd, g) != 1:
            continue
        J = unimodular_completion(g)
        assert matmul(J, [[x] for x in g]) == [[0]] * (m - 1) + [[1]]
        assert abs(int_det(J)) == 1
        done += 1


def test_annihilator_examples():
    a = annihilator([0.3], [2, 1], 1.6)
    np.testing.assert_allclose(a.alpha, [0.3, 1.0], rtol=0, atol=1e-14)
    a = annihilator([1.0], [1, 1], 2.0)
    np.testing.assert_allclose(a.alpha, [1.0, 1.0], rtol=0, atol=1e-14)


def test_annihilator_residuals_n2():
    b, g = [0.2, 0.5], [1, 1, 1]
    delta = 0.2 + 0.5 + 1
    a = annihilator(b, g, delta)
    M = np.vstack([np.eye(2), -np.array(b)[None, :]])
    assert np.abs(a.alpha @ M).max() <= 1e-12
    assert abs(a.alpha @ np.array(g) - delta) <= 1e-12 * delta


def test_lattice_index():
    assert lattice_index([[2, 0], [0, 2]]) == 4
    assert lattice_index([[1, 0], [0, 1]]) == 1
    assert lattice_index([[1, 2], [2, 4]]) == 0
