from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fqcrystal.genericity import is_generic
from fqcrystal.lattice import int_det
from fqcrystal.polyring import (
    LaurentMap,
    LaurentPoly,
    TrigMapRep,
    eval_laurent,
    eval_trig,
    facial_restriction,
    gl_transform,
    is_minimal,
    minimal_representation,
    monomial_substitute,
    parse_number,
    spectrum_trig,
)
from fqcrystal.polytope import angle_direction

F = Fraction
z1 = LaurentPoly.variable(0, 2)
z2 = LaurentPoly.variable(1, 2)
SINE = z1 - z2 ** 2
KS_DISPLAYED = 1 - z1 * F(1, 3) + z2 ** 2 * F(1, 3) - z1 * z2 ** 2


def test_parse_number():
    assert parse_number("1/3") == (F(1, 3), True)
    assert parse_number("7") == (F(7), True)
    assert parse_number("0.3") == (0.3, False)
    assert parse_number(2.0) == (F(2), True)


def test_eval_examples():
    assert eval_laurent(SINE, (1, 1)) == 0
    assert eval_laurent(KS_DISPLAYED, (1, 1)) == 0
    assert eval_laurent(LaurentPoly.monomial((-1,)), (2,)) == pytest.approx(0.5)
    with pytest.raises(ZeroDivisionError):
        eval_laurent(LaurentPoly.monomial((-1,)), (0,))


def test_eval_vectorised_matches_scalar():
    rng = np.random.default_rng(0)
    Z = rng.normal(size=(7, 2)) + 1j * rng.normal(size=(7, 2))
    vec = eval_laurent(KS_DISPLAYED, Z)
    for z, v in zip(Z, vec):
        assert abs(eval_laurent(KS_DISPLAYED, z) - v) < 1e-12


def test_eval_trig_examples():
    P = TrigMapRep(LaurentMap([SINE]), [[1], [-0.3]])
    assert abs(eval_trig(P, [0.0])[0]) < 1e-15
    P = TrigMapRep(LaurentMap([LaurentPoly.variable(0, 1) - 1]), [[1]])
    assert abs(eval_trig(P, [0.5])[0] - (-2)) < 1e-15
    with pytest.raises(OverflowError, match="exponent magnitude"):
        eval_trig(P, [200j])


def test_trigmap_validation():
    with pytest.raises(ValueError):
        TrigMapRep(LaurentMap([SINE]), [[1]])
    with pytest.raises(ValueError):
        TrigMapRep(LaurentMap([SINE, SINE]), [[1, 2], [2, 4]])


def test_spectrum_trig_examples():
    P = TrigMapRep(LaurentMap([SINE]), [[1], [-0.3]])
    freqs = sorted(float(w[0]) for w, _j, _c in spectrum_trig(P))
    assert freqs == pytest.approx([-0.6, 1.0])
    P = TrigMapRep(LaurentMap([LaurentPoly.monomial((2, 1), 3)]), [[1], [-0.3]])
    assert len(spectrum_trig(P)) == 1


def test_spectrum_trig_merges_collisions():
    # z1^3 and z2^10 share the frequency 3 when b = 3/10
    q = LaurentPoly.monomial((3, 0)) + LaurentPoly.monomial((0, -10), 2)
    P = TrigMapRep(LaurentMap([q]), [[1], ["-3/10"]])
    spec = spectrum_trig(P)
    assert len(spec) == 1 and spec[0][2] == pytest.approx(3)


def test_facial_restriction_table_rows():
    a = {(0, 0): 2, (1, 0): 3, (0, 1): 5, (1, 1): 7}
    q = LaurentPoly(a, 2)
    f = facial_restriction(q, angle_direction(0.0))
    assert f == LaurentPoly({(1, 0): 3, (1, 1): 7}, 2)
    f = facial_restriction(q, angle_direction(0.3))
    assert f == LaurentPoly({(1, 1): 7}, 2)
    f = facial_restriction(q, (-1, -1))
    assert f == LaurentPoly({(1, 1): 7}, 2)
    mono = LaurentPoly.monomial((2, -1), 4)
    for u in [(1, 0), (0.3, -2.0), (-1, -1)]:
        assert facial_restriction(mono, u) == mono
    with pytest.raises(ValueError):
        facial_restriction(q, (0, 0))


def test_monomial_substitute_examples():
    assert monomial_substitute(SINE, [[1, 0], [0, 1]]) == SINE
    w = monomial_substitute(LaurentPoly.variable(0, 1), [[2]])
    assert w == LaurentPoly.monomial((2,))
    # z1 -> w^2, z2 -> w^-1 after the KS w-substitution
    q = monomial_substitute(LaurentPoly.monomial((1, 0)) - LaurentPoly.monomial((0, 2)), [[2], [-1]])
    assert q == LaurentPoly.monomial((2,)) - LaurentPoly.monomial((-2,))


def test_gl_transform_examples():
    assert gl_transform(SINE, [[1, 0], [0, 1]]) == SINE
    A = [[1, 2], [0, 1]]
    Ainv = [[1, -2], [0, 1]]
    assert gl_transform(gl_transform(KS_DISPLAYED, A), Ainv) == KS_DISPLAYED
    with pytest.raises(ValueError, match="unimodular"):
        gl_transform(SINE, [[2, 0], [0, 1]])


def test_gl_transform_value_identity():
    A = [[2, 1], [1, 1]]
    Q2 = gl_transform(KS_DISPLAYED, A)
    w = np.array([0.7 + 0.2j, -1.1 + 0.4j])
    z = np.array([np.prod(w ** np.array([A[j][i] for j in range(2)])) for i in range(2)])
    assert abs(eval_laurent(Q2, w) - eval_laurent(KS_DISPLAYED, z)) < 1e-12


def test_ks_after_automorphism():
    # z1 -> 1/z1 followed by clearing z1 turns the model polynomial into the displayed form
    q = z1 - F(1, 3) - z2 ** 2 + z1 * z2 ** 2 * F(1, 3)
    assert gl_transform(q, [[-1, 0], [0, 1]]).shift((1, 0)) == KS_DISPLAYED


def test_is_minimal_examples():
    assert is_minimal(LaurentMap([z1 + z2]))
    sq = LaurentPoly.monomial((2, 0)) + LaurentPoly.monomial((0, 2))
    assert not is_minimal(sq)
    ks = LaurentMap([KS_DISPLAYED])
    assert not is_minimal(ks)
    halved = monomial_substitute(KS_DISPLAYED, [[1, 0], [0, 1]])
    P = TrigMapRep(LaurentMap([halved]), [[1], ["-3/10"]])
    Pm = minimal_representation(P)
    assert is_minimal(Pm.Q)
    assert sorted(float(w[0]) for w, _, _ in spectrum_trig(Pm)) == pytest.approx(
        sorted(float(w[0]) for w, _, _ in spectrum_trig(P)))


UNIMOD = [
    [[1, 0], [0, 1]], [[1, 1], [0, 1]], [[2, 1], [1, 1]], [[0, 1], [1, 0]], [[1, -3], [0, 1]],
    [[3, 2], [1, 1]], [[1, 0], [5, 1]], [[-1, 0], [0, 1]], [[2, 3], [1, 2]], [[5, 3], [3, 2]],
]


@pytest.mark.parametrize("A", UNIMOD)
def test_gl_invariance_of_minimality_and_genericity(A):
    assert abs(int_det(A)) == 1
    lin = LaurentMap([1 + 2 * z1 + 3 * z2, 4 + 5 * z1 + 7 * z2])
    for Q in [lin, LaurentMap([KS_DISPLAYED])]:
        assert is_minimal(gl_transform(Q, A)) == is_minimal(Q)
    g0 = is_generic(lin).verdict
    assert is_generic(gl_transform(lin, A)).verdict == g0


terms = st.dictionaries(st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
                        st.integers(-5, 5).filter(bool), min_size=1, max_size=5)


@settings(max_examples=50, deadline=None)
@given(terms, terms)
def test_arithmetic_matches_evaluation(a, b):
    p, q = LaurentPoly(a, 2), LaurentPoly(b, 2)
    z = np.array([0.8 + 0.3j, -0.5 + 1.1j])
    pz, qz = eval_laurent(p, z), eval_laurent(q, z)
    assert abs(eval_laurent(p * q, z) - pz * qz) < 1e-9 * (1 + abs(pz * qz))
    assert abs(eval_laurent(p + q, z) - (pz + qz)) < 1e-9 * (1 + abs(pz) + abs(qz))


@settings(max_examples=50, deadline=None)
@given(terms)
def test_torus_conjugate(a):
    p = LaurentPoly(a, 2)
    z = np.exp(2j * np.pi * np.array([0.17, 0.61]))
    assert abs(eval_laurent(p.torus_conjugate(), z) - np.conj(eval_laurent(p, z))) < 1e-10
