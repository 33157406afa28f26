import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fqcrystal.constructions import build_example1, enumerate_roots_example1, ks_spec, lambda_p0
from fqcrystal.polyring import LaurentMap, LaurentPoly, TrigMapRep
from fqcrystal.polytope import mixed_volume
from fqcrystal.rootfind import (
    RootOnContourError,
    continuation_track,
    density_estimate,
    expected_density,
    laurent_system_roots_2d,
    real_roots_1d,
    torus_roots_univariate,
    verify_real_rooted,
    winding_number,
)

TAU = 2j * np.pi


def comb(z):
    return np.exp(TAU * np.asarray(z)) - 1


def trig1(coeffs):
    """n = m = 1 trig polynomial with integer frequencies 0..len-1."""
    q = LaurentPoly({(k,): c for k, c in enumerate(coeffs) if c != 0}, 1)
    return TrigMapRep(LaurentMap([q]), [[1]])


def test_winding_examples():
    box = (-0.5 + 1e-3, 0.5 - 2e-3, -1, 1)
    assert winding_number(comb, box) == 1
    assert winding_number(lambda z: comb(z) ** 2, box) == 2
    y = -np.log(2) / (2 * np.pi)
    assert winding_number(lambda z: np.exp(TAU * np.asarray(z)) - 2, (-0.3, 0.3, y - 0.2, y + 0.2)) == 1


def test_winding_root_on_contour_retries():
    # a zero exactly on the left edge: the box is dilated and the count still succeeds
    n = winding_number(comb, (0.0, 0.5, -1, 1))
    assert n in (0, 1)
    with pytest.raises(RootOnContourError):
        winding_number(lambda z: np.zeros_like(np.asarray(z, dtype=complex)), (0, 1, -1, 1))


def test_real_roots_comb():
    roots = real_roots_1d(comb, (-2.5, 2.5), h=1.0)
    pts = sorted(r.real for r, _ in roots)
    assert np.allclose(pts, [-2, -1, 0, 1, 2], atol=1e-9)
    assert all(k == 1 for _, k in roots)
    roots = real_roots_1d(lambda z: comb(z) ** 2, (-2.5, 2.5), h=1.0,
                          dp=lambda z: 2 * comb(z) * TAU * np.exp(TAU * np.asarray(z)))
    assert sorted(k for _, k in roots) == [2] * 5


def test_real_roots_ks_matches_parametric():
    P = build_example1(ks_spec())
    roots = real_roots_1d(P, (0, 10))
    assert sum(k for _, k in roots) == 16
    assert max(abs(r.imag) for r, _ in roots) < 1e-8
    par = enumerate_roots_example1(ks_spec(), 10).points[:, 0]
    par = np.sort(par[(par >= 0) & (par < 10)])
    assert np.allclose(np.sort([r.real for r, _ in roots]), par, atol=1e-8)


def test_torus_roots_examples():
    z = LaurentPoly.variable(0, 1)
    r = torus_roots_univariate(z ** 2 - 1)
    assert sorted(np.round([c.real for c, _ in r], 12)) == [-1, 1] and all(k == 1 for _, k in r)
    w4 = z ** 2 - LaurentPoly.monomial((-2,))
    r = torus_roots_univariate(w4)
    got = sorted((round(c.real, 9) + 0.0, round(c.imag, 9) + 0.0) for c, _ in r)
    assert got == sorted([(1, 0), (0, 1), (-1, 0), (0, -1)])
    r = torus_roots_univariate((z - 1) ** 2)
    assert len(r) == 1 and r[0][1] == 2 and abs(r[0][0] - 1) < 1e-7
    with pytest.raises(ValueError):
        torus_roots_univariate(z)


def test_torus_roots_count_matches_winding():
    rng = np.random.default_rng(5)
    for _ in range(5):
        # a product of unimodular-root factors and one factor off the circle
        ang = rng.uniform(0, 1, 3)
        z = LaurentPoly.variable(0, 1)
        q = (z - complex(np.exp(TAU * ang[0]))) * (z - complex(np.exp(TAU * ang[1]))) * (z - 1.7)
        r = torus_roots_univariate(q)
        on_circle = sum(k for _, k in r)
        assert on_circle == 2
        f = lambda w: q(np.exp(TAU * np.asarray(w))[..., None])
        shift = 0.123
        cnt = winding_number(f, (shift, shift + 1, -0.01, 0.01))
        assert cnt == on_circle


def test_laurent_system_2d_bernshtein():
    z1, z2 = LaurentPoly.variable(0, 2), LaurentPoly.variable(1, 2)
    Q = LaurentMap([1 + 2 * z1 + 3 * z2 + 5 * z1 * z2, 2 - z1 + 4 * z2 + 3 * z1 * z2])
    roots = laurent_system_roots_2d(Q)
    assert sum(k for _, k in roots) == mixed_volume(Q.newton_polytopes()) == 2
    for p, _ in roots:
        assert np.max(np.abs(Q(p))) < 1e-9


def test_continuation_examples():
    spec = ks_spec()
    x, path = continuation_track(spec, [0.0], [])
    assert x[0] == 0.0
    x, path = continuation_track(spec, [0.0], np.linspace(0, 1, 21)[1:])
    P1 = build_example1(spec)
    assert abs(P1([x[0]])[0]) < 1e-12
    par = enumerate_roots_example1(spec, 3).points[:, 0]
    assert np.min(np.abs(par - x[0])) < 1e-8


def test_continuation_endpoints_distinct():
    spec = ks_spec()
    starts = lambda_p0(spec).points(2.0)[:, 0]
    ends = [continuation_track(spec, [s], np.linspace(0, 1, 11)[1:])[0][0] for s in starts]
    assert len(starts) == len(ends)
    assert np.min(np.diff(np.sort(ends))) > 1e-3


def test_density_examples():
    d = density_estimate(np.arange(-100, 101), 100.0001)
    assert d.count == 201 and d.density == pytest.approx(1.005, abs=1e-4)
    g = np.stack(np.meshgrid(np.arange(-60, 61), np.arange(-60, 61)), -1).reshape(-1, 2)
    assert density_estimate(g, 50).density == pytest.approx(1, rel=0.01)
    assert expected_density(build_example1(ks_spec())) == pytest.approx(1.6)
    pts = enumerate_roots_example1(ks_spec(), 1000).points
    assert density_estimate(pts, 1000, expected=1.6).relative_gap < 0.01


def test_verify_real_rooted():
    comb_p = trig1([-1, 1])
    rep = verify_real_rooted(comb_p, 20)
    assert rep["passed"] and rep["expected"] == 1
    off = trig1([-2, 1])
    rep = verify_real_rooted(off, 20)
    assert not rep["passed"] and rep["real_root_count"] == 0
    rep = verify_real_rooted(build_example1(ks_spec()), 50)
    assert rep["passed"] and rep["max_abs_imag"] < 1e-8


def test_real_roots_match_companion():
    rng = np.random.default_rng(11)
    for _ in range(20):
        c = rng.normal(size=4) + 1j * rng.normal(size=4)
        P = trig1(list(c))
        roots = real_roots_1d(P, (0, 1), h=4.0)
        # companion: zeros w of sum c_k w^k, then x = log(w) / (2 pi i) in [0, 1)
        w = np.roots(c[::-1])
        x = np.log(w) / TAU
        x = np.where(x.real < 0, x + 1, x)
        x = x[np.abs(x.imag) <= 4.0]
        got = np.sort_complex(np.array([r for r, _ in roots]))
        want = np.sort_complex(x)
        assert len(got) == len(want)
        for g_ in got:
            assert np.min(np.abs(want - g_)) < 1e-8


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=4, max_size=4), st.floats(0.15, 0.85), st.floats(-0.5, 0.5))
def test_winding_additivity(c, sx, sy):
    coeffs = np.array(c) + 0.3
    coeffs[-1] = 1.0
    f = lambda z: np.exp(TAU * np.multiply.outer(np.asarray(z), np.arange(4))) @ coeffs
    x0, x1, y0, y1 = 0.0, 1.0, -1.0, 1.0
    try:
        whole = winding_number(f, (x0, x1, y0, y1))
        parts = [
            winding_number(f, (x0, sx, y0, sy)), winding_number(f, (sx, x1, y0, sy)),
            winding_number(f, (x0, sx, sy, y1)), winding_number(f, (sx, x1, sy, y1)),
        ]
    except RootOnContourError:
        return
    assert whole == sum(parts)
