"""Acceptance criteria 1 to 12.

Each test prints one ``criterion N: PASS|FAIL`` line (also collected into the
pytest terminal summary) and then asserts the same condition.  Runtimes are
part of each criterion and are measured with ``time.perf_counter``.
"""
import time
from fractions import Fraction

import numpy as np

from fqcrystal.constructions import (
    CutProjectSpec,
    build_example1,
    cutproject_fb_closed,
    cutproject_frequency,
    cutproject_multiset,
    detected_spectrum,
    enumerate_roots_example1,
    fourier_coefficient,
    fourier_coefficients,
    ks_spec,
    spectrum_coefficient,
    support_bound,
)
from fqcrystal.genericity import GENERIC, is_generic
from fqcrystal.lattice import int_det
from fqcrystal.measures import (
    DiscreteMeasure,
    Multiset,
    TestFunction,
    affine_transform,
    comb_spectrum,
    dirac_comb,
    dual_spectrum,
    empirical_fourier_bohr,
    growth_exponent,
    lattice_psf_spectrum,
    multiset_distance,
    poisson_check,
    spectrum_rational_approx,
    vmt1_measure,
)
from fqcrystal.polyring import LaurentMap, LaurentPoly, gl_transform, is_minimal
from fqcrystal.polytope import convex_hull, is_unfolded, minkowski_sum, mixed_volume
from fqcrystal.rootfind import RootOnContourError, real_roots_1d, winding_number

LINES = []
z1, z2 = LaurentPoly.variable(0, 2), LaurentPoly.variable(1, 2)
SQUARE = [(0, 0), (1, 0), (0, 1), (1, 1)]


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    LINES.append(line)
    print(line, flush=True)
    assert ok, line


# ----------------------------------------------------------------------------


def test_criterion_01_square_mixed_volume():
    mixed_volume([SQUARE, SQUARE])  # warm-up import paths
    times = []
    for _ in range(5):
        t0 = time.perf_counter()
        v = mixed_volume([SQUARE, SQUARE])
        times.append(time.perf_counter() - t0)
    dt = float(np.median(times))
    ok = isinstance(v, int) and v == 2 and dt < 1e-3
    report(1, ok, f"V = {v!r} (exact int), median runtime {dt * 1e3:.3f} ms (< 1 ms)")


def _linear(a, b, c, d, e, f):
    return LaurentMap([a * z1 + b * z2 - e, c * z1 + d * z2 - f])


def _square(a, b):
    mk = lambda c: c[0] + c[1] * z1 + c[2] * z2 + c[3] * z1 * z2
    return LaurentMap([mk(a), mk(b)])


def _nonzero_ints(rng, k, lo=-4, hi=4):
    vals = [v for v in range(lo, hi + 1) if v]
    return [int(x) for x in rng.choice(vals, size=k)]


def test_criterion_02_genericity_conditions():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    dis_lin = dis_sq = 0
    nongen_lin = nongen_sq = 0
    for _ in range(200):
        a, b, c, d, e, f = _nonzero_ints(rng, 6)
        want = a * d - b * c != 0 and d * e - b * f != 0 and -c * e + a * f != 0
        got = is_generic(_linear(a, b, c, d, e, f)).verdict == GENERIC
        dis_lin += got != want
        nongen_lin += not want
    for _ in range(200):
        a = _nonzero_ints(rng, 4, -3, 3)
        b = _nonzero_ints(rng, 4, -3, 3)
        a00, a10, a01, a11 = a
        b00, b10, b01, b11 = b
        want = all(x != 0 for x in (a10 * b11 - a11 * b10, a01 * b11 - a11 * b01,
                                    a00 * b01 - a01 * b00, a00 * b10 - a10 * b00))
        got = is_generic(_square(a, b)).verdict == GENERIC
        dis_sq += got != want
        nongen_sq += not want
    dt = time.perf_counter() - t0
    ok = dis_lin == 0 and dis_sq == 0 and dt < 5
    report(2, ok, f"disagreements linear {dis_lin}/200 ({nongen_lin} degenerate), "
                  f"square {dis_sq}/200 ({nongen_sq} degenerate), {dt:.2f} s (< 5 s)")


def test_criterion_03_bernshtein_count():
    from fqcrystal.rootfind import laurent_system_roots_2d

    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    rows, done = [], 0
    while done < 10:
        comps = []
        for _ in range(2):
            k = int(rng.integers(3, 6))
            ex = set()
            while len(ex) < k:
                ex.add(tuple(int(x) for x in rng.integers(-2, 3, size=2)))
            comps.append(LaurentPoly({e: complex(*rng.normal(size=2)) for e in ex}, 2))
        Q = LaurentMap(comps)
        mv = mixed_volume(Q.newton_polytopes())
        if mv == 0 or is_generic(Q).verdict != GENERIC:
            continue
        count = sum(k for _, k in laurent_system_roots_2d(Q))
        rows.append((mv, count))
        done += 1
    dt = time.perf_counter() - t0
    ok = all(mv == c for mv, c in rows) and dt < 30
    report(3, ok, f"(mixed volume, roots) = {rows}, {dt:.2f} s (< 30 s)")


def test_criterion_04_poisson():
    t0 = time.perf_counter()
    comb = dirac_comb(40)
    self_dual = poisson_check(comb, comb_spectrum(40), [TestFunction()], tol=1e-10)
    d_self = self_dual["checks"][0]["discrepancy"]
    worst = 0.0
    passes = self_dual["pass"]
    pairs = [(2.0, 0.3), (0.5, -0.1), (np.sqrt(3), 0.7)]
    tests = [TestFunction(), TestFunction("modulated-gaussian", center=0.4, sigma=1.3, xi=0.25)]
    for M, y in pairs:
        rep = poisson_check(affine_transform(comb, M, y), dual_spectrum(comb_spectrum(40), M, y), tests, tol=1e-10)
        passes &= rep["pass"]
        worst = max(worst, max(c["discrepancy"] for c in rep["checks"]))
    comb2 = dirac_comb(12, 2)
    M2, y2 = np.array([[1.0, 0.5], [0.0, 2.0]]), np.array([0.2, -0.3])
    rep = poisson_check(affine_transform(comb2, M2, y2), dual_spectrum(comb_spectrum(12, 2), M2, y2),
                        [TestFunction("gaussian", center=[0.1, 0.2], sigma=1.0)], tol=1e-10)
    passes &= rep["pass"]
    worst = max(worst, rep["checks"][0]["discrepancy"])
    dt = time.perf_counter() - t0
    ok = passes and d_self < 1e-10 and worst < 1e-10 and dt < 1
    report(4, ok, f"self-dual {d_self:.1e}, transformed pairs max {worst:.1e} (< 1e-10), {dt:.2f} s (< 1 s)")


def test_criterion_05_ks_instance():
    spec = ks_spec()
    t0 = time.perf_counter()
    contour = real_roots_1d(build_example1(spec), (-500, 500))
    max_im = max(abs(z.imag) for z, _ in contour)
    count = sum(k for _, k in contour)
    density = count / 1000
    par = np.sort(enumerate_roots_example1(spec, 500, half_open=True).points[:, 0])
    con = np.sort([z.real for z, _ in contour])
    agree = len(par) == len(con) and float(np.max(np.abs(par - con))) < 1e-8
    agree_err = float(np.max(np.abs(par - con))) if len(par) == len(con) else float("inf")
    f0 = fourier_coefficient(spec, [0, 0])
    dt = time.perf_counter() - t0
    ok = (max_im < 1e-8 and abs(density - 1.6) / 1.6 < 0.01 and agree
          and abs(f0 - 1.6) <= 1e-6 and dt < 60)
    report(5, ok, f"(a) max|Im| {max_im:.1e}; (b) density {density:.4f} vs 1.6, parametric/contour "
                  f"max diff {agree_err:.1e} over {count} roots; (c) F(0) = {f0.real:.12f}; {dt:.1f} s (< 60 s)")


def test_criterion_06_spectrum_vanishing():
    spec = ks_spec()
    t0 = time.perf_counter()
    pos = np.array([[i, j] for i in range(1, 6) for j in range(1, 6)])
    vneg = np.abs(fourier_coefficients(spec, -pos)).max()
    vpos = np.abs(fourier_coefficients(spec, pos)).max()
    counts = {}
    for r in (1, 2, 5, 10):
        labels, _f, _c = detected_spectrum(spec, r)
        counts[r] = (len(labels), support_bound(spec, r))
    dt = time.perf_counter() - t0
    ok = vneg < 1e-8 and vpos < 1e-8 and all(c <= g for c, g in counts.values()) and dt < 60
    report(6, ok, f"max |F| on l <= -1 grid {vneg:.1e}, on l >= 1 grid {vpos:.1e} (< 1e-8); "
                  f"(count, g(r)) = {{{', '.join(f'{r}: ({c}, {g:g})' for r, (c, g) in counts.items())}}}; "
                  f"{dt:.1f} s (< 60 s)")


def test_criterion_07_diffraction_cross_validation():
    spec = ks_spec()
    t0 = time.perf_counter()
    labels, freqs, coef = detected_spectrum(spec, 4)
    order = np.argsort(-np.abs(coef))
    chosen, seen = [], set()
    for i in order:
        key = round(float(freqs[i, 0]), 9)
        if key not in seen:
            seen.add(key)
            chosen.append(labels[i])
        if len(chosen) == 20:
            break
    # contour values; b = 0.3 is rational so labels l + k (3, 10) share a frequency
    ref = np.array([spectrum_coefficient(spec, l) for l in chosen])
    omegas = np.array([np.asarray(l) @ spec.M for l in chosen])
    R = 1e4
    pts = enumerate_roots_example1(spec, R + 1).points
    mu = DiscreteMeasure(pts, np.ones(len(pts)), R + 1)
    errs = {}
    for r in (1e2, 1e3, 1e4):
        emp = np.array([empirical_fourier_bohr(mu, w, r) for w in omegas])
        errs[r] = float(np.abs(emp - ref).max())
    C = errs[1e4] * 1e4
    monotone = errs[1e2] > errs[1e3] > errs[1e4]
    dt = time.perf_counter() - t0
    ok = errs[1e4] <= 5 / 1e4 and C <= 50 and monotone and dt < 300
    report(7, ok, f"max error r=1e2 {errs[1e2]:.2e}, 1e3 {errs[1e3]:.2e}, 1e4 {errs[1e4]:.2e} "
                  f"(<= 5/r = 5e-4), fitted C = {C:.2f} (<= 50), monotone {monotone}, {dt:.1f} s (< 300 s)")


def test_criterion_08_cut_and_project():
    cp = CutProjectSpec.from_tan(np.sqrt(2), np.sqrt(3) / 5)
    t0 = time.perf_counter()
    r = 1e4
    t1 = cutproject_multiset(cp, 1, (-r, r))
    t2 = cutproject_multiset(cp, 2, (-r, r))
    mu1 = DiscreteMeasure(t1, np.ones(len(t1)), r)
    labels = [(1, 0), (0, 1), (1, 1), (2, 1), (1, -1), (0, 2), (3, 1), (-1, 2), (2, -1), (1, 2)]
    err = max(abs(empirical_fourier_bohr(mu1, cutproject_frequency(cp, l), r) - cutproject_fb_closed(cp, 1, *l))
              for l in labels)
    both = DiscreteMeasure(np.concatenate([t1, t2]), np.ones(len(t1) + len(t2)), r)
    fb0 = empirical_fourier_bohr(both, 0.0, r).real
    dt = time.perf_counter() - t0
    ok = err <= 10 / r and abs(fb0 - np.sin(cp.theta)) <= 1e-3 and dt < 120
    report(8, ok, f"max error over 10 frequencies {err:.2e} (<= 10/r = 1e-3), F_B(0) = {fb0:.6f} vs "
                  f"sin(theta) = {np.sin(cp.theta):.6f} (+-1e-3), {dt:.1f} s (< 120 s)")


def test_criterion_09_rational_approximants():
    t0 = time.perf_counter()
    sine = LaurentMap([z1 - z2 ** 2])
    got = spectrum_rational_approx(sine, [["1"], ["-1/2"]], 20)
    oracle = lattice_psf_spectrum([0, 0.5, 1, 1.5], [1, 1, 1, 1], 2.0, 20)
    same_grid = got.frequencies.shape == oracle.frequencies.shape and np.allclose(
        got.frequencies, oracle.frequencies, rtol=0, atol=1e-12)
    atom_err = float(np.abs(got.coefficients - oracle.coefficients).max()) if same_grid else float("inf")

    spec = ks_spec()
    Q = build_example1(spec).Q
    labels = [(0, 0), (1, -1), (2, -1), (1, -2), (3, -2), (2, -3), (-1, 1), (-1, 2), (4, -3), (1, -3)]
    ref = {l: spectrum_coefficient(spec, l) for l in labels}
    table = []
    for b in ("31/100", "61/200", "151/500", "301/1000"):
        bf = float(Fraction(b))
        tab = spectrum_rational_approx(Q, [["1"], ["-" + b]], 6)
        gap = max(abs(tab.at(l[0] - bf * l[1]) - ref[l]) for l in labels)
        table.append((b, tab.meta["degree"], gap))
    for b, deg, gap in table:
        print(f"  b = {b:>8}  degree {deg:5d}  max atom gap {gap:.3e}")
    gaps = [g for _, _, g in table]
    dt = time.perf_counter() - t0
    ok = atom_err < 1e-10 and gaps[-1] < 1e-2 and all(x > y for x, y in zip(gaps, gaps[1:])) and dt < 120
    report(9, ok, f"w^4 = 1 case atom error {atom_err:.1e} (< 1e-10); b-sequence gaps "
                  f"{', '.join(f'{b}: {g:.1e}' for b, _, g in table)} (final < 1e-2); {dt:.1f} s (< 120 s)")


def test_criterion_10_unfoldedness():
    t0 = time.perf_counter()
    folded = not is_unfolded([SQUARE, SQUARE])[0]
    rng = np.random.default_rng(10)
    hits = 0
    for _ in range(20):
        A = [tuple(np.array(p) + rng.normal(scale=1e-2, size=2)) for p in SQUARE]
        B = [tuple(np.array(p) + rng.normal(scale=1e-2, size=2)) for p in SQUARE]
        hits += bool(is_unfolded([A, B])[0])
    dt = time.perf_counter() - t0
    ok = folded and hits == 20 and dt < 1
    report(10, ok, f"squares folded {folded}, perturbed unfolded {hits}/20, {dt:.2f} s (< 1 s)")


def _rand_poly_pts(rng, k=4):
    return [tuple(int(x) for x in rng.integers(-3, 4, size=2)) for _ in range(k)]


def test_criterion_11_property_suites():
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    # metric axioms on 50 windowed triples (half on the line, half in the plane)
    metric_bad = 0
    for i in range(50):
        dim = 1 if i < 25 else 2
        a, b, c = (Multiset(rng.uniform(-5, 5, size=(6, dim))) for _ in range(3))
        w = 5.0
        dab, dba = multiset_distance(a, b, w), multiset_distance(b, a, w)
        metric_bad += not (dab == dba and multiset_distance(a, a, w) == 0 and dab > 0
                           and multiset_distance(a, c, w) <= dab + multiset_distance(b, c, w) + 1e-12)
    # mixed volume symmetry and multilinearity on 20 triples
    mv_bad = 0
    for _ in range(20):
        A, B, C = (_rand_poly_pts(rng) for _ in range(3))
        sym = mixed_volume([A, B]) == mixed_volume([B, A])
        lin = mixed_volume([minkowski_sum(A, C), B]) == mixed_volume([A, B]) + mixed_volume([C, B])
        mv_bad += not (sym and lin)
    # winding-number additivity on 20 partitions
    wind_bad = tried = 0
    while tried < 20:
        c = rng.normal(size=4) + 1j * rng.normal(size=4)
        f = lambda z, c=c: np.exp(2j * np.pi * np.multiply.outer(np.asarray(z), np.arange(4))) @ c
        sx, sy = rng.uniform(0.1, 0.9), rng.uniform(-0.8, 0.8)
        try:
            whole = winding_number(f, (0.0, 1.0, -1.5, 1.5))
            parts = [winding_number(f, r) for r in ((0.0, sx, -1.5, sy), (sx, 1.0, -1.5, sy),
                                                     (0.0, sx, sy, 1.5), (sx, 1.0, sy, 1.5))]
        except RootOnContourError:
            continue
        tried += 1
        wind_bad += whole != sum(parts)
    # gl_transform invariance of genericity and minimality on 10 unimodular matrices
    gl_bad = done = 0
    lin = _linear(1, 2, 3, 4, 5, 6)
    deg = _linear(1, 2, 2, 4, 5, 6)
    sq = LaurentMap([z1 ** 2 + z2 ** 2 + 1, z1 - z2 ** 2])
    while done < 10:
        A = [[int(x) for x in rng.integers(-3, 4, size=2)] for _ in range(2)]
        if abs(int_det(A)) != 1:
            continue
        done += 1
        for Q in (lin, deg, sq):
            same_g = is_generic(gl_transform(Q, A)).verdict == is_generic(Q).verdict
            same_m = is_minimal(gl_transform(Q, A)) == is_minimal(Q)
            gl_bad += not (same_g and same_m)
    dt = time.perf_counter() - t0
    ok = metric_bad == 0 and mv_bad == 0 and wind_bad == 0 and gl_bad == 0 and dt < 60
    report(11, ok, f"violations: metric {metric_bad}/50, mixed volume {mv_bad}/20, winding {wind_bad}/20, "
                   f"gl invariance {gl_bad}/30; {dt:.1f} s (< 60 s)")


def test_criterion_12_growth_probes():
    t0 = time.perf_counter()
    e1, _r1, s1 = growth_exponent(dirac_comb(4096))
    e2, _r2, s2 = growth_exponent(dirac_comb(256, 2))
    _e3, _r3, s3 = growth_exponent(vmt1_measure(40))
    dt = time.perf_counter() - t0
    ok = abs(e1 - 1) <= 0.05 and abs(e2 - 2) <= 0.05 and not s1 and not s2 and s3 and dt < 5
    report(12, ok, f"comb exponent {e1:.3f} (1 +- 0.05), Z^2 comb {e2:.3f} (2 +- 0.05), "
                   f"truncated measure flagged super-polynomial {s3}, {dt:.2f} s (< 5 s)")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
