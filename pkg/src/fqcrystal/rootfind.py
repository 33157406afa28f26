"""Root location for trigonometric polynomials and Laurent polynomials.

* ``winding_number`` counts zeros of a holomorphic function in a rectangle via
  the argument principle, refining the boundary sampling until every argument
  increment is below pi/2.
* ``real_roots_1d`` covers an interval with rectangles in the strip
  ``|Im z| <= h`` and resolves each nonzero count by Newton's method (accepted
  only when it converges inside the box) or by bisection.
* ``torus_roots_univariate`` and ``laurent_system_roots_2d`` are the
  polynomial routes: companion matrices and a resultant.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gamma as _gamma, pi
from typing import Callable

import numpy as np

from .polyring import LaurentPoly, LaurentMap, TrigMapRep
from .polytope import mixed_volume

__all__ = [
    "RootBox",
    "DensityEstimate",
    "RootOnContourError",
    "winding_number",
    "imag_band",
    "real_roots_1d",
    "locate_roots_1d",
    "torus_roots_univariate",
    "laurent_system_roots_2d",
    "continuation_track",
    "density_estimate",
    "expected_density",
    "unit_ball_volume",
    "verify_real_rooted",
]

CLUSTER_RADIUS = 1e-7


class RootOnContourError(RuntimeError):
    pass


@dataclass(frozen=True)
class RootBox:
    center: complex
    radius: float
    count: int


@dataclass(frozen=True)
class DensityEstimate:
    r: float
    count: float
    density: float
    expected: float | None = None

    @property
    def relative_gap(self):
        if self.expected is None:
            return None
        return abs(self.density - self.expected) / self.expected


def unit_ball_volume(n: int) -> float:
    return pi ** (n / 2) / _gamma(n / 2 + 1)


# ----------------------------------------------------------------------------
# evaluators


def _trig_1d(P: TrigMapRep):
    if P.n != 1:
        raise ValueError("expected a trigonometric map with n = 1")
    W, c = P.frequencies(0)
    w = W[:, 0]

    def f(z):
        z = np.asarray(z, dtype=complex)
        return np.exp(2j * pi * np.multiply.outer(z, w)) @ c

    def df(z):
        z = np.asarray(z, dtype=complex)
        return np.exp(2j * pi * np.multiply.outer(z, w)) @ (2j * pi * w * c)

    return f, df, w, c


def _as_evaluator(p, dp=None):
    if isinstance(p, TrigMapRep):
        f, df, _w, _c = _trig_1d(p)
        return f, df
    if dp is None:
        def dp(z, _p=p):
            z = np.asarray(z, dtype=complex)
            h = 1e-6 * np.maximum(1.0, np.abs(z))
            return (_p(z + h) - _p(z - h)) / (2 * h)
    return p, dp


# ----------------------------------------------------------------------------
# argument principle


def _boundary(rect, k: int):
    x0, x1, y0, y1 = rect
    t = np.arange(k) / k
    bottom = x0 + (x1 - x0) * t + 1j * y0
    right = x1 + 1j * (y0 + (y1 - y0) * t)
    top = x1 - (x1 - x0) * t + 1j * y1
    left = x0 + 1j * (y1 - (y1 - y0) * t)
    return np.concatenate([bottom, right, top, left])


def _winding_once(f, rect, k0=64, kmax=1 << 15, floor=0.0):
    k = k0
    while True:
        z = _boundary(rect, k)
        v = np.asarray(f(z), dtype=complex)
        a = np.abs(v)
        if not np.all(np.isfinite(v)):
            raise OverflowError("non-finite values on the contour")
        if a.min() <= floor:
            return None
        steps = np.angle(np.roll(v, -1) / v)
        if np.max(np.abs(steps)) < pi / 2:
            return int(round(steps.sum() / (2 * pi)))
        if k >= kmax:
            return None
        k *= 2


def winding_number(f: Callable, rect, *, threshold: float | None = None, retries: int = 5,
                   seed: int = 0, return_rect: bool = False):
    """Number of zeros (with multiplicity) of holomorphic ``f`` inside ``rect``.

    ``rect = (x0, x1, y0, y1)``.  When a zero sits on (or numerically at) the
    boundary the rectangle is dilated about its centre by a tiny random factor
    and the count repeated, at most ``retries`` times.
    """
    x0, x1, y0, y1 = map(float, rect)
    if not (x1 > x0 and y1 > y0):
        raise ValueError("degenerate rectangle")
    if threshold is None:
        zc = _boundary((x0, x1, y0, y1), 16)
        threshold = 1e-13 * float(np.max(np.abs(f(zc)))) + 1e-300
    rng = np.random.default_rng(seed)
    cur = (x0, x1, y0, y1)
    for _ in range(retries + 1):
        count = _winding_once(f, cur, floor=threshold)
        if count is not None:
            return (count, cur) if return_rect else count
        cx, cy = (cur[0] + cur[1]) / 2, (cur[2] + cur[3]) / 2
        fac = 1 + 1e-3 * rng.uniform(0.5, 1.0)
        hw, hh = (cur[1] - cur[0]) / 2 * fac, (cur[3] - cur[2]) / 2 * fac
        cur = (cx - hw, cx + hw, cy - hh, cy + hh)
    raise RootOnContourError(f"root on contour of rectangle {rect}")


# ----------------------------------------------------------------------------
# one-dimensional real roots


def imag_band(P: TrigMapRep, margin: float = 0.1) -> float:
    """Height ``h`` with every zero of the n = 1 trig polynomial in ``|Im z| <= h``.

    For large positive ``Im z`` the smallest frequency dominates, for large
    negative the largest; the triangle inequality bounds where a zero can sit.
    Falls back to 5 for a single frequency (no zeros) or degenerate input.
    """
    _f, _df, w, c = _trig_1d(P)
    if len(w) < 2:
        return 5.0
    order = np.argsort(w)
    w, a = w[order], np.abs(c[order])
    gaps = np.diff(w)
    if np.any(gaps <= 0):
        return 5.0
    g = gaps.min()
    up = np.log(max(1.0, a[1:].sum() / a[0])) / (2 * pi * g)
    down = np.log(max(1.0, a[:-1].sum() / a[-1])) / (2 * pi * g)
    return float(max(up, down) + margin)


def _safe_cut(f, x, y0, y1, width, scale):
    """Shift a vertical cut so that it stays away from zeros."""
    ys = np.linspace(y0, y1, 65)
    best, best_val = x, -1.0
    for k in (0, 1, -1, 2, -2, 3, -3, 4, -4):
        xx = x + k * width / 32
        val = float(np.min(np.abs(f(xx + 1j * ys))))
        if val >= 1e-3 * scale:
            return xx
        if val > best_val:
            best, best_val = xx, val
    return best


def _newton(f, df, z0, mult=1, maxit=60):
    with np.errstate(over="ignore", invalid="ignore"):
        return _newton_iter(f, df, z0, mult, maxit)


def _newton_iter(f, df, z0, mult, maxit):
    z = complex(z0)
    for _ in range(maxit):
        d = df(np.array([z]))[0]
        if d == 0 or not np.isfinite(d):
            return None
        step = mult * f(np.array([z]))[0] / d
        z -= step
        if not np.isfinite(z):
            return None
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            break
    return z


def locate_roots_1d(p, a: float, b: float, h: float | None = None, tol: float = 1e-10, dp=None,
                    segment: float = 0.5):
    """Zeros of ``p`` with ``a <= Re z < b`` and ``|Im z| <= h`` as :class:`RootBox` list."""
    if isinstance(p, TrigMapRep) and h is None:
        h = imag_band(p)
    if h is None:
        h = 5.0
    f, df = _as_evaluator(p, dp)
    probe = np.linspace(a, b, 257) + 0.0j
    scale = float(np.max(np.abs(f(probe)))) + 1e-300
    nseg = max(1, int(np.ceil((b - a) / segment)))
    w = (b - a) / nseg
    # outer cuts are only ever moved outward so that [a, b) stays covered
    left = min(a, _safe_cut(f, a - w / 8, -h, h, w, scale))
    right = max(b, _safe_cut(f, b + w / 8, -h, h, w, scale))
    cuts = [left] + [_safe_cut(f, a + k * w, -h, h, w, scale) for k in range(1, nseg)] + [right]
    cuts = sorted(cuts)
    out: list[RootBox] = []
    for x0, x1 in zip(cuts[:-1], cuts[1:]):
        if x1 - x0 <= 0:
            continue
        out.extend(_resolve(f, df, (x0, x1, -h, h), tol, scale, depth=0))
    # a root within its error radius of an endpoint is taken to lie on it
    out = [r for r in out if a - r.radius <= r.center.real < b - r.radius]
    out.sort(key=lambda r: (r.center.real, r.center.imag))
    return out


def _resolve(f, df, rect, tol, scale, depth, count=None):
    if count is None:
        count, rect = winding_number(f, rect, threshold=1e-14 * scale, return_rect=True)
    if count <= 0:
        return []
    x0, x1, y0, y1 = rect
    centre = complex((x0 + x1) / 2, 0.0 if y0 < 0 < y1 else (y0 + y1) / 2)
    z = _newton(f, df, centre, mult=count)
    if z is not None and x0 < z.real < x1 and y0 < z.imag < y1:
        if count == 1:
            return [RootBox(z, tol, 1)]
        r = CLUSTER_RADIUS
        small = (z.real - r, z.real + r, z.imag - r, z.imag + r)
        try:
            if winding_number(f, small, threshold=1e-300) == count:
                return [RootBox(z, r, count)]
        except RootOnContourError:
            pass
    if max(x1 - x0, y1 - y0) < tol or depth > 200:
        return [RootBox(complex((x0 + x1) / 2, (y0 + y1) / 2), max(x1 - x0, y1 - y0), count)]
    if x1 - x0 >= y1 - y0:
        cut = (x0 + x1) / 2
        ys = np.linspace(y0, y1, 33)
        for k in (0, 1, -1, 2, -2, 3, -3):
            c = cut + k * (x1 - x0) / 16
            if np.min(np.abs(f(c + 1j * ys))) > 1e-10 * scale:
                cut = c
                break
        parts = [(x0, cut, y0, y1), (cut, x1, y0, y1)]
    else:
        cut = (y0 + y1) / 2
        xs = np.linspace(x0, x1, 33)
        for k in (0, 1, -1, 2, -2, 3, -3):
            c = cut + k * (y1 - y0) / 16
            if np.min(np.abs(f(xs + 1j * c))) > 1e-10 * scale:
                cut = c
                break
        parts = [(x0, x1, y0, cut), (x0, x1, cut, y1)]
    out = []
    for part in parts:
        out.extend(_resolve(f, df, part, tol, scale, depth + 1))
    return out


def real_roots_1d(p, interval, h: float | None = None, tol: float = 1e-10, dp=None):
    """Roots of the univariate trig polynomial ``p`` in ``[a, b)`` as ``(root, multiplicity)``.

    Each root is complex; ``abs(root.imag)`` is the distance from the real
    axis, so real-rootedness can be read off directly.
    """
    a, b = map(float, interval)
    return [(r.center, r.count) for r in locate_roots_1d(p, a, b, h=h, tol=tol, dp=dp)]


# ----------------------------------------------------------------------------
# polynomial routes


def _poly_coeffs(q: LaurentPoly):
    """Coefficients (highest degree first) of ``z^-lo q`` and the shift ``lo``."""
    if q.m != 1:
        raise ValueError("expected a univariate Laurent polynomial")
    E = q.exponents()[:, 0]
    lo, hi = int(E.min()), int(E.max())
    coeffs = np.zeros(hi - lo + 1, dtype=complex)
    for e, c in zip(E, q.coefficients()):
        coeffs[hi - e] = c
    return coeffs, lo


def _cluster(points, radius):
    """Group nearby complex numbers; returns list of index lists."""
    order = np.argsort(np.real(points))
    groups: list[list[int]] = []
    used = np.zeros(len(points), dtype=bool)
    for i in order:
        if used[i]:
            continue
        grp = [i]
        used[i] = True
        for j in order:
            if not used[j] and abs(points[j] - points[i]) <= radius:
                grp.append(j)
                used[j] = True
        groups.append(grp)
    return groups


def _multiplicity_groups(coeffs, roots):
    """Cluster raw companion roots into genuine multiple roots.

    Roots within 1e-4 of each other are candidates; a group of ``k`` is kept
    as a ``k``-fold root when the first ``k - 1`` derivatives vanish at the
    centroid (relative to the coefficient scale), otherwise it is split with
    the plain clustering radius.
    """
    out = []
    scale = np.abs(coeffs).sum()
    for grp in _cluster(roots, 1e-4):
        pts = roots[grp]
        k = len(grp)
        c = pts.mean()
        if k > 1:
            d = np.array(coeffs)
            ok = True
            for _ in range(k - 1):
                val = np.polyval(d, c)
                if abs(val) > 1e-7 * scale * max(1.0, abs(c)) ** len(d):
                    ok = False
                    break
                d = np.polyder(d)
            if ok:
                out.append((c, k))
                continue
            for sub in _cluster(pts, CLUSTER_RADIUS):
                out.append((pts[sub].mean(), len(sub)))
        else:
            out.append((c, 1))
    return out


def torus_roots_univariate(q: LaurentPoly, tol: float = 1e-8):
    """Zeros of ``q`` on the unit circle as ``(root, multiplicity)``, sorted by angle."""
    if q.is_monomial or q.is_zero:
        raise ValueError("q must have at least two terms")
    coeffs, _lo = _poly_coeffs(q)
    coeffs = np.trim_zeros(coeffs, "b")  # zero roots are not in C*
    roots = np.roots(coeffs)
    out = []
    for c, k in _multiplicity_groups(coeffs, roots):
        if abs(abs(c) - 1) <= tol * max(1, k) ** 2 * 10 ** (k - 1):
            out.append((c / abs(c), k))
    out.sort(key=lambda t: np.angle(t[0]) % (2 * pi))
    return out


def _clear(q: LaurentPoly):
    E = q.exponents()
    lo = E.min(axis=0)
    return q.shift(tuple(-lo))


def _bivariate_array(q: LaurentPoly):
    """Dense coefficient array C[i, j] of x^i y^j after clearing denominators."""
    q = _clear(q)
    E = q.exponents()
    C = np.zeros(tuple(E.max(axis=0) + 1), dtype=complex)
    for e, c in zip(E, q.coefficients()):
        C[tuple(e)] += c
    return C


def _sylvester_det(a, b):
    """Sylvester determinant of two coefficient arrays (low to high, formal degrees)."""
    p, q = len(a) - 1, len(b) - 1
    if p < 0 or q < 0:
        return 0.0
    if p == 0:
        return a[0] ** q
    if q == 0:
        return b[0] ** p
    S = np.zeros((p + q, p + q), dtype=complex)
    for i in range(q):
        S[i, i:i + p + 1] = a[::-1]
    for i in range(p):
        S[q + i, i:i + q + 1] = b[::-1]
    return np.linalg.det(S)


def laurent_system_roots_2d(Q: LaurentMap, cluster: float = CLUSTER_RADIUS):
    """All zeros in ``(C*)^2`` of a 2 x 2 Laurent system as ``(point, multiplicity)``.

    The resultant in ``y`` is recovered by interpolation at scaled roots of
    unity, its zeros give candidate ``x``; each candidate ``y`` is checked
    against both equations and polished by Newton's method.  Intended for
    systems with finitely many, generically simple, zeros.
    """
    if Q.m != 2 or Q.n != 2:
        raise ValueError("expected two Laurent polynomials in two variables")
    A, B = (_bivariate_array(q) for q in Q)
    dxa, dya = A.shape[0] - 1, A.shape[1] - 1
    dxb, dyb = B.shape[0] - 1, B.shape[1] - 1
    D = dxa * dyb + dya * dxb
    if D == 0:
        return []
    npts = 1 << int(np.ceil(np.log2(D + 1)))
    rad = 1.0
    xs = rad * np.exp(2j * pi * np.arange(npts) / npts)
    vals = np.empty(npts, dtype=complex)
    for i, x in enumerate(xs):
        pa = np.polynomial.polynomial.polyval(x, A)  # coefficients in y, low to high
        pb = np.polynomial.polynomial.polyval(x, B)
        vals[i] = _sylvester_det(pa, pb)
    coeffs = np.fft.fft(vals) / npts  # low to high in x
    coeffs = coeffs[:D + 1] / rad ** np.arange(D + 1)
    big = np.abs(coeffs).max()
    coeffs[np.abs(coeffs) < 1e-13 * big] = 0
    hi = np.trim_zeros(coeffs, "b")
    xr = np.roots(hi[::-1]) if len(hi) > 1 else np.array([])
    xr = xr[np.abs(xr) > 1e-9]

    def F(p):
        return np.array([Q[0](p), Q[1](p)])

    def Jac(p):
        out = np.zeros((2, 2), dtype=complex)
        for r, q in enumerate(Q):
            E, c = q.exponents(), q.coefficients()
            mons = np.prod(p[None, :] ** E, axis=1) * c
            out[r] = (mons[:, None] * E).sum(axis=0) / p
        return out

    def rel_residual(p):
        # |q(p)| against the size of its terms, so large or small points are judged fairly
        out = 0.0
        for q in Q:
            E, c = q.exponents(), q.coefficients()
            terms = np.prod(p[None, :] ** E, axis=1) * c
            out = max(out, abs(terms.sum()) / (np.abs(terms).sum() + 1e-300))
        return out

    cands = []
    for x in xr:
        # y candidates from both equations: either one may vanish identically at x
        ys = []
        for C in (A, B):
            pc = np.polynomial.polynomial.polyval(x, C)
            pc = np.where(np.abs(pc) < 1e-12 * (np.abs(pc).max() + 1e-300), 0, pc)
            pc = np.trim_zeros(pc, "b")
            if len(pc) >= 2:
                ys.extend(np.roots(pc[::-1]))
        for y in ys:
            if abs(y) < 1e-9 or not np.isfinite(y):
                continue
            p0 = np.array([x, y])
            if rel_residual(p0) > 1e-5:
                continue  # a zero of one equation only
            p = p0
            with np.errstate(all="ignore"):
                for _ in range(20):
                    try:
                        step = np.linalg.solve(Jac(p), F(p))
                    except np.linalg.LinAlgError:
                        break
                    if not np.all(np.isfinite(step)):
                        break
                    p = p - step
                    if np.max(np.abs(step)) < 1e-15 * max(1.0, np.max(np.abs(p))):
                        break
            drift = np.max(np.abs(p - p0)) / max(1.0, np.max(np.abs(p0)))
            if not (np.all(np.isfinite(p)) and np.all(np.abs(p) > 1e-9) and drift < 1e-4):
                p = p0  # keep the unpolished candidate rather than a wandering iterate
            if rel_residual(p) < 1e-8:
                cands.append(p)
    sols: list = []
    for p in cands:
        if not any(np.max(np.abs(s - p)) <= cluster * max(1.0, np.max(np.abs(p))) for s in sols):
            sols.append(p)
    # multiplicity: copies of the x-coordinate among the resultant zeros,
    # shared out between the distinct zeros above that x
    out = []
    for p in sols:
        near = 1e-6 * max(1.0, abs(p[0]))
        mult_x = int(np.sum(np.abs(xr - p[0]) <= near))
        same_x = sum(1 for q in sols if abs(q[0] - p[0]) <= near)
        out.append((p, max(1, round(mult_x / same_x))))
    return out


# ----------------------------------------------------------------------------
# continuation


def continuation_track(spec, x0, t_grid, *, t_start: float = 0.0, max_halvings: int = 30):
    """Follow a zero of ``P_t`` (Example-1 family) from ``t_start`` along ``t_grid``.

    Euler predictor on ``dx/dt = -J^{-1} dP/dt`` and Newton corrector to
    ``|P_t(x)| < 1e-12``.  Steps whose Jacobian condition exceeds 1e12 or whose
    corrector fails are halved.  Returns ``(x_final, path)`` with ``path`` an
    array of shape ``(len(t_grid) + 1, n)`` (real).
    """
    from .constructions import example1_eval

    x = np.atleast_1d(np.asarray(x0, dtype=float)).astype(complex)
    t = float(t_start)
    val, J, dt_ = example1_eval(spec, x, t)
    if np.max(np.abs(val)) > 1e-10:
        raise ValueError("x0 is not a zero of P at the starting t")
    path = [x.real.copy()]

    def correct(x, t):
        for _ in range(30):
            val, J, _ = example1_eval(spec, x, t)
            if np.linalg.cond(J) > 1e12:
                return None
            step = np.linalg.solve(J, val)
            x = x - step
            if np.max(np.abs(example1_eval(spec, x, t)[0])) < 1e-12:
                return x
        return None

    for t_target in np.asarray(t_grid, dtype=float):
        h = t_target - t
        halvings = 0
        while abs(t_target - t) > 0:
            h = np.sign(t_target - t) * min(abs(h), abs(t_target - t))
            val, J, dPdt = example1_eval(spec, x, t)
            if np.linalg.cond(J) > 1e12:
                raise RuntimeError(f"singular Jacobian at t = {t}")
            xp = x - h * np.linalg.solve(J, dPdt)
            xn = correct(xp, t + h)
            if xn is None or np.max(np.abs(xn.imag)) > 1e-9:
                halvings += 1
                if halvings > max_halvings:
                    raise RuntimeError(f"continuation failed near t = {t}")
                h /= 2
                continue
            x = xn.real.astype(complex)
            t = t + h
            halvings = max(0, halvings - 1)
        path.append(x.real.copy())
    return x.real, np.array(path)


# ----------------------------------------------------------------------------
# density


def density_estimate(roots, r: float, expected: float | None = None, n: int | None = None) -> DensityEstimate:
    """Weighted count of roots with ``|x| < r`` divided by ``c_n r^n``.

    ``roots`` may be a :class:`~fqcrystal.measures.Multiset`, an array of
    points, or a list of ``(point, multiplicity)`` pairs.
    """
    pts, mult = _points_and_weights(roots, n)
    n = pts.shape[1]
    inside = np.linalg.norm(pts, axis=1) < r
    count = float(mult[inside].sum())
    return DensityEstimate(float(r), count, count / (unit_ball_volume(n) * r ** n), expected)


def _points_and_weights(roots, n=None):
    if hasattr(roots, "points") and hasattr(roots, "multiplicities"):
        return np.asarray(roots.points, dtype=float), np.asarray(roots.multiplicities, dtype=float)
    if isinstance(roots, list) and roots and isinstance(roots[0], tuple):
        pts = np.array([np.real(np.atleast_1d(p)) for p, _ in roots], dtype=float)
        return pts, np.array([m for _, m in roots], dtype=float)
    pts = np.asarray(roots, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1 if n in (None, 1) else n)
    return pts, np.ones(len(pts))


def expected_density(P: TrigMapRep):
    """Mixed volume of the real polytopes ``M^T N(q_j)``."""
    return mixed_volume(P.newton_polytopes())


def verify_real_rooted(P: TrigMapRep, r: float, tol: float = 0.02, imag_tol: float = 1e-8):
    """Compare the density of real roots in ``[-r, r)`` with the mixed volume.

    Returns a dict with ``passed`` plus the measured quantities.
    """
    if P.n != 1:
        raise ValueError("contour-based verification needs n = 1")
    roots = real_roots_1d(P, (-r, r))
    expected = float(expected_density(P))
    real = [(z, k) for z, k in roots if abs(z.imag) < imag_tol]
    count_real = sum(k for _, k in real)
    density = count_real / (2 * r)
    gap = abs(density - expected) / expected if expected else float("inf")
    max_im = max((abs(z.imag) for z, _ in roots), default=0.0)
    return {
        "passed": bool(gap < tol and all(abs(z.imag) < imag_tol for z, _ in roots)),
        "real_root_count": int(count_real),
        "root_count": int(sum(k for _, k in roots)),
        "density": density,
        "expected": expected,
        "relative_gap": gap,
        "max_abs_imag": max_im,
    }
