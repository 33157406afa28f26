"""Discrete measures, multisets and their Fourier side.

Measures are finite windows of (possibly infinite) discrete measures: atoms
are complete inside ``window`` (half-width of a box centred at 0).  Spectra
are tables of frequencies and coefficients.  Limits ``r -> inf`` are always
reported at finite ``r``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial import cKDTree

from .polyring import LaurentPoly, LaurentMap, monomial_substitute, parse_number
from .polytope import normal_fan_representatives
from .rootfind import torus_roots_univariate, unit_ball_volume

__all__ = [
    "DiscreteMeasure",
    "Multiset",
    "SpectrumTable",
    "TestFunction",
    "dirac_comb",
    "vmt1_measure",
    "multiset_distance",
    "multiset_sum",
    "index",
    "translation_bound",
    "translation_bound_profile",
    "growth_exponent",
    "affine_transform",
    "dual_spectrum",
    "comb_spectrum",
    "empirical_fourier_bohr",
    "bohr_mean_structured",
    "bohr_mean_empirical",
    "poisson_check",
    "spectrum_rational_approx",
    "lattice_psf_spectrum",
    "dominance_radius",
    "constant_term_on_torus",
]

MERGE_TOL = 1e-10


def _as_points(x):
    a = np.asarray(x)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(-1, 1)
    return a


@dataclass
class DiscreteMeasure:
    locations: np.ndarray
    weights: np.ndarray
    window: float = math.inf

    def __post_init__(self):
        self.locations = _as_points(self.locations).astype(float)
        self.weights = np.asarray(self.weights, dtype=complex).reshape(-1)
        if len(self.weights) != len(self.locations):
            raise ValueError("locations and weights differ in length")
        if np.isfinite(self.window) and len(self.locations):
            if np.abs(self.locations).max() > self.window * (1 + 1e-12):
                raise ValueError("atom outside the window")

    @property
    def n(self):
        return self.locations.shape[1]

    def __len__(self):
        return len(self.weights)

    def normalized(self, tol: float = 1e-12) -> "DiscreteMeasure":
        """Merge coincident atoms and drop zero weights."""
        if not len(self):
            return self
        order = np.lexsort(self.locations.T[::-1])
        L, W = self.locations[order], self.weights[order]
        locs, wts = [L[0]], [W[0]]
        for p, w in zip(L[1:], W[1:]):
            if np.abs(p - locs[-1]).max() <= tol:
                wts[-1] += w
            else:
                locs.append(p)
                wts.append(w)
        wts = np.array(wts)
        keep = wts != 0
        return DiscreteMeasure(np.array(locs)[keep], wts[keep], self.window)

    def restrict(self, r: float) -> "DiscreteMeasure":
        """Atoms in the open ball ``|x| < r``."""
        sel = np.linalg.norm(self.locations, axis=1) < r
        return DiscreteMeasure(self.locations[sel], self.weights[sel], min(self.window, r))

    @classmethod
    def from_multiset(cls, a: "Multiset") -> "DiscreteMeasure":
        return cls(np.real(a.points), a.multiplicities.astype(float), a.window)


@dataclass
class Multiset:
    points: np.ndarray
    multiplicities: np.ndarray | None = None
    window: float = math.inf

    def __post_init__(self):
        self.points = _as_points(self.points)
        if self.multiplicities is None:
            self.multiplicities = np.ones(len(self.points), dtype=int)
        self.multiplicities = np.asarray(self.multiplicities, dtype=int).reshape(-1)
        if len(self.multiplicities) != len(self.points):
            raise ValueError("points and multiplicities differ in length")
        if np.any(self.multiplicities < 1):
            raise ValueError("multiplicities must be positive")

    def __len__(self):
        return int(self.multiplicities.sum())

    def expanded(self) -> np.ndarray:
        return np.repeat(self.points, self.multiplicities, axis=0)

    def within(self, window: float) -> "Multiset":
        sel = np.abs(self.points).max(axis=1) <= window if len(self.points) else np.zeros(0, bool)
        return Multiset(self.points[sel], self.multiplicities[sel], min(self.window, window))


@dataclass
class SpectrumTable:
    frequencies: np.ndarray
    coefficients: np.ndarray
    labels: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.frequencies = _as_points(self.frequencies).astype(float)
        self.coefficients = np.asarray(self.coefficients, dtype=complex).reshape(-1)
        if len(self.coefficients) != len(self.frequencies):
            raise ValueError("frequencies and coefficients differ in length")

    def __len__(self):
        return len(self.coefficients)

    def merged(self, tol: float = MERGE_TOL) -> "SpectrumTable":
        m = DiscreteMeasure(self.frequencies, self.coefficients).normalized(tol)
        return SpectrumTable(m.locations, m.weights, None, dict(self.meta))

    def at(self, s, tol: float = 1e-9) -> complex:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        hit = np.abs(self.frequencies - s).max(axis=1) <= tol
        return complex(self.coefficients[hit].sum())


@dataclass
class TestFunction:
    """``h(x) = exp(2 pi i xi.x) exp(-pi |x - c|^2 / sigma^2)``."""

    kind: str = "gaussian"
    center: np.ndarray = 0.0
    sigma: float = 1.0
    xi: np.ndarray = 0.0
    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.kind not in ("gaussian", "modulated-gaussian"):
            raise ValueError(f"unknown test function kind {self.kind!r}")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        self.center = np.atleast_1d(np.asarray(self.center, dtype=float))
        self.xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        n = max(self.center.size, self.xi.size)
        for name in ("center", "xi"):
            v = getattr(self, name)
            if v.size == 1 and n > 1:
                setattr(self, name, np.full(n, v[0]))
            elif v.size != n:
                raise ValueError("center and xi have different dimensions")
        if self.kind == "gaussian" and np.any(self.xi):
            raise ValueError("plain gaussian has no modulation")

    def __call__(self, x):
        x = _as_points(x)
        d = x - self.center
        return np.exp(2j * np.pi * (x @ self.xi)) * np.exp(-np.pi * np.sum(d * d, axis=1) / self.sigma ** 2)

    def fourier(self, y):
        """``int h(x) exp(-2 pi i x.y) dx``."""
        y = _as_points(y)
        n = y.shape[1]
        d = y - self.xi
        return (self.sigma ** n * np.exp(-2j * np.pi * ((y - self.xi) @ self.center))
                * np.exp(-np.pi * self.sigma ** 2 * np.sum(d * d, axis=1)))


# ----------------------------------------------------------------------------
# constructors


def dirac_comb(R: float, n: int = 1, spacing: float = 1.0) -> DiscreteMeasure:
    """Unit atoms on ``spacing Z^n`` within the box ``|x|_inf <= R``."""
    k = np.arange(-int(np.floor(R / spacing)), int(np.floor(R / spacing)) + 1) * spacing
    grids = np.meshgrid(*([k] * n), indexing="ij")
    pts = np.stack([g.reshape(-1) for g in grids], axis=1)
    return DiscreteMeasure(pts, np.ones(len(pts)), R)


def vmt1_measure(K: int) -> DiscreteMeasure:
    """``sum_{k=1}^K 2^k (delta_{k - 2^-k} - delta_k)``."""
    k = np.arange(1, K + 1)
    locs = np.concatenate([k - 2.0 ** -k, k.astype(float)])
    w = np.concatenate([2.0 ** k, -(2.0 ** k)])
    return DiscreteMeasure(locs, w, float(K))


# ----------------------------------------------------------------------------
# multisets


def multiset_distance(a: Multiset, b: Multiset, window: float | None = None) -> float:
    """Bottleneck distance: min over bijections of the largest displacement.

    Returns ``inf`` when the total multiplicities differ.
    """
    if window is not None:
        a, b = a.within(window), b.within(window)
    if len(a) != len(b):
        return math.inf
    if len(a) == 0:
        return 0.0
    A, B = a.expanded(), b.expanded()
    if A.shape[1] == 1 and not np.iscomplexobj(A) and not np.iscomplexobj(B):
        # sorted matching is optimal on the line
        return float(np.abs(np.sort(A[:, 0]) - np.sort(B[:, 0])).max())
    D = np.sqrt((np.abs(A[:, None, :] - B[None, :, :]) ** 2).sum(axis=2))
    cand = np.unique(D)
    lo, hi = 0, len(cand) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        g = csr_matrix(D <= cand[mid])
        match = maximum_bipartite_matching(g, perm_type="column")
        if np.all(match >= 0):
            hi = mid
        else:
            lo = mid + 1
    return float(cand[lo])


def multiset_sum(a: Multiset, b: Multiset, tol: float = 0.0) -> Multiset:
    """Union with multiplicities added on coincident points."""
    if len(a.points) == 0:
        return Multiset(b.points, b.multiplicities, min(a.window, b.window))
    if len(b.points) == 0:
        return Multiset(a.points, a.multiplicities, min(a.window, b.window))
    if a.points.shape[1] != b.points.shape[1]:
        raise ValueError("dimension mismatch")
    P = np.concatenate([a.points, b.points])
    m = np.concatenate([a.multiplicities, b.multiplicities])
    order = np.lexsort(P.real.T[::-1]) if not np.iscomplexobj(P) else np.lexsort(
        np.concatenate([P.real, P.imag], axis=1).T[::-1])
    pts, mult = [P[order[0]]], [m[order[0]]]
    for i in order[1:]:
        if np.abs(P[i] - pts[-1]).max() <= tol:
            mult[-1] += m[i]
        else:
            pts.append(P[i])
            mult.append(m[i])
    return Multiset(np.array(pts), np.array(mult), min(a.window, b.window))


def _max_in_open_window_1d(x, w, length):
    """Max of ``sum w`` over open intervals of the given length (``x`` sorted)."""
    best, j, acc = 0.0, 0, 0.0
    for i in range(len(x)):
        # window (x_i - tiny, x_i - tiny + length): contains x_i .. x_j with x_j - x_i < length
        while j < len(x) and x[j] - x[i] < length:
            acc += w[j]
            j += 1
        best = max(best, acc)
        acc -= w[i]
    return best


def index(a: Multiset, epsilon_schedule=(1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-8)) -> int:
    """``inf_eps sup_x`` multiplicity in ``B(x, eps)`` over the window."""
    if len(a.points) == 0:
        return 0
    P = a.points.real if not np.iscomplexobj(a.points) else np.concatenate([a.points.real, a.points.imag], 1)
    m = a.multiplicities.astype(float)
    values = []
    for eps in sorted(epsilon_schedule, reverse=True):
        if P.shape[1] == 1:
            order = np.argsort(P[:, 0])
            v = _max_in_open_window_1d(P[order, 0], m[order], 2 * eps)
        else:
            # atom-centred balls: exact up to the factor 2 in the radius, which
            # does not affect the limit eps -> 0
            tree = cKDTree(P)
            nb = tree.query_ball_point(P, eps * (1 - 1e-12))
            v = max(m[idx].sum() for idx in nb)
        values.append(int(round(v)))
    return min(values)


def translation_bound(mu: DiscreteMeasure, radius: float = 1.0) -> float:
    """``sup_x |mu|(B(x, radius))`` over the window.

    Exact for ``n = 1`` (two-pointer sweep over open intervals of length
    ``2 radius``); for ``n >= 2`` the supremum is taken over balls centred at
    atoms and at midpoints of nearby atom pairs.
    """
    if len(mu) == 0:
        return 0.0
    w = np.abs(mu.weights)
    if mu.n == 1:
        order = np.argsort(mu.locations[:, 0])
        return float(_max_in_open_window_1d(mu.locations[order, 0], w[order], 2 * radius))
    P = mu.locations
    tree = cKDTree(P)
    centres = [P]
    pairs = np.array(sorted(tree.query_pairs(2 * radius)), dtype=int).reshape(-1, 2)
    if len(pairs):
        centres.append(0.5 * (P[pairs[:, 0]] + P[pairs[:, 1]]))
    C = np.concatenate(centres)
    nb = tree.query_ball_point(C, radius * (1 - 1e-12))
    return float(max(w[idx].sum() for idx in nb))


def translation_bound_profile(make_measure, Ks, radius: float = 1.0):
    """Translation bounds of a family of truncations.

    Returns ``(bounds, unbounded_growth)``; growth is flagged when the bound
    increases by a factor of at least 1.5 at every step of the second half.
    """
    bounds = np.array([translation_bound(make_measure(K), radius) for K in Ks])
    ratios = bounds[1:] / np.maximum(bounds[:-1], 1e-300)
    tail = ratios[len(ratios) // 2:]
    return bounds, bool(len(tail) and np.all(tail >= 1.5))


def growth_exponent(mu: DiscreteMeasure, center=None):
    """Fit ``log |mu|(B(0, r))`` against ``log r`` over dyadic radii.

    Returns ``(exponent, residual, super_polynomial)``.  The fit uses the
    upper half of the dyadic radii (at least four).  ``super_polynomial`` is
    set when the local slopes over the upper half exceed 1.5 times those
    over the lower half.
    """
    R = mu.window
    if not np.isfinite(R) or R < 10:
        raise ValueError("window radius must be at least 10")
    x = mu.locations if center is None else mu.locations - np.asarray(center, dtype=float)
    dist = np.linalg.norm(x, axis=1)
    w = np.abs(mu.weights)
    radii = 2.0 ** np.arange(0, int(np.floor(np.log2(R))) + 1)
    if len(radii) < 4:
        raise ValueError("fewer than 4 dyadic radii")
    order = np.argsort(dist)
    cum = np.concatenate([[0.0], np.cumsum(w[order])])
    mass = cum[np.searchsorted(dist[order], radii, side="left")]
    keep = mass > 0
    lr, lm = np.log(radii[keep]), np.log(mass[keep])
    if len(lr) < 4:
        raise ValueError("fewer than 4 dyadic radii with positive mass")
    k = max(4, (len(lr) + 1) // 2)
    fr, fm = lr[-k:], lm[-k:]
    A = np.stack([fr, np.ones_like(fr)], axis=1)
    coef, *_ = np.linalg.lstsq(A, fm, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - fm) ** 2)))
    slopes = np.diff(lm) / np.diff(lr)
    h = len(slopes) // 2
    superpoly = bool(h >= 1 and slopes[h:].mean() > 1.5 * max(slopes[:h].mean(), 1e-12))
    return float(coef[0]), resid, superpoly


# ----------------------------------------------------------------------------
# affine maps and spectra


def _matrix(M, n):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape == (1, 1) and n > 1:
        M = M[0, 0] * np.eye(n)
    if M.shape != (n, n):
        raise ValueError("M has the wrong shape")
    if abs(np.linalg.det(M)) < 1e-14:
        raise ValueError("M is singular")
    return M


def affine_transform(mu: DiscreteMeasure, M, y=None) -> DiscreteMeasure:
    """Push atoms forward by ``x -> M x + y``."""
    M = _matrix(M, mu.n)
    y = np.zeros(mu.n) if y is None else np.atleast_1d(np.asarray(y, dtype=float))
    locs = mu.locations @ M.T + y
    win = np.abs(locs).max() if len(locs) else math.inf
    return DiscreteMeasure(locs, mu.weights.copy(), max(win, 0.0) if np.isfinite(mu.window) else math.inf)


def dual_spectrum(z: SpectrumTable, M, y=None) -> SpectrumTable:
    """Spectrum of the pushed-forward measure: ``s -> M^{-T} s`` and
    ``a_s -> a_s exp(-2 pi i s'.y) / |det M|`` with ``s'`` the new frequency."""
    n = z.frequencies.shape[1]
    M = _matrix(M, n)
    y = np.zeros(n) if y is None else np.atleast_1d(np.asarray(y, dtype=float))
    S = z.frequencies @ np.linalg.inv(M)  # rows s^T M^{-1} = (M^{-T} s)^T
    a = z.coefficients * np.exp(-2j * np.pi * (S @ y)) / abs(np.linalg.det(M))
    return SpectrumTable(S, a, z.labels, dict(z.meta))


def comb_spectrum(R: float, n: int = 1) -> SpectrumTable:
    """Spectrum of the comb on ``Z^n`` (itself), frequencies with ``|s|_inf <= R``."""
    c = dirac_comb(R, n)
    return SpectrumTable(c.locations, c.weights, None, {"source": "comb"})


def empirical_fourier_bohr(mu: DiscreteMeasure, omega, r: float) -> complex:
    """``(1 / (c_n r^n)) sum_{|x| < r} c_x exp(-2 pi i omega.x)``."""
    if r > mu.window * (1 + 1e-12):
        raise ValueError("atoms are not complete to radius r")
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    sel = np.linalg.norm(mu.locations, axis=1) < r
    x = mu.locations[sel]
    phase = np.exp(-2j * np.pi * (x @ omega))
    return complex(_pairwise_sum(mu.weights[sel] * phase) / (unit_ball_volume(mu.n) * r ** mu.n))


def _pairwise_sum(v):
    """Deterministic pairwise-tree reduction."""
    v = np.asarray(v)
    if v.size <= 1024:
        return v.sum()
    h = v.size // 2
    return _pairwise_sum(v[:h]) + _pairwise_sum(v[h:])


def bohr_mean_structured(F: LaurentPoly, M=None) -> complex:
    """Mean of ``f(x) = F(exp(2 pi i M x))``: the exponent-0 coefficient of
    ``F`` (characters of the torus other than 1 integrate to 0).  Valid when
    the rows of ``M`` are independent over the rationals."""
    return complex(F.coefficient((0,) * F.m))


def bohr_mean_empirical(F: LaurentPoly, M, r: float, points_per_unit: int = 64) -> complex:
    """Windowed average of ``f`` over ``[-r, r]`` (``n = 1``) by the midpoint rule."""
    M = np.asarray(M, dtype=float).reshape(F.m, -1)
    if M.shape[1] != 1:
        raise ValueError("only n = 1 is supported")
    N = int(2 * r * points_per_unit)
    x = -r + (np.arange(N) + 0.5) * (2 * r / N)
    z = np.exp(2j * np.pi * np.outer(x, M[:, 0]))
    return complex(_pairwise_sum(F(z)) / N)


# ----------------------------------------------------------------------------
# Poisson summation


def _gauss_tail(n, R, sigma, centre, T, decay):
    """Bound for ``sum_{|x|_inf > R} T-translation-bounded mass * g(|x - centre|)``
    with ``g(d) = sigma^n exp(-pi decay d^2)``: sum over unit shells."""
    total, j = 0.0, 0
    c = float(np.abs(centre).max()) if np.size(centre) else 0.0
    while True:
        rho = R + j
        d = max(rho - c, 0.0)
        shell = 2 * n * (2 * rho + 3) ** (n - 1)
        term = T * shell * sigma ** n * math.exp(-math.pi * decay * d * d)
        total += term
        if (term < 1e-300 or term < 1e-18 * total) and d > 0:
            break
        j += 1
        if j > 10 ** 6:
            break
    return total


def poisson_check(mu: DiscreteMeasure, zeta: SpectrumTable, tests, tol: float = 1e-10,
                  spectrum_window: float | None = None, spectrum_bound: float | None = None):
    """Compare ``sum c_x h^(x)`` with ``sum a_s h(s)`` for Gaussian tests.

    Each check reports the discrepancy and a truncation bound from the tails
    outside the measure window and the spectrum window; ``spectrum_bound`` is
    a translation bound for ``|zeta|`` (estimated from the table if omitted).
    """
    if not np.isfinite(mu.window):
        raise ValueError("measure window must be finite")
    n = mu.n
    sw = spectrum_window
    if sw is None:
        sw = float(np.abs(zeta.frequencies).max()) if len(zeta) else 0.0
    Tmu = translation_bound(mu, 0.5 * math.sqrt(n)) if len(mu) else 0.0
    Tz = spectrum_bound
    if Tz is None:
        Tz = translation_bound(DiscreteMeasure(zeta.frequencies, zeta.coefficients), 0.5 * math.sqrt(n))
    out = []
    for h in tests:
        lhs = complex(_pairwise_sum(mu.weights * h.fourier(mu.locations)))
        rhs = complex(_pairwise_sum(zeta.coefficients * h(zeta.frequencies)))
        # tail of mu against h^: Gaussian of width 1/sigma around xi
        b1 = _gauss_tail(n, mu.window, h.sigma, h.xi, Tmu, h.sigma ** 2)
        # tail of zeta against h: Gaussian of width sigma around centre
        b2 = _gauss_tail(n, sw, 1.0, h.center, Tz, 1.0 / h.sigma ** 2)
        bound = b1 + b2
        if bound > 1e-2:
            raise ValueError("windows too small for the test function width")
        disc = abs(lhs - rhs)
        out.append({"test": h, "measure_side": lhs, "spectrum_side": rhs, "discrepancy": disc,
                     "truncation_bound": bound, "pass": bool(disc < tol + bound)})
    return {"checks": out, "pass": all(c["pass"] for c in out)}


# ----------------------------------------------------------------------------
# rational approximants


MAX_APPROX_DEGREE = 20000


def _rational_matrix(M):
    vals = []
    for x in np.asarray(M, dtype=object).reshape(-1):
        v, exact = parse_number(x)
        if not exact:
            if isinstance(x, float) and Fraction(x).denominator <= 1 << 20:
                v = Fraction(x)  # dyadic floats such as 0.5 are exact
            elif isinstance(x, float):
                raise ValueError(f"M_k entry {x!r} is a float; give it as an exact rational such as "
                                 f"'{Fraction(x).limit_denominator(1000)}'")
            else:
                raise ValueError("M_k must be exactly rational")
        vals.append(Fraction(v))
    return vals


def _clean_complex(c, eps):
    """Zero real and imaginary parts below ``eps`` (rounding noise)."""
    re = np.where(np.abs(c.real) < eps, 0.0, c.real)
    im = np.where(np.abs(c.imag) < eps, 0.0, c.imag)
    return re + 1j * im


def spectrum_rational_approx(Q, M_k, window: float, tol: float = 1e-6) -> SpectrumTable:
    """Spectrum of ``div P_k`` for ``P_k = Q o rho o M_k`` with rational ``M_k``
    (``n = 1``).

    With ``beta = 1/lcm(denominators)`` and ``N = M_k / beta``, ``P_k(x) =
    Q_k(exp(2 pi i beta x))`` with ``Q_k = Q o N~``.  Each torus root
    ``lambda`` of ``Q_k`` contributes the comb ``(arg lambda / 2 pi + Z) / beta``,
    whose transform is ``beta sum_l lambda^-l delta_{beta l}``.
    """
    if isinstance(Q, LaurentMap):
        if Q.n != 1:
            raise NotImplementedError("only n = 1 is supported")
        Q = Q[0]
    vals = _rational_matrix(M_k)
    if len(vals) != Q.m:
        raise ValueError("M_k must be m x 1")
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (v.denominator for v in vals), 1)
    beta = Fraction(1, lcm)
    N = [[int(v / beta)] for v in vals]
    qk = monomial_substitute(Q, N)
    if qk.is_monomial:
        raise ValueError("approximant has no zeros")
    E = qk.exponents()[:, 0]
    degree = int(E.max() - E.min())
    if degree > MAX_APPROX_DEGREE:
        raise ValueError(f"approximant degree {degree} exceeds {MAX_APPROX_DEGREE}")
    roots = torus_roots_univariate(qk, tol=tol)
    if sum(k for _, k in roots) != degree:
        raise ValueError("approximant not real-rooted")
    lam = np.array([r for r, _ in roots])
    mult = np.array([k for _, k in roots], dtype=float)
    b = float(beta)
    L = int(np.floor(window / b))
    ells = np.arange(-L, L + 1)
    coeff = b * (mult[None, :] * lam[None, :] ** (-ells[:, None])).sum(axis=1)
    coeff = _clean_complex(coeff, 1e-12 * b * mult.sum())
    return SpectrumTable(ells * b, coeff, ells.reshape(-1, 1),
                         {"beta": str(beta), "N": [n[0] for n in N], "degree": degree,
                          "roots": [(complex(r), int(k)) for r, k in roots]})


def lattice_psf_spectrum(points_in_period, multiplicities, period: float, window: float) -> SpectrumTable:
    """Spectrum of ``sum_a m_a sum_k delta_{a + k T}`` from the lattice Poisson
    formula: ``(1/T) sum_a m_a exp(-2 pi i a s)`` at ``s in Z / T``."""
    a = np.asarray(points_in_period, dtype=float)
    m = np.asarray(multiplicities, dtype=float)
    L = int(np.floor(window * period + 1e-9))
    j = np.arange(-L, L + 1)
    s = j / period
    coeff = (m[None, :] * np.exp(-2j * np.pi * np.outer(s, a))).sum(axis=1) / period
    coeff = _clean_complex(coeff, 1e-12 * m.sum() / period)
    return SpectrumTable(s, coeff, j.reshape(-1, 1), {"source": "lattice-psf"})


# ----------------------------------------------------------------------------
# dominance and constant terms


def _vertex_direction(q: LaurentPoly, v):
    v = tuple(int(x) for x in v)
    for u, faces in normal_fan_representatives([q.newton_polytope()]):
        f = faces[0]
        if f.is_vertex and tuple(int(x) for x in f.vertices[0]) == v:
            return np.asarray(u, dtype=float)
    raise ValueError("v is not a vertex of the Newton polytope")


def _torus_grid(m, res):
    axes = [2 * np.pi * np.arange(res) / res] * m
    g = np.meshgrid(*axes, indexing="ij")
    return np.stack([x.reshape(-1) for x in g], axis=1)


def dominance_radius(q: LaurentPoly, v, grid: int = 64, s0: float = 1.0 / 8):
    """Radius vector ``r = exp(-s u)`` where the vertex term dominates.

    ``u`` points into the normal cone of ``v`` (``v`` minimises ``<u, .>``), so
    every other term shrinks relative to ``c_v z^v`` as ``s`` grows; ``s`` is
    doubled from ``s0`` until ``max_theta |sum_{l != v} c_l z^l| / |c_v z^v|
    <= 1/2`` on the torus fiber.  Returns ``(r, ratio)``.
    """
    v = tuple(int(x) for x in v)
    if v not in q.terms:
        raise ValueError("v is not an exponent of q")
    if q.is_monomial:
        return np.ones(q.m), 0.0
    u = _vertex_direction(q, v)
    th = _torus_grid(q.m, grid if q.m <= 2 else 16)
    cv = complex(q.terms[v])
    others = [(np.array(e, dtype=float) - np.array(v, dtype=float), complex(c))
              for e, c in q.terms.items() if e != v]
    s = s0
    for _ in range(61):
        x = -s * u
        acc = np.zeros(len(th), dtype=complex)
        for d, c in others:
            acc += c * np.exp(d @ x + 1j * (th @ d))
        ratio = float(np.abs(acc).max() / abs(cv))
        if ratio <= 0.5:
            return np.exp(x), ratio
        s *= 2
    raise ValueError("no dominating radius within 60 doublings")


def constant_term_on_torus(H, r, m: int | None = None, tol: float = 1e-10, N0: int = 16,
                           max_points: int = 1 << 22) -> complex:
    """Mean of ``H`` over ``|z_j| = r_j`` by tensor trapezoid rules with doubling."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if m is None:
        m = len(r)
    if len(r) == 1 and m > 1:
        r = np.full(m, r[0])
    N = N0
    prev = None
    while N ** m <= max_points:
        th = _torus_grid(m, N)
        z = r * np.exp(1j * th)
        vals = np.asarray(H(z if m > 1 else z[:, 0]), dtype=complex)
        cur = complex(vals.mean())
        if prev is not None and abs(cur - prev) < tol * max(1.0, abs(cur)):
            return cur
        prev = cur
        N *= 2
    raise ValueError("constant term did not converge")
