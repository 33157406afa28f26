"""Amoeba membership, the Lee-Yang family and condition, and M-stability probes.

Everything here is sampling-based and answers in three values.  Membership of
``x`` in the amoeba of ``q`` is decided on torus fibers: fix the arguments
``theta`` of all but one variable ``z_v``, solve ``q`` for ``z_v`` and compare
the root moduli with ``exp(x_v)``.  The number of roots inside that circle is
the winding number of ``q`` on the fiber, so it can only change across
``theta`` (or along a path in ``x``) by a root passing through the circle,
which is an amoeba point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np
from scipy.optimize import least_squares

from .polyring import LaurentPoly, LaurentMap

__all__ = [
    "AmoebaQuery",
    "FiberScan",
    "StabilityReport",
    "amoeba_contains",
    "fiber_scan",
    "lee_yang_family",
    "is_lee_yang",
    "m_stability_probe",
    "binomial_amoeba_gap",
]

YES, NO, UNDECIDED = "yes", "no", "boundary-undecided"


@dataclass
class AmoebaQuery:
    q: LaurentPoly
    x: np.ndarray
    tolerance: float = 1e-7
    grid: int = 256

    def __post_init__(self):
        self.x = np.atleast_1d(np.asarray(self.x, dtype=float))
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.grid < 64:
            raise ValueError("grid must be at least 64")
        if len(self.x) != self.q.m:
            raise ValueError("x has the wrong length")
        if self.q.is_zero:
            raise ValueError("q is the zero polynomial")


@dataclass
class FiberScan:
    counts: np.ndarray    # roots inside the circle |z_v| = exp(x_v), per theta sample
    gap: float            # min |log|root| - x_v| over all samples
    theta: np.ndarray     # the theta samples (other coordinates)
    var: int              # index of the solved variable
    closest: tuple        # (theta, root) achieving the gap


@dataclass
class StabilityReport:
    stable: str
    tested_directions: int
    min_clearance: float
    violating_subspace: np.ndarray | None = None
    witness: dict = field(default_factory=dict)


def _solve_var(q: LaurentPoly) -> int:
    E = q.exponents()
    spans = E.max(axis=0) - E.min(axis=0)
    return int(np.argmax(spans))


def _fiber_coeffs(q: LaurentPoly, v: int, x, theta):
    """Coefficients (low to high in ``z_v``) of ``z_v^{-lo} q`` on fibers.

    ``theta`` has shape ``(G, m)`` (column ``v`` ignored).  Returns ``(G, d+1)``.
    """
    E = q.exponents()
    c = q.coefficients().astype(complex)
    lo = E[:, v].min()
    d = E[:, v].max() - lo
    other = np.ones(q.m, dtype=bool)
    other[v] = False
    x = np.asarray(x, dtype=float)
    logs = x[None, :] + 1j * theta  # (G, m)
    out = np.zeros((theta.shape[0], d + 1), dtype=complex)
    for e, ce in zip(E, c):
        w = ce * np.exp(logs[:, other] @ e[other].astype(float))
        out[:, e[v] - lo] += w
    return out


def _batched_roots(C):
    """Roots of each row of ``C`` (low to high).  Missing leading terms give
    infinite roots, which count as outside every circle."""
    G, k = C.shape
    d = k - 1
    if d == 0:
        return np.zeros((G, 0), dtype=complex)
    lead = C[:, -1]
    scale = np.abs(C).max(axis=1)
    ok = np.abs(lead) > 1e-14 * np.maximum(scale, 1e-300)
    roots = np.full((G, d), np.inf + 0j)
    if ok.any():
        Cn = C[ok] / lead[ok, None]
        comp = np.zeros((ok.sum(), d, d), dtype=complex)
        comp[:, 0, :] = -Cn[:, -2::-1]
        if d > 1:
            comp[:, np.arange(1, d), np.arange(d - 1)] = 1
        roots[ok] = np.linalg.eigvals(comp)
    for i in np.flatnonzero(~ok):
        r = np.roots(C[i, ::-1]) if np.any(C[i]) else np.array([])
        roots[i, :len(r)] = r
    return roots


def _theta_grid(m: int, v: int, grid: int):
    other = [j for j in range(m) if j != v]
    axes = [2 * np.pi * np.arange(grid) / grid for _ in other]
    th = np.zeros((grid ** len(other), m))
    if other:
        pts = np.array(list(product(*axes)))
        th[:, other] = pts
    return th


def fiber_scan(q: LaurentPoly, x, grid: int = 256, var: int | None = None) -> FiberScan:
    """Solve ``q`` for ``z_var`` over a ``theta`` grid of the other coordinates."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    v = _solve_var(q) if var is None else var
    th = _theta_grid(q.m, v, grid)
    C = _fiber_coeffs(q, v, x, th)
    R = _batched_roots(C)
    with np.errstate(divide="ignore"):
        lr = np.log(np.abs(R))
    finite = np.isfinite(lr)
    counts = np.sum(finite & (lr < x[v]), axis=1)
    dist = np.where(finite, np.abs(lr - x[v]), np.inf)
    if dist.size == 0:
        return FiberScan(counts, float("inf"), th, v, (None, None))
    i, j = np.unravel_index(np.argmin(dist), dist.shape)
    return FiberScan(counts, float(dist[i, j]), th, v, (th[i], R[i, j]))


def amoeba_contains(query, x=None, tolerance: float = 1e-7, grid: int = 256) -> str:
    """``"yes"``, ``"no"`` or ``"boundary-undecided"`` for ``x`` in the amoeba of ``q``.

    Accepts an :class:`AmoebaQuery` or ``(q, x, tolerance, grid)``.
    """
    if not isinstance(query, AmoebaQuery):
        query = AmoebaQuery(query, x, tolerance, grid)
    q = query.q
    if len(q) == 1:
        return NO  # a monomial never vanishes on the torus
    if q.m > 3:
        raise NotImplementedError("unsupported: m > 3")
    scan = fiber_scan(q, query.x, query.grid)
    if scan.counts.min() != scan.counts.max() or scan.gap < query.tolerance:
        return YES
    if scan.gap > 10 * query.tolerance:
        return NO
    return UNDECIDED


def binomial_amoeba_gap(q: LaurentPoly, x) -> float:
    """Signed distance-like quantity for a binomial ``a z^alpha + b z^beta``:
    its amoeba is the hyperplane ``<alpha - beta, x> = ln|b/a|``."""
    if len(q) != 2:
        raise ValueError("not a binomial")
    (ea, a), (eb, b) = q.terms.items()
    d = np.array(ea, dtype=float) - np.array(eb, dtype=float)
    return float(d @ np.asarray(x, dtype=float) - np.log(abs(complex(b)) / abs(complex(a))))


# ----------------------------------------------------------------------------
# Lee-Yang


def lee_yang_family(A) -> LaurentPoly:
    """``sum_J prod_{j in J} (z_j prod_{k not in J} a_jk)`` over subsets ``J``."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("A must be square")
    if not np.allclose(A, A.T, rtol=0, atol=1e-14):
        raise ValueError("A must be symmetric")
    off = A[~np.eye(n, dtype=bool)]
    if off.size and not np.all((np.abs(off) > 0) & (np.abs(off) < 1)):
        raise ValueError("entries must satisfy 0 < |a_jk| < 1")
    terms = {}
    for r in range(n + 1):
        for J in combinations(range(n), r):
            c = 1 + 0j
            for j in J:
                for k in range(n):
                    if k not in J:
                        c *= A[j, k]
            e = tuple(1 if j in J else 0 for j in range(n))
            terms[e] = c.real if c.imag == 0 else c
    return LaurentPoly(terms, n)


def _interior_directions(k: int, per_axis: int = 5):
    """Unit vectors with positive entries in ``R^k``."""
    if k == 0:
        return np.zeros((1, 0))
    if k == 1:
        return np.ones((1, 1))
    ts = (np.arange(per_axis) + 0.5) / per_axis
    if k == 2:
        phi = ts * np.pi / 2
        return np.stack([np.cos(phi), np.sin(phi)], axis=1)
    out = []
    for a, b in product(ts, ts):
        v = np.array([a, b * (1 - a), (1 - a) * (1 - b)]) + 1e-3
        out.append(v / np.linalg.norm(v))
    return np.array(out)


def is_lee_yang(q: LaurentPoly, grid: int = 64, tol: float = 1e-9) -> tuple:
    """Sample the open orthants for zeros with all ``|z_j| < 1`` or all ``> 1``.

    Returns ``(verdict, witness)`` with verdict ``"probably-yes"`` or ``"no"``.
    The other coordinates are placed at log-radii ``-/+ k/8 d`` (``k = 1..64``,
    ``d`` interior directions) with arguments on a ``grid``; ``q`` is then
    solved for the remaining variable, and any root on the same side of the
    unit circle is a zero in the orthant.
    """
    if q.m > 3:
        raise NotImplementedError("unsupported: m > 3")
    if len(q) == 1:
        return "probably-yes", None
    v = _solve_var(q)
    other = [j for j in range(q.m) if j != v]
    dirs = _interior_directions(len(other))
    th = _theta_grid(q.m, v, grid) if other else np.zeros((1, q.m))
    for sign in (-1.0, 1.0):
        for d in dirs:
            for k in range(1, 65):
                x = np.zeros(q.m)
                x[other] = sign * (k / 8) * d
                C = _fiber_coeffs(q, v, x, th)
                R = _batched_roots(C)
                with np.errstate(divide="ignore"):
                    lr = np.log(np.abs(R))
                bad = np.isfinite(lr) & (sign * lr > tol)
                if bad.any():
                    i, j = np.argwhere(bad)[0]
                    z = np.exp(x + 1j * th[i]).astype(complex)
                    z[v] = R[i, j]
                    return "no", {"z": z, "log_abs": np.log(np.abs(z)), "residual": float(abs(q(z)))}
                if not other:
                    break
    return "probably-yes", None


# ----------------------------------------------------------------------------
# M-stability


def _perturbations(M, delta, count, rng):
    Ms = [M]
    if delta > 0:
        for _ in range(count):
            E = rng.normal(size=M.shape)
            Ms.append(M + delta * E / np.linalg.norm(E))
    return Ms


def _line_scan(q, Mp, v_grid, grid):
    """Along ``x = Mp * v`` (``n = 1``): fiber root counts per (v, theta).

    Returns ``(crossing_v or None, min_gap)``.
    """
    var = _solve_var(q)
    th = _theta_grid(q.m, var, grid)
    prev, min_gap = None, float("inf")
    for i, v in enumerate(v_grid):
        x = Mp[:, 0] * v
        C = _fiber_coeffs(q, var, x, th)
        R = _batched_roots(C)
        with np.errstate(divide="ignore"):
            lr = np.log(np.abs(R))
        fin = np.isfinite(lr)
        counts = np.sum(fin & (lr < x[var]), axis=1)
        gap = float(np.min(np.where(fin, np.abs(lr - x[var]), np.inf))) if lr.size else float("inf")
        min_gap = min(min_gap, gap)
        if counts.min() != counts.max():
            return float(v), min_gap
        if prev is not None and np.any(counts != prev):
            return float(0.5 * (v + v_grid[i - 1])), min_gap
        prev = counts
    return None, min_gap


def _common_torus_fiber_root(Q: LaurentMap, x, rng, starts=8):
    """Least-squares search for ``z = exp(x + i theta)`` with ``Q(z) = 0``."""
    m = Q.m

    def resid(th):
        z = np.exp(x + 1j * th)
        vals = np.array([q(z) / np.abs(q.coefficients()).sum() for q in Q])
        return np.concatenate([vals.real, vals.imag])

    best = None
    for _ in range(starts):
        sol = least_squares(resid, rng.uniform(0, 2 * np.pi, m), xtol=1e-14, ftol=1e-14, gtol=1e-14)
        r = float(np.abs(resid(sol.x)).max())
        if best is None or r < best[0]:
            best = (r, sol.x)
    return best


def m_stability_probe(Q, M, delta: float = 0.05, grid: int = 64, *, eps0: float = 1e-3,
                      R: float = 50.0, n_perturb: int = 8, n_radii: int = 160, seed: int = 0,
                      tolerance: float = 1e-7) -> StabilityReport:
    """Search ``M' R^n`` (``|M' - M| <= delta``) for amoeba points of ``Q`` away from 0.

    Radii ``|v|`` run over a geometric grid in ``[eps0, R]`` in both directions
    (``n = 1``) or over a set of unit directions (``n >= 2``).
    """
    if isinstance(Q, LaurentPoly):
        Q = LaurentMap([Q])
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != Q.m and M.shape[1] == Q.m:
        M = M.T
    if M.shape[0] != Q.m:
        raise ValueError("M has the wrong shape")
    n = M.shape[1]
    if np.linalg.matrix_rank(M) < n:
        raise ValueError("M is rank deficient")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if Q.m > 3:
        raise NotImplementedError("unsupported: m > 3")
    rng = np.random.default_rng(seed)
    radii = np.geomspace(eps0, R, n_radii)
    Ms = _perturbations(M, delta, n_perturb, rng)
    clearance = float("inf")
    tested = 0
    if n == 1:
        q = Q[0]
        for Mp in Ms:
            for sgn in (1.0, -1.0):
                tested += 1
                hit, gap = _line_scan(q, Mp, sgn * radii, grid)
                clearance = min(clearance, gap)
                if hit is not None or gap < tolerance:
                    v = hit if hit is not None else float("nan")
                    return StabilityReport("unstable", tested, 0.0, Mp,
                                           {"v": v, "x": Mp[:, 0] * v})
        return StabilityReport("probably-stable", tested, clearance)
    dirs = rng.normal(size=(16 * n, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    for Mp in Ms:
        for d in dirs:
            tested += 1
            for r in radii:
                x = Mp @ (r * d)
                gaps, all_yes = [], True
                for q in Q:
                    scan = fiber_scan(q, x, grid)
                    gaps.append(scan.gap)
                    if not (scan.counts.min() != scan.counts.max() or scan.gap < tolerance):
                        all_yes = False
                clearance = min(clearance, max(gaps))
                if all_yes:
                    res, th = _common_torus_fiber_root(Q, x, rng)
                    if res < 1e-8:
                        return StabilityReport("unstable", tested, 0.0, Mp,
                                               {"v": r * d, "x": x, "theta": th, "residual": res})
    return StabilityReport("probably-stable", tested, clearance)
