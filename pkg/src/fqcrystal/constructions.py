"""Explicit real-rooted trigonometric maps and model sets.

Example-1 family
----------------
For ``s`` in ``(-1, 1)^m``, ``b > 0`` and a primitive ``gamma`` the map
``P_t = Q_t o rho_m o M`` with ``M = [I_n; -b^T]`` has components

    q_{t,j}(z) = (z_j + t s_j)^{g_m} (1 + t s_m z_m)^{g_j}
               - (1 + t s_j z_j)^{g_m} (z_m + t s_m)^{g_j}.

Writing ``w_k = (z_k + t s_k) / (1 + t s_k z_k)`` the equations say
``w_j^{g_m} = w_m^{g_j}``, so the torus zeros are the curve
``w = zeta^gamma`` (plus, for ``n >= 2`` and ``g_m > 1``, its translates by
``g_m``-th roots of unity in the first ``n`` coordinates).  On ``|zeta| = 1``
the argument of ``z_k`` has the closed form

    a_k(theta) = g_k theta + atan2(t s_k sin 2 pi g_k theta,
                                   1 - t s_k cos 2 pi g_k theta) / pi,

which is strictly increasing.  A real zero is ``x = a'(theta) + k`` with
``k`` in ``Z^n`` such that ``H(theta) = -b.a'(theta) - a_m(theta)`` equals
``j + b.k`` for an integer ``j``; ``H`` decreases by
``Delta = b.gamma' + gamma_m`` over one period, so every label ``(k, j)``
gives exactly one zero.

Cut-and-project
---------------
``psi(t) = (t cos th, t sin th) mod 1`` meets the segments
``L_1 = {(x, c x): 0 <= x < 1/2}`` and ``L_2 = {(x, c - c x): 1/2 <= x < 1}``.
Hits are enumerated exactly by solving ``psi(t) - (x, y) = (k_1, k_2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from functools import reduce

import numpy as np

from .lattice import unimodular_completion, annihilator
from .polyring import LaurentPoly, LaurentMap, TrigMapRep, parse_number

__all__ = [
    "Example1Spec",
    "CutProjectSpec",
    "LambdaP0",
    "Example1Roots",
    "ks_spec",
    "build_example1",
    "example1_eval",
    "lambda_p0",
    "enumerate_roots_example1",
    "arg_curve",
    "fourier_coefficient",
    "fourier_coefficients",
    "support_bound",
    "detected_spectrum",
    "cutproject_multiset",
    "cutproject_fb_closed",
    "alias_vector",
    "spectrum_coefficient",
    "cutproject_frequency",
]


# ----------------------------------------------------------------------------
# Example 1


@dataclass(frozen=True)
class Example1Spec:
    """Parameters of the Example-1 family.  ``b`` is assumed independent of 1
    over the rationals; that cannot be checked from finite input and is only
    recorded in ``assumptions``."""

    s: tuple
    b: tuple
    gamma: tuple
    t: float = 1.0
    s_exact: tuple | None = field(default=None, compare=False)
    b_exact: tuple | None = field(default=None, compare=False)
    assumptions: tuple = field(default=("b rationally independent of 1",), compare=False)

    @classmethod
    def create(cls, s, b, gamma, t=1):
        sp = [parse_number(x) for x in s]
        bp = [parse_number(x) for x in b]
        tv, t_ex = parse_number(t)
        gamma = tuple(int(g) for g in gamma)
        spec = cls(
            s=tuple(float(v) for v, _ in sp),
            b=tuple(float(v) for v, _ in bp),
            gamma=gamma,
            t=float(tv),
            s_exact=tuple(v for v, _ in sp) if all(e for _, e in sp) and t_ex else None,
            b_exact=tuple(v for v, _ in bp) if all(e for _, e in bp) else None,
        )
        spec.validate()
        return spec

    @property
    def n(self) -> int:
        return len(self.b)

    @property
    def m(self) -> int:
        return self.n + 1

    @property
    def delta(self) -> float:
        """``b.gamma' + gamma_m``: root density of every member of the family."""
        return float(np.dot(self.b, self.gamma[:-1]) + self.gamma[-1])

    @property
    def M(self) -> np.ndarray:
        return np.vstack([np.eye(self.n), -np.asarray(self.b)[None, :]])

    def with_t(self, t):
        return Example1Spec.create(self.s_exact or self.s, self.b_exact or self.b, self.gamma, t)

    def validate(self):
        n = self.n
        if n < 1:
            raise ValueError("b must be nonempty")
        if len(self.s) != n + 1 or len(self.gamma) != n + 1:
            raise ValueError("s and gamma must have length n + 1")
        if any(not (-1 < x < 1) for x in self.s):
            raise ValueError("s entries must lie in (-1, 1)")
        if any(x == 0 for x in self.s[:n]):
            raise ValueError("s_j must be nonzero for j <= n")
        if any(x <= 0 for x in self.b):
            raise ValueError("b must be positive")
        if any(g <= 0 for g in self.gamma):
            raise ValueError("gamma must be positive")
        if reduce(gcd, self.gamma) != 1:
            raise ValueError("gamma not primitive")
        if not 0 <= self.t <= 1:
            raise ValueError("t must lie in [0, 1]")


def ks_spec(t=1) -> Example1Spec:
    """The instance ``s = (-1/3, 0)``, ``gamma = (2, 1)``, ``b = 0.3``."""
    return Example1Spec.create(["-1/3", "0"], ["0.3"], [2, 1], t)


def build_example1(spec: Example1Spec, t=None) -> TrigMapRep:
    """Expand ``Q_t`` and pair it with ``M = [I_n; -b^T]``."""
    if t is not None:
        spec = spec.with_t(t)
    m, n = spec.m, spec.n
    if spec.s_exact is not None:
        tt = Fraction(parse_number(spec.t)[0])
        s = [tt * x for x in spec.s_exact]
    else:
        s = [spec.t * x for x in spec.s]
    g = spec.gamma
    z = [LaurentPoly.variable(k, m) for k in range(m)]
    one = LaurentPoly.constant(1, m)
    comps = []
    for j in range(n):
        a = (z[j] + s[j]) ** g[-1] * (one + z[-1] * s[-1]) ** g[j]
        c = (one + z[j] * s[j]) ** g[-1] * (z[-1] + s[-1]) ** g[j]
        comps.append(a - c)
    if spec.b_exact is not None:
        M = [[Fraction(int(i == k)) for k in range(n)] for i in range(n)] + [[-x for x in spec.b_exact]]
    else:
        M = spec.M
    return TrigMapRep(LaurentMap(comps), M)


def example1_eval(spec: Example1Spec, x, t):
    """``P_t(x)``, its Jacobian in ``x`` and ``dP_t/dt`` straight from the
    product formula (no expansion)."""
    n, m = spec.n, spec.m
    x = np.asarray(x, dtype=complex).reshape(n)
    M = spec.M
    z = np.exp(2j * np.pi * (M @ x))
    s = np.asarray(spec.s, dtype=float)
    g = spec.gamma
    gm = g[-1]
    zm, sm = z[-1], s[-1]
    val = np.empty(n, dtype=complex)
    dz = np.zeros((n, m), dtype=complex)
    dt = np.empty(n, dtype=complex)
    B = 1 + t * sm * zm
    D = zm + t * sm
    for j in range(n):
        gj = g[j]
        A = z[j] + t * s[j]
        C = 1 + t * s[j] * z[j]
        Ap, Bp, Cp, Dp = A ** gm, B ** gj, C ** gm, D ** gj
        val[j] = Ap * Bp - Cp * Dp
        dA = gm * A ** (gm - 1)
        dB = gj * B ** (gj - 1)
        dC = gm * C ** (gm - 1)
        dD = gj * D ** (gj - 1)
        dz[j, j] = dA * Bp - dC * t * s[j] * Dp
        dz[j, -1] = Ap * dB * t * sm - Cp * dD
        dt[j] = dA * s[j] * Bp + Ap * dB * sm * zm - dC * s[j] * z[j] * Dp - Cp * dD * sm
    # dz_k/dx_i = 2 pi i z_k M_ki
    J = dz @ (2j * np.pi * z[:, None] * M)
    return val, J, dt


@dataclass(frozen=True)
class LambdaP0:
    """``Lambda(P_0) = B Z^n`` with ``B = (J_11 - J_12 b^T)^{-1}``."""

    B: np.ndarray
    delta: float
    J: list
    delta_displayed_sign: float

    def points(self, box: float):
        """Lattice points in ``[-box, box]^n``."""
        n = self.B.shape[0]
        Binv = np.linalg.inv(self.B)
        corners = np.array(np.meshgrid(*[[-box, box]] * n, indexing="ij")).reshape(n, -1).T
        kk = corners @ Binv.T
        lo = np.floor(kk.min(axis=0)) - 1
        hi = np.ceil(kk.max(axis=0)) + 1
        grids = np.meshgrid(*[np.arange(a, b + 1) for a, b in zip(lo, hi)], indexing="ij")
        K = np.stack([gr.ravel() for gr in grids], axis=1)
        X = K @ self.B.T
        keep = np.all(np.abs(X) <= box, axis=1)
        return X[keep]


def lambda_p0(spec: Example1Spec) -> LambdaP0:
    """Zero lattice of ``P_0``.

    ``P_0(x) = 0`` iff ``M x = gamma theta mod Z^m`` for some ``theta``;
    multiplying by ``J`` (``J gamma = e_m``) the first ``n`` rows give
    ``(J_11 - J_12 b^T) x in Z^n``.  The determinant with ``+`` in place of
    ``-`` is reported as ``delta_displayed_sign`` for comparison.
    """
    n = spec.n
    J = unimodular_completion(spec.gamma)
    Jf = np.array(J, dtype=float)
    J11, J12 = Jf[:n, :n], Jf[:n, n:]
    b = np.asarray(spec.b, dtype=float)[None, :]
    block = J11 - J12 @ b
    det = np.linalg.det(block)
    if abs(det) < 1e-12:
        raise ArithmeticError("singular block")
    other = abs(np.linalg.det(J11 + J12 @ b))
    return LambdaP0(np.linalg.inv(block), abs(det), J, other)


def arg_curve(spec: Example1Spec, theta, offsets=None, t=None, derivative=False):
    """``a_k(theta)`` (shape ``(..., m)``) for the curve component ``offsets``.

    ``offsets`` are phase shifts in units of full turns added to
    ``gamma_k theta`` before the Moebius map; zero is the principal curve.
    """
    t = spec.t if t is None else t
    theta = np.asarray(theta, dtype=float)[..., None]
    g = np.asarray(spec.gamma, dtype=float)
    s = t * np.asarray(spec.s, dtype=float)
    off = np.zeros(spec.m) if offsets is None else np.asarray(offsets, dtype=float)
    psi = 2 * np.pi * (g * theta + off)
    if derivative:
        return g * (1 - s ** 2) / (1 - 2 * s * np.cos(psi) + s ** 2)
    return g * theta + off + np.arctan2(s * np.sin(psi), 1 - s * np.cos(psi)) / np.pi


def _components(spec: Example1Spec, which: str):
    gm = spec.gamma[-1]
    if which == "principal" or spec.n == 1 or gm == 1:
        return [np.zeros(spec.m)]
    # translates by gm-th roots of unity in the first n coordinates, one per
    # orbit of the diagonal action theta -> theta + 1/gm
    seen, out = set(), []
    grids = np.array(np.meshgrid(*[np.arange(gm)] * spec.n, indexing="ij")).reshape(spec.n, -1).T
    for w in grids:
        key = tuple(w)
        if key in seen:
            continue
        for r in range(gm):
            seen.add(tuple((w + r * np.asarray(spec.gamma[:-1])) % gm))
        out.append(np.append(w / gm, 0.0))
    return out


@dataclass
class Example1Roots:
    """Zeros of ``P_t`` in a box with their labels ``(k, j, component)``."""

    points: np.ndarray
    multiplicities: np.ndarray
    theta: np.ndarray
    labels: np.ndarray
    component: np.ndarray
    window: float

    def __len__(self):
        return len(self.points)


def enumerate_roots_example1(spec: Example1Spec, R: float, t=None, components: str = "all",
                             half_open: bool = False) -> Example1Roots:
    """All real zeros of ``P_t`` with every coordinate in ``[-R, R]``
    (``[-R, R)`` when ``half_open``).

    Uses the closed-form argument curve: for each label ``(k, j)`` the scalar
    equation ``H(theta) = j + b.k`` on ``[0, 1)`` is solved by bisection
    followed by Newton steps (``H`` is strictly decreasing).  Multiplicity is
    one for every zero.
    """
    t = spec.t if t is None else float(t)
    n = spec.n
    b = np.asarray(spec.b, dtype=float)
    g = np.asarray(spec.gamma, dtype=float)
    delta = spec.delta
    pts, thetas, labels, comps = [], [], [], []
    for ci, off in enumerate(_components(spec, components)):
        def H(th, deriv=False):
            a = arg_curve(spec, th, off, t, derivative=deriv)
            return -(a[..., :n] @ b) - a[..., n]

        H0 = float(H(np.array(0.0)))
        # a_k(theta) lies in (g_k theta + off_k - 1/2, g_k theta + off_k + 1/2)
        lo_k = np.floor(-R - g[:n] - off[:n] - 1).astype(int)
        hi_k = np.ceil(R - off[:n] + 1).astype(int)
        K = np.array(np.meshgrid(*[np.arange(a, c + 1) for a, c in zip(lo_k, hi_k)], indexing="ij")).reshape(n, -1).T
        bk = K @ b
        # integers j with j + b.k in (H0 - delta, H0]; the window is nudged by
        # eps so that rounding in j + b.k cannot list a zero at theta = 0 twice
        # (as theta = 0 and as theta -> 1 with the neighbouring label)
        eps = 1e-9
        j_lo = np.floor(H0 - delta + eps - bk).astype(int) + 1
        j_hi = np.floor(H0 + eps - bk).astype(int)
        cnt = j_hi - j_lo + 1
        rep = np.repeat(np.arange(len(K)), cnt)
        jj = np.concatenate([np.arange(a, c + 1) for a, c in zip(j_lo, j_hi)]) if len(K) else np.array([], int)
        target = jj + bk[rep]
        # bisection on [0, 1): H(0) = H0 >= target > H0 - delta = H(1)
        lo = np.zeros_like(target)
        hi = np.ones_like(target)
        for _ in range(55):
            mid = (lo + hi) / 2
            right = H(mid) > target
            lo = np.where(right, mid, lo)
            hi = np.where(right, hi, mid)
        th = (lo + hi) / 2
        for _ in range(3):
            th = th - (H(th) - target) / H(th, True)
        th = np.clip(th, 0.0, np.nextafter(1.0, 0.0))
        x = arg_curve(spec, th, off, t)[..., :n] + K[rep]
        pts.append(x)
        thetas.append(th)
        labels.append(np.column_stack([K[rep], jj]))
        comps.append(np.full(len(th), ci))
    x = np.concatenate(pts)
    upper = (x < R) if half_open else (x <= R)
    keep = np.all((x >= -R) & upper, axis=1)
    order = np.lexsort(x[keep].T[::-1])
    return Example1Roots(
        points=x[keep][order],
        multiplicities=np.ones(int(keep.sum()), dtype=int),
        theta=np.concatenate(thetas)[keep][order],
        labels=np.concatenate(labels)[keep][order],
        component=np.concatenate(comps)[keep][order],
        window=float(R),
    )


def fourier_coefficients(spec: Example1Spec, ells, N0: int = 1 << 14, Nmax: int = 1 << 18,
                         tol: float = 1e-10, delta: float | None = None):
    """Fourier-Bohr coefficients at frequencies ``M^T l`` for many labels ``l``.

    Evaluates ``(1/2 pi i) oint prod_j z_j^{-l_j} sum_k alpha_k dz_k / z_k``
    over ``|zeta| = 1`` as ``int_0^1 exp(-2 pi i l.a(tau)) alpha.a'(tau) dtau``
    with the trapezoid rule, doubling the node count until successive values
    agree to ``tol``.  ``alpha`` annihilates ``M`` and ``alpha.gamma`` equals
    the root density (computed by :func:`lambda_p0` unless given).
    """
    ells = np.atleast_2d(np.asarray(ells, dtype=float))
    if ells.shape[1] != spec.m:
        raise ValueError("labels must have length m")
    if delta is None:
        delta = lambda_p0(spec).delta
    alpha = annihilator(spec.b, spec.gamma, delta).alpha

    def rule(N):
        tau = np.arange(N) / N
        a = arg_curve(spec, tau)
        da = arg_curve(spec, tau, derivative=True) @ alpha
        out = np.empty(len(ells), dtype=complex)
        for start in range(0, len(ells), 64):
            blk = ells[start:start + 64]
            ph = np.exp(-2j * np.pi * (a @ blk.T))
            out[start:start + 64] = (da @ ph) / N
        return out

    N = N0
    prev = rule(N)
    while True:
        N *= 2
        cur = rule(N)
        if np.max(np.abs(cur - prev)) < tol:
            return cur
        if N >= Nmax:
            raise RuntimeError("contour quadrature did not converge")
        prev = cur


def fourier_coefficient(spec: Example1Spec, ell, **kw) -> complex:
    return complex(fourier_coefficients(spec, [ell], **kw)[0])


def alias_vector(spec: Example1Spec, max_denominator: int = 10 ** 6):
    """Generator of ``{l in Z^m : M^T l = 0}`` or ``None``.

    The kernel is nonzero exactly when every ``b_j`` is rational; a float
    ``b_j`` counts as rational when it equals ``p/q`` with ``q <=
    max_denominator`` to within 1e-15.  Labels in the same coset of the
    kernel share the frequency ``M^T l``.
    """
    bs = []
    for j, x in enumerate(spec.b):
        fx = spec.b_exact[j] if spec.b_exact is not None else Fraction(x).limit_denominator(max_denominator)
        if abs(float(fx) - x) > 1e-15:
            return None
        bs.append(Fraction(fx))
    L = reduce(lambda a, c: a * c // gcd(a, c), (f.denominator for f in bs), 1)
    return np.array([int(f * L) for f in bs] + [L])


def spectrum_coefficient(spec: Example1Spec, ell, max_terms: int = 50, tol: float = 1e-14) -> complex:
    """Coefficient of the spectrum at ``M^T l``: ``F(l)`` summed over the
    labels ``l + k v`` (``v`` from :func:`alias_vector`)."""
    ell = np.asarray(ell, dtype=int)
    v = alias_vector(spec)
    if v is None:
        return fourier_coefficient(spec, ell)
    total = fourier_coefficient(spec, ell)
    quiet = 0
    for k in range(1, max_terms + 1):
        pair = fourier_coefficients(spec, [ell + k * v, ell - k * v])
        total += pair.sum()
        quiet = quiet + 1 if np.abs(pair).max() < tol else 0
        if quiet >= 2:
            break
    return complex(total)


def support_bound(spec: Example1Spec, r: float) -> float:
    """``g(r) = 2 (beta r + 1 + beta) (2 r + 1)^n`` with ``beta = max 1/b_j``."""
    if r <= 0:
        raise ValueError("r must be positive")
    beta = max(1 / x for x in spec.b)
    return 2 * (beta * r + 1 + beta) * (2 * r + 1) ** spec.n


def detected_spectrum(spec: Example1Spec, r: float, threshold: float = 1e-8):
    """Labels ``l`` with ``M^T l`` in ``[-r, r]^n`` and ``|F(l)| > threshold``.

    Only labels with mixed signs can be nonzero (the integrand is analytic
    inside or outside the circle otherwise); that confines ``l_m`` to
    ``|l_m| <= (r + 1) max 1/b_j + 2`` which is the range scanned.
    Returns ``(labels, frequencies, coefficients)``.
    """
    n = spec.n
    b = np.asarray(spec.b)
    L = int(np.ceil((r + 1) * max(1 / b) + 2))
    rows = []
    for lm in range(-L, L + 1):
        lo = np.ceil(-r + b * lm).astype(int)
        hi = np.floor(r + b * lm).astype(int)
        grids = np.meshgrid(*[np.arange(a, c + 1) for a, c in zip(lo, hi)], indexing="ij")
        K = np.stack([gr.ravel() for gr in grids], axis=1)
        rows.append(np.column_stack([K, np.full(len(K), lm)]))
    ells = np.concatenate(rows)
    coef = fourier_coefficients(spec, ells)
    freqs = ells @ spec.M
    keep = np.abs(coef) > threshold
    return ells[keep].astype(int), freqs[keep], coef[keep]


# ----------------------------------------------------------------------------
# cut-and-project


@dataclass(frozen=True)
class CutProjectSpec:
    theta: float
    c: float

    def __post_init__(self):
        if not 0 < self.theta < np.pi:
            raise ValueError("theta must lie in (0, pi)")
        if abs(np.cos(self.theta)) < 1e-12:
            raise ValueError("tan(theta) must be finite")
        if not abs(self.c) < abs(np.tan(self.theta)):
            raise ValueError("need |c| < |tan theta|")

    @classmethod
    def from_tan(cls, tan_theta: float, c: float):
        return cls(float(np.arctan(tan_theta)) % np.pi, float(c))


# segment data: y = slope * x + intercept for x in [x_lo, x_hi)
def _segment(cp: CutProjectSpec, j: int):
    if j == 1:
        return cp.c, 0.0, 0.0, 0.5
    if j == 2:
        return -cp.c, cp.c, 0.5, 1.0
    raise ValueError("j must be 1 or 2")


def cutproject_multiset(cp: CutProjectSpec, j: int, window):
    """Sorted times ``t`` in ``window = (t_lo, t_hi)`` (or ``[0, T]`` for a
    scalar ``T``) with ``psi(t)`` on ``L_j``.

    Each hit solves ``t cos th - x = k_1`` and ``t sin th - y(x) = k_2`` for
    integers ``k``; for fixed ``k_1`` the admissible ``t`` form an interval
    and ``k_2`` is monotone in ``t``, so hits are listed exactly.
    """
    if np.ndim(window) == 0:
        t_lo, t_hi = 0.0, float(window)
    else:
        t_lo, t_hi = map(float, window)
    slope, icpt, x_lo, x_hi = _segment(cp, j)
    ct, st = np.cos(cp.theta), np.sin(cp.theta)
    D = st - slope * ct  # t = (k2 + icpt - slope k1) / D
    # x = t cos th - k1 in [x_lo, x_hi)
    u_lo, u_hi = sorted((t_lo * ct, t_hi * ct))
    k1 = np.arange(int(np.floor(u_lo - x_hi)) - 1, int(np.ceil(u_hi - x_lo)) + 2)
    # t range per k1 from the x constraint
    ta = (k1 + x_lo) / ct
    tb = (k1 + x_hi) / ct
    tmin = np.maximum(np.minimum(ta, tb), t_lo)
    tmax = np.minimum(np.maximum(ta, tb), t_hi)
    ka = tmin * D - icpt + slope * k1
    kb = tmax * D - icpt + slope * k1
    k2_lo = np.ceil(np.minimum(ka, kb) - 1e-9).astype(np.int64)
    k2_hi = np.floor(np.maximum(ka, kb) + 1e-9).astype(np.int64)
    cnt = np.maximum(k2_hi - k2_lo + 1, 0)
    K1 = np.repeat(k1, cnt)
    start = np.repeat(k2_lo, cnt)
    offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    K2 = start + offs
    t = (K2 + icpt - slope * K1) / D
    x = t * ct - K1
    keep = (x >= x_lo) & (x < x_hi) & (t >= t_lo) & (t <= t_hi)
    return np.sort(t[keep])


def cutproject_frequency(cp: CutProjectSpec, ell):
    ell = np.asarray(ell, dtype=float)
    return ell[..., 0] * np.cos(cp.theta) + ell[..., 1] * np.sin(cp.theta)


def cutproject_fb_closed(cp: CutProjectSpec, j: int, l1, l2):
    """Closed-form Fourier-Bohr coefficient of ``mu_j`` at ``l1 cos th + l2 sin th``."""
    th, c = cp.theta, cp.c
    l1 = np.asarray(l1, dtype=float)
    l2 = np.asarray(l2, dtype=float)
    if j == 1:
        amp = np.sin(th) - c * np.cos(th)
        a = l1 + c * l2
        phase = np.exp(-0.5j * np.pi * a)
    elif j == 2:
        amp = np.sin(th) + c * np.cos(th)
        a = l1 - c * l2
        phase = np.exp(-0.5j * np.pi * (3 * l1 + c * l2))
    else:
        raise ValueError("j must be 1 or 2")
    # sin(pi a / 2) / (pi a) -> 1/2 as a -> 0
    kern = 0.5 * np.sinc(a / 2)
    out = amp * phase * kern
    return complex(out) if out.ndim == 0 else out
