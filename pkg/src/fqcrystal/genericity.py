"""Genericity of Laurent maps and (sampled) uniform genericity of trig maps.

A square Laurent map ``Q`` is generic when no facial system ``Q_u`` (each
component restricted to its ``u``-minimal face, ``u != 0``) has a zero in the
torus.  Only finitely many facial systems occur: one per cell of the common
refinement of the normal fans (see
:func:`fqcrystal.polytope.normal_fan_representatives`).

For a facial system the supports live in parallel affine subspaces, so after a
monomial change of variables it is a system in fewer unknowns:

* a monomial component has no zeros, the system is empty;
* one remaining unknown: a common zero exists iff the univariate gcd has a
  nonzero root (exact over Q when all coefficients are rational);
* two remaining unknowns (``n = 3``): solve two equations, check the third.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .lattice import smith_normal_form, unimodular_inverse
from .polyring import LaurentPoly, LaurentMap, TrigMapRep, facial_restriction
from .polytope import normal_fan_representatives

__all__ = [
    "GenericityVerdict",
    "is_generic",
    "is_uniformly_generic",
    "facial_systems",
    "reduce_support",
]

GENERIC, NON_GENERIC, UNDECIDED = "generic", "non-generic", "undecided"
RESIDUAL_TOL = 1e-8


@dataclass
class GenericityVerdict:
    verdict: str
    witnesses: list = field(default_factory=list)
    margin: float = float("inf")
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.verdict == GENERIC


# ----------------------------------------------------------------------------
# support reduction


def reduce_support(polys):
    """Rewrite polynomials whose supports span a rank-``r`` difference lattice
    as polynomials in ``r`` variables.

    Each component is divided by its smallest exponent (a monomial, harmless
    on the torus).  With ``B`` a basis of the lattice generated by the shifted
    exponents, ``l = B l'`` and ``z^l = w^{l'}`` for ``w_a = z^{B_a}``; that map
    is onto ``(C*)^r``, so common zeros correspond.  Returns
    ``(reduced polys, B)`` with ``B`` an ``m x r`` integer matrix.
    """
    m = polys[0].m
    shifted = []
    for q in polys:
        lo = min(q.terms)
        shifted.append(q.shift(tuple(-x for x in lo)))
    exps = sorted({e for q in shifted for e in q.terms if any(e)})
    if not exps:
        return shifted, np.zeros((m, 0), dtype=int)
    cols = [list(c) for c in zip(*exps)]
    snf = smith_normal_form(cols)
    d = [x for x in snf.invariant_factors if x != 0]
    r = len(d)
    Uinv = unimodular_inverse(snf.U)
    B = [[Uinv[i][a] * d[a] for a in range(r)] for i in range(m)]
    out = []
    for q in shifted:
        acc = {}
        for e, c in q.terms.items():
            ue = [sum(snf.U[i][k] * e[k] for k in range(m)) for i in range(m)]
            acc[tuple(ue[a] // d[a] for a in range(r))] = c
        out.append(LaurentPoly(acc, r))
    return out, np.array(B, dtype=object)


def _lift_point(w, B):
    """``z`` in the torus with ``z^{B_a} = w_a``: take ``z = exp(log w C)``
    where ``C`` solves ``B^T C^T = I`` in the least-squares sense."""
    B = np.asarray(B, dtype=float)
    logs = np.log(np.asarray(w, dtype=complex))
    # z = exp(y), need B^T y = logs
    y = np.linalg.lstsq(B.T, logs, rcond=None)[0]
    return np.exp(y)


# ----------------------------------------------------------------------------
# univariate helpers (exact and numeric)


def _dense(q: LaurentPoly):
    """Low-to-high coefficient list of ``z^-lo q`` (univariate)."""
    E = [e[0] for e in q.terms]
    lo, hi = min(E), max(E)
    out = [0] * (hi - lo + 1)
    for e, c in q.terms.items():
        out[e[0] - lo] = c
    return out


def _trim(p):
    while p and p[-1] == 0:
        p = p[:-1]
    return p


def _poly_rem_exact(a, b):
    a = list(a)
    while len(a) >= len(b):
        coef = a[-1] / b[-1]
        k = len(a) - len(b)
        for i, bc in enumerate(b):
            a[i + k] -= coef * bc
        a = _trim(a[:-1])
    return a


def _gcd_exact(a, b):
    a, b = _trim([Fraction(x) for x in a]), _trim([Fraction(x) for x in b])
    while b:
        a, b = b, _poly_rem_exact(a, b)
    return a


def _strip_low_zeros(p):
    i = 0
    while i < len(p) and p[i] == 0:
        i += 1
    return p[i:]


def _normalized_resultant(a, b):
    """``|Res(a, b)| / (|a|^deg b |b|^deg a)`` for numeric coefficient lists."""
    from .rootfind import _sylvester_det

    a = np.array(_trim(list(a)), dtype=complex)
    b = np.array(_trim(list(b)), dtype=complex)
    da, db = len(a) - 1, len(b) - 1
    if da <= 0 or db <= 0:
        return 1.0
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    return float(abs(_sylvester_det(a / na, b / nb)))


def _univariate_common_root(polys):
    """Decide whether univariate Laurent polys share a nonzero root.

    Returns ``(has_root, root_or_None, margin)``.
    """
    dense = [_strip_low_zeros(_dense(q)) for q in polys]
    if any(len(d) <= 1 for d in dense):
        return False, None, 1.0
    margin = min(_normalized_resultant(dense[0], d) for d in dense[1:])
    if all(q.is_rational for q in polys):
        g = dense[0]
        for d in dense[1:]:
            g = _gcd_exact(g, d)
            if len(g) <= 1:
                return False, None, margin
        g = _strip_low_zeros(g)
        if len(g) <= 1:
            return False, None, margin
        roots = np.roots(np.array([complex(c) for c in g[::-1]]))
        return True, complex(roots[0]), 0.0
    # numeric: roots of the lowest-degree member, checked against the rest
    order = sorted(range(len(dense)), key=lambda i: len(dense[i]))
    base = np.array(dense[order[0]][::-1], dtype=complex)
    roots = np.roots(base)
    best = None
    for r in roots:
        if r == 0:
            continue
        ok = True
        for i in order[1:]:
            d = np.array(dense[i], dtype=complex)
            val = abs(np.polyval(d[::-1], r)) / (np.abs(d).sum() * max(1.0, abs(r)) ** (len(d) - 1))
            if val >= RESIDUAL_TOL:
                ok = False
                break
        if ok:
            best = complex(r)
            break
    return best is not None, best, (0.0 if best is not None else margin)


def _facial_common_root(polys):
    """Common torus zero of a facial system: ``(status, point, margin)`` with
    ``status`` one of True / False / None (undecided)."""
    if any(q.is_monomial for q in polys):
        return False, None, 1.0
    red, B = reduce_support(polys)
    r = B.shape[1]
    if r == 0:
        return False, None, 1.0
    if any(q.is_monomial for q in red):
        return False, None, 1.0
    if r == 1:
        has, w, margin = _univariate_common_root(red)
        if has:
            return True, _lift_point([w], B), margin
        return False, None, margin
    if r == 2:
        from .rootfind import laurent_system_roots_2d

        # try pairs until one has isolated zeros
        for i in range(len(red)):
            for j in range(i + 1, len(red)):
                try:
                    sols = laurent_system_roots_2d(LaurentMap([red[i], red[j]]))
                except Exception:
                    continue
                others = [red[k] for k in range(len(red)) if k not in (i, j)]
                best = float("inf")
                for p, _mult in sols:
                    res = max((abs(q(p)) / np.abs(q.coefficients()).sum() for q in others), default=0.0)
                    best = min(best, res)
                    if res < RESIDUAL_TOL:
                        return True, _lift_point(p, B), 0.0
                if sols or not others:
                    return False, None, min(1.0, best)
        return None, None, 0.0
    return None, None, 0.0


def facial_systems(Q: LaurentMap):
    """``(u, Q_u)`` for one ``u`` per cell of the common refinement."""
    out = []
    for u, faces in normal_fan_representatives(Q.newton_polytopes()):
        ue = faces[0].u
        out.append((u, [facial_restriction(q, ue) for q in Q]))
    return out


def is_generic(Q) -> GenericityVerdict:
    """Decide whether every facial system of the square map ``Q`` is empty."""
    if isinstance(Q, LaurentPoly):
        Q = LaurentMap([Q])
    if Q.n != Q.m:
        raise ValueError("is_generic expects n = m")
    if Q.n > 3:
        raise NotImplementedError("unsupported: n > 3")
    witnesses, margin, undecided = [], float("inf"), []
    for u, Qu in facial_systems(Q):
        status, point, mg = _facial_common_root(Qu)
        margin = min(margin, mg)
        if status is True:
            res = max(abs(q(point)) for q in Qu)
            witnesses.append({"u": u, "system": Qu, "root": point, "residual": float(res)})
        elif status is None:
            undecided.append(u)
    if witnesses:
        return GenericityVerdict(NON_GENERIC, witnesses, 0.0)
    if undecided:
        return GenericityVerdict(UNDECIDED, [{"u": u} for u in undecided], margin)
    return GenericityVerdict(GENERIC, [], margin)


# ----------------------------------------------------------------------------
# uniform genericity


def _twist_grid(m, res):
    axes = [np.arange(res) / res] * m
    return np.array(list(product(*axes)))


def _frequency_faces(P: TrigMapRep):
    """Facial exponent sets of ``P``: for each direction ``u`` of the fan of
    ``M^T N(q_j)``, the exponents of each component on its minimal face."""
    polys = P.newton_polytopes()
    out = []
    for u, faces in normal_fan_representatives(polys):
        comp = []
        for j, q in enumerate(P.Q):
            E = q.exponents()
            vals = (E @ P.M) @ u
            lo = vals.min()
            scale = max(1.0, np.abs(vals).max())
            sel = np.abs(vals - lo) <= 1e-9 * scale
            comp.append([tuple(e) for e in E[sel]])
        out.append((u, comp))
    return out


def is_uniformly_generic(P: TrigMapRep, grid_resolution: int = 8) -> GenericityVerdict:
    """Sample ``g`` on a ``grid_resolution^m`` grid of the torus and test the
    twisted maps ``P_g`` (coefficients ``c_l -> g^l c_l``).

    The verdict is ``generic`` only if every sample is generic and the minimum
    margin exceeds ``sqrt(m)`` times the largest jump of the margin between
    grid neighbours (twice the dip a Lipschitz margin can show between
    samples); a zero at a sample gives ``non-generic`` with that ``g``.
    """
    if grid_resolution < 8:
        raise ValueError("grid_resolution must be at least 8")
    m, n = P.m, P.n
    if m == n:
        v = is_generic(P.Q)
        if v.verdict == NON_GENERIC:
            for w in v.witnesses:
                w["g"] = np.ones(m)
        v.details["reduction"] = "m = n: twists are torus translations"
        return v
    faces = _frequency_faces(P)
    G = _twist_grid(m, grid_resolution)
    res = grid_resolution
    margins = np.full(len(G), np.inf)
    witnesses, undecided = [], False
    for u, comp in faces:
        if any(len(c) == 1 for c in comp):
            continue  # a monomial component: no zeros for any twist
        polys0 = [LaurentPoly({e: P.Q[j].terms[e] for e in c}, m) for j, c in enumerate(comp)]
        _red, B = reduce_support(polys0)
        if B.shape[1] > 1 or n > 2:
            undecided = True
            continue
        for gi, g in enumerate(G):
            zg = np.exp(2j * np.pi * g)
            polys = [q.twist(zg) for q in polys0]
            if n == 1:
                q = polys[0]
                val = abs(sum(complex(c) for c in q.terms.values()))
                mg = val / np.abs(q.coefficients()).sum()
                has = mg < RESIDUAL_TOL
            else:
                status, _pt, mg = _facial_common_root(polys)
                has = status is True
                if status is None:
                    undecided = True
            margins[gi] = min(margins[gi], mg)
            if has:
                witnesses.append({"u": u, "g": g, "system": polys})
    if witnesses:
        return GenericityVerdict(NON_GENERIC, witnesses, 0.0)
    finite = margins[np.isfinite(margins)]
    if finite.size == 0:
        v = GenericityVerdict(UNDECIDED if undecided else GENERIC, [], 1.0)
        v.details["reason"] = "every facial system has a monomial component"
        return v
    grid = margins.reshape((res,) * m)
    jump = 0.0
    for ax in range(m):
        d = np.abs(np.diff(grid, axis=ax, append=np.take(grid, [0], axis=ax)))
        d = d[np.isfinite(d)]
        if d.size:
            jump = max(jump, float(d.max()))
    mg = float(finite.min())
    # every g lies within sqrt(m)/2 grid steps of a sample, so the margin can dip
    # below the sampled minimum by about jump * sqrt(m) / 2; ask for twice that
    verdict = GENERIC if (not undecided and mg > jump * np.sqrt(m)) else UNDECIDED
    v = GenericityVerdict(verdict, [], mg)
    v.details["lipschitz_jump"] = jump
    return v
