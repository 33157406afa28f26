"""Convex polytopes in dimension <= 3.

Rational input (ints, Fractions, integer-valued floats) is handled exactly with
``fractions.Fraction``; anything else falls back to floats with a relative
tolerance of 1e-9.  Faces use the *minimising* convention: the face of ``K`` in
direction ``u`` is the set of points of ``K`` where ``<u, .>`` is smallest.

For three-dimensional hulls scipy's Qhull supplies a candidate triangulation of
the boundary; every facet plane is then recomputed exactly and checked against
all input points, with a brute-force fallback if the check fails.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd, factorial
import numbers

import numpy as np

__all__ = [
    "LatticePolytope",
    "Face",
    "convex_hull",
    "minkowski_sum",
    "volume",
    "mixed_volume",
    "mixed_volume_general",
    "face_in_direction",
    "normal_fan_representatives",
    "is_unfolded",
    "angle_direction",
    "unit_box",
    "simplex",
    "segment",
]

TOL = 1e-9


# ----------------------------------------------------------------------------
# scalar helpers


def _is_exact_scalar(x) -> bool:
    if isinstance(x, (bool, np.bool_)):
        return True
    if isinstance(x, (numbers.Integral, Fraction)):
        return True
    if isinstance(x, (float, np.floating)):
        return float(x).is_integer()
    return False


def _to_exact(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (float, np.floating)):
        return Fraction(int(x))
    return Fraction(int(x))


def _normalize_points(points):
    if isinstance(points, np.ndarray):
        points = points.tolist()
    pts = []
    for p in points:
        if isinstance(p, np.ndarray):
            p = p.tolist()
        pts.append(tuple(p) if isinstance(p, (list, tuple)) else (p,))
    if not pts:
        raise ValueError("empty point set")
    n = len(pts[0])
    if n < 1 or n > 3:
        raise ValueError("ambient dimension must be 1, 2 or 3")
    if any(len(p) != n for p in pts):
        raise ValueError("points have inconsistent dimension")
    exact = all(_is_exact_scalar(x) for p in pts for x in p)
    if exact:
        pts = [tuple(_to_exact(x) for x in p) for p in pts]
    else:
        pts = [tuple(float(x) for x in p) for p in pts]
        if not all(np.isfinite(x) for p in pts for x in p):
            raise ValueError("non-finite coordinate")
    # deterministic order, duplicates removed
    pts = sorted(set(pts))
    return pts, n, exact


class _Arith:
    """Sign tests that are exact for Fractions and tolerant for floats."""

    def __init__(self, exact: bool, scale: float = 1.0):
        self.exact = exact
        self.eps = 0 if exact else TOL * max(1.0, scale)

    def sign(self, x) -> int:
        if x > self.eps:
            return 1
        if x < -self.eps:
            return -1
        return 0

    def zero(self, x) -> bool:
        return self.sign(x) == 0


_EXACT = _Arith(True)


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _row_reduce(rows, ar: _Arith):
    """Reduced row echelon form; returns (rref rows, pivot columns)."""
    M = [list(r) for r in rows]
    if not M:
        return [], []
    ncols = len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(M):
            break
        best = max(range(r, len(M)), key=lambda i: abs(M[i][c]))
        if ar.zero(M[best][c]):
            continue
        M[r], M[best] = M[best], M[r]
        p = M[r][c]
        M[r] = [x / p for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def _null_vector(rows, n, ar: _Arith):
    """A nonzero vector orthogonal to every row (rows of rank < n)."""
    rref, piv = _row_reduce(rows, ar) if rows else ([], [])
    free = [c for c in range(n) if c not in piv]
    f = free[0]
    one = Fraction(1) if ar.exact else 1.0
    zero = Fraction(0) if ar.exact else 0.0
    v = [zero] * n
    v[f] = one
    for row, c in zip(rref, piv):
        v[c] = -row[f]
    return tuple(v)


def _primitive(v):
    """Scale an exact rational vector to a primitive integer vector."""
    den = reduce(lambda a, b: a * b // gcd(a, b), [x.denominator for x in v], 1)
    ints = [int(x * den) for x in v]
    g = reduce(gcd, [abs(x) for x in ints], 0) or 1
    return tuple(Fraction(x // g) for x in ints)


def _unit(v):
    nrm = float(np.sqrt(sum(float(x) ** 2 for x in v)))
    return tuple(float(x) / nrm for x in v)


# ----------------------------------------------------------------------------
# low-dimensional hulls on projected coordinates


def _hull_1d(pts):
    lo, hi = min(pts), max(pts)
    return [lo] if lo == hi else [lo, hi]


def _hull_2d(pts, ar: "_Arith"):
    """Andrew's monotone chain; counter-clockwise, collinear points dropped."""
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return pts

    def turn(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and ar.sign(turn(lower[-2], lower[-1], p)) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and ar.sign(turn(upper[-2], upper[-1], p)) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _facets_3d(pts, ar: _Arith):
    """Facets of a full-dimensional 3-polytope.

    Returns a list of (outward normal, offset, ordered vertex tuple) with
    ``<normal, x> <= offset`` on the polytope.
    """
    centroid = tuple(sum(p[i] for p in pts) / len(pts) for i in range(3))
    planes = []

    def add_plane(a, b, c):
        nrm = _cross(_sub(b, a), _sub(c, a))
        if all(ar.zero(x) for x in nrm):
            return True
        if ar.exact:
            nrm = _primitive(nrm)
        else:
            nrm = _unit(nrm)
        off = _dot(nrm, a)
        if _dot(nrm, centroid) > off:
            nrm = tuple(-x for x in nrm)
            off = -off
        sides = [ar.sign(_dot(nrm, p) - off) for p in pts]
        if any(s > 0 for s in sides):
            return False
        for q_nrm, q_off in planes:
            if all(ar.zero(x - y) for x, y in zip(nrm, q_nrm)) and ar.zero(off - q_off):
                return True
        planes.append((nrm, off))
        return True

    ok = True
    try:
        from scipy.spatial import ConvexHull

        hull = ConvexHull(np.array([[float(x) for x in p] for p in pts]))
        for simplex in hull.simplices:
            if not add_plane(*(pts[i] for i in simplex)):
                ok = False
                break
    except Exception:  # qhull precision trouble: fall through to brute force
        ok = False
    if not ok:
        planes.clear()
        for a, b, c in combinations(pts, 3):
            add_plane(a, b, c)

    facets = []
    for nrm, off in planes:
        on = [p for p in pts if ar.zero(_dot(nrm, p) - off)]
        drop = max(range(3), key=lambda i: abs(nrm[i]))
        keep = [i for i in range(3) if i != drop]
        proj = {tuple(p[i] for i in keep): p for p in on}
        ring = _hull_2d(list(proj), ar)
        facets.append((nrm, off, tuple(proj[q] for q in ring)))
    return facets


# ----------------------------------------------------------------------------
# the polytope type


@dataclass(frozen=True)
class Face:
    """Face of ``parent`` minimising ``<u, .>``."""

    parent: "LatticePolytope"
    u: tuple
    vertices: tuple

    @property
    def is_vertex(self) -> bool:
        return len(self.vertices) == 1

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.vertices])


@dataclass(frozen=True, eq=False)
class LatticePolytope:
    """Convex hull of finitely many points; ``vertices`` are the extreme points.

    Build with :func:`convex_hull`.
    """

    vertices: tuple
    dim: int
    exact: bool
    _info: dict = field(default_factory=dict, repr=False, compare=False)

    def __eq__(self, other):
        return (isinstance(other, LatticePolytope) and self.dim == other.dim
                and set(self.vertices) == set(other.vertices))

    def __hash__(self):
        return hash((self.dim, frozenset(self.vertices)))

    @property
    def arith(self) -> _Arith:
        scale = max([1.0] + [abs(float(x)) for v in self.vertices for x in v])
        return _Arith(self.exact, scale)

    @property
    def affine_dim(self) -> int:
        return self._structure()["d"]

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.vertices])

    def __add__(self, other):
        return minkowski_sum(self, other)

    def _structure(self):
        """Affine hull data and face lattice (cached)."""
        if "d" in self._info:
            return self._info
        ar = self.arith
        V = list(self.vertices)
        base = V[0]
        diffs = [_sub(v, base) for v in V[1:]]
        rref, piv = _row_reduce(diffs, ar) if diffs else ([], [])
        d = len(piv)
        info = self._info
        info["d"] = d
        info["pivots"] = piv
        info["base"] = base
        info["directions"] = rref
        proj = [tuple(v[i] for i in piv) for v in V]
        index = {p: i for i, p in enumerate(proj)}
        # facets as (inward normal in projected coordinates, vertex indices)
        facets = []
        if d == 1:
            lo, hi = min(proj), max(proj)
            one = Fraction(1) if self.exact else 1.0
            facets = [((one,), (index[lo],)), ((-one,), (index[hi],))]
        elif d == 2:
            ring = _hull_2d(proj, ar)
            k = len(ring)
            for i in range(k):
                a, b = ring[i], ring[(i + 1) % k]
                e = _sub(b, a)
                nrm = (-e[1], e[0])  # inward for a counter-clockwise ring
                nrm = _primitive(nrm) if self.exact else _unit(nrm)
                facets.append((nrm, (index[a], index[b])))
            info["ring"] = tuple(index[p] for p in ring)
        elif d == 3:
            for nrm, _off, ring in _facets_3d(proj, ar):
                facets.append((tuple(-x for x in nrm), tuple(index[p] for p in ring)))
        info["facets"] = facets
        return info

    def faces(self):
        """Nonempty proper faces of the polytope inside its affine hull.

        Yields (vertex index set, u) with ``u`` an ambient direction in the
        relative interior of the face's normal cone (up to the lineality space).
        """
        info = self._structure()
        d, piv, facets = info["d"], info["pivots"], info["facets"]
        if d == 0:
            return []
        zero = Fraction(0) if self.exact else 0.0
        faces = {}
        for nrm, idx in facets:
            faces.setdefault(frozenset(idx), []).append(nrm)
        if d == 3:
            for (n1, i1), (n2, i2) in combinations(facets, 2):
                common = frozenset(i1) & frozenset(i2)
                if len(common) >= 2:
                    faces.setdefault(common, [])
        if d >= 2:
            for i in range(len(self.vertices)):
                faces.setdefault(frozenset([i]), [])
        out = []
        for key in sorted(faces, key=lambda s: (len(s), sorted(s))):
            normals = [nrm for nrm, idx in facets if key <= frozenset(idx)]
            w = tuple(sum((nrm[k] for nrm in normals), zero) for k in range(d))
            u = [zero] * self.dim
            for k, c in enumerate(piv):
                u[c] = w[k]
            out.append((key, tuple(u)))
        return out


def convex_hull(points) -> LatticePolytope:
    """Extreme points of a finite point set in dimension <= 3."""
    pts, n, exact = _normalize_points(points)
    scale = max([1.0] + [abs(float(x)) for p in pts for x in p])
    ar = _Arith(exact, scale)
    base = pts[0]
    rref, piv = _row_reduce([_sub(p, base) for p in pts[1:]], ar) if len(pts) > 1 else ([], [])
    d = len(piv)
    proj = {}
    for p in pts:
        proj.setdefault(tuple(p[i] for i in piv), p)
    keys = list(proj)
    if d == 0:
        ext = [pts[0]]
    elif d == 1:
        ext = [proj[q] for q in _hull_1d(keys)]
    elif d == 2:
        ext = [proj[q] for q in _hull_2d(keys, ar)]
    else:
        seen = set()
        for _n, _o, ring in _facets_3d(keys, ar):
            seen.update(ring)
        ext = [proj[q] for q in seen]
    return LatticePolytope(tuple(sorted(ext)), n, exact)


def _coerce(P) -> LatticePolytope:
    return P if isinstance(P, LatticePolytope) else convex_hull(P)


def minkowski_sum(P1, P2) -> LatticePolytope:
    P1, P2 = _coerce(P1), _coerce(P2)
    if P1.dim != P2.dim:
        raise ValueError("Minkowski sum of polytopes of different dimension")
    pts = [_add(a, b) for a in P1.vertices for b in P2.vertices]
    if not (P1.exact and P2.exact):
        pts = [tuple(float(x) for x in p) for p in pts]
    return convex_hull(pts)


def volume(P):
    """``dim``-dimensional volume; exact ``Fraction`` for rational input."""
    P = _coerce(P)
    info = P._structure()
    d = info["d"]
    zero = Fraction(0) if P.exact else 0.0
    if d < P.dim:
        return zero
    V = P.vertices
    if d == 1:
        return max(v[0] for v in V) - min(v[0] for v in V)
    if d == 2:
        ring = [V[i] for i in info["ring"]]
        area = zero
        for a, b in zip(ring, ring[1:] + ring[:1]):
            area += a[0] * b[1] - a[1] * b[0]
        return abs(area) / 2
    apex = V[0]
    vol = zero
    for _nrm, idx in info["facets"]:
        ring = [V[i] for i in idx]
        for a, b in zip(ring[1:-1], ring[2:]):
            det = _dot(_sub(ring[0], apex), _cross(_sub(a, apex), _sub(b, apex)))
            vol += abs(det)
    return vol / 6


def _integer_points(K):
    """Vertices (or raw points) of ``K`` as integer tuples, or ``None``."""
    pts = K.vertices if isinstance(K, LatticePolytope) else K
    out = []
    for p in pts:
        p = p.tolist() if isinstance(p, np.ndarray) else p
        row = []
        for x in (p if isinstance(p, (list, tuple)) else (p,)):
            if isinstance(x, Fraction) and x.denominator == 1:
                row.append(int(x))
            elif isinstance(x, (int, np.integer)) and not isinstance(x, bool):
                row.append(int(x))
            else:
                return None
        out.append(tuple(row))
    return out


def _doubled_area_2d(pts):
    ring = _hull_2d(pts, _EXACT)
    if len(ring) < 3:
        return 0
    return abs(sum(a[0] * b[1] - a[1] * b[0] for a, b in zip(ring, ring[1:] + ring[:1])))


def _mixed_volume_int_2d(A, B):
    """``vol(A + B) - vol(A) - vol(B)`` with integer arithmetic only."""
    A, B = _hull_2d(A, _EXACT), _hull_2d(B, _EXACT)
    S = [(a[0] + b[0], a[1] + b[1]) for a in A for b in B]
    twice = _doubled_area_2d(S) - _doubled_area_2d(A) - _doubled_area_2d(B)
    return twice // 2 if twice % 2 == 0 else Fraction(twice, 2)


def mixed_volume(T):
    """Mixed volume with the normalisation where ``V(K, ..., K) = n! vol(K)``.

    Alternating sum over nonempty subsets ``S`` of ``(-1)^(n-|S|) vol(sum_S K_i)``.
    Pairs of integer polygons take a shortcut that never leaves the integers.
    """
    T = list(T)
    if len(T) == 2:
        A, B = _integer_points(T[0]), _integer_points(T[1])
        if A and B and all(len(p) == 2 for p in A + B):
            return _mixed_volume_int_2d(A, B)
    return mixed_volume_general(T)


def mixed_volume_general(T):
    """The alternating sum over exact or float hulls, any ``n <= 3``."""
    polys = [_coerce(K) for K in T]
    n = len(polys)
    if n == 0:
        raise ValueError("empty tuple")
    if any(K.dim != n for K in polys):
        raise ValueError("mixed volume needs n polytopes in R^n")
    exact = all(K.exact for K in polys)
    total = Fraction(0) if exact else 0.0
    for size in range(1, n + 1):
        for S in combinations(range(n), size):
            acc = reduce(minkowski_sum, [polys[i] for i in S])
            total += (-1) ** (n - size) * volume(acc)
    if exact and total.denominator == 1:
        return int(total)
    return total


def face_in_direction(P, u) -> Face:
    """Vertices of ``P`` minimising ``<u, .>`` (all ties kept)."""
    P = _coerce(P)
    u = tuple(np.atleast_1d(np.asarray(u, dtype=object)).tolist())
    if len(u) != P.dim:
        raise ValueError("direction has the wrong length")
    if all(x == 0 for x in u):
        raise ValueError("direction u must be nonzero")
    exact = P.exact and all(_is_exact_scalar(x) for x in u)
    if exact:
        u = tuple(_to_exact(x) for x in u)
        vals = [_dot(u, v) for v in P.vertices]
        lo = min(vals)
        verts = tuple(v for v, s in zip(P.vertices, vals) if s == lo)
    else:
        uf = tuple(float(x) for x in u)
        vals = [_dot(uf, tuple(float(x) for x in v)) for v in P.vertices]
        lo = min(vals)
        scale = max(1.0, max(abs(x) for x in vals), sum(abs(x) for x in uf))
        verts = tuple(v for v, s in zip(P.vertices, vals) if s - lo <= TOL * scale)
    return Face(P, u, verts)


def _as_float_vector(u):
    return np.array([float(x) for x in u])


def normal_fan_representatives(T):
    """One direction per cell of the common refinement of the normal fans.

    Cells of the common refinement are the normal cones of the faces of the
    Minkowski sum ``S = K_1 + ... + K_n``.  For each nonempty face of ``S``
    (including ``S`` itself when it is not full dimensional, since then some
    ``u != 0`` selects all of ``S``) one relative-interior direction is
    returned: the sum of the inward facet normals of the facets containing the
    face.  Any vector in the same open cone gives the same facial tuple.

    Returns a list of ``(u, faces)`` with ``u`` a float array and ``faces`` the
    list of :class:`Face` of each entry of ``T`` in direction ``u``.
    """
    polys = [_coerce(K) for K in T]
    if not polys:
        raise ValueError("empty tuple")
    n = polys[0].dim
    if any(K.dim != n for K in polys):
        raise ValueError("polytopes live in different dimensions")
    S = reduce(minkowski_sum, polys)
    info = S._structure()
    dirs = [u for _key, u in S.faces()]
    if info["d"] < n:
        dirs.append(_null_vector(info["directions"], n, S.arith))
    out = []
    for u in dirs:
        if S.exact:
            u = _primitive(u)
        out.append((_as_float_vector(u), [face_in_direction(K, u) for K in polys]))
    return out


def is_unfolded(T):
    """Every face of the Minkowski sum has a vertex among its summand faces.

    Returns ``(True, None)`` or ``(False, u)`` with a violating direction.
    """
    for u, faces in normal_fan_representatives(T):
        if not any(f.is_vertex for f in faces):
            return False, u
    return True, None


def angle_direction(theta: float) -> np.ndarray:
    """Direction whose minimising face is the face *maximising* ``(cos, sin)``.

    Case tables written in terms of ``u = r(cos θ, sin θ)`` that list the faces
    furthest along ``u`` are reproduced by ``face_in_direction(K,
    angle_direction(θ))``.
    """
    return -np.array([np.cos(theta), np.sin(theta)])


def unit_box(n: int) -> LatticePolytope:
    """The cube ``[0, 1]^n``."""
    pts = np.array(np.meshgrid(*[[0, 1]] * n, indexing="ij")).reshape(n, -1).T
    return convex_hull(pts.tolist())


def simplex(n: int) -> LatticePolytope:
    pts = [[0] * n] + [[int(i == j) for j in range(n)] for i in range(n)]
    return convex_hull(pts)


def segment(a, b) -> LatticePolytope:
    return convex_hull([a, b])


def n_factorial_volume(P) -> object:
    """``n! vol(P)``, which equals ``mixed_volume([P] * n)``."""
    P = _coerce(P)
    return factorial(P.dim) * volume(P)
