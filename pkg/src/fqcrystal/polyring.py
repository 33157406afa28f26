"""Laurent polynomials, Laurent maps and trigonometric maps ``P = Q o rho o M``.

A :class:`LaurentPoly` is a dict from integer exponent tuples to coefficients.
Coefficients stay exact (``int``/``Fraction``) as long as every operation keeps
them rational, which the genericity module exploits for exact resultants.
Anything complex is stored as a Python ``complex``.

A trigonometric map is only ever stored as a pair ``(Q, M)``; its frequencies
are ``M^T l`` for the exponents ``l`` of ``Q``.
"""
from __future__ import annotations

from fractions import Fraction
import numbers
from typing import Iterable, Mapping

import numpy as np

from .lattice import as_int_matrix, int_det, smith_normal_form, unimodular_inverse, lattice_index
from .polytope import convex_hull, LatticePolytope, TOL

__all__ = [
    "LaurentPoly",
    "LaurentMap",
    "TrigMapRep",
    "parse_number",
    "eval_laurent",
    "eval_trig",
    "spectrum_trig",
    "facial_restriction",
    "monomial_substitute",
    "gl_transform",
    "is_minimal",
    "minimal_representation",
]

MERGE_RTOL = 1e-14


def parse_number(x):
    """Decimal string or number -> Fraction when written "p/q" or integral,
    float otherwise.  Returns ``(value, exact_flag)``."""
    if isinstance(x, Fraction):
        return x, True
    if isinstance(x, numbers.Integral):
        return Fraction(int(x)), True
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            num, den = s.split("/", 1)
            return Fraction(int(num), int(den)), True
        try:
            return Fraction(int(s)), True
        except ValueError:
            return float(s), False
    v = float(x)
    if v.is_integer():
        return Fraction(int(v)), True
    return v, False


def _is_rational(c) -> bool:
    return isinstance(c, (numbers.Integral, Fraction)) and not isinstance(c, bool)


def _clean(terms: Mapping) -> dict:
    out = {}
    for e, c in terms.items():
        if isinstance(c, (np.complexfloating, complex)):
            c = complex(c)
            if c.imag == 0.0:
                c = c.real
        if isinstance(c, np.floating):
            c = float(c)
        if isinstance(c, np.integer):
            c = int(c)
        if isinstance(c, numbers.Integral):
            c = Fraction(int(c))
        if c != 0:
            out[tuple(int(x) for x in e)] = c
    if out:
        big = max(abs(c) for c in out.values())
        out = {e: c for e, c in out.items() if _is_rational(c) or abs(c) >= MERGE_RTOL * big}
    return out


class LaurentPoly:
    """Sum of ``c_l z^l`` over finitely many integer exponents ``l``."""

    __slots__ = ("m", "terms")

    def __init__(self, terms: Mapping | Iterable = (), m: int | None = None):
        if not isinstance(terms, Mapping):
            acc = {}
            for e, c in terms:
                e = tuple(int(x) for x in e)
                acc[e] = acc.get(e, 0) + c
            terms = acc
        terms = _clean(terms)
        if m is None:
            if not terms:
                raise ValueError("cannot infer the number of variables of the zero polynomial")
            m = len(next(iter(terms)))
        if any(len(e) != m for e in terms):
            raise ValueError("exponent length does not match m")
        self.m = int(m)
        self.terms = terms

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c, m: int):
        return cls({(0,) * m: c}, m)

    @classmethod
    def monomial(cls, exp, c=1):
        exp = tuple(int(x) for x in exp)
        return cls({exp: c}, len(exp))

    @classmethod
    def variable(cls, j: int, m: int):
        e = [0] * m
        e[j] = 1
        return cls({tuple(e): 1}, m)

    # -- basic queries ----------------------------------------------------
    def __repr__(self):
        body = " + ".join(f"({c})*z^{list(e)}" for e, c in sorted(self.terms.items()))
        return f"LaurentPoly({body or '0'}, m={self.m})"

    def __eq__(self, other):
        if isinstance(other, numbers.Number):
            other = LaurentPoly.constant(other, self.m)
        return isinstance(other, LaurentPoly) and self.m == other.m and self.terms == other.terms

    def __hash__(self):
        return hash((self.m, frozenset(self.terms.items())))

    def __len__(self):
        return len(self.terms)

    @property
    def support(self) -> list:
        return sorted(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    @property
    def is_rational(self) -> bool:
        return all(_is_rational(c) for c in self.terms.values())

    def exponents(self) -> np.ndarray:
        return np.array(self.support, dtype=np.int64).reshape(-1, self.m)

    def coefficients(self) -> np.ndarray:
        return np.array([complex(self.terms[e]) for e in self.support], dtype=complex)

    def coefficient(self, exp):
        return self.terms.get(tuple(int(x) for x in exp), 0)

    def newton_polytope(self) -> LatticePolytope:
        if self.is_zero:
            raise ValueError("zero polynomial has no Newton polytope")
        return convex_hull([list(e) for e in self.support])

    # -- arithmetic -------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, LaurentPoly):
            if other.m != self.m:
                raise ValueError("variable counts differ")
            return other
        return LaurentPoly.constant(other, self.m)

    def __add__(self, other):
        other = self._lift(other)
        acc = dict(self.terms)
        for e, c in other.terms.items():
            acc[e] = acc.get(e, 0) + c
        return LaurentPoly(acc, self.m)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.terms.items()}, self.m)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        acc = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
        return LaurentPoly(acc, self.m)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial:
                raise ValueError("only monomials have Laurent inverses")
            (e, c), = self.terms.items()
            return LaurentPoly({tuple(k * x for x in e): 1 / c ** (-k)}, self.m)
        out = LaurentPoly.constant(1, self.m)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, exp):
        """Multiply by the monomial ``z^exp``."""
        exp = tuple(int(x) for x in exp)
        return LaurentPoly({tuple(a + b for a, b in zip(e, exp)): c for e, c in self.terms.items()}, self.m)

    def scale(self, c):
        return LaurentPoly({e: c * v for e, v in self.terms.items()}, self.m)

    def torus_conjugate(self):
        """The polynomial equal to ``conj(q(z))`` for ``z`` on the unit torus."""
        return LaurentPoly({tuple(-x for x in e): (c.conjugate() if isinstance(c, complex) else c)
                            for e, c in self.terms.items()}, self.m)

    def twist(self, g):
        """Coefficient twist ``c_l -> g^l c_l`` for ``g`` on the torus."""
        g = np.asarray(g, dtype=complex)
        return LaurentPoly({e: complex(c) * complex(np.prod(g ** np.array(e))) for e, c in self.terms.items()}, self.m)

    def to_complex(self):
        return LaurentPoly({e: complex(c) for e, c in self.terms.items()}, self.m)

    def __call__(self, z):
        return eval_laurent(self, z)


def eval_laurent(q: LaurentPoly, z):
    """Evaluate ``q`` at ``z`` (shape ``(..., m)``), vectorised over leading axes.

    Monomials are formed by integer powers and summed with numpy's pairwise
    summation.  A zero coordinate raised to a negative power raises
    ``ZeroDivisionError``.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim <= 1
    z = z.reshape(-1, q.m) if not scalar else z.reshape(1, q.m)
    if q.is_zero:
        out = np.zeros(z.shape[0], dtype=complex)
    else:
        E = q.exponents()
        if np.any((z == 0)[:, None, :] & (E < 0)[None, :, :]):
            raise ZeroDivisionError("zero coordinate raised to a negative power")
        with np.errstate(divide="ignore", invalid="ignore"):
            mons = np.prod(z[:, None, :] ** E[None, :, :], axis=-1)
        out = np.sum(mons * q.coefficients()[None, :], axis=-1)
    return complex(out[0]) if scalar else out


class LaurentMap:
    """Tuple ``Q = [q_1, ..., q_n]`` of Laurent polynomials in the same ``m`` variables."""

    def __init__(self, components):
        comps = list(components)
        if not comps:
            raise ValueError("a Laurent map needs at least one component")
        ms = {q.m for q in comps}
        if len(ms) != 1:
            raise ValueError("components use different variable counts")
        self.components = comps
        self.m = ms.pop()

    @property
    def n(self) -> int:
        return len(self.components)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __eq__(self, other):
        return isinstance(other, LaurentMap) and self.components == other.components

    def __repr__(self):
        return f"LaurentMap({self.components!r})"

    def __call__(self, z):
        return np.stack([np.asarray(eval_laurent(q, z)) for q in self.components], axis=-1)

    def exponent_set(self) -> list:
        return sorted({e for q in self.components for e in q.terms})

    def newton_polytopes(self) -> list:
        return [q.newton_polytope() for q in self.components]

    def twist(self, g):
        return LaurentMap([q.twist(g) for q in self.components])

    @property
    def is_rational(self) -> bool:
        return all(q.is_rational for q in self.components)


def _as_laurent_map(Q) -> LaurentMap:
    if isinstance(Q, LaurentMap):
        return Q
    if isinstance(Q, LaurentPoly):
        return LaurentMap([Q])
    return LaurentMap(list(Q))


class TrigMapRep:
    """``P(x) = Q(rho_m(M x))`` with ``rho_m(w) = exp(2 pi i w)`` coordinatewise."""

    def __init__(self, Q, M):
        self.Q = _as_laurent_map(Q)
        rows = np.asarray(M, dtype=object)
        if rows.ndim == 1:
            rows = rows.reshape(-1, 1)
        parsed = [[parse_number(x) for x in r] for r in rows.tolist()]
        self.M_exact = None
        if all(ex for r in parsed for _v, ex in r):
            self.M_exact = [[v for v, _ in r] for r in parsed]
        self.M = np.array([[float(v) for v, _ in r] for r in parsed], dtype=float)
        m, n = self.M.shape
        if m != self.Q.m:
            raise ValueError(f"M has {m} rows but Q has {self.Q.m} variables")
        if n != self.Q.n:
            raise ValueError(f"M has {n} columns but Q has {self.Q.n} components")
        sv = np.linalg.svd(self.M, compute_uv=False)
        if sv.min() <= 1e-9 * sv.max():
            raise ValueError("M does not have full column rank")

    @property
    def m(self):
        return self.Q.m

    @property
    def n(self):
        return self.Q.n

    def __repr__(self):
        return f"TrigMapRep(Q={self.Q!r}, M={self.M.tolist()!r})"

    def frequencies(self, j: int):
        """``(M^T l, c_l)`` arrays for component ``j``."""
        q = self.Q[j]
        return q.exponents() @ self.M, q.coefficients()

    def __call__(self, x):
        return eval_trig(self, x)

    def jacobian(self, x):
        """``dP_j/dx_k`` at ``x`` (shape ``(..., n, n)``)."""
        x = np.asarray(x, dtype=complex)
        scalar = x.ndim <= 1
        X = x.reshape(-1, self.n)
        rows = []
        for j in range(self.n):
            W, c = self.frequencies(j)
            ph = np.exp(2j * np.pi * (X @ W.T))
            rows.append((ph * c) @ (2j * np.pi * W))
        J = np.stack(rows, axis=-2)
        return J[0] if scalar else J

    def newton_polytopes(self) -> list:
        """``M^T N(q_j)``: real (or rational) polytopes in ``R^n``."""
        out = []
        for q in self.Q:
            E = q.exponents()
            if self.M_exact is not None:
                pts = [[sum(Fraction(int(e[i])) * self.M_exact[i][k] for i in range(self.m))
                        for k in range(self.n)] for e in E]
            else:
                pts = (E @ self.M).tolist()
            out.append(convex_hull(pts))
        return out


def eval_trig(P: TrigMapRep, x):
    """``Q(rho_m(M x))`` for ``x`` of shape ``(..., n)``; returns shape ``(..., n)``."""
    x = np.asarray(x, dtype=complex)
    scalar = x.ndim <= 1
    X = x.reshape(-1, P.n)
    out = []
    for j in range(P.n):
        W, c = P.frequencies(j)
        arg = X @ W.T
        growth = float(np.max(np.abs(2 * np.pi * arg.imag))) if arg.size else 0.0
        if growth > 700:
            raise OverflowError(f"|Im| too large: exponent magnitude {growth:.3g} exceeds 700")
        out.append(np.sum(np.exp(2j * np.pi * arg) * c, axis=-1))
    res = np.stack(out, axis=-1)
    return res[0] if scalar else res


def spectrum_trig(P: TrigMapRep, tol: float = 1e-10):
    """Frequencies of ``P``: list of ``(frequency, component, coefficient)``.

    Distinct exponents with the same frequency ``M^T l`` (possible when the
    rows of ``M`` are rationally dependent) are merged and their coefficients
    added.
    """
    out = []
    for j, q in enumerate(P.Q):
        W, c = P.frequencies(j)
        merged = []
        for w, cc in sorted(zip(W.tolist(), c.tolist()), key=lambda t: t[0]):
            w = np.array(w)
            for item in merged:
                if np.max(np.abs(item[0] - w)) <= tol * max(1.0, np.max(np.abs(w))):
                    item[1] += cc
                    break
            else:
                merged.append([w, cc])
        big = max(abs(v) for _, v in merged)
        out.extend((w, j, v) for w, v in merged if abs(v) > MERGE_RTOL * big)
    return out


def facial_restriction(q: LaurentPoly, u) -> LaurentPoly:
    """Terms of ``q`` whose exponents minimise ``<u, l>``."""
    u = np.atleast_1d(np.asarray(u, dtype=object))
    if len(u) != q.m:
        raise ValueError("direction has the wrong length")
    if all(x == 0 for x in u):
        raise ValueError("direction u must be nonzero")
    exact = all(isinstance(x, (numbers.Integral, Fraction)) or float(x).is_integer() for x in u)
    if exact:
        uu = [Fraction(x) if not isinstance(x, float) else Fraction(int(x)) for x in u]
        vals = {e: sum(a * b for a, b in zip(uu, e)) for e in q.terms}
        lo = min(vals.values())
        keep = {e: c for e, c in q.terms.items() if vals[e] == lo}
    else:
        uf = np.array([float(x) for x in u])
        vals = {e: float(uf @ np.array(e, dtype=float)) for e in q.terms}
        lo = min(vals.values())
        scale = max(1.0, float(np.abs(uf).sum()) * max(1, max(abs(x) for e in q.terms for x in e)))
        keep = {e: c for e, c in q.terms.items() if vals[e] - lo <= TOL * scale}
    return LaurentPoly(keep, q.m)


def monomial_substitute(Q, N):
    """``Q o N~`` where ``(N~ w)_j = prod_k w_k^{N_jk}``: exponents ``l -> N^T l``.

    ``N`` is an integer ``m x k`` matrix; the result has ``k`` variables.
    """
    single = isinstance(Q, LaurentPoly)
    Qm = _as_laurent_map(Q)
    N = as_int_matrix(np.asarray(N, dtype=object).reshape(Qm.m, -1))
    k = len(N[0])
    comps = []
    for q in Qm:
        acc = {}
        for e, c in q.terms.items():
            ne = tuple(sum(e[i] * N[i][j] for i in range(Qm.m)) for j in range(k))
            acc[ne] = acc.get(ne, 0) + c
        comps.append(LaurentPoly(acc, k))
    return comps[0] if single else LaurentMap(comps)


def gl_transform(Q, A):
    """Change of variables by a unimodular ``A``: exponents ``l -> A l``.

    If ``Q_2 = gl_transform(Q_1, A)`` then ``Q_2(w) = Q_1(z)`` with
    ``z_i = prod_j w_j^{A_ji}``.
    """
    A = as_int_matrix(A)
    if len(A) != len(A[0]) or int_det(A) not in (1, -1):
        raise ValueError("A must be unimodular")
    return monomial_substitute(Q, [list(r) for r in zip(*A)])


def is_minimal(Q) -> bool:
    """The exponents of ``Q`` generate ``Z^m`` as a group."""
    Qm = _as_laurent_map(Q)
    return lattice_index([list(e) for e in Qm.exponent_set()]) == 1


def minimal_representation(P: TrigMapRep) -> TrigMapRep:
    """Rewrite ``P = Q o rho o M`` over the group generated by the exponents.

    With ``B`` a basis matrix of that group (``m x r``), exponents ``l = B l'``
    and ``M' = B^T M``, so the frequencies are unchanged.
    """
    E = [list(e) for e in P.Q.exponent_set()]
    cols = [list(c) for c in zip(*E)]  # m x k
    snf = smith_normal_form(cols)
    d = [x for x in snf.invariant_factors if x != 0]
    r = len(d)
    Uinv = unimodular_inverse(snf.U)
    B = [[Uinv[i][j] * d[j] for j in range(r)] for i in range(P.m)]
    comps = []
    for q in P.Q:
        acc = {}
        for e, c in q.terms.items():
            ue = [sum(snf.U[i][k] * e[k] for k in range(P.m)) for i in range(P.m)]
            if any(ue[i] % d[i] for i in range(r)) or any(ue[i] for i in range(r, P.m)):
                raise ArithmeticError("exponent outside the computed lattice")
            acc[tuple(ue[i] // d[i] for i in range(r))] = c
        comps.append(LaurentPoly(acc, r))
    if P.M_exact is not None:
        Mn = [[sum(Fraction(B[i][a]) * P.M_exact[i][k] for i in range(P.m)) for k in range(P.n)] for a in range(r)]
    else:
        Mn = (np.array(B, dtype=float).T @ P.M).tolist()
    return TrigMapRep(LaurentMap(comps), Mn)
