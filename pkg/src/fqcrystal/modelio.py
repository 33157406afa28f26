"""JSON model/spec files and fixed-header CSV output.

Model file (a trigonometric map ``Q o rho o M`` or a bare Laurent map)::

    {"m": 2, "n": 1,
     "components": [{"terms": [{"exp": [1, 0], "re": "1", "im": "0"}, ...]}],
     "M": [["1"], ["-3/10"]]}

Numbers may be JSON numbers or strings; ``"p/q"`` and integer strings are
exact rationals, other decimals are floats.  ``M`` is optional.

Example-1 spec file::

    {"s": ["-1/3", "0"], "b": ["0.3"], "gamma": [2, 1], "t": "1"}

Polytope file::

    {"polytopes": [[[0, 0], [1, 0], [0, 1], [1, 1]], ...]}
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
from fractions import Fraction
from pathlib import Path

from .constructions import Example1Spec, CutProjectSpec
from .polyring import LaurentMap, LaurentPoly, TrigMapRep, parse_number

CSV_VERSION = "1"


class ModelError(ValueError):
    """Malformed input file; ``str`` carries the file, field path and reason."""


def _fail(path, where, msg):
    raise ModelError(f"{path}: {where}: {msg}")


def read_json(path):
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"{path}: no such file")
    text = p.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _number(path, where, x):
    if isinstance(x, bool) or not isinstance(x, (int, float, str)):
        _fail(path, where, f"expected a number or numeric string, got {x!r}")
    try:
        v, _exact = parse_number(x)
    except (ValueError, ZeroDivisionError):
        _fail(path, where, f"cannot parse number {x!r}")
    return v


def _int(path, where, x):
    if isinstance(x, bool) or not isinstance(x, int):
        _fail(path, where, f"expected an integer, got {x!r}")
    return x


def parse_model(data, path="<model>"):
    """Return ``(LaurentMap, M or None)``; ``M`` keeps exact entries."""
    if not isinstance(data, dict):
        _fail(path, "$", "expected an object")
    for key in ("m", "components"):
        if key not in data:
            _fail(path, "$", f"missing field {key!r}")
    m = _int(path, "m", data["m"])
    if m < 1:
        _fail(path, "m", "must be positive")
    comps = data["components"]
    if not isinstance(comps, list) or not comps:
        _fail(path, "components", "expected a nonempty list")
    polys = []
    for i, comp in enumerate(comps):
        where = f"components[{i}]"
        if not isinstance(comp, dict) or not isinstance(comp.get("terms"), list):
            _fail(path, where, "expected an object with a 'terms' list")
        terms = {}
        for k, t in enumerate(comp["terms"]):
            tw = f"{where}.terms[{k}]"
            if not isinstance(t, dict) or "exp" not in t:
                _fail(path, tw, "expected an object with 'exp'")
            e = t["exp"]
            if not isinstance(e, list) or len(e) != m:
                _fail(path, tw + ".exp", f"expected a list of {m} integers")
            e = tuple(_int(path, f"{tw}.exp[{j}]", x) for j, x in enumerate(e))
            re = _number(path, tw + ".re", t.get("re", 0))
            im = _number(path, tw + ".im", t.get("im", 0))
            c = re if im == 0 else complex(re) + 1j * float(im)
            terms[e] = terms.get(e, 0) + c
        q = LaurentPoly(terms, m)
        if q.is_zero:
            _fail(path, where, "component is the zero polynomial")
        polys.append(q)
    if "n" in data and _int(path, "n", data["n"]) != len(polys):
        _fail(path, "n", f"n = {data['n']} but {len(polys)} components given")
    Q = LaurentMap(polys)
    M = None
    if data.get("M") is not None:
        rows = data["M"]
        if not isinstance(rows, list) or len(rows) != m:
            _fail(path, "M", f"expected {m} rows")
        M = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or not row:
                _fail(path, f"M[{i}]", "expected a nonempty list")
            M.append([_number(path, f"M[{i}][{j}]", x) for j, x in enumerate(row)])
        if len({len(r) for r in M}) != 1:
            _fail(path, "M", "rows differ in length")
    return Q, M


def load_model(path):
    return parse_model(read_json(path), str(path))


def trig_map(Q, M, path="<model>"):
    if M is None:
        _fail(path, "M", "this subcommand needs a frequency matrix M")
    try:
        return TrigMapRep(Q, M)
    except ValueError as e:
        _fail(path, "M", str(e))


def parse_spec(data, path="<spec>"):
    if not isinstance(data, dict):
        _fail(path, "$", "expected an object")
    for key in ("s", "b", "gamma"):
        if not isinstance(data.get(key), list):
            _fail(path, key, "expected a list")
    s = [x if isinstance(x, str) else _number(path, f"s[{i}]", x) for i, x in enumerate(data["s"])]
    b = [x if isinstance(x, str) else _number(path, f"b[{i}]", x) for i, x in enumerate(data["b"])]
    for i, x in enumerate(s):
        _number(path, f"s[{i}]", x)
    for i, x in enumerate(b):
        _number(path, f"b[{i}]", x)
    gamma = [_int(path, f"gamma[{i}]", g) for i, g in enumerate(data["gamma"])]
    t = data.get("t", 1)
    _number(path, "t", t)
    try:
        return Example1Spec.create(s, b, gamma, t)
    except ValueError as e:
        _fail(path, "$", str(e))


def load_spec(path):
    return parse_spec(read_json(path), str(path))


def parse_cutproject(data, path="<cutproject>"):
    if not isinstance(data, dict):
        _fail(path, "$", "expected an object")
    tan = data.get("tan_theta", "sqrt2")
    c = data.get("c", "sqrt3/5")
    named = {"sqrt2": 2 ** 0.5, "sqrt3/5": 3 ** 0.5 / 5}
    tv = named[tan] if tan in named else float(_number(path, "tan_theta", tan))
    cv = named[c] if c in named else float(_number(path, "c", c))
    try:
        return CutProjectSpec.from_tan(tv, cv)
    except ValueError as e:
        _fail(path, "$", str(e))


def load_polytopes(path):
    data = read_json(path)
    if not isinstance(data, dict) or not isinstance(data.get("polytopes"), list) or not data["polytopes"]:
        _fail(path, "polytopes", "expected a nonempty list of vertex lists")
    out, dim = [], None
    for i, P in enumerate(data["polytopes"]):
        if not isinstance(P, list) or not P:
            _fail(path, f"polytopes[{i}]", "expected a nonempty list of points")
        pts = []
        for k, v in enumerate(P):
            if not isinstance(v, list) or not v:
                _fail(path, f"polytopes[{i}][{k}]", "expected a point")
            if dim is None:
                dim = len(v)
            if len(v) != dim:
                _fail(path, f"polytopes[{i}][{k}]", f"expected {dim} coordinates")
            pts.append(tuple(_number(path, f"polytopes[{i}][{k}][{j}]", x) for j, x in enumerate(v)))
        out.append(pts)
    return out


def _fmt(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def model_to_json(Q: LaurentMap, M=None) -> dict:
    comps = []
    for q in Q:
        terms = []
        for e, c in sorted(q.terms.items()):
            if isinstance(c, complex):
                re, im = c.real, c.imag
            else:
                re, im = c, 0
            terms.append({"exp": list(e), "re": _fmt(re), "im": _fmt(im)})
        comps.append({"terms": terms})
    out = {"m": Q.m, "n": Q.n, "components": comps}
    if M is not None:
        out["M"] = [[_fmt(x) for x in row] for row in M]
    return out


def num(x) -> str:
    """Fixed CSV formatting of a real number."""
    x = float(x)
    if x == 0:
        x = 0.0  # no negative zero
    return f"{x:.17g}"


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"# fq-csv v{CSV_VERSION}"])
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    Path(path).write_text(buf.getvalue())


def read_csv(path):
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# fq-csv"):
        raise ModelError(f"{path}: line 1: not an fq CSV file")
    rows = list(csv.reader(lines[1:]))
    if not rows:
        raise ModelError(f"{path}: line 2: missing header")
    return rows[0], rows[1:]
