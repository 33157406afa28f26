"""``fq`` command line.

Every subcommand writes its artifacts and a ``manifest.json`` to ``--out``
and prints a short summary.  Exit status: 0 success, 1 computational error,
2 usage error or missing/malformed input.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import modelio
from .modelio import ModelError, num

log = logging.getLogger("fq")

SUBCOMMANDS = ("construct", "roots", "spectrum", "cutproject", "generic", "unfolded", "mixedvol",
               "amoeba", "leeyang", "stability", "verify", "plot")


class UsageError(Exception):
    pass


# ----------------------------------------------------------------------------
# helpers


def _inputs(args):
    out = {}
    for key in ("model", "spec", "polytopes", "input"):
        p = getattr(args, key, None)
        if p:
            out[key] = {"path": str(p), "sha256": modelio.file_digest(p)}
    return out


def _timestamp():
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = float(epoch) if epoch else time.time()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


def _manifest(args, artifacts):
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func", "model", "spec", "polytopes", "input") and not callable(v)}
    return {
        "subcommand": args.command,
        "inputs": _inputs(args),
        "parameters": {k: (str(v) if isinstance(v, Path) else v) for k, v in params.items()},
        "tool": "fqcrystal",
        "version": __version__,
        "seed": args.seed,
        "timestamp": _timestamp(),
        "artifacts": sorted(artifacts),
    }


class Output:
    def __init__(self, args):
        self.args = args
        self.dir = Path(args.out)
        self.artifacts = []

    def _path(self, name):
        self.dir.mkdir(parents=True, exist_ok=True)
        self.artifacts.append(name)
        return self.dir / name

    def csv(self, name, header, rows):
        modelio.write_csv(self._path(name), header, rows)

    def json(self, name, obj):
        self._path(name).write_text(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")

    def text(self, name, text):
        self._path(name).write_text(text)

    def finish(self):
        self.dir.mkdir(parents=True, exist_ok=True)
        m = _manifest(self.args, self.artifacts)
        (self.dir / "manifest.json").write_text(json.dumps(m, indent=2, sort_keys=True) + "\n")


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return str(x)


def _need(args, *keys):
    for k in keys:
        if not getattr(args, k, None):
            raise UsageError(f"{args.command}: --{k} is required")


def _model(args):
    _need(args, "model")
    return modelio.load_model(args.model)


def _spec(args):
    _need(args, "spec")
    return modelio.load_spec(args.spec)


def _poly_str(q):
    return " + ".join(f"({c})*z^{list(e)}" for e, c in sorted(q.terms.items()))


# ----------------------------------------------------------------------------
# subcommands


def cmd_construct(args, out):
    from .constructions import build_example1, lambda_p0

    spec = _spec(args)
    if args.dry_run:
        return "spec ok"
    P = build_example1(spec)
    lam = lambda_p0(spec)
    M = P.M_exact if P.M_exact is not None else P.M.tolist()
    out.json("model.json", modelio.model_to_json(P.Q, M))
    rows = [[j, " ".join(map(str, e)), num(complex(c).real), num(complex(c).imag)]
            for j, q in enumerate(P.Q) for e, c in sorted(q.terms.items())]
    out.csv("terms.csv", ["component", "exponent", "re", "im"], rows)
    return f"m = {P.m}, n = {P.n}, density = {lam.delta:.12g}\n" + "\n".join(_poly_str(q) for q in P.Q)


def cmd_roots(args, out):
    if args.spec:
        from .constructions import enumerate_roots_example1

        spec = _spec(args)
        if args.dry_run:
            return "spec ok"
        R = enumerate_roots_example1(spec, args.window, half_open=True)
        pts = R.points.reshape(len(R.points), -1)
        rows = [[*(num(x) for x in p), "0", int(k)] for p, k in zip(pts, R.multiplicities)]
        header = [f"x{j + 1}" for j in range(pts.shape[1])] + ["im", "multiplicity"]
    else:
        from .rootfind import real_roots_1d

        Q, M = _model(args)
        P = modelio.trig_map(Q, M, args.model)
        if P.n != 1:
            raise UsageError("roots --model supports n = 1 only")
        if args.dry_run:
            return "model ok"
        roots = real_roots_1d(P, (-args.window, args.window), tol=args.tol)
        rows = [[num(z.real), num(z.imag), int(k)] for z, k in roots]
        header = ["x1", "im", "multiplicity"]
    out.csv("roots.csv", header, rows)
    count = sum(int(r[-1]) for r in rows)
    return f"{count} roots (with multiplicity) in [-{args.window}, {args.window})"


def cmd_spectrum(args, out):
    if args.spec:
        from .constructions import detected_spectrum

        spec = _spec(args)
        if args.dry_run:
            return "spec ok"
        labels, freqs, coef = detected_spectrum(spec, args.window, threshold=args.tol)
        freqs = np.atleast_2d(np.asarray(freqs, dtype=float).reshape(len(labels), -1))
    else:
        from .measures import spectrum_rational_approx

        Q, M = _model(args)
        if M is None:
            raise ModelError(f"{args.model}: M: spectrum needs a frequency matrix M")
        if args.dry_run:
            return "model ok"
        z = spectrum_rational_approx(Q, M, args.window)
        keep = np.abs(z.coefficients) > args.tol
        labels, freqs, coef = z.labels[keep], z.frequencies[keep], z.coefficients[keep]
    header = [f"l{j + 1}" for j in range(labels.shape[1])] + [f"s{j + 1}" for j in range(freqs.shape[1])] + ["re", "im"]
    rows = [[*map(int, l), *(num(x) for x in s), num(c.real), num(c.imag)]
            for l, s, c in zip(labels, freqs, coef)]
    out.csv("spectrum.csv", header, rows)
    return f"{len(rows)} spectrum atoms with |s| <= {args.window}"


def cmd_cutproject(args, out):
    from .constructions import cutproject_multiset
    from .measures import DiscreteMeasure, empirical_fourier_bohr

    data = modelio.read_json(args.spec) if args.spec else {}
    cp = modelio.parse_cutproject(data, args.spec or "<defaults>")
    if args.dry_run:
        return "parameters ok"
    r = args.window
    rows, pts = [], []
    for j in (1, 2):
        t = cutproject_multiset(cp, j, (-r, r))
        pts.append(t)
        rows.extend([num(x), j] for x in t)
    rows.sort(key=lambda row: float(row[0]))
    out.csv("cutproject.csv", ["t", "component"], rows)
    allp = np.concatenate(pts)
    mu = DiscreteMeasure(allp, np.ones(len(allp)), r)
    dens = empirical_fourier_bohr(mu, 0.0, r).real
    return f"{len(rows)} points in [-{r}, {r}], density {dens:.6f} (sin theta = {np.sin(cp.theta):.6f})"


def cmd_generic(args, out):
    from .genericity import is_generic, is_uniformly_generic

    Q, M = _model(args)
    if args.dry_run:
        return "model ok"
    if M is not None:
        P = modelio.trig_map(Q, M, args.model)
        v = is_uniformly_generic(P, max(args.grid, 8) if args.grid else 8)
        kind = "uniform"
    else:
        if Q.n != Q.m:
            raise UsageError("generic: a Laurent map needs n = m (or give M for the uniform test)")
        v = is_generic(Q)
        kind = "laurent"
    rows = []
    for w in v.witnesses:
        u = " ".join(num(x) for x in np.atleast_1d(w.get("u", [])))
        g = " ".join(num(x) for x in np.atleast_1d(w.get("g", [])))
        root = w.get("root")
        rs = "" if root is None else " ".join(f"{num(z.real)}{'+' if z.imag >= 0 else '-'}{num(abs(z.imag))}j"
                                             for z in np.atleast_1d(root))
        rows.append([u, g, rs, num(w.get("residual", float("nan")))])
    out.csv("witnesses.csv", ["u", "g", "root", "residual"], rows)
    out.json("verdict.json", {"kind": kind, "verdict": v.verdict, "margin": v.margin})
    return f"{kind} genericity: {v.verdict} (margin {v.margin:.6g}, {len(rows)} witnesses)"


def _polytope_tuple(args):
    if args.polytopes:
        return modelio.load_polytopes(args.polytopes)
    Q, M = _model(args)
    if M is not None:
        P = modelio.trig_map(Q, M, args.model)
        return P.newton_polytopes()
    return Q.newton_polytopes()


def cmd_unfolded(args, out):
    from .polytope import is_unfolded

    T = _polytope_tuple(args)
    if args.dry_run:
        return "input ok"
    ok, u = is_unfolded(T)
    out.json("unfolded.json", {"unfolded": ok, "witness_u": None if u is None else [float(x) for x in u]})
    return "unfolded" if ok else f"folded (witness u = {[float(x) for x in u]})"


def cmd_mixedvol(args, out):
    from .polytope import mixed_volume

    T = _polytope_tuple(args)
    if args.dry_run:
        return "input ok"
    v = mixed_volume(T)
    out.json("mixedvol.json", {"mixed_volume": str(v)})
    return str(v)


def cmd_amoeba(args, out):
    from .amoeba import amoeba_contains

    Q, _M = _model(args)
    if Q.m != 2 or Q.n != 1:
        raise UsageError("amoeba: expects one Laurent polynomial in two variables")
    if args.dry_run:
        return "model ok"
    q = Q[0]
    k = args.grid or 41
    xs = np.linspace(-args.window, args.window, k)
    rows, yes = [], 0
    for x1 in xs:
        for x2 in xs:
            v = amoeba_contains(q, [x1, x2], tolerance=args.tol, grid=64)
            yes += v == "yes"
            rows.append([num(x1), num(x2), v])
    out.csv("amoeba.csv", ["x1", "x2", "membership"], rows)
    if "svg" in args.format:
        from .svg import scatter_plot

        sel = [r for r in rows if r[2] != "no"]
        out.text("amoeba.svg", scatter_plot([float(r[0]) for r in sel], [float(r[1]) for r in sel],
                                            [r[2] for r in sel], "amoeba section"))
    return f"{yes} of {len(rows)} grid points in the amoeba"


def cmd_leeyang(args, out):
    from .amoeba import is_lee_yang

    Q, _M = _model(args)
    if args.dry_run:
        return "model ok"
    res = []
    for j, q in enumerate(Q):
        verdict, wit = is_lee_yang(q, grid=args.grid or 64)
        res.append({"component": j, "verdict": verdict, "witness": wit})
    out.json("leeyang.json", res)
    return "\n".join(f"component {r['component']}: {r['verdict']}" for r in res)


def cmd_stability(args, out):
    from .amoeba import m_stability_probe

    Q, M = _model(args)
    if M is None:
        raise ModelError(f"{args.model}: M: stability needs a frequency matrix M")
    if args.dry_run:
        return "model ok"
    Mf = np.array([[float(x) for x in row] for row in M])
    rep = m_stability_probe(Q, Mf, delta=args.delta, grid=args.grid or 64, seed=args.seed)
    out.json("stability.json", {"stable": rep.stable, "tested_directions": rep.tested_directions,
                                "min_clearance": rep.min_clearance,
                                "violating_subspace": rep.violating_subspace, "witness": rep.witness})
    return f"{rep.stable} ({rep.tested_directions} directions, min clearance {rep.min_clearance:.3g})"


def verify_example1(spec, window, contour_window=20.0):
    """Real-rootedness, density and Poisson checks for an Example-1 spec (n = 1)."""
    from .constructions import build_example1, detected_spectrum, enumerate_roots_example1
    from .measures import DiscreteMeasure, SpectrumTable, TestFunction, poisson_check
    from .rootfind import real_roots_1d

    if spec.n != 1:
        raise UsageError("verify supports n = 1")
    checks = []
    R = enumerate_roots_example1(spec, window, half_open=True)
    x = R.points.reshape(-1)
    P = build_example1(spec)
    cw = min(contour_window, window)
    croots = real_roots_1d(P, (-cw, cw))
    cx = np.array(sorted(z.real for z, k in croots for _ in range(k)))
    ex = np.sort(x[(x >= -cw) & (x < cw)])
    im = max((abs(z.imag) for z, _ in croots), default=0.0)
    agree = len(cx) == len(ex) and (len(cx) == 0 or float(np.abs(cx - ex).max()) < 1e-8)
    checks.append({"check": "real-rooted", "max_abs_imag": im, "contour_window": cw,
                   "routes_agree": bool(agree), "pass": bool(im < 1e-8 and agree)})
    density = float(np.sum(R.multiplicities)) / (2 * window)
    rel = abs(density - spec.delta) / spec.delta
    checks.append({"check": "density", "empirical": density, "expected": spec.delta,
                   "relative_gap": rel, "pass": bool(rel < 0.01)})
    labels, freqs, coef = detected_spectrum(spec, 8, threshold=1e-14)
    z = SpectrumTable(np.asarray(freqs).reshape(len(labels), -1), coef, labels)
    mu = DiscreteMeasure(x, R.multiplicities, window)
    tests = [TestFunction(), TestFunction("modulated-gaussian", 0.3, 1.0, 0.25),
             TestFunction("modulated-gaussian", -0.7, 0.8, 1.1)]
    rep = poisson_check(mu, z, tests, tol=1e-3, spectrum_window=8)
    for c in rep["checks"]:
        h = c["test"]
        checks.append({"check": "poisson", "sigma": h.sigma, "center": float(h.center[0]),
                       "xi": float(h.xi[0]), "discrepancy": c["discrepancy"],
                       "truncation_bound": c["truncation_bound"], "pass": c["pass"]})
    return {"window": window, "checks": checks, "pass": all(c["pass"] for c in checks)}


def cmd_verify(args, out):
    spec = _spec(args)
    if args.dry_run:
        return "spec ok"
    rep = verify_example1(spec, args.window)
    out.json("verify.json", rep)
    lines = [f"{c['check']:<12} {'PASS' if c['pass'] else 'FAIL'}" for c in rep["checks"]]
    lines.append(f"overall      {'PASS' if rep['pass'] else 'FAIL'}")
    if not rep["pass"]:
        raise ComputationFailed("\n".join(lines))
    return "\n".join(lines)


class ComputationFailed(Exception):
    pass


def cmd_plot(args, out):
    from .svg import scatter_plot, stem_plot

    _need(args, "input")
    header, rows = modelio.read_csv(args.input)
    if args.dry_run:
        return "input ok"
    name = Path(args.input).stem
    if "re" in header and any(h.startswith("s") for h in header):
        si = header.index("s1")
        ri, ii = header.index("re"), header.index("im")
        svg = stem_plot([float(r[si]) for r in rows], [abs(complex(float(r[ri]), float(r[ii]))) for r in rows],
                        f"{name}: |coefficient|")
    elif "membership" in header:
        sel = [r for r in rows if r[2] != "no"]
        svg = scatter_plot([float(r[0]) for r in sel], [float(r[1]) for r in sel], [r[2] for r in sel], name)
    elif header[:1] in (["x1"], ["t"]):
        xs = [float(r[0]) for r in rows]
        lab = [r[1] for r in rows] if header[1] == "component" else None
        ys = [float(r[1]) for r in rows] if header[1] == "im" else [0.0] * len(xs)
        svg = scatter_plot(xs, ys, lab, name)
    else:
        raise ModelError(f"{args.input}: line 2: no plot recipe for header {header}")
    out.text(f"{name}.svg", svg)
    return f"wrote {name}.svg"


# ----------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="fq", description="Fourier quasicrystals from trigonometric maps")
    p.add_argument("--version", action="version", version=f"fq {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    defaults = {"window": 100.0, "tol": 1e-10}
    for name in SUBCOMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--model", type=Path)
        s.add_argument("--spec", type=Path)
        s.add_argument("--polytopes", type=Path)
        s.add_argument("--input", type=Path)
        s.add_argument("--window", type=float, default=defaults["window"])
        s.add_argument("--out", type=Path, default=Path("fq-out"))
        s.add_argument("--grid", type=int, default=None)
        s.add_argument("--tol", type=float, default=defaults["tol"])
        s.add_argument("--delta", type=float, default=0.05)
        s.add_argument("--threads", type=int, default=1)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--format", choices=("csv", "svg", "json"), default="csv")
        s.add_argument("--dry-run", action="store_true")
        s.set_defaults(func=globals()[f"cmd_{name}"])
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "amoeba" and args.tol == 1e-10:
        args.tol = 1e-7
    if args.window <= 0:
        print("fq: --window must be positive", file=sys.stderr)
        return 2
    out = Output(args)
    try:
        summary = args.func(args, out)
    except UsageError as e:
        print(f"fq: {e}", file=sys.stderr)
        return 2
    except (ModelError, FileNotFoundError) as e:
        print(f"fq: {e}", file=sys.stderr)
        return 2
    except ComputationFailed as e:
        out.finish()
        print(e)
        return 1
    except (ValueError, ArithmeticError, RuntimeError, NotImplementedError, np.linalg.LinAlgError) as e:
        print(f"fq: computation failed: {e}", file=sys.stderr)
        return 1
    if not args.dry_run:
        out.finish()
    print(summary)
    return 0


def main():
    sys.exit(run())
