"""Small hand-written SVG stem and scatter plots."""
from __future__ import annotations

import numpy as np

W, H, PAD = 640, 400, 48


def _scale(v, lo, hi, a, b):
    if hi == lo:
        return np.full_like(np.asarray(v, dtype=float), (a + b) / 2)
    return a + (np.asarray(v, dtype=float) - lo) * (b - a) / (hi - lo)


def _frame(title, xlo, xhi, ylo, yhi):
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2:.1f}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{_esc(title)}</text>',
        f'<rect x="{PAD}" y="{PAD}" width="{W - 2 * PAD}" height="{H - 2 * PAD}" fill="none" stroke="black"/>',
    ]
    style = 'font-family="sans-serif" font-size="10"'
    out.append(f'<text x="{PAD}" y="{H - PAD + 14}" {style}>{xlo:.4g}</text>')
    out.append(f'<text x="{W - PAD}" y="{H - PAD + 14}" text-anchor="end" {style}>{xhi:.4g}</text>')
    out.append(f'<text x="{PAD - 4}" y="{H - PAD}" text-anchor="end" {style}>{ylo:.4g}</text>')
    out.append(f'<text x="{PAD - 4}" y="{PAD + 8}" text-anchor="end" {style}>{yhi:.4g}</text>')
    return out


def _esc(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _range(v):
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        return 0.0, 1.0
    lo, hi = float(v.min()), float(v.max())
    if lo == hi:
        lo, hi = lo - 1, hi + 1
    return lo, hi


def stem_plot(x, y, title="") -> str:
    """Vertical stems from 0 to ``y`` at ``x``."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    xlo, xhi = _range(x)
    ylo, yhi = _range(np.concatenate([y, [0.0]]))
    out = _frame(title, xlo, xhi, ylo, yhi)
    X = _scale(x, xlo, xhi, PAD, W - PAD)
    Y = _scale(y, ylo, yhi, H - PAD, PAD)
    y0 = float(_scale(0.0, ylo, yhi, H - PAD, PAD))
    for a, b in zip(X, Y):
        out.append(f'<line x1="{a:.2f}" y1="{y0:.2f}" x2="{a:.2f}" y2="{b:.2f}" stroke="steelblue"/>')
        out.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="2" fill="steelblue"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def scatter_plot(x, y, labels=None, title="") -> str:
    """Points coloured by an integer or string label."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    xlo, xhi = _range(x)
    ylo, yhi = _range(y)
    out = _frame(title, xlo, xhi, ylo, yhi)
    X = _scale(x, xlo, xhi, PAD, W - PAD)
    Y = _scale(y, ylo, yhi, H - PAD, PAD)
    palette = ["steelblue", "firebrick", "darkgreen", "darkorange", "purple", "gray"]
    keys = sorted(set(labels)) if labels is not None else [None]
    colour = {k: palette[i % len(palette)] for i, k in enumerate(keys)}
    for i, (a, b) in enumerate(zip(X, Y)):
        col = colour[labels[i] if labels is not None else None]
        out.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="2" fill="{col}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
