"""Self-contained SVG figures with byte-stable output.

Everything is formatted with fixed precision and emitted in input order, so
equal inputs give equal files.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .analysis import fit_exponent, lln_table
from .errors import EmptyPlot, InsufficientData, InvalidParameter
from .limitshape import LimitShape, psi

KINDS = ("shape", "exponents", "lln")
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
W, H = 640, 480
ML, MR, MT, MB = 70, 20, 30, 55  # margins


def _f(v: float) -> str:
    return f"{v:.3f}"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


class _Canvas:
    def __init__(self, xlim, ylim, title, xlabel, ylabel):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            pad = 0.5
            self.x1 = max(self.x1, self.x0 + pad)
            self.y1 = max(self.y1, self.y0 + pad)
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
            f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
            f'<text x="{W / 2:.1f}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{_esc(title)}</text>',
        ]
        self._axes(xlabel, ylabel)
        self.legend_rows = 0

    def px(self, x):
        return ML + (x - self.x0) / (self.x1 - self.x0) * (W - ML - MR)

    def py(self, y):
        return H - MB - (y - self.y0) / (self.y1 - self.y0) * (H - MT - MB)

    def _axes(self, xlabel, ylabel):
        p = self.parts
        p.append(f'<rect x="{ML}" y="{MT}" width="{W - ML - MR}" height="{H - MT - MB}" fill="none" stroke="black"/>')
        for t in np.linspace(self.x0, self.x1, 6):
            x = self.px(t)
            p.append(f'<line x1="{_f(x)}" y1="{H - MB}" x2="{_f(x)}" y2="{H - MB + 5}" stroke="black"/>')
            p.append(f'<text x="{_f(x)}" y="{H - MB + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">{t:.3g}</text>')
        for t in np.linspace(self.y0, self.y1, 6):
            y = self.py(t)
            p.append(f'<line x1="{ML - 5}" y1="{_f(y)}" x2="{ML}" y2="{_f(y)}" stroke="black"/>')
            p.append(f'<text x="{ML - 8}" y="{_f(y + 4)}" text-anchor="end" font-family="sans-serif" font-size="11">{t:.3g}</text>')
        p.append(f'<text x="{(ML + W - MR) / 2:.1f}" y="{H - 15}" text-anchor="middle" font-family="sans-serif" font-size="12">{_esc(xlabel)}</text>')
        p.append(f'<text x="15" y="{(MT + H - MB) / 2:.1f}" text-anchor="middle" font-family="sans-serif" font-size="12" '
                 f'transform="rotate(-90 15 {(MT + H - MB) / 2:.1f})">{_esc(ylabel)}</text>')

    def polyline(self, xs, ys, color, dash=False, cls="series"):
        pts = " ".join(f"{_f(self.px(x))},{_f(self.py(y))}" for x, y in zip(xs, ys))
        extra = ' stroke-dasharray="5,4"' if dash else ""
        self.parts.append(f'<polyline class="{cls}" points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{extra}/>')

    def points(self, xs, ys, color):
        for x, y in zip(xs, ys):
            self.parts.append(f'<circle cx="{_f(self.px(x))}" cy="{_f(self.py(y))}" r="3.5" fill="{color}"/>')

    def legend(self, text, color):
        y = MT + 16 + 16 * self.legend_rows
        x = ML + 12
        self.parts.append(f'<line x1="{x}" y1="{y - 4}" x2="{x + 18}" y2="{y - 4}" stroke="{color}" stroke-width="2"/>')
        self.parts.append(f'<text class="label" x="{x + 24}" y="{y}" font-family="sans-serif" font-size="11">{_esc(text)}</text>')
        self.legend_rows += 1

    def svg(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _limits(values, pad=0.05):
    lo, hi = float(min(values)), float(max(values))
    span = hi - lo if hi > lo else max(abs(hi), 1.0)
    return lo - pad * span, hi + pad * span


def shape_svg(alphas, samples: int = 201) -> str:
    shapes = [a if isinstance(a, LimitShape) else LimitShape.for_alpha(float(a)) for a in alphas]
    if not shapes:
        raise EmptyPlot("no curves to plot")
    cv = _Canvas((0.0, 1.0), (0.0, 1.0), "Limit shapes psi_alpha", "x", "psi(x)")
    cv.polyline([0.0, 1.0], [0.0, 1.0], "#888888", dash=True, cls="diagonal")
    xs = np.linspace(0.0, 1.0, samples)
    for i, s in enumerate(shapes):
        color = PALETTE[i % len(PALETTE)]
        cv.polyline(xs, psi(s, xs), color)
        cv.legend(f"alpha={s.alpha:g}  c={s.c:.4f}  w={s.w:.4f}", color)
    return cv.svg()


DEFAULT_EXPONENT_FIELDS = ("mfl_interior", "mlr_interior", "tf_unconstrained")


def exponents_svg(records, fields=DEFAULT_EXPONENT_FIELDS) -> str:
    if not records:
        raise EmptyPlot("no records to plot")
    fits = []
    for f in fields:
        try:
            fits.append(fit_exponent(records, f))
        except InsufficientData:
            continue
    if not fits:
        raise EmptyPlot("no field has enough data for a fit")
    allx = [p[0] for fit in fits for p in fit.points]
    ally = [p[1] for fit in fits for p in fit.points]
    cv = _Canvas(_limits(allx), _limits(ally), "Scaling exponents (log-log)", "ln n", "ln mean")
    for i, fit in enumerate(fits):
        color = PALETTE[i % len(PALETTE)]
        xs = [p[0] for p in fit.points]
        ys = [p[1] for p in fit.points]
        cv.points(xs, ys, color)
        ends = [min(xs), max(xs)]
        cv.polyline(ends, [fit.intercept + fit.slope * x for x in ends], color, dash=True, cls="fit")
        cv.legend(f"{fit.field}: slope {fit.slope:.3f} (se {fit.stderr_slope:.3f})", color)
    return cv.svg()


def lln_svg(records) -> str:
    rows = lln_table(records)
    if not rows:
        raise EmptyPlot("no solved records to plot")
    alphas = sorted({r.alpha for r in rows})
    ns = [r.n for r in rows]
    vals = [r.L_ratio for r in rows] + [r.hausdorff_over_n for r in rows] + [0.0, 1.0]
    cv = _Canvas(_limits(ns), _limits(vals), "Law of large numbers", "n", "L/(2 w n) and dist/n")
    for i, a in enumerate(alphas):
        color = PALETTE[i % len(PALETTE)]
        sel = [r for r in rows if r.alpha == a]
        xs = [r.n for r in sel]
        cv.points(xs, [r.L_ratio for r in sel], color)
        cv.polyline(xs, [r.L_ratio for r in sel], color)
        cv.polyline(xs, [r.hausdorff_over_n for r in sel], color, dash=True)
        cv.legend(f"alpha={a:g}: solid L/(2wn), dashed dist/n", color)
    return cv.svg()


def emit_plot(data, kind: str, out) -> Path:
    """Write an SVG of ``kind``: 'shape' takes alphas or LimitShapes, the others take records."""
    if kind not in KINDS:
        raise InvalidParameter(f"plot kind must be one of {KINDS}, got {kind!r}")
    data = list(data) if data is not None else []
    if not data:
        raise EmptyPlot(f"nothing to plot for kind {kind!r}")
    if kind == "shape":
        text = shape_svg(data)
    elif kind == "exponents":
        text = exponents_svg(data)
    else:
        text = lln_svg(data)
    out = Path(out)
    out.write_text(text)
    return out
