"""Tiny SVG 1.1 line/contour plotter.

Only what the CLI needs: linear axes, polylines, markers and iso-lines from
marching squares.  Output is deterministic text, so reruns are byte-identical.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
           "#7f7f7f", "#bcbd22", "#17becf"]


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def marching_squares(x, y, Z, level: float) -> list[list[tuple[float, float]]]:
    """Line segments of the ``level`` iso-line of ``Z[i, j]`` sampled at ``(x[i], y[j])``.

    Cells touching NaN are skipped.  Segments are returned unjoined as
    two-point polylines; that is sufficient for plotting.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    Z = np.asarray(Z, float)
    segs = []

    def interp(p0, p1, v0, v1):
        s = 0.5 if v1 == v0 else (level - v0) / (v1 - v0)
        return (p0[0] + s * (p1[0] - p0[0]), p0[1] + s * (p1[1] - p0[1]))

    for i in range(len(x) - 1):
        for j in range(len(y) - 1):
            corners = [(x[i], y[j]), (x[i + 1], y[j]), (x[i + 1], y[j + 1]), (x[i], y[j + 1])]
            vals = [Z[i, j], Z[i + 1, j], Z[i + 1, j + 1], Z[i, j + 1]]
            if any(math.isnan(v) for v in vals):
                continue
            above = [v >= level for v in vals]
            if all(above) or not any(above):
                continue
            pts = []
            for k in range(4):
                k2 = (k + 1) % 4
                if above[k] != above[k2]:
                    pts.append(interp(corners[k], corners[k2], vals[k], vals[k2]))
            if len(pts) == 2:
                segs.append(pts)
            elif len(pts) == 4:
                # saddle: resolve with the cell-centre value
                centre = sum(vals) / 4.0
                if (centre >= level) == above[0]:
                    segs.append([pts[0], pts[3]])
                    segs.append([pts[1], pts[2]])
                else:
                    segs.append([pts[0], pts[1]])
                    segs.append([pts[2], pts[3]])
    return segs


class Plot:
    """One set of axes written to a single SVG file."""

    def __init__(self, title="", xlabel="", ylabel="", width=640, height=480,
                 xlim=None, ylim=None):
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self.width, self.height = width, height
        self.xlim, self.ylim = xlim, ylim
        self._items = []
        self._legend = []

    def line(self, xs, ys, color=None, dash=False, width=1.5, label=None):
        color = color or PALETTE[len(self._items) % len(PALETTE)]
        self._items.append(("line", np.asarray(xs, float), np.asarray(ys, float),
                            color, dash, width))
        if label:
            self._legend.append((label, color, dash))

    def points(self, xs, ys, color="#000000", filled=True, r=4.0, label=None):
        self._items.append(("points", np.asarray(xs, float), np.asarray(ys, float),
                            color, filled, r))
        if label:
            self._legend.append((label, color, False))

    def contour(self, x, y, Z, level, color="#000000", dash=False, width=1.0):
        for seg in marching_squares(x, y, Z, level):
            xs, ys = zip(*seg)
            self._items.append(("line", np.array(xs), np.array(ys), color, dash, width))

    def _limits(self):
        xs = [it[1] for it in self._items if it[1].size]
        ys = [it[2] for it in self._items if it[2].size]

        def span(arrs, lim):
            if lim is not None:
                return lim
            vals = np.concatenate(arrs) if arrs else np.array([0.0, 1.0])
            vals = vals[np.isfinite(vals)]
            if vals.size == 0:
                return (0.0, 1.0)
            lo, hi = float(vals.min()), float(vals.max())
            if hi == lo:
                hi = lo + 1.0
            return (lo, hi)

        return span(xs, self.xlim), span(ys, self.ylim)

    def render(self) -> str:
        W, H = self.width, self.height
        L, R, T, B = 70, 20, 40, 55
        (x0, x1), (y0, y1) = self._limits()

        def px(v):
            return L + (v - x0) / (x1 - x0) * (W - L - R)

        def py(v):
            return H - B - (v - y0) / (y1 - y0) * (H - T - B)

        out = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" '
            f'height="{H}" viewBox="0 0 {W} {H}">',
            f'<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>',
            f'<defs><clipPath id="plot"><rect x="{L}" y="{T}" width="{W - L - R}" '
            f'height="{H - T - B}"/></clipPath></defs>',
            f'<rect x="{L}" y="{T}" width="{W - L - R}" height="{H - T - B}" '
            'fill="none" stroke="#000000"/>',
        ]
        for t in _nice_ticks(x0, x1):
            X = px(t)
            out.append(f'<line x1="{X:.2f}" y1="{H - B}" x2="{X:.2f}" y2="{H - B + 5}" '
                       'stroke="#000000"/>')
            out.append(f'<text x="{X:.2f}" y="{H - B + 18}" font-size="11" '
                       f'text-anchor="middle">{t:g}</text>')
        for t in _nice_ticks(y0, y1):
            Yp = py(t)
            out.append(f'<line x1="{L - 5}" y1="{Yp:.2f}" x2="{L}" y2="{Yp:.2f}" '
                       'stroke="#000000"/>')
            out.append(f'<text x="{L - 8}" y="{Yp + 4:.2f}" font-size="11" '
                       f'text-anchor="end">{t:g}</text>')
        out.append(f'<text x="{W / 2:.1f}" y="{T - 15}" font-size="14" '
                   f'text-anchor="middle">{escape(self.title)}</text>')
        out.append(f'<text x="{(L + W - R) / 2:.1f}" y="{H - 12}" font-size="12" '
                   f'text-anchor="middle">{escape(self.xlabel)}</text>')
        out.append(f'<text x="16" y="{(T + H - B) / 2:.1f}" font-size="12" '
                   f'text-anchor="middle" transform="rotate(-90 16 {(T + H - B) / 2:.1f})">'
                   f'{escape(self.ylabel)}</text>')
        out.append('<g clip-path="url(#plot)">')
        for kind, xs, ys, color, style, size in self._items:
            ok = np.isfinite(xs) & np.isfinite(ys)
            if kind == "line":
                # break the polyline at NaNs
                runs, cur = [], []
                for a, b, good in zip(xs, ys, ok):
                    if good:
                        cur.append(f"{px(a):.2f},{py(b):.2f}")
                    elif cur:
                        runs.append(cur)
                        cur = []
                if cur:
                    runs.append(cur)
                dash = ' stroke-dasharray="6,4"' if style else ""
                for run in runs:
                    if len(run) > 1:
                        out.append(f'<polyline points="{" ".join(run)}" fill="none" '
                                   f'stroke="{color}" stroke-width="{size}"{dash}/>')
            else:
                fill = color if style else "#ffffff"
                for a, b in zip(xs[ok], ys[ok]):
                    out.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="{size}" '
                               f'fill="{fill}" stroke="{color}"/>')
        out.append("</g>")
        for k, (label, color, dash) in enumerate(self._legend):
            yy = T + 14 + 15 * k
            d = ' stroke-dasharray="6,4"' if dash else ""
            out.append(f'<line x1="{W - R - 130}" y1="{yy}" x2="{W - R - 105}" y2="{yy}" '
                       f'stroke="{color}" stroke-width="2"{d}/>')
            out.append(f'<text x="{W - R - 100}" y="{yy + 4}" font-size="11">'
                       f'{escape(label)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.render())
