"""Minimal SVG line plots (linear or log-log axes) with no plotting dependency."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


@dataclass
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str = ""
    color: str | None = None
    dashed: bool = False
    markers: bool = False
    width: float = 1.5


@dataclass
class Figure:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    logx: bool = False
    logy: bool = False
    width: int = 640
    height: int = 440
    series: list = field(default_factory=list)

    def add(self, x, y, label="", **kw) -> "Figure":
        self.series.append(Series(np.asarray(x, float), np.asarray(y, float), label, **kw))
        return self

    # geometry -------------------------------------------------------------
    def _transform(self, v, log):
        v = np.asarray(v, float)
        if log:
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(v > 0, np.log10(np.where(v > 0, v, 1.0)), np.nan)
        return v

    def _limits(self, axis):
        log = self.logx if axis == "x" else self.logy
        vals = np.concatenate([self._transform(getattr(s, axis), log) for s in self.series]) \
            if self.series else np.array([0.0, 1.0])
        vals = vals[np.isfinite(vals)]
        if vals.size == 0:
            return 0.0, 1.0
        lo, hi = float(vals.min()), float(vals.max())
        if hi - lo < 1e-12:
            lo, hi = lo - 0.5, hi + 0.5
        if log:
            return math.floor(lo), math.ceil(hi)
        pad = 0.04 * (hi - lo)
        return lo - pad, hi + pad

    @staticmethod
    def _ticks(lo, hi, log):
        if log:
            step = max(1, int(math.ceil((hi - lo) / 8)))
            return [float(k) for k in range(int(lo), int(hi) + 1, step)]
        span = hi - lo
        raw = span / 6
        mag = 10 ** math.floor(math.log10(raw))
        step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=mag)
        start = math.ceil(lo / step) * step
        return [start + k * step for k in range(int((hi - start) / step) + 1)]

    @staticmethod
    def _fmt(v, log):
        if log:
            return f"1e{int(round(v))}"
        return f"{v:.4g}"

    # rendering ------------------------------------------------------------
    def to_svg(self) -> str:
        W, H = self.width, self.height
        ml, mr, mt, mb = 70, 20, 36, 50
        pw, ph = W - ml - mr, H - mt - mb
        x0, x1 = self._limits("x")
        y0, y1 = self._limits("y")

        def px(v):
            return ml + (v - x0) / (x1 - x0) * pw

        def py(v):
            return mt + ph - (v - y0) / (y1 - y0) * ph

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
               f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
               f'<rect width="{W}" height="{H}" fill="white"/>',
               f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
        for t in self._ticks(x0, x1, self.logx):
            X = px(t)
            out.append(f'<line x1="{X:.2f}" y1="{mt}" x2="{X:.2f}" y2="{mt + ph}" stroke="#e0e0e0"/>')
            out.append(f'<text x="{X:.2f}" y="{mt + ph + 15}" text-anchor="middle">'
                       f'{escape(self._fmt(t, self.logx))}</text>')
        for t in self._ticks(y0, y1, self.logy):
            Y = py(t)
            out.append(f'<line x1="{ml}" y1="{Y:.2f}" x2="{ml + pw}" y2="{Y:.2f}" stroke="#e0e0e0"/>')
            out.append(f'<text x="{ml - 5}" y="{Y + 4:.2f}" text-anchor="end">'
                       f'{escape(self._fmt(t, self.logy))}</text>')
        out.append(f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="14">{escape(self.title)}</text>')
        out.append(f'<text x="{ml + pw / 2}" y="{H - 10}" text-anchor="middle">{escape(self.xlabel)}</text>')
        out.append(f'<text x="15" y="{mt + ph / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 15 {mt + ph / 2})">{escape(self.ylabel)}</text>')

        legend = []
        for k, s in enumerate(self.series):
            color = s.color or PALETTE[k % len(PALETTE)]
            X = px(self._transform(s.x, self.logx))
            Y = py(self._transform(s.y, self.logy))
            ok = np.isfinite(X) & np.isfinite(Y)
            dash = ' stroke-dasharray="5,3"' if s.dashed else ""
            # break the polyline at missing points
            run = []
            for i in range(X.size + 1):
                if i < X.size and ok[i]:
                    run.append(f"{X[i]:.2f},{Y[i]:.2f}")
                    continue
                if len(run) > 1:
                    out.append(f'<polyline points="{" ".join(run)}" fill="none" stroke="{color}" '
                               f'stroke-width="{s.width}"{dash}/>')
                run = []
            if s.markers:
                for xx, yy in zip(X[ok], Y[ok]):
                    out.append(f'<circle cx="{xx:.2f}" cy="{yy:.2f}" r="3" fill="{color}"/>')
            if s.label:
                legend.append((s.label, color, dash))
        for k, (label, color, dash) in enumerate(legend):
            Y = mt + 14 + 15 * k
            out.append(f'<line x1="{ml + 10}" y1="{Y - 4}" x2="{ml + 30}" y2="{Y - 4}" '
                       f'stroke="{color}" stroke-width="2"{dash}/>')
            out.append(f'<text x="{ml + 35}" y="{Y}">{escape(label)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_svg())
