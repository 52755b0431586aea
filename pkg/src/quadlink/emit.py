"""Deterministic JSON/CSV writers and a small SVG 1.1 canvas."""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

DEFAULT_PRECISION = 12


def check_precision(precision: int) -> int:
    if not 3 <= precision <= 17:
        raise ValueError(f"precision must be in [3, 17], got {precision}")
    return precision


def round_sig(x: float, precision: int) -> float:
    if not math.isfinite(x):
        return x
    y = float(f"{x:.{precision}g}")
    return 0.0 if y == 0 else y


def to_plain(obj: Any, precision: int = DEFAULT_PRECISION) -> Any:
    """Convert numpy scalars, complex numbers and tuples to JSON-ready values, rounding floats."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v, precision) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v, precision) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v, precision) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [round_sig(float(obj.real), precision), round_sig(float(obj.imag), precision)]
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj), precision)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps_json(obj: Any, precision: int = DEFAULT_PRECISION) -> str:
    return json.dumps(to_plain(obj, precision), indent=2, ensure_ascii=False) + "\n"


def dumps_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]], comment: str, precision: int = DEFAULT_PRECISION) -> str:
    """CSV with one ``#`` comment line documenting the columns, then a header row."""
    out = io.StringIO()
    out.write(f"# {comment}; columns: {', '.join(columns)}\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (float, np.floating)):
                cells.append(f"{round_sig(float(v), precision):.{precision}g}")
            else:
                cells.append(str(v))
        out.write(",".join(cells) + "\n")
    return out.getvalue()


def read_csv(text: str) -> list[dict[str, str]]:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    return [dict(zip(header, ln.split(","))) for ln in lines[1:]]


# --------------------------------------------------------------------------
# SVG


def _f(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


@dataclass
class Panel:
    """Rectangular plot area mapping a world box onto a screen box (y axis up)."""

    x0: float
    y0: float
    width: float
    height: float
    xmin: float
    xmax: float
    ymin: float
    ymax: float
    title: str = ""
    items: list[str] = field(default_factory=list)

    @classmethod
    def square(cls, x0, y0, size, center: complex, half: float, title: str = "") -> Panel:
        return cls(x0, y0, size, size, center.real - half, center.real + half, center.imag - half, center.imag + half, title)

    def sx(self, x: float) -> float:
        return self.x0 + (x - self.xmin) / (self.xmax - self.xmin) * self.width

    def sy(self, y: float) -> float:
        return self.y0 + (self.ymax - y) / (self.ymax - self.ymin) * self.height

    def polyline(self, xs, ys, stroke="#000", width=1.0, closed=False, dash: str | None = None, break_jumps: float | None = None):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if closed and len(xs):
            xs = np.append(xs, xs[0])
            ys = np.append(ys, ys[0])
        pieces = [(0, len(xs))]
        if break_jumps is not None and len(xs) > 1:
            jumps = np.nonzero((np.abs(np.diff(xs)) > break_jumps) | (np.abs(np.diff(ys)) > break_jumps))[0]
            cuts = [0, *(int(j) + 1 for j in jumps), len(xs)]
            pieces = list(zip(cuts, cuts[1:]))
        style = f'fill="none" stroke="{stroke}" stroke-width="{_f(width)}"'
        if dash:
            style += f' stroke-dasharray="{dash}"'
        for lo, hi in pieces:
            if hi - lo < 2:
                continue
            pts = " ".join(f"{_f(self.sx(x))},{_f(self.sy(y))}" for x, y in zip(xs[lo:hi], ys[lo:hi]))
            self.items.append(f'<polyline points="{pts}" {style}/>')

    def curve(self, z, **kw):
        z = np.asarray(z, dtype=complex)
        self.polyline(z.real, z.imag, **kw)

    def dot(self, z: complex, r=3.0, fill="#c00"):
        self.items.append(f'<circle cx="{_f(self.sx(z.real))}" cy="{_f(self.sy(z.imag))}" r="{_f(r)}" fill="{fill}"/>')

    def axes(self):
        if self.ymin <= 0 <= self.ymax:
            self.polyline([self.xmin, self.xmax], [0, 0], stroke="#bbb", width=0.5)
        if self.xmin <= 0 <= self.xmax:
            self.polyline([0, 0], [self.ymin, self.ymax], stroke="#bbb", width=0.5)

    def render(self) -> str:
        head = [
            '<g>',
            f'<rect x="{_f(self.x0)}" y="{_f(self.y0)}" width="{_f(self.width)}" height="{_f(self.height)}" fill="none" stroke="#444" stroke-width="0.5"/>',
        ]
        if self.title:
            head.append(
                f'<text x="{_f(self.x0 + self.width / 2)}" y="{_f(self.y0 - 6)}" font-family="sans-serif" font-size="12" text-anchor="middle">{_escape(self.title)}</text>'
            )
        return "\n".join(head + self.items + ["</g>"])


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render_svg(panels: Sequence[Panel], width: float, height: float, title: str = "") -> str:
    parts = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(width)}" height="{_f(height)}" viewBox="0 0 {_f(width)} {_f(height)}">',
        f'<rect x="0" y="0" width="{_f(width)}" height="{_f(height)}" fill="#fff"/>',
    ]
    if title:
        parts.append(f'<text x="{_f(width / 2)}" y="16" font-family="sans-serif" font-size="14" text-anchor="middle">{_escape(title)}</text>')
    parts.extend(p.render() for p in panels)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def torus_panel(x0, y0, size, title="") -> Panel:
    return Panel(x0, y0, size, size, 0.0, 2 * math.pi, 0.0, 2 * math.pi, title)
