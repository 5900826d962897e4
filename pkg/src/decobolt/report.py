"""Serialization helpers: JSON documents, their schemas, rate tables and SVG line plots."""

from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources
from typing import List, Sequence, Tuple

import numpy as np

SCHEMA_NAMES = ("rates", "feasibility", "scenario")


def clean(obj):
    """Recursively convert numpy scalars to Python and non-finite floats to None."""
    if isinstance(obj, dict):
        return {k: clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def to_json(obj) -> str:
    return json.dumps(clean(obj), indent=2, allow_nan=False) + "\n"


def load_schema(name: str) -> dict:
    if name not in SCHEMA_NAMES:
        raise KeyError(name)
    text = resources.files("decobolt").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


# -- rate tables --------------------------------------------------------------------

RATE_COLUMNS = ("channel", "kind", "rate", "decoherence_time", "mean_k", "mean_wavelength")


def rates_document(rows: List[dict], total: dict) -> dict:
    return {"channels": rows, "total": total}


def rates_csv(doc: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RATE_COLUMNS)
    for row in doc["channels"] + [doc["total"]]:
        writer.writerow([row[c] if isinstance(row[c], str) else repr(float(row[c])) for c in RATE_COLUMNS])
    return buf.getvalue()


def rates_text(doc: dict) -> str:
    head = f"{'channel':<22}{'kind':<22}{'rate [1/s]':>14}{'tau [s]':>14}{'kbar [1/m]':>14}{'lambda_bar [m]':>16}"
    lines = [head, "-" * len(head)]
    for row in doc["channels"] + [doc["total"]]:
        lines.append(f"{row['channel']:<22}{row['kind']:<22}{row['rate']:>14.4g}{row['decoherence_time']:>14.4g}"
                     f"{row['mean_k']:>14.4g}{row['mean_wavelength']:>16.4g}")
    return "\n".join(lines) + "\n"


# -- SVG --------------------------------------------------------------------------

_COLORS = ("#1f77b4", "#d62728")


def _ticks(lo: float, hi: float, log: bool) -> List[float]:
    if log:
        return [10.0**e for e in range(math.ceil(math.log10(lo)), math.floor(math.log10(hi)) + 1)]
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / 4)) if span > 0 else 1.0
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= 6:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    return [first + i * step for i in range(int((hi - first) / step + 1e-9) + 1)]


def svg_plot(series: Sequence[Tuple[str, Sequence[float], Sequence[float]]], xlabel: str = "", ylabel: str = "",
             title: str = "", logx: bool = False, logy: bool = False, width: int = 640, height: int = 400) -> str:
    """Line plot of up to two ``(label, x, y)`` series as a standalone SVG document."""
    if not 1 <= len(series) <= 2:
        raise ValueError("svg_plot draws one or two series")
    left, right, top, bottom = 70, 20, 30, 50

    def tr(v, log):
        v = np.asarray(v, dtype=float)
        return np.log10(v) if log else v

    xs = [tr(s[1], logx) for s in series]
    ys = [tr(s[2], logy) for s in series]
    finite = [(x[np.isfinite(x) & np.isfinite(y)], y[np.isfinite(x) & np.isfinite(y)]) for x, y in zip(xs, ys)]
    x_lo = min(f[0].min() for f in finite)
    x_hi = max(f[0].max() for f in finite)
    y_lo = min(f[1].min() for f in finite)
    y_hi = max(f[1].max() for f in finite)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    if y_hi == y_lo:
        y_hi = y_lo + 1
    pw, ph = width - left - right, height - top - bottom

    def px(x):
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return top + ph - (y - y_lo) / (y_hi - y_lo) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13">{title}</text>')
    raw_x = (10**x_lo, 10**x_hi) if logx else (x_lo, x_hi)
    raw_y = (10**y_lo, 10**y_hi) if logy else (y_lo, y_hi)
    for t in _ticks(*raw_x, logx):
        X = px(math.log10(t) if logx else t)
        out.append(f'<line x1="{X:.1f}" y1="{top + ph}" x2="{X:.1f}" y2="{top + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{X:.1f}" y="{top + ph + 16}" text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(*raw_y, logy):
        Y = py(math.log10(t) if logy else t)
        out.append(f'<line x1="{left - 4}" y1="{Y:.1f}" x2="{left}" y2="{Y:.1f}" stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{Y + 4:.1f}" text-anchor="end">{t:.3g}</text>')
    if xlabel:
        out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{xlabel}</text>')
    if ylabel:
        out.append(f'<text x="14" y="{top + ph / 2:.1f}" text-anchor="middle" '
                   f'transform="rotate(-90 14 {top + ph / 2:.1f})">{ylabel}</text>')
    for i, ((label, _, _), (x, y)) in enumerate(zip(series, finite)):
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{_COLORS[i]}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{left + pw - 8}" y="{top + 16 + 14 * i}" text-anchor="end" fill="{_COLORS[i]}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
