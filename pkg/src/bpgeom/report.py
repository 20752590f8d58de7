"""Deterministic JSON, CSV and SVG renderings of comparison reports."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .core import BPReport
from .errors import UnsupportedFormat

FORMATS = ("json", "csv", "svg")


def _fmt(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    return "%.12e" % x


def canonical_json(obj) -> str:
    """JSON with sorted keys and every float printed as ``%.12e``."""
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ", ".join(json.dumps(k) + ": " + canonical_json(v) for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(canonical_json(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return canonical_json(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if obj is None:
        return "null"
    if hasattr(obj, "to_dict"):
        return canonical_json(obj.to_dict())
    return json.dumps(str(obj))


def _bp(report) -> BPReport:
    return report if isinstance(report, BPReport) else report.bp


def _angles(bp: BPReport) -> np.ndarray:
    if bp.angles is not None:
        return np.asarray(bp.angles, dtype=float)
    ref = bp.directions[0]
    return np.arccos(np.clip(np.abs(bp.directions @ ref), 0.0, 1.0))


def render_csv(report) -> str:
    bp = _bp(report)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["angle", "section_K", "section_L", "gap"])
    for a, k, l in zip(_angles(bp), bp.section_K, bp.section_L):
        w.writerow([_fmt(a), _fmt(k), _fmt(l), _fmt(k - l)])
    return buf.getvalue()


# -- SVG ----------------------------------------------------------------------

_W, _H, _PAD = 360.0, 240.0, 36.0


def _scaler(box, xr, yr):
    x0, y0, x1, y1 = box
    (xmin, xmax), (ymin, ymax) = xr, yr
    sx = (x1 - x0) / (xmax - xmin if xmax > xmin else 1.0)
    sy = (y1 - y0) / (ymax - ymin if ymax > ymin else 1.0)
    return lambda x, y: (x0 + (x - xmin) * sx, y1 - (y - ymin) * sy)


def _panel(title, ox, curves, zero_line=False):
    box = (ox + _PAD, _PAD, ox + _W - _PAD / 2, _H - _PAD)
    xs_all = [x for c in curves for x in c[1]]
    ys_all = [y for c in curves for y in c[2]] + ([0.0] if zero_line else [])
    to_px = _scaler(box, (min(xs_all), max(xs_all)), (min(ys_all), max(ys_all)))
    out = ['<g class="panel">',
           f'<rect x="{box[0]:.3f}" y="{box[1]:.3f}" width="{box[2] - box[0]:.3f}" '
           f'height="{box[3] - box[1]:.3f}" fill="none" stroke="#999"/>',
           f'<text x="{box[0]:.3f}" y="{_PAD - 10:.3f}" font-size="12">{title}</text>']
    for name, xs, ys, color in curves:
        pts = " ".join("%.3f,%.3f" % to_px(x, y) for x, y in zip(xs, ys))
        out.append(f'<polyline class="{name}" fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
    if zero_line:
        _, yz = to_px(0.0, 0.0)
        out.append(f'<line class="zero" x1="{box[0]:.3f}" y1="{yz:.3f}" x2="{box[2]:.3f}" y2="{yz:.3f}" '
                   f'stroke="#000" stroke-dasharray="4 3"/>')
    for i, (name, _, _, color) in enumerate(curves):
        out.append(f'<text x="{box[0] + 90 * i:.3f}" y="{box[3] + 16:.3f}" font-size="10" '
                   f'fill="{color}">{name}</text>')
    out.append("</g>")
    return out


def render_svg(report) -> str:
    """Radial profiles of both bodies (when present) and the section-gap curve."""
    bp = _bp(report)
    ang = _angles(bp)
    order = np.argsort(ang, kind="stable")
    ang_s = ang[order].tolist()
    gaps = (bp.section_K - bp.section_L)[order].tolist()
    panels = []
    K = getattr(report, "K", None)
    L = getattr(report, "L", None)
    if K is not None and L is not None:
        dirs = bp.directions[order]
        panels.append(("radial profiles", [("rho_K", ang_s, K.radial(dirs).tolist(), "#c0392b"),
                                           ("rho_L", ang_s, L.radial(dirs).tolist(), "#2c3e50")], False))
    panels.append(("section gap S_K - S_L", [("gap", ang_s, gaps, "#27ae60")], True))
    width = _W * len(panels)
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{_H:.0f}" '
             f'viewBox="0 0 {width:.0f} {_H:.0f}">',
             f'<title>verdict: {bp.verdict}</title>']
    for i, (title, curves, zero) in enumerate(panels):
        lines.extend(_panel(title, i * _W, curves, zero))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_report(report, fmt: str = "json") -> bytes:
    """Render a :class:`BPReport` or counterexample report as json, csv or svg."""
    if fmt == "json":
        return (canonical_json(report.to_dict()) + "\n").encode()
    if fmt == "csv":
        return render_csv(report).encode()
    if fmt == "svg":
        return render_svg(report).encode()
    raise UnsupportedFormat(f"unknown format {fmt!r}; choose one of {', '.join(FORMATS)}")
