"""CSV, SVG and manifest output for convergence studies."""

from __future__ import annotations

import math
import platform
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

CSV_HEADER = ["level", "n", "dofs", "h_max", "aspect_ratio", "err_u_rel", "err_p_rel",
              "order_u", "order_p"]

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def csv_text(records):
    lines = [",".join(CSV_HEADER)]
    for r in records:
        lines.append(",".join(_fmt(getattr(r, k)) for k in CSV_HEADER))
    return "\n".join(lines) + "\n"


def write_csv(path, records):
    Path(path).write_text(csv_text(records))


def _log_ticks(lo, hi):
    return [10.0 ** k for k in range(math.floor(math.log10(lo)), math.ceil(math.log10(hi)) + 1)]


def svg_plot(series, title="", xlabel="n", ylabel="relative error", width=640, height=480):
    """Log-log line plot. ``series`` maps a label to ``(xs, ys)``."""
    left, right, top, bottom = 80, 170, 40, 60
    pw, ph = width - left - right, height - top - bottom
    xs_all = [x for xs, _ in series.values() for x in xs if x > 0]
    ys_all = [y for _, ys in series.values() for y in ys if y > 0 and math.isfinite(y)]
    if not xs_all or not ys_all:
        raise ValueError("nothing to plot")
    yt = _log_ticks(min(ys_all), max(ys_all))
    x0, x1 = math.log10(min(xs_all)) - 0.1, math.log10(max(xs_all)) + 0.1
    y0, y1 = math.log10(yt[0]), math.log10(yt[-1])
    if y1 - y0 < 1e-12:
        y0, y1 = y0 - 1, y1 + 1

    def px(x):
        return left + (math.log10(x) - x0) / (x1 - x0) * pw

    def py(y):
        return top + (y1 - math.log10(y)) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<text x="{left + pw / 2:.1f}" y="{top - 15}" text-anchor="middle" font-size="14">'
           f'{escape(title)}</text>']
    for k in range(len(yt)):
        for m in range(1, 10):
            y = yt[k] * m
            if y > yt[-1] * (1 + 1e-12):
                break
            w = "0.8" if m == 1 else "0.3"
            out.append(f'<line x1="{left}" y1="{py(y):.2f}" x2="{left + pw}" y2="{py(y):.2f}" '
                       f'stroke="#bbb" stroke-width="{w}"/>')
        out.append(f'<text x="{left - 6}" y="{py(yt[k]) + 4:.2f}" text-anchor="end">'
                   f'1e{int(round(math.log10(yt[k])))}</text>')
    xticks = sorted({x for xs, _ in series.values() for x in xs if x > 0})
    for x in xticks:
        out.append(f'<line x1="{px(x):.2f}" y1="{top}" x2="{px(x):.2f}" y2="{top + ph}" '
                   f'stroke="#ddd" stroke-width="0.6"/>')
        out.append(f'<text x="{px(x):.2f}" y="{top + ph + 18}" text-anchor="middle">{x:g}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 15}" text-anchor="middle">'
               f'{escape(xlabel)}</text>')
    out.append(f'<text x="20" y="{top + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 20 {top + ph / 2:.1f})">{escape(ylabel)}</text>')
    for i, (label, (xs, ys)) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        dash = ' stroke-dasharray="6 3"' if label.endswith(" p") else ""
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys) if x > 0 and y > 0)
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"{dash}/>')
        for x, y in zip(xs, ys):
            if x > 0 and y > 0:
                out.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" fill="{color}"/>')
        ly = top + 10 + 18 * i
        out.append(f'<line x1="{left + pw + 12}" y1="{ly}" x2="{left + pw + 36}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{left + pw + 42}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_manifest(path, config, extra=None):
    lines = ["# brstokes run manifest"]
    for k, v in config.manifest().items():
        lines.append(f"{k} = {v!r}")
    lines.append(f"python = {platform.python_version()!r}")
    lines.append(f"numpy = {np.__version__!r}")
    for k, v in (extra or {}).items():
        lines.append(f"{k} = {v!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_study(out_dir, results, config):
    """``results`` maps a variant label to its records."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    series = {}
    files = []
    for label, records in results.items():
        name = "results.csv" if len(results) == 1 else f"results-{label.lower()}.csv"
        write_csv(out_dir / name, records)
        files.append(name)
        ns = [r.n for r in records]
        series[f"{label} u"] = (ns, [r.err_u_rel for r in records])
        series[f"{label} p"] = (ns, [r.err_p_rel for r in records])
    title = f"{config.case}, {config.mesh_family} meshes, nu={config.nu:g}"
    if config.case == "boundary-layer":
        title += f", eps={config.epsilon:g}"
    (out_dir / "plot.svg").write_text(svg_plot(series, title))
    write_manifest(out_dir / "manifest.txt", config,
                   {"variants": list(results), "outputs": files + ["plot.svg"]})
