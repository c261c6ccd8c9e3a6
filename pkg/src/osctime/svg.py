"""Static SVG line charts of tau against alpha."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .io import format_number

WIDTH, HEIGHT = 720, 480
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 190, 30, 55
COLORS = ("#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf", "#7f7f7f")
LINEAR_COLOR = "#1f77b4"


def nice_ticks(lo, hi, target=6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    k = 0
    while start + k * step <= hi + 1e-9 * step:
        ticks.append(round(start + k * step, 12))
        k += 1
    return ticks


def _collect_series(tables):
    series = []
    multi = len(tables) > 1
    for table in tables:
        for x0, rows in table.series().items():
            pts = [(r.alpha, r.tau) for r in rows if math.isfinite(r.tau)]
            label = f"x0={format_number(x0)}"
            if multi:
                label = f"{table.model.label} {label}"
            series.append((label, pts))
    return series


def _linear_reference(tables):
    alphas = sorted({r.alpha for t in tables for r in t.rows if math.isfinite(r.tau_linear)})
    lookup = {r.alpha: r.tau_linear for t in tables for r in t.rows if math.isfinite(r.tau_linear)}
    return [(a, lookup[a]) for a in alphas]


def svg_text(tables, title="oscillation time vs damping") -> str:
    """Render one polyline per ``(model, x0)`` series plus the linear reference.

    Raises
    ------
    ValueError
        If the tables are empty or some series has fewer than two points.
    """
    if not isinstance(tables, (list, tuple)):
        tables = [tables]
    if not tables or not any(t.rows for t in tables):
        raise ValueError("nothing to plot: empty table")
    series = _collect_series(tables)
    for label, pts in series:
        if len(pts) < 2:
            raise ValueError(f"series {label} needs at least two alpha values")
    reference = _linear_reference(tables)
    all_pts = [p for _, pts in series for p in pts] + reference
    xs = [p[0] for p in all_pts]
    ys = [p[1] for p in all_pts]
    xticks = nice_ticks(min(xs), max(xs))
    yticks = nice_ticks(min(ys), max(ys))
    x_lo, x_hi = min(xticks[0], min(xs)), max(xticks[-1], max(xs))
    y_lo, y_hi = min(yticks[0], min(ys)), max(yticks[-1], max(ys))
    pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x):
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * ph

    def pts_attr(pts):
        return " ".join(f"{px(a):.3f},{py(t):.3f}" for a, t in pts)

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle" font-family="sans-serif" font-size="14">{escape(title)}</text>',
        f'<g class="axes" stroke="black" stroke-width="1">',
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP + ph}" x2="{MARGIN_LEFT + pw}" y2="{MARGIN_TOP + ph}"/>',
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{MARGIN_TOP + ph}"/>',
        "</g>",
        '<g class="ticks" font-family="sans-serif" font-size="11">',
    ]
    for t in xticks:
        x = px(t)
        out.append(f'<line x1="{x:.3f}" y1="{MARGIN_TOP + ph}" x2="{x:.3f}" y2="{MARGIN_TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.3f}" y="{MARGIN_TOP + ph + 18}" text-anchor="middle">{format_number(t)}</text>')
    for t in yticks:
        y = py(t)
        out.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{y:.3f}" x2="{MARGIN_LEFT}" y2="{y:.3f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_LEFT - 8}" y="{y + 4:.3f}" text-anchor="end">{format_number(t)}</text>')
    out.append("</g>")
    out.append(
        f'<text x="{MARGIN_LEFT + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle" '
        'font-family="sans-serif" font-size="13">alpha</text>'
    )
    out.append(
        f'<text x="18" y="{MARGIN_TOP + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13" transform="rotate(-90 18 {MARGIN_TOP + ph / 2:.1f})">tau</text>'
    )

    legend = []
    if reference:
        out.append(
            f'<polyline class="reference" data-label="tau_l" fill="none" stroke="{LINEAR_COLOR}" '
            f'stroke-width="1.5" points="{pts_attr(reference)}"/>'
        )
        out.append(f'<g class="markers" fill="{LINEAR_COLOR}">')
        out.extend(f'<circle cx="{px(a):.3f}" cy="{py(t):.3f}" r="2.5"/>' for a, t in reference)
        out.append("</g>")
        legend.append(("tau_l (linear)", LINEAR_COLOR))
    for k, (label, pts) in enumerate(series):
        color = COLORS[k % len(COLORS)]
        out.append(
            f'<polyline class="series" data-label="{escape(label)}" fill="none" stroke="{color}" '
            f'stroke-width="1.5" points="{pts_attr(pts)}"/>'
        )
        legend.append((label, color))
    lx = WIDTH - MARGIN_RIGHT + 15
    out.append('<g class="legend" font-family="sans-serif" font-size="11">')
    for k, (label, color) in enumerate(legend):
        y = MARGIN_TOP + 10 + 18 * k
        out.append(f'<line x1="{lx}" y1="{y}" x2="{lx + 20}" y2="{y}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{y + 4}">{escape(label)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(tables, path, title="oscillation time vs damping") -> None:
    text = svg_text(tables, title)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
