"""Minimal dependency-free SVG line chart writer."""

from __future__ import annotations

from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b")

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=170, top=40, bottom=55)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def line_chart(x, series: dict, title="", xlabel="n", ylabel="probability") -> str:
    """Render ``series`` (label -> y values, ``None`` for gaps) against ``x``."""
    ys = [v for vals in series.values() for v in vals if v is not None]
    xlo, xhi = min(x), max(x)
    ylo, yhi = (min(ys), max(ys)) if ys else (0.0, 1.0)
    if yhi - ylo < 1e-12:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad
    if xhi == xlo:
        xlo, xhi = xlo - 1, xhi + 1
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(v):
        return MARGIN["left"] + (v - xlo) / (xhi - xlo) * pw

    def sy(v):
        return MARGIN["top"] + (yhi - v) / (yhi - ylo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
        'fill="none" stroke="#333"/>',
    ]
    for t in _ticks(ylo, yhi):
        out.append(f'<line x1="{MARGIN["left"] - 4}" x2="{MARGIN["left"]}" y1="{_fmt(sy(t))}" '
                   f'y2="{_fmt(sy(t))}" stroke="#333"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{_fmt(sy(t) + 4)}" text-anchor="end">{t:.4g}</text>')
    for t in _ticks(xlo, xhi):
        out.append(f'<line x1="{_fmt(sx(t))}" x2="{_fmt(sx(t))}" y1="{MARGIN["top"] + ph}" '
                   f'y2="{MARGIN["top"] + ph + 4}" stroke="#333"/>')
        out.append(f'<text x="{_fmt(sx(t))}" y="{MARGIN["top"] + ph + 18}" '
                   f'text-anchor="middle">{t:.4g}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2:.1f}" y="{HEIGHT - 12}" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text transform="translate(18 {MARGIN["top"] + ph / 2:.1f}) rotate(-90)" '
               f'text-anchor="middle">{escape(ylabel)}</text>')

    for i, (label, vals) in enumerate(series.items()):
        colour = PALETTE[i % len(PALETTE)]
        pts = [(sx(a), sy(b)) for a, b in zip(x, vals) if b is not None]
        if pts:
            path = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in pts)
            out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{path}"/>')
            out.extend(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="2" fill="{colour}"/>' for a, b in pts)
        ly = MARGIN["top"] + 14 + 18 * i
        lx = WIDTH - MARGIN["right"] + 12
        out.append(f'<line x1="{lx}" x2="{lx + 20}" y1="{ly - 4}" y2="{ly - 4}" '
                   f'stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_line_chart(path, x, series: dict, **kwargs) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(line_chart(x, series, **kwargs))
