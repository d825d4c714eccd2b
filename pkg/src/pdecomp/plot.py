"""Deterministic SVG rendering of block barcodes.

Each grid point owns a unit cell; a block is drawn as the union of the cells
of its support, one translucent rectangle per block. Repeated blocks are
drawn once with the opacity they would have if stacked, plus a count label.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .blocks import KIND_NAMES, Barcode

CELL = 36
MARGIN = 48
ALPHA = 0.3
PALETTE = {"b": "#1f77b4", "d": "#d62728", "h": "#2ca02c", "v": "#9467bd"}


def _num(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def plot_svg(B: Barcode, title: str = "") -> str:
    n, m = B.n, B.m
    width = (n + 1) * CELL + 2 * MARGIN
    height = (m + 1) * CELL + 2 * MARGIN
    top = MARGIN

    def sx(x: float) -> float:
        return MARGIN + x * CELL

    def sy(y: float) -> float:
        # y grows upwards on the page
        return top + (m + 1 - y) * CELL

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{MARGIN}" y="{MARGIN // 2}" font-size="13">{escape(title)}</text>')
    # grid cells and tick labels
    for x in range(n + 1):
        for y in range(m + 1):
            out.append(
                f'<rect x="{_num(sx(x))}" y="{_num(sy(y + 1))}" width="{CELL}" height="{CELL}" '
                f'fill="none" stroke="#dddddd" stroke-width="1"/>'
            )
    for x in range(n + 1):
        out.append(f'<text x="{_num(sx(x + 0.5))}" y="{_num(sy(0) + 16)}" text-anchor="middle">{x}</text>')
    for y in range(m + 1):
        out.append(f'<text x="{_num(sx(0) - 8)}" y="{_num(sy(y + 0.5) + 4)}" text-anchor="end">{y}</text>')
    out.append(
        f'<rect x="{_num(sx(0))}" y="{_num(sy(m + 1))}" width="{(n + 1) * CELL}" height="{(m + 1) * CELL}" '
        f'fill="none" stroke="#444444" stroke-width="1.5"/>'
    )
    for shape, mult in B.items():
        x0, x1, y0, y1 = shape.box(n, m)
        opacity = 1 - (1 - ALPHA) ** mult
        name = f"{KIND_NAMES[shape.kind]}({shape.a},{shape.b})"
        out.append(
            f'<rect x="{_num(sx(x0) + 2)}" y="{_num(sy(y1 + 1) + 2)}" '
            f'width="{_num((x1 - x0 + 1) * CELL - 4)}" height="{_num((y1 - y0 + 1) * CELL - 4)}" '
            f'fill="{PALETTE[shape.kind]}" fill-opacity="{_num(opacity)}" '
            f'stroke="{PALETTE[shape.kind]}" stroke-width="1"><title>{name} x{mult}</title></rect>'
        )
        if mult > 1:
            out.append(
                f'<text x="{_num(sx(x0) + 5)}" y="{_num(sy(y0) - 5)}" fill="{PALETTE[shape.kind]}">x{mult}</text>'
            )
    # legend
    for i, kind in enumerate(("b", "v", "h", "d")):
        lx = MARGIN + i * 90
        ly = height - 12
        out.append(f'<rect x="{lx}" y="{ly - 9}" width="10" height="10" fill="{PALETTE[kind]}" fill-opacity="0.6"/>')
        out.append(f'<text x="{lx + 14}" y="{ly}">{KIND_NAMES[kind]}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
