"""Root scatter plots as standalone SVG."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

SIZE = 480
MARGIN = 40


def roots_svg(roots: np.ndarray, title: str = "", marker_radius: float = 3.0) -> str:
    """Unit circle, axes, and one filled marker per root, on equal-aspect axes.

    The view spans the larger of 1.25 and 1.05 times the largest root modulus.
    """
    z = np.asarray(roots, dtype=complex)
    extent = max(1.25, 1.05 * float(np.abs(z).max())) if z.size else 1.25
    scale = (SIZE / 2 - MARGIN) / extent
    cx = cy = SIZE / 2

    def px(w: complex) -> tuple[float, float]:
        return cx + scale * w.real, cy - scale * w.imag

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
        f'<line x1="{MARGIN / 2}" y1="{cy}" x2="{SIZE - MARGIN / 2}" y2="{cy}" '
        'stroke="#bbb" stroke-width="0.8"/>',
        f'<line x1="{cx}" y1="{MARGIN / 2}" x2="{cx}" y2="{SIZE - MARGIN / 2}" '
        'stroke="#bbb" stroke-width="0.8"/>',
        f'<circle cx="{cx}" cy="{cy}" r="{scale:.4f}" fill="none" stroke="black" '
        'stroke-width="1.2"/>',
    ]
    for w in z:
        x, y = px(complex(w))
        parts.append(f'<circle class="root" cx="{x:.4f}" cy="{y:.4f}" r="{marker_radius}" '
                     'fill="#c0392b"/>')
    label = f"n = {z.size}" + (f"  {title}" if title else "")
    parts.append(f'<text x="{MARGIN / 2}" y="{MARGIN / 2 + 4}" font-family="sans-serif" '
                 f'font-size="14">{escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(roots: np.ndarray, path: str | Path, title: str = "") -> None:
    Path(path).write_text(roots_svg(roots, title))
