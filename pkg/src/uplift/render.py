"""Static arc-diagram SVG for a book embedding."""

from __future__ import annotations

from html import escape

from .graph_core import Dag, GraphError
from .linear_layout import BookEmbedding, positions, validate_book_embedding

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)
STEP = 40
MARGIN = 20


def render_svg(g: Dag, be: BookEmbedding, labels: bool = True) -> str:
    """Spine left to right, one semicircle above it per edge, one stroke class per page.

    Output depends only on the inputs, so equal inputs give identical bytes.
    """
    dag = getattr(g, "dag", g)
    diag = validate_book_embedding(dag, be)
    if not diag:
        raise GraphError(f"refusing to render: {diag.code}: {diag.message}")
    pos = positions(be.spine)
    n = len(be.spine)
    page_ids = {lab: k for k, lab in enumerate(be.labels())}
    longest = max((abs(pos[v] - pos[u]) for u, v in dag.edges), default=0)
    width = 2 * MARGIN + STEP * max(n - 1, 0)
    base_y = MARGIN + longest * STEP // 2 + 4
    height = base_y + MARGIN + (14 if labels else 0)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        "<style>",
        "circle{fill:#000}",
        "path{fill:none;stroke-width:1.5}",
        "text{font:10px sans-serif;text-anchor:middle}",
    ]
    for lab, k in page_ids.items():
        out.append(f".p{k}{{stroke:{PALETTE[k % len(PALETTE)]}}}")
    out.append("</style>")
    if n:
        x1 = MARGIN + STEP * (n - 1)
        out.append(f'<line x1="{MARGIN}" y1="{base_y}" x2="{x1}" y2="{base_y}" stroke="#999"/>')
    for e in sorted(be.page_of):
        u, v = dag.edges[e]
        a, b = sorted((pos[u], pos[v]))
        xa, xb = MARGIN + STEP * a, MARGIN + STEP * b
        r = (xb - xa) // 2
        k = page_ids[be.page_of[e]]
        title = escape(f"{u} -> {v} (page {be.page_of[e]})")
        out.append(
            f'<path class="p{k}" d="M {xa} {base_y} A {r} {r} 0 0 1 {xb} {base_y}">'
            f"<title>{title}</title></path>"
        )
    for i, v in enumerate(be.spine):
        x = MARGIN + STEP * i
        out.append(f'<circle cx="{x}" cy="{base_y}" r="3"><title>{escape(v)}</title></circle>')
        if labels:
            out.append(f'<text x="{x}" y="{base_y + 14}">{escape(v)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
