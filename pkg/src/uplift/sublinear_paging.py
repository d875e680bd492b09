"""Sublinear paging: peel long paths with the width construction, finish by height."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .graph_core import EmbeddedStGraph, GraphError, require_valid
from .height_paging import bounded_twist_order
from .linear_layout import BookEmbedding, color_pages, max_twist, validate_book_embedding
from .width_paging import WidthResult, apply_width_construction


def default_ell(n: int) -> int:
    """ceil(n^(2/3) / log2(n)^(1/3)), at least 1."""
    if n < 2:
        return 1
    return max(1, math.ceil(n ** (2 / 3) / math.log2(n) ** (1 / 3)))


def max_uncovered_path(g: EmbeddedStGraph, covered: Iterable[str], originals: Iterable[str]):
    """s-t path with the most vertices of ``originals`` outside ``covered``.

    Returns ``(path, count)``.  Ties go to the predecessor listed first in
    the vertex order.
    """
    gain = set(originals) - set(covered)
    dag = g.dag
    best: dict[str, int] = {}
    back: dict[str, str | None] = {}
    for v in dag.topological_order():
        w = 1 if v in gain else 0
        if v == g.s:
            best[v], back[v] = w, None
            continue
        preds = [u for u in dag.predecessors(v) if u in best]
        if not preds:
            continue
        u = max(preds, key=lambda p: (best[p], -dag.index[p]))
        best[v], back[v] = best[u] + w, u
    if g.t not in best:
        raise GraphError("t is not reachable from s")
    path = [g.t]
    while back[path[-1]] is not None:
        path.append(back[path[-1]])
    return tuple(reversed(path)), best[g.t]


@dataclass
class PeelRound:
    index: int
    path: tuple[str, ...]
    new_covered: int
    width: WidthResult
    pages_used: int

    def to_dict(self) -> dict:
        return {
            "round": self.index,
            "path_len": len(self.path),
            "new_covered": self.new_covered,
            "pages_used": self.pages_used,
            "n_prime": len(self.width.g_prime.vertices),
        }


@dataclass
class SublinearReport:
    n: int
    ell: int
    rounds: list[PeelRound] = field(default_factory=list)
    s_height: int = 0
    e_s_twist: int = 0
    e_s_pages: int = 0
    total_pages: int = 0
    capped: bool = False
    audit: dict = field(default_factory=dict)

    @property
    def t(self) -> int:
        return len(self.rounds)

    @property
    def width_pages(self) -> int:
        return sum(r.pages_used for r in self.rounds)

    def bounds(self) -> dict:
        t = self.t
        return {"7t(t+1)": 7 * t * (t + 1), "4ell": 4 * self.ell, "ceil(n/ell)": math.ceil(self.n / self.ell)}

    def checks(self) -> dict[str, bool]:
        b = self.bounds()
        return {
            "t_le_n_over_ell": self.t <= b["ceil(n/ell)"],
            "width_pages_le_7t(t+1)": self.width_pages <= b["7t(t+1)"],
            "round_pages_le_14(i+1)": all(r.pages_used <= 14 * (r.index + 1) for r in self.rounds),
            "s_height_lt_ell": self.capped or self.s_height < self.ell,
            "e_s_twist_le_4ell": self.e_s_twist <= b["4ell"],
            "partition": bool(self.audit.get("partition")),
        }

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "ell": self.ell,
            "t": self.t,
            "rounds": [r.to_dict() for r in self.rounds],
            "width_pages": self.width_pages,
            "s_height": self.s_height,
            "e_s_twist": self.e_s_twist,
            "e_s_pages": self.e_s_pages,
            "total_pages": self.total_pages,
            "bounds": self.bounds(),
            "checks": self.checks(),
            "capped": self.capped,
            "audit": self.audit,
        }


def embed_sublinear(
    g: EmbeddedStGraph,
    ell: int | None = None,
    max_vertices: int | None = None,
    paranoid: bool = False,
) -> tuple[BookEmbedding, SublinearReport]:
    """Book embedding of ``g`` plus a report of every round.

    Each round picks the path with the most uncovered vertices of ``g``,
    adds it to the covered set and reruns the width construction with all
    paths so far.  Once no path gains ``ell`` vertices the rest is handled by
    the height order of the last supergraph.  ``max_vertices`` caps the
    supergraph; hitting it ends the peeling early and sets ``capped``.
    """
    require_valid(g)
    n = len(g.vertices)
    if n < 2:
        raise GraphError("need at least two vertices")
    ell = default_ell(n) if ell is None else max(1, int(ell))
    report = SublinearReport(n, ell)
    originals = set(g.vertices)
    edge_id = {e: k for k, e in enumerate(g.edges)}

    assigned: dict[int, str] = {}
    source: dict[int, int] = {}

    def claim(u: str, v: str, label: str, rnd: int) -> None:
        k = edge_id.get((u, v))
        if k is not None and k not in assigned:
            assigned[k] = label
            source[k] = rnd

    cur = g
    covered: set[str] = set()
    paths: list[tuple[str, ...]] = []
    while True:
        path, gain = max_uncovered_path(cur, covered, originals)
        if gain < ell or gain == 0:
            break
        i = report.t
        try:
            res = apply_width_construction(
                cur, covered | set(path), paths=paths + [path],
                paranoid=paranoid, max_vertices=max_vertices,
            )
        except GraphError as exc:
            if max_vertices is not None and "exceeded" in str(exc):
                report.capped = True
                break
            raise GraphError(f"round {i}: {exc}") from exc
        prefix = f"W{i}:"
        for u, v, lab in res.assigned(restrict=True):
            claim(u, v, prefix + lab, i)
        # pages restricted to edges of g
        used = {assigned[k] for k, r in source.items() if r == i}
        report.rounds.append(PeelRound(i, path, gain, res, len(used)))
        covered |= set(path)
        paths = [tuple(p) for p in res.cover.paths]
        cur = res.g_prime

    s = originals - covered
    cert = bounded_twist_order(cur, s)
    report.s_height = cert.height
    spine = tuple(v for v in cert.order if v in originals)

    rest = [k for k, (u, v) in enumerate(g.edges) if k not in assigned and (u in s or v in s)]
    rest_edges = [g.edges[k] for k in rest]
    e_s = color_pages(spine, rest_edges, rest)
    report.e_s_twist = max_twist(spine, rest_edges)[0] if rest else 0
    report.e_s_pages = e_s.page_count
    for k, p in e_s.page_of.items():
        assigned[k] = f"S{p}"
        source[k] = -1

    missing = [k for k in range(len(g.edges)) if k not in assigned]
    report.audit = {
        "partition": not missing,
        "missing": missing[:10],
        "from_width": sum(1 for r in source.values() if r >= 0),
        "from_height": len(rest),
    }
    be = BookEmbedding(spine, assigned, {"algorithm": "sublinear", "ell": ell, "t": report.t})
    diag = validate_book_embedding(g, be)
    if not diag:
        raise GraphError(f"final embedding invalid: {diag.code}: {diag.message}")
    report.total_pages = be.page_count
    be.meta.update(page_count=be.page_count, width_pages=report.width_pages, e_s_pages=report.e_s_pages)
    return be, report
