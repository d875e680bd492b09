"""JSON reading and writing for graphs, embeddings and reports."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .graph_core import Dag, EmbeddedStGraph, GraphError, RotationSystem
from .linear_layout import BookEmbedding


def graph_to_dict(g: EmbeddedStGraph | Dag) -> dict:
    if isinstance(g, Dag):
        return {"vertices": list(g.vertices), "edges": [list(e) for e in g.edges]}
    out = {
        "vertices": list(g.vertices),
        "edges": [list(e) for e in g.edges],
        "rotation": {v: list(g.rotation[v]) for v in g.vertices},
        "s": g.s,
        "t": g.t,
    }
    if g.anchor is not None:
        out["outer_face_anchor"] = g.anchor
    if g.meta:
        out["meta"] = _jsonable(g.meta)
    return out


def _jsonable(meta: dict) -> dict:
    """Entries that JSON can hold, as they read back (dict keys become strings)."""
    keep = {}
    for k, v in meta.items():
        try:
            keep[str(k)] = json.loads(json.dumps(v))
        except (TypeError, ValueError):
            continue
    return keep


def graph_from_dict(d: dict) -> EmbeddedStGraph | Dag:
    """An EmbeddedStGraph when rotation, s and t are present, else a bare Dag (or a
    ``(Dag, RotationSystem)`` pair when only the rotation is given)."""
    try:
        dag = Dag(d["vertices"], [tuple(e) for e in d["edges"]])
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph JSON: {exc}") from exc
    if "rotation" not in d:
        return dag
    rot = RotationSystem(
        {v: [int(e) for e in d["rotation"].get(v, [])] for v in dag.vertices},
        d.get("outer_face_anchor"),
    )
    if "s" in d and "t" in d:
        return EmbeddedStGraph(dag, rot, d["s"], d["t"], dict(d.get("meta", {})))
    return dag, rot


def embedding_to_dict(be: BookEmbedding) -> dict:
    labels = be.labels()
    return {
        "spine": list(be.spine),
        "pages": be.pages(),
        "meta": {**be.meta, "page_labels": [str(x) for x in labels], "page_count": be.page_count},
    }


def embedding_from_dict(d: dict) -> BookEmbedding:
    labels = d.get("meta", {}).get("page_labels")
    page_of = {}
    for k, page in enumerate(d["pages"]):
        lab = labels[k] if labels else k
        for e in page:
            page_of[int(e)] = lab
    meta = {k: v for k, v in d.get("meta", {}).items() if k != "page_labels"}
    return BookEmbedding(tuple(d["spine"]), page_of, meta)


def read_json(path: str | os.PathLike) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_text(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str | os.PathLike, obj) -> None:
    write_text(path, json.dumps(obj, indent=2, sort_keys=False) + "\n")
