"""``uplift`` command line: embed, verify, measure, generate, and run the lower-bound checks."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .graph_core import Dag, EmbeddedStGraph, GraphError, augment_to_st, validate_embedding
from .io import embedding_from_dict, embedding_to_dict, graph_from_dict, graph_to_dict, read_json, write_json, write_text
from .linear_layout import brute_force_pn, brute_force_tn, max_twist, validate_book_embedding

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _threads() -> int:
    raw = os.environ.get("UPLIFT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"UPLIFT_THREADS must be an integer, got {raw!r}")


def _config(args) -> dict:
    return {
        "command": args.command,
        "seed": args.seed,
        "budget_ms": args.budget_ms,
        "paranoid": args.paranoid,
        "threads": _threads(),
    }


def _load_graph(path: str, augment: bool = False, need_embedding: bool = True):
    try:
        g = graph_from_dict(read_json(path))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    if isinstance(g, tuple):
        if not augment:
            if need_embedding:
                raise UsageError("graph has a rotation but no s/t; pass --augment")
            return g[0]
        g = augment_to_st(*g)
    if isinstance(g, Dag) and need_embedding:
        raise UsageError("graph has no rotation system; an embedded st-graph is required")
    if isinstance(g, EmbeddedStGraph):
        diag = validate_embedding(g)
        if not diag:
            raise GraphError(f"input graph invalid: {diag.code}: {diag.message}")
    return g


def _dag(g):
    return g.dag if isinstance(g, EmbeddedStGraph) else g


def _emit(obj, path: str | None) -> None:
    if path:
        write_json(path, obj)
    else:
        json.dump(obj, sys.stdout, indent=2)
        sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------


def cmd_embed(args) -> int:
    g = _load_graph(args.input, args.augment)
    if args.algo == "height":
        from .height_paging import dominance_realizer, embed_height

        be = embed_height(g)
        rep = {"height": be.meta["height"], "twist": be.meta["max_twist"], "twist_bound": be.meta["twist_bound"]}
        rep["realizer"] = dominance_realizer(g).to_dict() if args.realizer else None
    elif args.algo == "width":
        from .width_paging import embed_width

        be, res = embed_width(g, paranoid=args.paranoid, seed=args.seed)
        rep = {"width": res.width, "bound_14w": 14 * res.width, "stats": res.stats}
    else:
        from .sublinear_paging import embed_sublinear

        be, report = embed_sublinear(g, ell=args.ell, max_vertices=args.max_vertices, paranoid=args.paranoid)
        rep = report.to_dict()
    diag = validate_book_embedding(g.dag, be)
    twist = max_twist(be.spine, g.edges)[0]
    rep.update(algo=args.algo, page_count=be.page_count, max_twist=twist, valid=bool(diag))
    if not diag:
        print(f"embedding invalid: {diag.code}: {diag.message}", file=sys.stderr)
        return EXIT_FAIL
    report_doc = {"config": _config(args), "report": rep}
    if args.output is None and args.report is None:
        _emit({"embedding": embedding_to_dict(be), **report_doc}, None)
        return EXIT_OK
    _emit(embedding_to_dict(be), args.output)
    _emit(report_doc, args.report)
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _load_graph(args.graph, need_embedding=False)
    be = embedding_from_dict(read_json(args.embedding))
    diag = validate_book_embedding(_dag(g), be)
    out = {"config": _config(args), "ok": bool(diag), "code": diag.code, "message": diag.message}
    if isinstance(g, EmbeddedStGraph) and args.paranoid:
        gd = validate_embedding(g)
        out["graph_ok"], out["graph_code"] = bool(gd), gd.code
        out["ok"] = out["ok"] and bool(gd)
    if diag:
        out["page_count"] = be.page_count
        out["max_twist"] = max_twist(be.spine, _dag(g).edges)[0]
    _emit(out, args.output)
    return EXIT_OK if out["ok"] else EXIT_FAIL


def _parse_order(raw: str, vertices) -> list[str]:
    """A JSON array or whitespace-separated names; grid names contain commas."""
    raw = raw.strip()
    order = json.loads(raw) if raw.startswith("[") else raw.split()
    if sorted(order) != sorted(vertices):
        raise UsageError("--order must list every vertex exactly once")
    return order


def cmd_twist(args) -> int:
    g = _dag(_load_graph(args.graph, need_embedding=False))
    if args.embedding:
        order = embedding_from_dict(read_json(args.embedding)).spine
    elif args.order:
        order = _parse_order(args.order, g.vertices)
    else:
        order = g.topological_order()
    k, wit = max_twist(order, g.edges)
    _emit({"config": _config(args), "twist": k, "witness": [list(g.edges[i]) for i in wit]}, args.output)
    return EXIT_OK


def cmd_tn(args) -> int:
    g = _dag(_load_graph(args.input, need_embedding=False))
    res = brute_force_tn(g, budget=args.budget, budget_ms=args.budget_ms)
    _emit({"config": _config(args), "budget": args.budget, **res.to_dict()}, args.output)
    return EXIT_OK if res.exact else EXIT_FAIL


def cmd_pn(args) -> int:
    g = _dag(_load_graph(args.input, need_embedding=False))
    res = brute_force_pn(g, max_pages=args.max_pages, budget=args.budget, budget_ms=args.budget_ms)
    _emit({"config": _config(args), "budget": args.budget, **res.to_dict()}, args.output)
    return EXIT_OK if res.exact else EXIT_FAIL


def cmd_gen(args) -> int:
    from . import generators as gen

    if args.family == "grid":
        g = gen.gen_upward_grid(args.n)
    elif args.family == "ngrid":
        g = gen.gen_n_grid(args.n)
    elif args.family == "fence":
        g = gen.gen_fence(args.n)
    elif args.family == "gk":
        g = gen.gen_gk(args.n)
    else:
        g = gen.gen_random_st(args.n, args.density, 0 if args.seed is None else args.seed)
    data = graph_to_dict(g)
    if isinstance(g, EmbeddedStGraph) and not validate_embedding(g):
        print("generated graph failed validation", file=sys.stderr)
        return EXIT_FAIL
    _emit(data, args.output)
    return EXIT_OK


def cmd_fences(args) -> int:
    from .fence_lab import augment_fixpoint, find_fences
    from .graph_core import transitive_closure

    g = _dag(_load_graph(args.input, need_embedding=False))
    if args.augment:
        aug = augment_fixpoint(g, args.k)
        out = aug.to_dict()
        ok = not aug.partial
    else:
        found = find_fences(g, transitive_closure(g), args.k)
        out = {"k": args.k, "fences": [{"pair": list(p), "fence": f.to_dict()} for p, f in sorted(found.items())]}
        ok = True
    _emit({"config": _config(args), **out}, args.output)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_check(args) -> int:
    from . import fence_lab as fl

    if args.what == "obs-fence":
        out = fl.check_fence_twist(args.k)
    elif args.what == "lemma5":
        out = fl.check_separation_step(args.n, args.i)
    elif args.what == "lemma7":
        out = fl.check_separation_twist(args.n, args.p, samples=args.sample, seed=args.seed or 0)
    else:
        g = _load_graph(args.input)
        order = _parse_order(args.order, g.vertices) if args.order else g.dag.topological_order()
        out = {"ok": fl.check_level_separation(g, order)}
    _emit({"config": _config(args), **out}, args.output)
    return EXIT_OK if out.get("ok") in (True, None) else EXIT_FAIL


def cmd_certify(args) -> int:
    from .fence_lab import certify_five_twist_partial

    out = certify_five_twist_partial(args.budget)
    _emit({"config": _config(args), **out}, args.output)
    return EXIT_OK if out["ok"] in (True, None) else EXIT_FAIL


def cmd_render(args) -> int:
    from .render import render_svg

    g = _dag(_load_graph(args.graph, need_embedding=False))
    be = embedding_from_dict(read_json(args.embedding))
    svg = render_svg(g, be, labels=not args.no_labels)
    if args.output:
        write_text(args.output, svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--budget-ms", type=float, default=None)
    common.add_argument("--paranoid", action="store_true", help="validate after every construction step")
    common.add_argument("-o", "--output", default=None)

    p = argparse.ArgumentParser(prog="uplift", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("embed", parents=[common], help="book-embed an st-graph")
    e.add_argument("--input", "-i", required=True)
    e.add_argument("--algo", choices=["width", "height", "combined"], default="combined")
    e.add_argument("--augment", action="store_true", help="augment a planar DAG to an st-graph first")
    e.add_argument("--ell", type=int, default=None, help="path threshold for the combined algorithm")
    e.add_argument("--max-vertices", type=int, default=None)
    e.add_argument("--realizer", action="store_true", help="include the two realizer orders (height)")
    e.add_argument("--report", default=None)
    e.set_defaults(func=cmd_embed)

    v = sub.add_parser("verify", parents=[common], help="check an embedding against a graph")
    v.add_argument("--graph", "-g", required=True)
    v.add_argument("--embedding", "-e", required=True)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("twist", parents=[common], help="maximum twist of a vertex order")
    t.add_argument("--graph", "-g", required=True)
    t.add_argument("--embedding", "-e", default=None)
    t.add_argument("--order", default=None, help="vertex order as a JSON array or space-separated names")
    t.set_defaults(func=cmd_twist)

    for name, fn in (("tn", cmd_tn), ("pn", cmd_pn)):
        q = sub.add_parser(name, parents=[common], help=f"exact {name} by exhaustive search")
        q.add_argument("--input", "-i", required=True)
        q.add_argument("--budget", type=int, default=2_000_000, help="search node budget")
        if name == "pn":
            q.add_argument("--max-pages", type=int, default=8)
        q.set_defaults(func=fn)

    gn = sub.add_parser("gen", parents=[common], help="generate a graph family")
    gn.add_argument("family", choices=["grid", "ngrid", "fence", "gk", "random"])
    gn.add_argument("--n", type=int, required=True, help="size (k for fence and gk)")
    gn.add_argument("--density", type=float, default=0.5)
    gn.set_defaults(func=cmd_gen)

    f = sub.add_parser("fences", parents=[common], help="find k-fences or run the augmentation fixpoint")
    f.add_argument("--input", "-i", required=True)
    f.add_argument("--k", type=int, required=True)
    f.add_argument("--augment", action="store_true")
    f.set_defaults(func=cmd_fences)

    c = sub.add_parser("check", parents=[common], help="lower-bound checks")
    c.add_argument("what", choices=["obs-fence", "lemma5", "lemma7", "levels"])
    c.add_argument("--k", type=int, default=5)
    c.add_argument("--n", type=int, default=3)
    c.add_argument("--i", type=int, default=2)
    c.add_argument("--p", type=int, default=1)
    c.add_argument("--sample", type=int, default=None, help="sample this many orders instead of enumerating")
    c.add_argument("--input", "-i", default=None)
    c.add_argument("--order", default=None, help="vertex order as a JSON array or space-separated names")
    c.set_defaults(func=cmd_check)

    ce = sub.add_parser("certify", parents=[common], help="desk-scale certificate chain")
    ce.add_argument("what", choices=["tn5"])
    ce.add_argument("--budget", choices=["zero", "default", "extended"], default="default")
    ce.set_defaults(func=cmd_certify)

    r = sub.add_parser("render", parents=[common], help="arc-diagram SVG of an embedding")
    r.add_argument("--graph", "-g", required=True)
    r.add_argument("--embedding", "-e", required=True)
    r.add_argument("--no-labels", action="store_true")
    r.set_defaults(func=cmd_render)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except UsageError as exc:
        print(f"uplift: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphError, ValueError, KeyError) as exc:
        print(f"uplift: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return code


if __name__ == "__main__":
    sys.exit(main())
