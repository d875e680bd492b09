import json

import pytest

from uplift.cli import main
from uplift.generators import gen_gk, gen_n_grid, gen_upward_grid
from uplift.graph_core import Dag
from uplift.height_paging import embed_height
from uplift.io import embedding_from_dict, embedding_to_dict, graph_from_dict, graph_to_dict
from uplift.linear_layout import BookEmbedding, color_pages, validate_book_embedding
from uplift.render import render_svg


def test_graph_round_trip():
    g = gen_n_grid(3)
    back = graph_from_dict(json.loads(json.dumps(graph_to_dict(g))))
    assert back == g
    assert back.anchor == g.anchor
    dag = gen_gk(3)
    assert graph_from_dict(graph_to_dict(dag)) == dag


def test_embedding_round_trip():
    g = gen_upward_grid(4)
    be = embed_height(g)
    back = embedding_from_dict(json.loads(json.dumps(embedding_to_dict(be))))
    assert back.spine == be.spine
    assert sorted(back.pages()) == sorted(be.pages())
    assert validate_book_embedding(g.dag, back)


def test_render_is_deterministic():
    g = gen_gk(4)
    be = color_pages(g.topological_order(), g.edges)
    svg = render_svg(g, be)
    assert svg == render_svg(g, be)
    assert svg.count("<path") == 11 and svg.count("<circle") == 8
    assert len({f'class="p{k}"' for k in range(4)} & set(svg.split())) == 4
    one = Dag("ab", [("a", "b")])
    assert render_svg(one, color_pages(["a", "b"], one.edges)).count("<path") == 1
    empty = Dag([], [])
    assert render_svg(empty, BookEmbedding((), {})).startswith("<svg")


def test_render_refuses_mismatch():
    g = gen_gk(3)
    be = BookEmbedding(tuple(g.topological_order()), {})
    with pytest.raises(ValueError):
        render_svg(g, be)


def _run(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def test_cli_round(tmp_path, capsys):
    g = tmp_path / "g.json"
    assert main(["gen", "grid", "--n", "4", "-o", str(g)]) == 0
    for algo in ("height", "width", "combined"):
        e, r = tmp_path / f"{algo}.json", tmp_path / f"{algo}-r.json"
        assert main(["embed", "-i", str(g), "--algo", algo, "-o", str(e), "--report", str(r)]) == 0
        rep = json.loads(r.read_text())
        assert rep["report"]["valid"] and rep["config"]["seed"] is None
        assert main(["verify", "-g", str(g), "-e", str(e), "--paranoid"]) == 0
    capsys.readouterr()
    code, out = _run(["twist", "-g", str(g), "-e", str(tmp_path / "height.json")], capsys)
    assert code == 0 and json.loads(out)["twist"] <= 14
    svg = tmp_path / "a.svg"
    assert main(["render", "-g", str(g), "-e", str(tmp_path / "height.json"), "-o", str(svg)]) == 0
    assert svg.read_text().startswith("<svg")


def test_cli_width_bound_on_grid3(tmp_path):
    g = tmp_path / "g.json"
    main(["gen", "grid", "--n", "3", "-o", str(g)])
    r = tmp_path / "r.json"
    assert main(["embed", "-i", str(g), "--algo", "width", "-o", str(tmp_path / "e.json"), "--report", str(r)]) == 0
    assert json.loads(r.read_text())["report"]["page_count"] <= 42


def test_cli_exact_and_checks(tmp_path, capsys):
    gk = tmp_path / "gk.json"
    main(["gen", "gk", "--n", "4", "-o", str(gk)])
    code, out = _run(["tn", "-i", str(gk)], capsys)
    assert code == 0 and json.loads(out)["value"] == 4
    code, out = _run(["pn", "-i", str(gk)], capsys)
    assert code == 0 and json.loads(out)["value"] == 4
    code, out = _run(["check", "obs-fence", "--k", "3"], capsys)
    assert code == 0 and json.loads(out)["ok"]
    code, out = _run(["check", "lemma5", "--n", "3", "--i", "2"], capsys)
    assert code == 0
    code, out = _run(["check", "lemma7", "--n", "3", "--p", "1", "--sample", "200", "--seed", "5"], capsys)
    assert code == 0 and json.loads(out)["tested"] == 200
    code, out = _run(["certify", "tn5", "--budget", "zero"], capsys)
    assert code == 0 and json.loads(out)["skipped"]
    f = tmp_path / "f.json"
    main(["gen", "fence", "--n", "5", "-o", str(f)])
    code, out = _run(["fences", "-i", str(f), "--k", "5", "--augment"], capsys)
    assert code == 0 and json.loads(out)["added"][0]["edge"] == ["v1", "w5"]


def test_cli_errors(tmp_path, capsys):
    gk = tmp_path / "gk.json"
    main(["gen", "gk", "--n", "3", "-o", str(gk)])
    assert main(["embed", "-i", str(gk)]) == 2
    assert main(["embed", "-i", str(tmp_path / "missing.json")]) == 2
    g = tmp_path / "g.json"
    main(["gen", "grid", "--n", "3", "-o", str(g)])
    bad = tmp_path / "bad.json"
    be = embed_height(gen_upward_grid(3))
    d = embedding_to_dict(be)
    d["spine"] = d["spine"][::-1]
    bad.write_text(json.dumps(d))
    assert main(["verify", "-g", str(g), "-e", str(bad)]) == 1


def test_cli_seed_is_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["gen", "random", "--n", "60", "--seed", "3", "-o", str(a)])
    main(["gen", "random", "--n", "60", "--seed", "3", "-o", str(b)])
    assert a.read_text() == b.read_text()


def test_cli_order_with_grid_names(tmp_path, capsys):
    g = tmp_path / "g.json"
    main(["gen", "grid", "--n", "3", "-o", str(g)])
    capsys.readouterr()
    order = gen_upward_grid(3).dag.topological_order()
    code, out = _run(["twist", "-g", str(g), "--order", json.dumps(order)], capsys)
    assert code == 0
    code, out2 = _run(["twist", "-g", str(g), "--order", " ".join(order)], capsys)
    assert json.loads(out)["twist"] == json.loads(out2)["twist"]
    assert main(["twist", "-g", str(g), "--order", "1,1 2,1"]) == 2
