import json
import math

import numpy as np

from tdakit.cli import main
from tdakit.embedding import DelaySpec, delay_embed, even_subsample, optimal_delay
from tdakit.geometry import PointCloud, write_point_cloud_csv
from tdakit.metrics import wasserstein
from tdakit.persistence import persistent_diagram, read_diagram_csv, write_diagram_csv


def run(*argv):
    return main([str(a) for a in argv])


def test_generate_henon(tmp_path):
    out = tmp_path / "h.csv"
    assert run("generate", "--system", "henon", "--count", 2000, "-o", out) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "x,y" and len(lines) == 2001
    assert lines[1] == "1.286,0.03"
    meta = json.loads((tmp_path / "h.csv.meta.json").read_text())
    assert meta["config"]["seed"] == 0 and meta["resolved"]["count"] == 2000


def test_generate_rossler_preset(tmp_path):
    out = tmp_path / "r.csv"
    assert run("generate", "--preset", "rossler-topology", "-o", out) == 0
    assert len(out.read_text().splitlines()) == 701


def test_generate_bad_system(tmp_path, capsys):
    assert run("generate", "--system", "duffing", "-o", tmp_path / "x.csv") == 2
    assert "lorenz, rossler, henon" in capsys.readouterr().err


def test_persist_square_and_reduced(tmp_path):
    src = tmp_path / "sq.csv"
    src.write_text("x,y\n0,0\n1,0\n1,1\n0,1\n")
    assert run("persist", src, "-o", tmp_path / "d.csv") == 0
    text = (tmp_path / "d.csv").read_text()
    assert "1,1.0,1.4142135623730951" in text and "0,0.0,inf" in text
    assert run("persist", src, "--reduced", "-o", tmp_path / "r.csv") == 0
    assert "inf" not in (tmp_path / "r.csv").read_text()


def test_persist_is_byte_deterministic(tmp_path):
    src = tmp_path / "c.csv"
    write_point_cloud_csv(PointCloud(np.random.default_rng(0).random((10, 2))), src)
    run("persist", src, "-o", tmp_path / "a.csv")
    run("persist", src, "-o", tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_distance(tmp_path, capsys):
    a = tmp_path / "a.csv"
    e = tmp_path / "e.csv"
    a.write_text("dim,birth,death\n1,1,3\n")
    e.write_text("dim,birth,death\n")
    assert run("distance", a, e, "--p", 1) == 0
    assert json.loads(capsys.readouterr().out)["distance"] == 1.0
    assert run("distance", a, a, "-o", tmp_path / "o.json") == 0
    assert json.loads((tmp_path / "o.json").read_text())["distance"] == 0.0


def test_distance_matches_sweep_internal_value(tmp_path, capsys):
    x = np.sin(np.arange(300) * 2 * np.pi / 30) + 0.3 * np.sin(np.arange(300) * 2 * np.pi / 7)
    ref = persistent_diagram(delay_embed(x, DelaySpec(7, 3)))
    emb = persistent_diagram(even_subsample(delay_embed(x, DelaySpec(4, 3)), 200))
    write_diagram_csv(ref, tmp_path / "ref.csv")
    write_diagram_csv(emb, tmp_path / "emb.csv")
    run("distance", tmp_path / "ref.csv", tmp_path / "emb.csv")
    got = json.loads(capsys.readouterr().out)["distance"]
    assert got == wasserstein(ref, emb).cost
    res = optimal_delay(x, 3, range(1, 9), ref, subsample=200)
    assert res.wd[res.delays.index(4)] == got


def test_missing_input_and_dataset(tmp_path):
    assert run("persist", tmp_path / "nope.csv", "-o", tmp_path / "o.csv") == 4
    assert run("z24", "-o", tmp_path / "z.csv") == 4
    assert run("persist", tmp_path / "nope.csv", "-o", tmp_path / "no" / "o.csv") == 2


def test_budget_exit_code(tmp_path):
    src = tmp_path / "c.csv"
    write_point_cloud_csv(PointCloud(np.random.default_rng(0).random((6000, 2))), src)
    assert run("persist", src, "-o", tmp_path / "o.csv") == 3


def test_pca(tmp_path):
    src = tmp_path / "c.csv"
    write_point_cloud_csv(PointCloud(np.random.default_rng(0).random((50, 3))), src)
    assert run("pca", src, "--k", 2, "-o", tmp_path / "p.csv") == 0
    assert (tmp_path / "p.csv").read_text().startswith("pc1,pc2\n")
    side = json.loads((tmp_path / "p.csv.pca.json").read_text())
    assert len(side["components"]) == 2 and len(side["explained_variance"]) == 2


def test_fractal_small(tmp_path):
    out = tmp_path / "f.json"
    assert run("fractal", "--sampler", "cube2", "--sizes", "100,200,400,800", "--trials", 2, "-o", out) == 0
    obj = json.loads(out.read_text())
    assert abs(obj["dimension"] - 2) < 0.3 and len(obj["fit"]) == 4


def test_delayopt_on_file(tmp_path):
    src = tmp_path / "s.csv"
    t = np.arange(400)
    write_point_cloud_csv(PointCloud(np.sin(2 * np.pi * t / 40) + 0.5 * np.sin(2 * np.pi * t / 13)), src)
    ref = persistent_diagram(even_subsample(delay_embed(np.loadtxt(src), DelaySpec(9, 3)), 150))
    write_diagram_csv(ref, tmp_path / "ref.csv")
    out = tmp_path / "w.csv"
    assert run("delayopt", "--input", src, "--reference", tmp_path / "ref.csv", "--delays", "1:15",
               "--subsample", 150, "-o", out) == 0
    res = json.loads((tmp_path / "w.csv.json").read_text())
    assert res["optimal"] > res["first_peak"]
    assert out.read_text().splitlines()[0] == "alpha,wd"


def test_z24_synthetic_and_sweep(tmp_path):
    out = tmp_path / "z.csv"
    assert run("z24", "--synthetic", "--seed", 3, "--split", "Warm:0.5,0.5", "-o", out) == 0
    rows = [l.split(",") for l in out.read_text().splitlines()[1:]]
    assert max(rows, key=lambda r: float(r[3]))[0] == "Damage"
    assert {r[0] for r in rows} == {"Freezing", "Cold", "Warm", "Damage", "Warm1", "Warm2"}
    meta = json.loads((tmp_path / "z.csv.meta.json").read_text())
    assert meta["provenance"]["Warm1"]["seed"] == 3
    assert (tmp_path / "z.csv.matrix.csv").exists()
    sw = tmp_path / "s.csv"
    assert run("sweep", "--synthetic", "--sizes", "50,100", "-o", sw) == 0
    assert sw.read_text().splitlines()[0] == "size,label,wd_sum,scaled_wd"


def test_roundtrip_file(tmp_path):
    d = persistent_diagram(PointCloud(np.random.default_rng(2).random((30, 2))), max_scale=math.inf)
    write_diagram_csv(d, tmp_path / "d.csv")
    assert read_diagram_csv(tmp_path / "d.csv").equals(d)


def test_bad_number_flag(tmp_path):
    src = tmp_path / "sq.csv"
    src.write_text("0,0\n1,1\n")
    assert run("persist", src, "--max-scale", "abc", "-o", tmp_path / "o.csv") == 2
