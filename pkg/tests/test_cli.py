import json
import subprocess
import sys

import pytest

from ripsgauge.cli import main
from ripsgauge.detour import DetourProfile, detour_verdict
from ripsgauge.generators import random_tree
from ripsgauge.graphfile import save_graph
from ripsgauge.report import OUT_ENV, RunConfig, plot_profile, run
from ripsgauge.rips import ScaleProfile, Thresholds, classify
from ripsgauge.errors import BadParams, EmptyProfile


def _report(out):
    return json.loads((out / "report.json").read_text())


def test_analyze_tree(tmp_path, capsys):
    assert main(["analyze", "--gen", "random_tree:n=200", "--samples", "800", "--out", str(tmp_path)]) == 0
    rep = _report(tmp_path)
    v = rep["results"]["verdict"]
    assert v["band"] == "tree-consistent" and v["ratio_sup"] == 0
    assert rep["seed"] == 0 and rep["config"]["seed"] == 0
    assert rep["provenance"]["version"]
    assert {p.name for p in tmp_path.iterdir()} >= {"report.json", "samples.csv", "buckets.csv",
                                                     "profile.svg", "timing.json"}
    assert json.loads(capsys.readouterr().out)["band"] == "tree-consistent"


def test_analyze_report_reproduces_band(tmp_path):
    main(["analyze", "--gen", "hyperbolic_tessellation:layers=4", "--samples", "600",
          "--seed", "3", "--out", str(tmp_path), "--no-plot"])
    rep = _report(tmp_path)
    res = rep["results"]
    th = res["verdict"]["thresholds"]
    again = classify(ScaleProfile.from_dict(res["profile"]),
                     Thresholds(th["hyperbolic"], th["tree"], th["min_tail_samples"]))
    assert again.to_dict() == res["verdict"]
    assert "note" in th and th["eps_T_bracket"] == th["eps_H_bracket"]


def test_detour_report_reproduces_band(tmp_path):
    assert main(["detour", "--gen", "hyperbolic_tessellation:layers=5", "--samples", "20",
                 "--t", "1,2,3", "--out", str(tmp_path)]) == 0
    res = _report(tmp_path)["results"]
    prof = DetourProfile.from_dict(res["profile"])
    assert detour_verdict(prof) == res["band"]
    assert (tmp_path / "detour.csv").exists()


def test_detour_tree_all_infinite(tmp_path):
    main(["detour", "--gen", "random_tree:n=120", "--samples", "20", "--out", str(tmp_path)])
    res = _report(tmp_path)["results"]
    assert res["band"] == "hyperbolic-consistent"
    assert all(e["g_hat"] == "inf" for e in res["profile"]["entries"])


def test_tower_and_cone(tmp_path):
    assert main(["tower", "--gen", "cycle:n=6", "--samples", "300", "--out", str(tmp_path / "t")]) == 0
    rc = _report(tmp_path / "t")["results"]["ratio_check"]
    assert rc["passed"]
    assert (tmp_path / "t" / "tower.graph.json").exists()
    assert main(["cone", "--gen", "hyperbolic_tessellation:layers=5", "--samples", "200",
                 "--scales", "1,2,3", "--out", str(tmp_path / "c")]) == 0
    curve = _report(tmp_path / "c")["results"]["curve"]
    assert curve["kind"] == "proxy" and len(curve["defects"]) == 3


def test_euclid_subcommand_fast_grid(tmp_path):
    assert main(["euclid", "--grid", "100", "--out", str(tmp_path)]) == 0
    res = _report(tmp_path)["results"]
    assert set(res) >= {"eta0", "alpha0", "sup_found", "argmax_angles", "grid_resolution", "tol"}
    assert abs(res["sup_found"] - res["eta0"]) < 1e-4


def test_input_file(tmp_path):
    save_graph(random_tree(60, seed=4), tmp_path / "t.graph")
    assert main(["analyze", "--input", str(tmp_path / "t.graph"), "--samples", "100",
                 "--out", str(tmp_path / "o"), "--no-plot"]) == 0


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.graph"
    bad.write_text("metricgraph v1 3\n0 1 1.0\n1 2 zero\n")
    assert main(["analyze", "--input", str(bad), "--out", str(tmp_path / "o")]) == 3
    assert "line 3" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["analyze", "--gen", "blob:n=3"],
    ["analyze", "--gen", "cycle:n=2"],
    ["analyze", "--input", "/nonexistent/graph"],
    ["tower", "--gen", "cycle:n=6", "--basepoint", "99"],
    ["cone", "--gen", "path:n=5", "--scales", "50"],
    ["detour", "--gen", "path:n=5", "--t", "9"],
    ["analyze", "--gen", "path:n=5", "--eps-tree", "-1"],
])
def test_precondition_exit_code(tmp_path, argv):
    assert main(argv + ["--out", str(tmp_path)]) == 2


def test_env_var_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env"))
    main(["analyze", "--gen", "path:n=30", "--samples", "50", "--no-plot"])
    assert (tmp_path / "env" / "report.json").exists()


def test_run_config_validation():
    with pytest.raises(BadParams):
        RunConfig("explode")
    with pytest.raises(BadParams):
        run(RunConfig("analyze", out="/tmp/unused"))


def test_plot_is_deterministic(tmp_path):
    for k in ("a", "b"):
        main(["analyze", "--gen", "grid_plane:n=8", "--samples", "200", "--out", str(tmp_path / k)])
    assert (tmp_path / "a" / "profile.svg").read_bytes() == (tmp_path / "b" / "profile.svg").read_bytes()
    svg = (tmp_path / "a" / "profile.svg").read_text()
    assert "1/32" in svg and "eta0" in svg


def test_plot_empty_profile(tmp_path):
    import numpy as np
    empty = ScaleProfile(np.zeros((0, 3), dtype=int), np.zeros(0), np.zeros(0),
                         np.zeros(0), np.zeros(0), 0.0)
    with pytest.raises(EmptyProfile):
        plot_profile(empty, tmp_path / "x.svg")


def test_console_module_entry(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ripsgauge.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "ripsgauge" in proc.stdout
