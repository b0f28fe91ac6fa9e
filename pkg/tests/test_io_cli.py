import json

import numpy as np
import pytest

from trafficdig.cli import main
from trafficdig.graph import CausalGraphResult, estimate_dig
from trafficdig.io import dumps_result, export_dot, loads_result
from trafficdig.series import FlowSeries, read_csv, write_csv
from trafficdig.sim import simulate_scenario


def small_result(adjacency):
    M = len(adjacency)
    G = np.where(adjacency, 0.9, 0.1)
    np.fill_diagonal(G, 0)
    return CausalGraphResult(["a", "b"][:M], 1, "ctw", 0.4, G * 0.5, np.full((M, M), 0.5),
                             G, G, np.asarray(adjacency, dtype=bool))


def test_dot_single_edge():
    dot = export_dot(small_result([[False, True], [False, False]]))
    lines = [ln.strip() for ln in dot.splitlines()]
    assert [ln for ln in lines if "->" in ln] == ['a -> b [label="0.90"]']


def test_dot_nodes_only_and_determinism():
    res = small_result([[False, False], [False, False]])
    dot = export_dot(res)
    assert "->" not in dot and "a" in dot and "b" in dot
    assert export_dot(res) == dot


def test_dot_sorts_lexicographically():
    adj = np.array([[0, 1, 1], [1, 0, 0], [0, 0, 0]], dtype=bool)
    G = adj.astype(float)
    res = CausalGraphResult(["z", "m", "a"], 1, "ctw", 0.5, G, G, G, G, adj)
    edges = [ln.strip() for ln in export_dot(res).splitlines() if "->" in ln]
    assert edges == sorted(edges)


def test_json_round_trip_is_byte_identical():
    rng = np.random.default_rng(0)
    series = [FlowSeries(f"s{k}", rng.poisson(3, 2000)) for k in range(3)]
    text = dumps_result(estimate_dig(series, depth=1, alpha=0.3))
    assert dumps_result(loads_result(text)) == text
    doc = json.loads(text)
    assert set(doc) == {"node_ids", "depth", "estimator", "alpha", "I", "H", "G", "G_nor", "edges"}


def test_malformed_json_rejected():
    with pytest.raises(ValueError):
        loads_result("{")
    with pytest.raises(ValueError):
        loads_result('{"node_ids": ["a"]}')


def run_cli(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_estimate_chain_from_csv(tmp_path, capsys):
    code, _, _ = run_cli(["simulate", "--scenario", "s1", "--n", "20000", "--seed", "1",
                          "--output-dir", str(tmp_path)], capsys)
    assert code == 0
    code, out, _ = run_cli(["estimate", "--input", str(tmp_path / "s1.csv"), "--levels", "2",
                            "--alpha", "0.4", "--depth", "1", "--output-dir",
                            str(tmp_path / "r")], capsys)
    assert code == 0
    dot = (tmp_path / "r" / "dig.dot").read_text()
    edges = {ln.split("[")[0].strip() for ln in dot.splitlines() if "->" in ln}
    assert edges == {"s1 -> s2", "s2 -> s3", "s3 -> s4"}


def test_estimate_exclude_empty_matches_omitted(tmp_path, capsys):
    rng = np.random.default_rng(2)
    path = tmp_path / "d.csv"
    with open(path, "w") as fh:
        write_csv([FlowSeries(k, rng.poisson(3, 800)) for k in ("a", "b", "c")], fh)
    base = ["estimate", "--input", str(path), "--depth", "1"]
    run_cli(base + ["--output-dir", str(tmp_path / "x")], capsys)
    run_cli(base + ["--exclude", "", "--output-dir", str(tmp_path / "y")], capsys)
    assert (tmp_path / "x" / "result.json").read_bytes() == (tmp_path / "y" / "result.json").read_bytes()


def test_independent_noise_gives_empty_edge_list(tmp_path, capsys):
    rng = np.random.default_rng(3)
    path = tmp_path / "n.csv"
    with open(path, "w") as fh:
        write_csv([FlowSeries(k, rng.poisson(3, 20_000)) for k in ("a", "b")], fh)
    code, _, _ = run_cli(["estimate", "--input", str(path), "--depth", "1", "--alpha", "1.0",
                          "--output-dir", str(tmp_path)], capsys)
    assert code == 0
    doc = json.loads((tmp_path / "result.json").read_text())
    # a two-node run always normalizes one entry to 1, so use the raw ratios
    assert max(max(row) for row in doc["G"]) < 0.01


def test_latent_exclusion_gains_edge(tmp_path, capsys):
    path = tmp_path / "latent.csv"
    with open(path, "w") as fh:
        write_csv(simulate_scenario("latent", seed=0), fh)
    common = ["estimate", "--input", str(path), "--estimator", "empirical", "--depth", "2",
              "--alpha", "0.7"]
    run_cli(common + ["--output-dir", str(tmp_path / "full")], capsys)
    run_cli(common + ["--exclude", "s7", "--output-dir", str(tmp_path / "cut")], capsys)
    full = {tuple(e[:2]) for e in json.loads((tmp_path / "full" / "result.json").read_text())["edges"]}
    cut = {tuple(e[:2]) for e in json.loads((tmp_path / "cut" / "result.json").read_text())["edges"]}
    assert ("s4", "s6") in cut - full


def test_export_and_bounds(tmp_path, capsys):
    res = small_result([[False, True], [False, False]])
    (tmp_path / "r.json").write_text(dumps_result(res))
    code, _, _ = run_cli(["export", "--input", str(tmp_path / "r.json"), "--output-dir",
                          str(tmp_path)], capsys)
    assert code == 0 and (tmp_path / "dig.dot").read_text() == export_dot(res)
    code, out, _ = run_cli(["bounds", "--sensors", "2", "--order", "1", "--levels", "2",
                            "--edges", "1", "--threshold", "6"], capsys)
    assert code == 0 and "R=12" in out and "PF_upper=0.4456" in out


def test_lags_writes_csv(tmp_path, capsys):
    x = np.random.default_rng(4).poisson(5, 500)
    path = tmp_path / "l.csv"
    with open(path, "w") as fh:
        write_csv([FlowSeries("a", x), FlowSeries("b", np.roll(x, 2))], fh)
    code, out, _ = run_cli(["lags", "--input", str(path), "--tau-max", "5", "--output-dir",
                            str(tmp_path)], capsys)
    assert code == 0 and "depth 2" in out
    rows = (tmp_path / "lags.csv").read_text().splitlines()
    assert rows[0] == "from,to,tau,covariance,cod,peak" and len(rows) == 1 + 2 * 6


def test_config_file_supplies_flags(tmp_path, capsys):
    x = np.random.default_rng(5).poisson(5, 600)
    path = tmp_path / "c.csv"
    with open(path, "w") as fh:
        write_csv([FlowSeries("a", x), FlowSeries("b", np.roll(x, 1))], fh)
    ini = tmp_path / "run.ini"
    ini.write_text(f"[trafficdig]\ninput = {path}\nestimator = empirical\ndepth = 1\n"
                   f"output_dir = {tmp_path / 'o'}\n")
    code, _, _ = run_cli(["estimate", "--config", str(ini)], capsys)
    doc = json.loads((tmp_path / "o" / "result.json").read_text())
    assert code == 0 and doc["estimator"] == "empirical" and doc["depth"] == 1


def test_ctm_config_section(tmp_path, capsys):
    ini = tmp_path / "ctm.ini"
    ini.write_text("[ctm]\ndemand_period = 40\nv_min = 22\nq_max = 0.9\n")
    code, _, _ = run_cli(["simulate", "--scenario", "c1", "--n", "200", "--config", str(ini),
                          "--output-dir", str(tmp_path)], capsys)
    assert code == 0 and len(read_csv(tmp_path / "c1.csv")[0]) == 200


@pytest.mark.parametrize("args,fragment", [
    (["estimate", "--input", "/nonexistent.csv"], "cannot read"),
    (["estimate"], "--input is required"),
    (["simulate"], "--scenario is required"),
    (["bounds", "--sensors", "1"], "M must be"),
    (["estimate", "--config", "/nonexistent.ini"], "cannot read config"),
])
def test_errors_are_single_line(args, fragment, capsys):
    code, _, err = run_cli(args, capsys)
    assert code != 0
    lines = err.strip().splitlines()
    assert len(lines) == 1 and lines[0].startswith("error:") and fragment in lines[0]


def test_unknown_exclude_and_bad_alpha(tmp_path, capsys):
    path = tmp_path / "d.csv"
    with open(path, "w") as fh:
        write_csv([FlowSeries("a", [1, 2, 3, 4]), FlowSeries("b", [2, 1, 2, 1])], fh)
    code, _, err = run_cli(["estimate", "--input", str(path), "--exclude", "zz"], capsys)
    assert code == 1 and "unknown node id" in err
    code, _, err = run_cli(["estimate", "--input", str(path), "--alpha", "2"], capsys)
    assert code == 1 and err.startswith("error: alpha")


def test_bad_csv_reports_line(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("timestamp,a\n0,1\n300,\n")
    code, _, err = run_cli(["estimate", "--input", str(path)], capsys)
    assert code == 1 and "line 3" in err
