import json
import os

import pytest

from iterlab import dist_to_text, EdgeDist
from iterlab.cli import main

LAM_36 = "edge\n3\t1\n"
RHO_36 = "edge\n6\t1\n"


def write_cfg(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def ldpc_cfg(p=0.4, target="1e-6", extra=""):
    return (
        "schema: 1\n"
        "ensemble:\n"
        "  kind: ldpc\n"
        f"  lambda: \"edge\\n3\\t1\\n\"\n"
        f"  rho: \"edge\\n6\\t1\\n\"\n"
        f"channel: {{p: {p}}}\n"
        f"de: {{target_pb: {target}, max_iter: 50000}}\n"
        + extra
    )


def test_cmd_de_golden(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "de.yaml", ldpc_cfg())
    out = tmp_path / "traj.csv"
    assert main(["de", "--config", cfg, "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "l,x,pb"
    assert len(lines) == 18  # 17 iterations + header
    assert "iterations_to_target: 17" in capsys.readouterr().out


def test_cmd_de_validation_error(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "bad.yaml", ldpc_cfg(p=1.1))
    assert main(["de", "--config", cfg]) == 2
    assert "error" in capsys.readouterr().err


def test_cmd_de_perfect_channel(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "p0.yaml", ldpc_cfg(p=0.0))
    out = tmp_path / "t.csv"
    assert main(["de", "--config", cfg, "--out", str(out)]) == 0
    assert len(out.read_text().strip().splitlines()) == 2  # header + one row


def test_cmd_de_json(tmp_path):
    cfg = write_cfg(tmp_path, "de.yaml", ldpc_cfg())
    out = tmp_path / "traj.json"
    assert main(["de", "--config", cfg, "--out", str(out), "--format", "json"]) == 0
    payload = json.loads(out.read_text())
    assert payload["iterations_to_target"] == 17
    assert payload["terminal"] == "target_reached"


def test_cmd_bound(tmp_path, capsys):
    for family, expect in (
        ("ldpc", 4.0186),
        ("ara_systematic", None),
        ("turbo", None),
    ):
        cfg = write_cfg(
            tmp_path,
            f"b_{family}.yaml",
            "schema: 1\n"
            f"bound: {{family: {family}, epsilon: 0.1, p: 0.4, pb: 0.01, l2: 0.5}}\n",
        )
        out = tmp_path / f"b_{family}.json"
        assert main(["bound", "--config", cfg, "--out", str(out)]) == 0
        rec = json.loads(out.read_text())
        assert rec["schema"] == 1
        if expect is not None:
            assert rec["value"] == pytest.approx(expect, abs=1e-4)
    # inapplicable still exits 0
    cfg = write_cfg(
        tmp_path,
        "b0.yaml",
        "schema: 1\nbound: {family: ldpc, epsilon: 0.1, p: 0.4, pb: 0.01, l2: 0.0}\n",
    )
    assert main(["bound", "--config", cfg]) == 0


def test_cmd_verify_inapplicable(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "v.yaml", ldpc_cfg())
    out = tmp_path / "v.json"
    assert main(["verify", "--config", cfg, "--out", str(out), "--format", "json"]) == 0
    rec = json.loads(out.read_text())
    assert rec["status"] == "inapplicable"
    assert rec["measured_l"] == 17


def test_cmd_verify_degree2(tmp_path):
    lam = dist_to_text(EdgeDist([0, 0.5, 0.5])).replace("\n", "\\n").replace("\t", "\\t")
    cfg = write_cfg(
        tmp_path,
        "v2.yaml",
        "schema: 1\n"
        "ensemble:\n"
        "  kind: ldpc\n"
        f"  lambda: \"{lam}\"\n"
        "  rho: \"edge\\n6\\t1\\n\"\n"
        "channel: {p: 0.2}\n"
        "de: {target_pb: 1e-5, max_iter: 20000}\n",
    )
    assert main(["verify", "--config", cfg, "--format", "json"]) == 0


def test_cmd_verify_corrupt_ensemble(tmp_path, capsys):
    cfg = write_cfg(
        tmp_path,
        "vbad.yaml",
        "schema: 1\n"
        "ensemble:\n"
        "  kind: ldpc\n"
        "  lambda: \"edge\\n3\\tnot-a-number\\n\"\n"
        "  rho: \"edge\\n6\\t1\\n\"\n"
        "channel: {p: 0.4}\n",
    )
    assert main(["verify", "--config", cfg]) == 2


def test_cmd_verify_dist_file(tmp_path):
    (tmp_path / "lam.txt").write_text(LAM_36)
    (tmp_path / "rho.txt").write_text(RHO_36)
    cfg = write_cfg(
        tmp_path,
        "vf.yaml",
        "schema: 1\n"
        "ensemble: {kind: ldpc, lambda_file: lam.txt, rho_file: rho.txt}\n"
        "channel: {p: 0.4}\n"
        "de: {target_pb: 1e-6}\n",
    )
    assert main(["verify", "--config", cfg]) == 0


def test_cmd_scan_and_consistency(tmp_path, capsys):
    cfg = write_cfg(
        tmp_path,
        "scan.yaml",
        "schema: 1\nscan: {epsilons: [0.1], target_pb: 1e-5}\n",
    )
    out = tmp_path / "scan.json"
    assert main(["scan", "--config", cfg, "--out", str(out), "--format", "json"]) == 0
    rows = json.loads(out.read_text())
    assert len(rows) == 1
    assert rows[0]["satisfied"] and rows[0]["applicable"]
    assert rows[0]["measured_l"] >= rows[0]["bound_l"]
    # empty sweep is an input error
    cfg2 = write_cfg(tmp_path, "scan0.yaml", "schema: 1\nscan: {epsilons: []}\n")
    assert main(["scan", "--config", cfg2]) == 2


def test_cmd_scan_two_point_sweep(tmp_path):
    cfg = write_cfg(
        tmp_path,
        "scan2.yaml",
        "schema: 1\nscan: {epsilons: [0.1, 0.05], target_pb: 1e-5}\n",
    )
    out = tmp_path / "scan2.csv"
    assert main(["scan", "--config", cfg, "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    header = lines[0].split(",")
    for col in ("epsilon", "measured_l", "bound_l", "l_times_epsilon", "delta"):
        assert col in header
    eps_col = header.index("epsilon")
    eps = [float(ln.split(",")[eps_col]) for ln in lines[1:]]
    assert eps == sorted(eps, reverse=True)
    l_col = header.index("measured_l")
    ls = [int(ln.split(",")[l_col]) for ln in lines[1:]]
    assert ls[1] > ls[0]


def test_cmd_threshold(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "th.yaml", ldpc_cfg(extra="threshold: {tol: 5e-3}\n"))
    out = tmp_path / "th.txt"
    assert main(["threshold", "--config", cfg, "--out", str(out)]) == 0
    pstar = float(out.read_text())
    assert pstar == pytest.approx(0.4294, abs=6e-3)
    printed = capsys.readouterr().out
    assert "threshold: 0.4" in printed
    # stuck ensemble: no convergent p
    cfg2 = write_cfg(
        tmp_path,
        "thbad.yaml",
        "schema: 1\n"
        "ensemble:\n"
        "  kind: ara_systematic\n"
        "  lambda: \"edge\\n2\\t0.5\\n3\\t0.5\\n\"\n"
        "  rho: \"edge\\n2\\t0.5\\n3\\t0.5\\n\"\n"
        "threshold: {tol: 1e-2}\n",
    )
    assert main(["threshold", "--config", cfg2]) == 2


def test_cmd_simulate_deterministic(tmp_path, monkeypatch, capsys):
    body = (
        "schema: 1\n"
        "ensemble:\n"
        "  kind: ldpc\n"
        "  lambda: \"edge\\n3\\t1\\n\"\n"
        "  rho: \"edge\\n6\\t1\\n\"\n"
        "sim: {n: 1000, p: 0.3, trials: 3, master_seed: 11, max_iter: 30}\n"
    )
    cfg = write_cfg(tmp_path, "sim.yaml", body)
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["simulate", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
    assert out1.read_text() == out2.read_text()
    assert os.path.exists(str(out1) + ".report.json")
    # seed override through the environment changes the result
    monkeypatch.setenv("ITERLAB_SEED", "999")
    out3 = tmp_path / "c.csv"
    assert main(["simulate", "--config", cfg, "--out", str(out3)]) == 0
    assert out1.read_text() != out3.read_text()
    # zero trials is an input error
    bad = write_cfg(tmp_path, "sim0.yaml", body.replace("trials: 3", "trials: 0"))
    monkeypatch.delenv("ITERLAB_SEED")
    assert main(["simulate", "--config", bad]) == 2


def test_cmd_exit_chart(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "chart.yaml", ldpc_cfg())
    out = tmp_path / "chart.csv"
    assert main(["exit-chart", "--config", cfg, "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "x,c,v"
    assert len(lines) == 513  # default 512-sample grid
    first = lines[1].split(",")
    assert float(first[1]) == pytest.approx(0.0, abs=1e-12)  # c(0) = 0
    last = lines[-1].split(",")
    assert float(last[1]) == pytest.approx(1.0, abs=1e-12)  # c(1) = 1
    assert float(last[2]) == pytest.approx(1.0, abs=1e-9)  # v(1) = 1
    # sub-threshold positivity reported on stdout
    assert "min(v-c)" in capsys.readouterr().out


def test_bad_schema(tmp_path):
    cfg = write_cfg(tmp_path, "bad.yaml", "schema: 2\n")
    assert main(["de", "--config", cfg]) == 2


def test_missing_config():
    assert main(["de", "--config", "/nonexistent/x.yaml"]) == 2
