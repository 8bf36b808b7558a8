import csv
import json
import subprocess
import sys

import pytest

from scldpc.construct import assemble_locality, build_local
from scldpc.cli import load_config, resolve, run
from scldpc.enumeration import count_nonequivalent, distribution_to_matrix
from scldpc.matrix_io import write_matrix


def _csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_count_prints_value(capsys, tmp_path):
    assert run(["count", "--gamma", "3", "--kappa", "11", "--out-dir", str(tmp_path)]) == 0
    assert capsys.readouterr().out.strip() == "6080"
    assert json.loads((tmp_path / "count.json").read_text())["count"] == 6080
    manifest = json.loads((tmp_path / "count.manifest.json").read_text())
    assert manifest["command"] == "count" and manifest["outputs"] == ["count.json"]
    assert manifest["config"]["kappa"] == 11 and "numpy" in manifest["versions"]


@pytest.mark.parametrize("what, expect", [("filtered", 23), ("distributions", 56)])
def test_count_variants(capsys, tmp_path, what, expect):
    assert run(["count", "--gamma", "2", "--kappa", "5", "--what", what,
                "--out-dir", str(tmp_path)]) == 0
    assert int(capsys.readouterr().out) == expect


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "scldpc", "count", "--gamma", "2", "--kappa", "5",
                           "--out-dir", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "34"


@pytest.mark.parametrize("argv", [
    ["count", "--gamma", "3"],
    ["design", "--gamma", "3", "--kappa", "5"],
    [],
    ["frobnicate"],
    ["count", "--gamma", "x", "--kappa", "3"],
])
def test_usage_errors_exit_2(argv, tmp_path, capsys):
    assert run(argv + ["--out-dir", str(tmp_path)] if argv else argv) == 2
    assert not list(tmp_path.iterdir())


def test_invalid_values_exit_2(tmp_path):
    assert run(["count", "--gamma", "0", "--kappa", "3", "--out-dir", str(tmp_path)]) == 2


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"gamma": 3, "kappa": 11, "z": 67, "l": 5, "alpha": 6}))
    args = resolve(["design", "--config", str(cfg), "--z", "83"])
    assert args.z == 83 and args.kappa == 11
    args = resolve(["design", "--config", str(cfg)])
    assert args.z == 67


def test_config_accepts_dashed_keys_and_rejects_unknown(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"gamma-c": 3}))
    assert load_config(cfg) == {"gamma_c": 3}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"gamma": 3, "kappa": 5, "frobs": 1}))
    assert run(["count", "--config", str(bad), "--out-dir", str(tmp_path / "o")]) == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert run(["count", "--config", str(broken), "--out-dir", str(tmp_path / "o")]) == 2


def test_enumerate_writes_all_classes(tmp_path, capsys):
    assert run(["enumerate", "--gamma", "3", "--kappa", "4", "--out-dir", str(tmp_path)]) == 0
    rows = _csv(tmp_path / "enumerate.csv")
    assert len(rows) == count_nonequivalent(4, 3) == int(capsys.readouterr().out)
    assert [int(r["index"]) for r in rows] == list(range(len(rows)))


def test_cycles_and_threshold_on_files(tmp_path, capsys):
    P = distribution_to_matrix((2, 0, 1, 2, 2, 0, 2, 2))
    f = tmp_path / "P.txt"
    write_matrix(f, P, z=67)
    assert run(["cycles", "--matrix", str(f), "--out-dir", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "cycles.json").read_text())
    assert report["lifted_cycles6"] == 3551
    capsys.readouterr()
    assert run(["threshold", "--matrix", str(f), "--l", "5", "--out-dir", str(tmp_path)]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["sigma"] == pytest.approx(0.6853, abs=5e-4)


def test_threshold_of_plain_protograph(tmp_path, capsys):
    f = tmp_path / "B.txt"
    f.write_text("3 6\n111111\n111111\n111111\n")
    assert run(["threshold", "--matrix", str(f), "--out-dir", str(tmp_path)]) == 0
    assert json.loads(capsys.readouterr().out)["sigma"] == pytest.approx(0.8809, abs=1e-3)
    g = tmp_path / "S.txt"
    g.write_text("1 2\n1*\n")
    assert run(["threshold", "--matrix", str(g), "--out-dir", str(tmp_path)]) == 2


def test_cycles_on_power_file(tmp_path, capsys):
    f = tmp_path / "C.txt"
    f.write_text("2 3 5\n0 0 0\n0 1 2\n")
    assert run(["cycles", "--matrix", str(f), "--out-dir", str(tmp_path)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["lifted_cycles4"] == 0 and report["z"] == 5


def test_design_and_manifest_replay(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    argv = ["design", "--gamma", "3", "--kappa", "5", "--z", "7", "--l", "3", "--alpha", "1"]
    assert run(argv + ["--out-dir", str(a)]) == 0
    rows = _csv(a / "design.csv")
    assert rows[0]["tag"] == "CD" and rows[-1]["tag"] == "TD"
    cyc = [int(r["cycles6_lifted"]) for r in rows]
    assert cyc == sorted(cyc)
    assert run(["design", "--config", str(a / "design.manifest.json"), "--out-dir", str(b)]) == 0
    assert (a / "design.csv").read_text() == (b / "design.csv").read_text()


def test_design_local_with_variants(tmp_path):
    argv = ["design-local", "--gamma-c", "2", "--gamma-l", "3", "--kappa", "11", "--z", "7",
            "--l", "3", "--alpha", "1", "--td-scheme", "balanced", "--final-nu", "8",
            "--out-dir", str(tmp_path)]
    assert run(argv) == 0
    assert _csv(tmp_path / "design_local.csv")[0]["proxy_threshold"]
    variants = _csv(tmp_path / "design_local_variants.csv")
    assert [v["tag"] for v in variants] == ["TD+balanced"]


def test_simulate_small_run_is_reproducible(tmp_path):
    P = distribution_to_matrix((0, 1, 2, 2, 2, 2, 2, 0))
    f = tmp_path / "P.txt"
    write_matrix(f, P, z=17)
    argv = ["simulate", "--code", str(f), "--snr", "1.0:1.0:2.0", "--l", "3",
            "--min-frame-errors", "3", "--max-frames", "20", "--seed", "7"]
    assert run(argv + ["--out-dir", str(tmp_path / "a")]) == 0
    assert run(argv + ["--out-dir", str(tmp_path / "b")]) == 0
    ra, rb = _csv(tmp_path / "a" / "simulate.csv"), _csv(tmp_path / "b" / "simulate.csv")
    assert ra == rb and [float(r["snr_db"]) for r in ra] == [1.0, 2.0]
    for r in ra:
        assert float(r["ci_lo"]) <= float(r["ber"]) <= float(r["ci_hi"])
    assert run(argv + ["--mode", "local", "--out-dir", str(tmp_path / "c")]) == 2
    g = tmp_path / "PL.txt"
    write_matrix(g, assemble_locality(P[:2], build_local(2, 11, 0, "regular")), z=17)
    local = argv[:2] + [str(g)] + argv[3:] + ["--mode", "local", "--out-dir", str(tmp_path / "d")]
    assert run(local) == 0
    assert len(_csv(tmp_path / "d" / "simulate.csv")) == 2
    assert run(local[:-1] + [str(tmp_path / "e"), "--rate", "0.5"]) == 0
    assert run(local[:-1] + [str(tmp_path / "f"), "--rate", "1.5"]) == 2


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SCLDPC_OUTPUT_DIR", str(tmp_path / "env"))
    assert run(["count", "--gamma", "2", "--kappa", "3"]) == 0
    assert (tmp_path / "env" / "count.json").exists()
