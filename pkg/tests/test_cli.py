import json
import subprocess
import sys

import numpy as np
import pytest

from crsp.cli import main
from crsp.pipeline import ARTIFACTS, PARTIAL_MARKER, PipelineConfig, run_pipeline
from crsp.storage import read_labels, read_matrix_csv, write_labels, write_matrix_csv

SBM = '{"n":100,"k":2,"c":10,"lam":0.9,"m":3,"seed":7}'


def test_pipeline_smoke(tmp_path, capsys):
    assert main(["pipeline", "--sbm", SBM, "--cull", "union", "--out", str(tmp_path)]) == 0
    for name in ARTIFACTS:
        assert (tmp_path / name).is_file()
    assert not (tmp_path / PARTIAL_MARKER).exists()
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert 0 <= metrics["ccr"] <= 100 and 0 <= metrics["nmi"] <= 1
    assert metrics["m"] == 3 and metrics["k"] == 2
    assert json.loads(capsys.readouterr().out)["n"] == metrics["n"]


def test_pipeline_rerun_byte_identical(tmp_path):
    for run in ("a", "b"):
        assert main(["pipeline", "--sbm", SBM, "--cull", "union", "--out", str(tmp_path / run)]) == 0
    for name in ("delta.csv", "labels.csv", "coords.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_pipeline_huge_beta_exit_3(tmp_path, capsys):
    code = main(["pipeline", "--sbm", SBM, "--cull", "union", "--beta", "1e6", "--out", str(tmp_path)])
    assert code == 3
    assert "error:" in capsys.readouterr().err
    assert "stage: dissimilarity" in (tmp_path / PARTIAL_MARKER).read_text()


def test_pipeline_validation_exit_2(tmp_path):
    assert main(["pipeline", "--sbm", SBM, "--beta", "-1", "--out", str(tmp_path)]) == 2


def test_missing_manifest_exit_4(tmp_path):
    assert main(["pipeline", "--manifest", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == 4


def test_config_file_with_flag_override(tmp_path):
    cfg = PipelineConfig(input={"generator": "sbm", "n": 60, "k": 2, "c": 12, "lam": 0.9, "m": 2},
                         out_dir=str(tmp_path / "ignored"), cull="union")
    (tmp_path / "cfg.json").write_text(cfg.to_json())
    out = tmp_path / "out"
    assert main(["pipeline", "--config", str(tmp_path / "cfg.json"), "--out", str(out)]) == 0
    saved = json.loads((out / "config.json").read_text())
    assert saved["out_dir"] == str(out) and saved["cull"] == "union"


def test_swissroll_pipeline(tmp_path):
    cfg = PipelineConfig(input={"generator": "swissroll", "n": 80, "seed": 1}, out_dir=str(tmp_path), k=3)
    run_pipeline(cfg)
    assert read_matrix_csv(tmp_path / "points.csv").shape == (80, 3)
    assert read_matrix_csv(tmp_path / "coords.csv").shape == (80, 2)


def test_subcommands_chain(tmp_path, capsys):
    data = tmp_path / "data"
    assert main(["generate", "sbm", "--n", "90", "--k", "3", "--c", "15", "--m", "2",
                 "--cull", "union", "--out", str(data)]) == 0
    manifest = data / "manifest.json"
    delta = tmp_path / "delta.csv"
    assert main(["dissimilarity", str(manifest), "--cull", "none", "--out", str(delta)]) == 0
    assert main(["embed", str(delta), "--dims", "3", "--out", str(tmp_path / "c.csv")]) == 0
    assert read_matrix_csv(tmp_path / "c.csv").shape[1] == 3
    assert main(["cluster", str(delta), "--k", "3", "--out", str(tmp_path / "l.csv")]) == 0
    capsys.readouterr()
    assert main(["evaluate", str(tmp_path / "l.csv"), str(data / "labels.csv")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report) == {"ccr", "nmi"}


def test_generate_swissroll_cli(tmp_path):
    assert main(["generate", "swissroll", "--n", "50", "--angles", "0,90",
                 "--format", "triplets", "--out", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert len(manifest["views"]) == 2


def test_user_supplied_affinity_files(tmp_path):
    # two feature views of three well separated groups
    rng = np.random.default_rng(0)
    truth = np.repeat([0, 1, 2], 15)
    centers = np.array([[0, 0], [6, 0], [0, 6]])
    for i in range(2):
        write_matrix_csv(tmp_path / f"f{i}.csv", centers[truth] + rng.normal(scale=0.5, size=(45, 2)))
    write_labels(tmp_path / "truth.csv", truth)
    graph_dir = tmp_path / "graph"
    assert main(["affinity", str(tmp_path / "f0.csv"), str(tmp_path / "f1.csv"),
                 "--labels", str(tmp_path / "truth.csv"), "--out", str(graph_dir)]) == 0
    out = tmp_path / "run"
    assert main(["pipeline", "--manifest", str(graph_dir / "manifest.json"), "--out", str(out)]) == 0
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["ccr"] == 100.0
    assert read_labels(out / "labels.csv").size == 45


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "crsp", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "pipeline" in res.stdout


def test_unknown_config_key(tmp_path):
    (tmp_path / "cfg.json").write_text('{"input": {"manifest": "x"}, "bogus": 1}')
    assert main(["pipeline", "--config", str(tmp_path / "cfg.json")]) == 2
