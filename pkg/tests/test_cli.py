import json
import os

import pytest

from silt.cli import main


def run(args):
    return main(args)


def test_laws_inspect_stdout(capsys):
    assert run(["laws", "inspect", "--law", "zipf1d"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["name"] == "zipf1d"
    assert payload["d"] == 1
    assert payload["gamma"] == pytest.approx(3.0 / 3.141592653589793)


def test_walk_simulate_csv(tmp_path):
    out = tmp_path / "walk.csv"
    assert run(["walk", "simulate", "--law", "lazy2d", "--n", "10", "--seed", "3",
                "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "step,x,y,vn"
    assert len(lines) == 12
    first = lines[1].split(",")
    assert first[:3] == ["0", "0", "0"]
    assert (tmp_path / "walk.csv.manifest.json").exists()


def test_variance_exact_assert_and_schema(tmp_path):
    out = tmp_path / "v.csv"
    assert run(["variance", "exact", "--law", "lazy2d", "--n-max", "4",
                "--assert", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,a2,a3,b2,b3,var,var_over_n2"
    assert len(lines) == 5
    # n=1 row: var = 1 for the lazy walk
    row1 = lines[1].split(",")
    assert float(row1[5]) == pytest.approx(1.0, abs=1e-12)


def test_variance_mc_schema_and_worker_independence(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    base = ["variance", "mc", "--law", "zipf1d", "--n", "64,128", "--reps", "200",
            "--seed", "5"]
    assert run(base + ["--workers", "1", "--out", str(a)]) == 0
    assert run(base + ["--workers", "6", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == "n,reps,mean,var,var_over_n2,ci"


def test_expectation_trend_output(capsys):
    assert run(["expectation", "trend", "--law", "zipf1d", "--n", "100,200"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,ev,ratio,target"
    assert float(lines[1].split(",")[3]) == pytest.approx(2.0 / 3.0)


def test_contour_extract_json(capsys):
    assert run(["contour", "extract", "--series", "cubic_pole", "--n", "5"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["value"] == pytest.approx(21.0, abs=1e-6)
    assert payload["aliasing_bound"] < 1e-6


def test_contour_extract_polynomial_file(tmp_path, capsys):
    spec = tmp_path / "series.json"
    spec.write_text(json.dumps({"kind": "polynomial", "coefficients": [0, 0, 7.5]}))
    assert run(["contour", "extract", "--series", f"file:{spec}", "--n", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["value"] == pytest.approx(7.5, abs=1e-9)


def test_darboux_verify(tmp_path):
    out = tmp_path / "d.csv"
    assert run(["darboux", "verify", "--series", "entire_exponential",
                "--n-max", "200", "--assert", "--out", str(out)]) == 0
    header = out.read_text().splitlines()[0]
    assert header == "n,coeff,bound,aliasing,margin,ok"


def test_renewal_csv(tmp_path):
    out = tmp_path / "r.csv"
    assert run(["renewal", "--law", "geometric:0.5", "--n", "20", "--assert",
                "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,EN,EN2,bound"
    # E N_1 = 1/2 for geometric(1/2)
    assert float(lines[1].split(",")[1]) == pytest.approx(0.5)


def test_kappa_json(capsys):
    assert run(["kappa", "--assert"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["within_fixture"] is True
    assert payload["value"] == pytest.approx(payload["fixture_value"], abs=1e-6)


def test_identities_pass_lines(capsys):
    assert run(["identities", "--assert"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "FAIL" not in out


def test_rwrs_clt_json(tmp_path):
    out = tmp_path / "clt.json"
    assert run(["rwrs", "clt", "--law", "zipf1d", "--n", "1000",
                "--sceneries", "1000", "--walk-seed", "5", "--scenery-seed", "9",
                "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["ks"] < 0.1
    assert payload["n"] == 1000


def test_exit_code_2_on_bad_law(capsys):
    assert run(["variance", "exact", "--law", "nosuch", "--n-max", "3"]) == 2


def test_exit_code_2_on_malformed_law_file(tmp_path, capsys):
    bad = tmp_path / "law.json"
    bad.write_text('{"d": 1, "support": [1, -1]}')
    assert run(["laws", "inspect", "--law", f"file:{bad}"]) == 2
    assert "missing field" in capsys.readouterr().err
    bad.write_text("not json at all")
    assert run(["laws", "inspect", "--law", f"file:{bad}"]) == 2


def test_exit_code_2_on_bad_tolerance():
    assert run(["kappa", "--tol", "1e-12"]) == 2


def test_exit_code_3_on_budget(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"law": "zipf1d", "n_max": 6, "box": 32,
                               "eps_mass": 1e-12}))
    code = run(["variance", "exact", "--config", str(cfg)])
    assert code == 3


def test_exit_code_4_on_failed_check(monkeypatch, capsys):
    # a fixture nudged off the true value makes the kappa assert fail
    import silt.cli as cli

    real = cli.load_kappa_fixture

    def skewed():
        fx = dict(real())
        fx["value"] = fx["value"] + 1.0
        return fx

    monkeypatch.setattr(cli, "load_kappa_fixture", skewed)
    assert run(["kappa", "--assert"]) == 4


def test_config_file_merge_and_flag_priority(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"law": "lazy2d", "n_max": 3}))
    assert run(["variance", "exact", "--config", str(cfg)]) == 0
    out1 = capsys.readouterr().out
    assert len(out1.splitlines()) == 4  # header + 3 rows
    assert run(["variance", "exact", "--config", str(cfg), "--n-max", "2"]) == 0
    out2 = capsys.readouterr().out
    assert len(out2.splitlines()) == 3  # flag wins over config


def test_out_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SILT_OUT_DIR", str(tmp_path))
    assert run(["walk", "simulate", "--law", "zipf1d", "--n", "5", "--seed", "1",
                "--out", "w.csv"]) == 0
    assert (tmp_path / "w.csv").exists()


def test_manifest_contents_and_reproduce(tmp_path, capsys):
    out = tmp_path / "mc.csv"
    assert run(["variance", "mc", "--law", "lazy2d", "--n", "32", "--reps", "100",
                "--seed", "7", "--out", str(out)]) == 0
    manifest_path = tmp_path / "mc.csv.manifest.json"
    manifest = json.loads(manifest_path.read_text())
    assert manifest["tool"] == "silt"
    assert manifest["config"]["subcommand"] == "variance-mc"
    assert manifest["config"]["seed"] == 7
    assert manifest["outputs"][0]["file"] == "mc.csv"
    assert len(manifest["outputs"][0]["sha256"]) == 64
    capsys.readouterr()
    assert run(["reproduce", "--manifest", str(manifest_path)]) == 0


def test_reproduce_detects_tampering(tmp_path, capsys):
    out = tmp_path / "w.csv"
    assert run(["walk", "simulate", "--law", "zipf1d", "--n", "20", "--seed", "2",
                "--out", str(out)]) == 0
    manifest_path = tmp_path / "w.csv.manifest.json"
    manifest = json.loads(manifest_path.read_text())
    manifest["config"]["seed"] = 3  # claim a different seed than recorded
    manifest_path.write_text(json.dumps(manifest))
    assert run(["reproduce", "--manifest", str(manifest_path)]) == 4


def test_reproduce_kappa_numeric_tolerance(tmp_path, capsys):
    out = tmp_path / "k.json"
    assert run(["kappa", "--out", str(out)]) == 0
    assert run(["reproduce", "--manifest", str(tmp_path / "k.json.manifest.json")]) == 0


def test_double_run_byte_identical(tmp_path):
    paths = []
    for tag in ("x", "y"):
        out = tmp_path / f"{tag}.csv"
        assert run(["variance", "exact", "--law", "lazy2d", "--n-max", "5",
                    "--out", str(out)]) == 0
        paths.append(out)
    assert paths[0].read_bytes() == paths[1].read_bytes()
