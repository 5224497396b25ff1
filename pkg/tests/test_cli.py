import csv
import json

import pytest

from hcim import costmodel as cm
from hcim.cli import EXIT_CONFIG, EXIT_INVARIANT, EXIT_MISMATCH, EXIT_OK, main
from hcim.dcim import inject_fault


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def test_selftest_passes_and_is_repeatable(capsys):
    assert main(["selftest"]) == EXIT_OK
    first = capsys.readouterr().out
    assert main(["selftest"]) == EXIT_OK
    assert capsys.readouterr().out == first
    assert "8192 cases" in first


def test_selftest_fault_names_gate(capsys):
    assert main(["selftest", "--inject-fault", "full_sub_bit"]) == EXIT_MISMATCH
    out = capsys.readouterr().out
    assert "FAIL gate truth tables" in out and "full_sub_bit" in out


def test_verify_modes(tmp_path, capsys):
    rc = main(["verify", "--out", str(tmp_path), "--mode", "hcim_ternary", "--mode", "hcim_binary"])
    assert rc == EXIT_OK
    rows = read_csv(tmp_path / "verify_sparsity.csv")
    binary = [r for r in rows if r["mode"] == "hcim_binary"]
    assert binary and all(float(r["sparsity"]) == 0.0 for r in binary)
    assert all(0.0 < float(r["sparsity"]) <= 0.5 for r in rows if r["mode"] == "hcim_ternary")
    assert (tmp_path / "manifest.json").exists()


def test_verify_mismatch_exit_code(tmp_path, capsys):
    with inject_fault("full_sub_bit"):
        rc = main(["verify", "--out", str(tmp_path), "--mode", "hcim_ternary"])
    assert rc == EXIT_MISMATCH
    assert "column=" in capsys.readouterr().out


def test_verify_bundled_workload_layerwise(tmp_path):
    assert main(["verify", "--out", str(tmp_path), "--workload", "vgg9", "--crossbar", "64x64"]) == EXIT_OK
    layers = {r["layer"] for r in read_csv(tmp_path / "verify_sparsity.csv")}
    assert {"conv1", "fc3"} <= layers


def test_corrupted_workload_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "schema": "hcim-workload/1",\n  "layers": [,]\n}')
    assert main(["estimate", "--workload", str(bad), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "line 3" in capsys.readouterr().err
    assert main(["verify", "--workload", str(bad), "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_estimate_outputs(tmp_path):
    rc = main(["estimate", "--out", str(tmp_path), "--check-totals", "--figures"])
    assert rc == EXIT_OK
    rows = {r["mode"]: r for r in read_csv(tmp_path / "comparison.csv")}
    assert set(rows) == {"hcim_ternary", "hcim_binary", "adc7", "adc4"}
    assert float(rows["hcim_ternary"]["norm_energy"]) == 1.0
    hcim = max(float(rows[m]["energy_pj"]) for m in ("hcim_ternary", "hcim_binary"))
    assert all(float(rows[m]["energy_pj"]) > hcim for m in ("adc7", "adc4"))
    assert float(rows["hcim_ternary"]["energy_pj"]) <= 0.85 * float(rows["hcim_binary"]["energy_pj"])
    assert float(rows["adc4"]["latency_ns"]) < float(rows["hcim_ternary"]["latency_ns"])
    for mode in rows:
        text = (tmp_path / f"estimate_resnet20_{mode}.csv").read_text()
        assert text.splitlines()[0] == ",".join(cm.CSV_COLUMNS)
        assert cm.verify_report_csv(text) == []
    assert (tmp_path / "comparison.png").stat().st_size > 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    listed = {o["file"] for o in manifest["outputs"]}
    assert "comparison.csv" in listed and "comparison.png" in listed
    assert len(manifest["config_sha256"]) == 64


def test_estimate_without_figures_writes_no_png(tmp_path):
    assert main(["estimate", "--out", str(tmp_path), "--mode", "hcim_ternary"]) == EXIT_OK
    assert not list(tmp_path.glob("*.png"))


def test_estimate_measured_sparsity(tmp_path):
    rc = main(["estimate", "--out", str(tmp_path), "--workload", "vgg9", "--sparsity", "measured",
               "--mode", "hcim_ternary", "--mode", "hcim_binary"])
    assert rc == EXIT_OK
    rows = {r["mode"]: r for r in read_csv(tmp_path / "comparison.csv")}
    assert 0.0 < float(rows["hcim_ternary"]["sparsity"]) <= 0.5
    assert float(rows["hcim_binary"]["sparsity"]) == 0.0


def test_config_errors(tmp_path, capsys):
    out = ["--out", str(tmp_path)]
    assert main(["estimate", "--mode", "adc5", *out]) == EXIT_CONFIG
    assert "adc_bits=5" in capsys.readouterr().err
    assert main(["estimate", "--sparsity", "1.5", *out]) == EXIT_CONFIG
    assert main(["estimate", "--workload", "nope.json", *out]) == EXIT_CONFIG
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"schema": "hcim-config/1", "modes": []}))
    assert main(["estimate", "--config", str(cfg), *out]) == EXIT_CONFIG


def test_missing_cost_entry(tmp_path, capsys):
    table = cm.default_cost_table().to_dict()
    table["entries"] = [e for e in table["entries"] if e["name"] != "ps_move"]
    (tmp_path / "cost.json").write_text(json.dumps(table))
    (tmp_path / "hcim.json").write_text(json.dumps(
        {"schema": "hcim-config/1", "hardware": {"cost_table": "cost.json"}}
    ))
    assert main(["estimate", "--config", str(tmp_path / "hcim.json"), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "ps_move" in capsys.readouterr().err


def test_zero_reference_is_invariant_violation(tmp_path):
    table = cm.default_cost_table().to_dict()
    for e in table["entries"]:
        e["energy_pj"] = 0.0
    table["dcim_energy"] = {"e_read_pj": 0, "e_compute_pj": 0, "e_store_pj": 0, "nongateable_fraction": 0.5}
    (tmp_path / "cost.json").write_text(json.dumps(table))
    (tmp_path / "hcim.json").write_text(json.dumps(
        {"schema": "hcim-config/1", "hardware": {"cost_table": "cost.json"}}
    ))
    assert main(["estimate", "--config", str(tmp_path / "hcim.json"), "--out", str(tmp_path / "o")]) == EXIT_INVARIANT


def test_config_file_from_env_and_flag_override(tmp_path, monkeypatch):
    (tmp_path / "hcim.json").write_text(json.dumps({
        "schema": "hcim-config/1",
        "profile": "imagenet",
        "hardware": {"config": "B"},
        "workloads": ["vgg9"],
        "modes": ["hcim_ternary", "adc6"],
        "sparsity": 0.25,
        "seed": 3,
    }))
    monkeypatch.setenv("HCIM_CONFIG_DIR", str(tmp_path))
    out = tmp_path / "o"
    assert main(["estimate", "--out", str(out), "--sparsity", "0.5"]) == EXIT_OK
    manifest = json.loads((out / "manifest.json").read_text())
    cfg = manifest["config"]
    assert cfg["hardware"]["config"] == "B" and cfg["hardware"]["crossbar_rows"] == 64
    assert cfg["scheme"]["ps_bits"] == 16 and cfg["sparsity"] == 0.5 and manifest["seed"] == 3
    assert {r["mode"] for r in read_csv(out / "comparison.csv")} == {"hcim_ternary", "adc6"}


def test_sweep_sparsity(tmp_path):
    assert main(["sweep", "--axis", "sparsity", "--points", "0,0.25,0.5", "--out", str(tmp_path), "--figures"]) == 0
    rows = read_csv(tmp_path / "sweep_sparsity.csv")
    red = [float(r["dcim_reduction"]) for r in rows]
    assert red == pytest.approx([0.0, 0.12, 0.24], abs=0.01)
    assert len({r["latency_ns"] for r in rows}) == 1
    assert (tmp_path / "sweep_sparsity.png").exists()


def test_sweep_crossbar_and_adc(tmp_path):
    assert main(["sweep", "--axis", "crossbar_size", "--workload", "resnet20", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "sweep_crossbar_size.csv")
    moved = {int(r["crossbar_size"]): int(r["movement_events"]) for r in rows}
    assert moved[64] >= moved[128]
    assert main(["sweep", "--axis", "adc_bits", "--points", "4,6,7", "--out", str(tmp_path)]) == 0
    err = [float(r["adc_rms_error"]) for r in read_csv(tmp_path / "sweep_adc_bits.csv")]
    assert err == sorted(err, reverse=True)


def test_sweep_empty_axis(tmp_path, capsys):
    assert main(["sweep", "--axis", "sparsity", "--points", "", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "no points" in capsys.readouterr().err


def test_csv_quoting(tmp_path):
    doc = {"schema": "hcim-workload/1", "name": "q", "layers": [
        {"name": 'fc "a", b', "kind": "fc", "in_channels": 32, "out_channels": 8},
    ]}
    (tmp_path / "q.json").write_text(json.dumps(doc))
    assert main(["estimate", "--workload", str(tmp_path / "q.json"), "--out", str(tmp_path), "--mode", "hcim_ternary"]) == 0
    rows = read_csv(tmp_path / "estimate_q_hcim_ternary.csv")
    assert rows[0]["layer"] == 'fc "a", b'
