import json
from pathlib import Path

import pytest

from lamtrack.cli import main

# short prefix and window keep the tests fast; the divergence factor is
# lowered to match what a five-row window can certify
BASE_CONFIG = {
    "epsilon": "1/5",
    "sequence": {"kind": "geometric", "base": 6, "length": 30},
    "weights": {"even": "0.5", "odd": "0.5"},
    "tolerances": {"measure": "1e-6", "ratio": "1e-4", "divergence_factor": 1.25},
    "max_index": 6,
}


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(BASE_CONFIG))
    return path


def write_config(tmp_path, name, **overrides):
    data = dict(BASE_CONFIG)
    data.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def read_tree(directory: Path) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


def test_validate_pass(config_path, tmp_path, capsys):
    out = tmp_path / "v"
    assert main(["validate", "--config", str(config_path), "--out", str(out)]) == 0
    payload = json.loads((out / "validate.json").read_text())
    assert payload["sequence_ok"]
    assert payload["growth"]["interleaving_onset"] == 1
    assert "PASS" in capsys.readouterr().out


def test_validate_rejects_bad_sequence(tmp_path):
    cfg = write_config(tmp_path, "bad.json", sequence={"kind": "explicit", "r": [2, 3, 4, 5, 6, 7, 8, 9]})
    out = tmp_path / "v"
    assert main(["validate", "--config", str(cfg), "--out", str(out)]) == 1
    payload = json.loads((out / "validate.json").read_text())
    assert not payload["sequence_ok"]
    assert any("growth violated" in v for v in payload["violations"])


def test_validate_rejects_zero_weights(tmp_path):
    cfg = write_config(tmp_path, "w.json", weights={"even": "0", "odd": "0"})
    assert main(["validate", "--config", str(cfg), "--out", str(tmp_path / "v")]) == 1


def test_malformed_config_is_usage_error(tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    assert main(["validate", "--config", str(bad), "--out", str(tmp_path / "v")]) == 2
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"epsilon": "1/5"}))
    assert main(["validate", "--config", str(missing), "--out", str(tmp_path / "v")]) == 2


def test_curves_parallel_scan_identical(tmp_path):
    cfg_seq = write_config(tmp_path, "seq.json", parallel_scan=False)
    cfg_par = write_config(tmp_path, "par.json", parallel_scan=True)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["curves", "--config", str(cfg_seq), "--out", str(out_a)]) == 0
    assert main(["curves", "--config", str(cfg_par), "--out", str(out_b)]) == 0
    assert (out_a / "curves.csv").read_bytes() == (out_b / "curves.csv").read_bytes()


def test_intersections_outputs(config_path, tmp_path):
    out = tmp_path / "i"
    assert main(["intersections", "--config", str(config_path), "--out", str(out),
                 "--j", "0", "--k", "8"]) == 0
    payload = json.loads((out / "intersections.json").read_text())
    assert payload["value"] == "163918078"
    assert payload["ratio"].count("/") == 1
    header = (out / "comparability.csv").read_text().splitlines()[0]
    assert header == "k,ratio,ratio_float"


def test_timeline_header_and_verdict(config_path, tmp_path):
    out = tmp_path / "t"
    assert main(["timeline", "--config", str(config_path), "--out", str(out)]) == 0
    lines = (out / "timeline.csv").read_text().splitlines()
    assert lines[0] == "i,a,b,a_lo,a_hi,b_lo,b_hi"
    assert len(lines) == 1 + 5  # i = 2..6
    payload = json.loads((out / "timeline.json").read_text())
    assert payload["chain_holds"] and payload["all_ok"]
    assert (out / "timeline.png").stat().st_size > 0


def test_probe_outputs_and_roundtrip(config_path, tmp_path):
    out = tmp_path / "p"
    assert main(["probe", "--config", str(config_path), "--out", str(out)]) == 0
    lines = (out / "probe_trace.csv").read_text().splitlines()
    assert lines[0] == "i,t,ratio,target,diagnostic"
    payload = json.loads((out / "probe_summary.json").read_text())
    assert payload["converged"] is True
    assert payload["curves"] == [2, 4]
    json.dumps(payload)  # round-trips


def test_limits_outputs(config_path, tmp_path):
    out = tmp_path / "l"
    assert main(["limits", "--config", str(config_path), "--out", str(out)]) == 0
    payload = json.loads((out / "limits.json").read_text())
    for parity in ("even", "odd"):
        assert all(s.count("/") == 1 for s in payload[parity]["entries"])
    assert (out / "singularity.csv").exists()
    assert (out / "singularity.png").stat().st_size > 0


def test_full_determinism(config_path, tmp_path):
    for command in (["timeline"], ["probe"], ["limits"]):
        out1 = tmp_path / f"{command[0]}_1"
        out2 = tmp_path / f"{command[0]}_2"
        assert main([*command, "--config", str(config_path), "--out", str(out1)]) == 0
        assert main([*command, "--config", str(config_path), "--out", str(out2)]) == 0
        assert read_tree(out1) == read_tree(out2)


def test_max_index_override(config_path, tmp_path):
    out = tmp_path / "m"
    assert main(["timeline", "--config", str(config_path), "--out", str(out),
                 "--max-index", "5"]) == 0
    lines = (out / "timeline.csv").read_text().splitlines()
    assert len(lines) == 1 + 4  # i = 2..5


def test_explicit_sequence_config(tmp_path):
    cfg = write_config(
        tmp_path, "explicit.json",
        sequence={"kind": "explicit", "r": [6**i for i in range(1, 31)]},
    )
    out = tmp_path / "e"
    assert main(["validate", "--config", str(cfg), "--out", str(out)]) == 0
    assert main(["intersections", "--config", str(cfg), "--out", str(out),
                 "--j", "1", "--k", "9"]) == 0
    payload = json.loads((out / "intersections.json").read_text())
    assert payload["ratio_min"] != payload["ratio_max"]
