import json
import os
import subprocess
import sys

import pytest

from nlslab.cli import main, parse_norm_spec
from nlslab.config import (ConfigError, DEFAULTS, apply_override, canonical_json, config_hash,
                           load_config, parse_value)
from nlslab.grid import SpectralField


@pytest.mark.parametrize("text,value", [("3", 3), ("2.5", 2.5), ("true", True), ("[1, 2]", [1, 2]),
                                        ('"x"', "x"), ("flat_band", "flat_band")])
def test_parse_value(text, value):
    assert parse_value(text) == value


def test_load_config_layers(tmp_path):
    f = tmp_path / "run.toml"
    f.write_text('seed = 5\n[grid]\nN = 2048\n[data]\nfamily = "flat_band"\nband = [0.0, 1.0]\n')
    cfg = load_config(f, [("grid.m", 16), ("data.band", [1.0, 2.0])])
    assert cfg["seed"] == 5 and cfg["grid"] == {"N": 2048, "m": 16}
    assert cfg["data"]["band"] == [1.0, 2.0]
    assert cfg["time"] == DEFAULTS["time"]


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("grid = [")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")
    cfg = load_config()
    with pytest.raises(ConfigError):
        apply_override(cfg, "seed.x", 1)
    with pytest.raises(ConfigError):
        apply_override(cfg, "grid..N", 1)


def test_config_hash_ignores_output_dir():
    a = load_config(overrides=[("output.dir", "a")])
    b = load_config(overrides=[("output.dir", "b")])
    c = load_config(overrides=[("seed", 1)])
    assert config_hash(a) == config_hash(b) != config_hash(c)
    assert "dir" not in json.loads(canonical_json(a))["output"]


@pytest.mark.parametrize("text,kind", [("lebesgue:p=4", "lebesgue"), ("modulation:p=2", "modulation"),
                                       ("sobolev:s=-0.5,homogeneous=true", "sobolev"),
                                       ("fourier_lebesgue:r=inf", "fourier_lebesgue")])
def test_parse_norm_spec(text, kind):
    assert parse_norm_spec(text).kind == kind


@pytest.mark.parametrize("text", ["nope:p=2", "lebesgue:p", "modulation:p=inf", "lebesgue:z=1"])
def test_parse_norm_spec_errors(text):
    with pytest.raises(ConfigError):
        parse_norm_spec(text)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_norms_flat_band(tmp_path, capsys):
    code, out, _ = run(capsys, "norms", "--out", str(tmp_path), "--data.family", "flat_band",
                       "--data.band", "[0.0, 1.0]", "--norms.specs", '["modulation:p=4"]')
    assert code == 0
    assert json.loads(out)["norms"]["modulation:p=4"] == pytest.approx(1.0, rel=1e-12)
    saved = json.loads((tmp_path / "norms.json").read_text())
    assert saved["norms"]["modulation:p=4"] == pytest.approx(1.0, rel=1e-12)
    assert saved["config_hash"] == config_hash(saved["config"] | {"output": {}})


def test_evolve_zero_data(tmp_path, capsys):
    code, out, _ = run(capsys, "evolve", "--out", str(tmp_path), "--data.family=zero",
                       "--time.T", "0.1", "--time.M", "10")
    assert code == 0
    assert json.loads(out)["final_l2"] == 0
    final = SpectralField.from_json((tmp_path / "final_state.json").read_text())
    assert not final.coeffs.any()


def test_every_output_embeds_hash(tmp_path, capsys):
    run(capsys, "evolve", "--out", str(tmp_path), "--time.T", "0.1", "--time.M", "10")
    h = config_hash(load_config(overrides=[("command", "evolve"), ("time.T", 0.1), ("time.M", 10)]))
    files = sorted(os.listdir(tmp_path))
    assert files
    for name in files:
        assert h in (tmp_path / name).read_text(), name


@pytest.mark.parametrize("argv,key", [
    (["norms", "--grid.N", "1000"], "grid"),
    (["verify-strichartz", "--estimate.p", "4", "--estimate.q", "4"], "estimate.p"),
    (["evolve", "--time.M", "10"], "time"),
    (["norms", "--data.family", "bogus"], "data.family"),
    (["norms", "stray"], "stray"),
    (["picard", "--estimate.unknown", "1"], "estimate"),
    (["norms", "--norms.specs", '["sobolev:s=-0.5,homogeneous=true"]'], "norms.specs"),
])
def test_config_errors_exit_2(tmp_path, capsys, argv, key):
    code, _, err = run(capsys, *argv, "--out", str(tmp_path))
    assert code == 2
    diag = json.loads(err)
    assert diag["error"] == "config" and diag["key"].startswith(key) and diag["precondition"]


def test_failing_criterion_exits_1(tmp_path, capsys):
    code, out, _ = run(capsys, "verify-scaling", "--out", str(tmp_path))
    assert code == 1 and "[FAIL]" in out


def test_passing_report_exits_0(tmp_path, capsys):
    code, out, _ = run(capsys, "verify-embeddings", "--out", str(tmp_path),
                       "--estimate.n_samples", "5")
    assert code == 0 and "[PASS]" in out
    stems = {os.path.splitext(f)[1] for f in os.listdir(tmp_path)}
    assert stems == {".json", ".csv", ".dat"}


def test_repeated_runs_byte_identical(tmp_path, capsys):
    outs = []
    for name in ("a", "b"):
        d = tmp_path / name
        run(capsys, "vpnorm", "--out", str(d), "--estimate.source", "random", "--seed", "7")
        run(capsys, "verify-restriction", "--out", str(d), "--estimate.I_sweep", "[4, 8]",
            "--estimate.n_seeds", "2", "--estimate.K", "20")
        outs.append({f: (d / f).read_bytes() for f in sorted(os.listdir(d))})
    assert outs[0] == outs[1] and len(outs[0]) >= 4


def test_acceptance_subset(tmp_path, capsys):
    code, out, _ = run(capsys, "acceptance", "--out", str(tmp_path), "--estimate.only", "[1, 8]")
    assert code == 0
    assert "[PASS]  1" in out and "[PASS]  8" in out


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "nlslab", "norms", "--out", str(tmp_path),
                           "--grid.N", "256"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "norms" in json.loads(proc.stdout)
