import json
import subprocess
import sys

import pytest

from alpha12.cli import ConfigError, RunConfig, execute, main, parse_config, serialize_config


def test_minimal_config_is_defaulted():
    cfg = parse_config("command=keylemma\ntype=B2")
    assert (cfg.samples, cfg.seed, cfg.format) == (100000, 0, "json")
    assert cfg.strategy == "random"


def test_missing_command_is_named():
    with pytest.raises(ConfigError, match="command"):
        parse_config("type=B2")


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError, match="line 3.*colour"):
        parse_config("command=keylemma\n# comment\ncolour=red\n")


def test_syntax_error_reports_line():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("command=tensors\nnot a pair\n")


@pytest.mark.parametrize("text", [
    "command=unknown",
    "command=keylemma\ntype=Z9",
    "command=tensors\nfamily=phi:(",
    "command=scurvature\nalgebra=so5",
    "command=tensors\ndims=1,3",
    "command=tensors\nsamples=many",
    "command=keylemma\ntype=B2\nstrategy=clever",
])
def test_invalid_values(text):
    with pytest.raises(ConfigError):
        parse_config(text)


@pytest.mark.parametrize("text", [
    "command=keylemma\ntype=E8\nseed=4",
    "command=vanishing\ndatum=perturbed\ntol=1e-7\nformat=csv",
    "command=tensors\ndims=5,3\nfamily=mroot:3",
])
def test_round_trip_fixpoint(text):
    cfg = parse_config(text)
    again = parse_config(serialize_config(cfg))
    assert again == cfg
    assert serialize_config(again) == serialize_config(cfg)


def test_comments_and_whitespace():
    cfg = parse_config("  command = validate-norm   # trailing\n\nfamily = phi:1\n")
    assert cfg.command == "validate-norm" and cfg.family == "phi:1"


def _run(tmp_path, name, *args):
    out = tmp_path / name
    status = main([*args, "--out", str(out)])
    return status, out.read_bytes()


def test_keylemma_example(tmp_path):
    status, raw = _run(tmp_path, "a.json", "keylemma", "type=B2", "strategy=exhaustive-directions")
    rep = json.loads(raw)
    assert status == 0 and rep["min_count"] == 4 and rep["pass"] is True
    assert rep["spec_version"] == "1.0" and rep["command"] == "keylemma"


def test_vanishing_example(tmp_path):
    status, raw = _run(tmp_path, "b.json", "vanishing", "algebra=su3", "datum=cartan", "family=mroot:2")
    assert status == 0 and json.loads(raw)["holds"] is True


def test_validate_norm_example(tmp_path):
    status, raw = _run(tmp_path, "c.json", "validate-norm", "family=phi:1-0.9*s^2")
    rep = json.loads(raw)
    assert status == 1 and rep["valid"] is False
    assert rep["min_margin"] == pytest.approx(-0.8, abs=1e-12)


def test_flags_override_config_file(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("command=keylemma\ntype=B2\nseed=3\nsamples=50\n")
    status, raw = _run(tmp_path, "d.json", "--config", str(conf), "--seed", "9")
    rep = json.loads(raw)
    assert status == 0 and rep["seed"] == 9 and rep["samples"] == 50


def test_positional_overrides_file_and_flag_overrides_positional(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("command=keylemma\ntype=B2\nsamples=50\n")
    _, raw = _run(tmp_path, "e.json", "--config", str(conf), "samples=60")
    assert json.loads(raw)["samples"] == 60
    _, raw = _run(tmp_path, "f.json", "--config", str(conf), "samples=60", "--samples", "70")
    assert json.loads(raw)["samples"] == 70


def test_csv_output(tmp_path):
    status, raw = _run(tmp_path, "g.csv", "keylemma", "type=G2", "--samples", "500", "--format", "csv")
    lines = raw.decode().splitlines()
    assert status == 0 and lines[0] == "key,value"
    assert "min_count,8" in lines


def test_failing_check_exits_one(tmp_path):
    status, raw = _run(tmp_path, "h.json", "vanishing", "datum=perturbed", "--samples", "20")
    rep = json.loads(raw)
    # the criterion fails, but agreement with sampling keeps the run consistent
    assert rep["holds"] is False and rep["consistent"] is True and status == 0
    status, _ = _run(tmp_path, "i.json", "validate-norm", "family=mroot:2")
    assert status == 0


def test_usage_errors_exit_two(capsys):
    assert main(["frobnicate"]) == 2
    assert main(["keylemma"]) == 2
    assert main(["keylemma", "type=B2", "colour=red"]) == 2
    assert main(["--config", "/nonexistent/file"]) == 2
    assert "error" in capsys.readouterr().err


def test_kvfcl_command(tmp_path):
    status, raw = _run(tmp_path, "k.json", "kvfcl", "right=0,0,0,0,0,0,0.3,0.7", "--samples", "50")
    rep = json.loads(raw)
    assert status == 0 and rep["class"] == "class-2"


def test_stdout_default(capsys):
    status, _ = execute(RunConfig(command="keylemma", type="A2", samples=100))
    assert status == 0
    assert json.loads(capsys.readouterr().out)["min_count"] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "alpha12", "keylemma", "type=B2", "--samples", "10"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["type"] == "B2"
