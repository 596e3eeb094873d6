import json
import subprocess
import sys

import pytest

from mellingamma.cli import run
from mellingamma.config import ConfigError, parse_config


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


KEY_PROP = """
root_datum = {preset = "GL", rank = 2}
lambdas = [[1, 0], [0, 1]]
c = "1"
xi = ["1/2", "1/2"]
"""


def _report(tmp_path, argv):
    out = tmp_path / "report.json"
    code = run(argv + ["--json", str(out)])
    return code, json.loads(out.read_text())


def test_check_key_prop(tmp_path):
    cfg = _write(tmp_path, "kp.toml", KEY_PROP)
    code, rep = _report(tmp_path, ["check", "key-prop", "--config", cfg])
    assert code == 0 and rep["passed"] is True
    assert rep["schema"] == "mgk/1"
    assert rep["input"]["xi"] == ["1/2", "1/2"]


def test_plain_subcommand_equals_alias(tmp_path):
    cfg = _write(tmp_path, "kp.toml", KEY_PROP)
    _, a = _report(tmp_path, ["key-prop", "--config", cfg])
    _, b = _report(tmp_path, ["check", "key-prop", "--config", cfg])
    a.pop("timing"), b.pop("timing")
    assert a == b


def test_coinvariants_gl3(tmp_path):
    cfg = _write(tmp_path, "c.toml", 'root_datum = {preset = "GL", rank = 3}\nxi = ["0", "0", "0"]\n')
    code, rep = _report(tmp_path, ["coinvariants", "--config", cfg])
    assert code == 0 and rep["reports"][0]["details"]["dim"] == 6


def test_json_config_accepted(tmp_path):
    cfg = _write(tmp_path, "c.json", json.dumps({"root_datum": {"preset": "B", "rank": 2}}))
    code, rep = _report(tmp_path, ["coinvariants", "--config", cfg])
    assert code == 0 and rep["reports"][0]["details"]["dim"] == 8


@pytest.mark.parametrize(
    "text",
    [
        'c = "1/0"\n',
        "unknown = 1\n",
        '[options]\nwindow = "big"\n',
        '[options]\nmystery = 1\n',
        'xi = ["1/2"]\n',
        'root_datum = {preset = "GL", rank = 2, color = "red"}\n',
        "this is not toml\n",
        'lambdas = [[1, 0]]\n',
        'c = "0"\n',
    ],
)
def test_input_errors_exit_2(tmp_path, text, capsys):
    cfg = _write(tmp_path, "bad.toml", text)
    assert run(["key-prop", "--config", cfg]) == 2
    assert "input error" in capsys.readouterr().err


def test_bad_flag_values_exit_2(capsys):
    assert run(["multiplier", "--c", "1/0"]) == 2
    assert run(["key-prop", "--c", "0.5"]) == 2
    assert run(["key-prop", "--config", "/nonexistent/x.toml"]) == 2


def test_error_location_is_reported(tmp_path):
    cfg = _write(tmp_path, "bad.toml", 'xi = ["0", "1/0"]\n')
    with pytest.raises(ConfigError, match=r"xi\[1\]"):
        from mellingamma.config import load_config

        load_config(cfg)


def test_check_failure_exits_1(tmp_path):
    cfg = _write(tmp_path, "d.toml", "lambdas = [[1, 0], [1, 0], [0, 1], [0, 1]]\n")
    code, rep = _report(tmp_path, ["key-prop", "--config", cfg, "--convention", "signed"])
    assert code == 1
    assert rep["reports"][0]["details"]["eta_independent"] is False


def test_cap_exceeded_exits_2(tmp_path):
    cfg = _write(tmp_path, "e6.toml", 'root_datum = {preset = "E", rank = 6}\n')
    assert run(["suite", "--config", cfg]) == 2
    assert run(["coinvariants", "--cap", "4", "--config", _write(tmp_path, "b.toml", 'root_datum = {preset = "B", rank = 2}\n')]) == 2


@pytest.mark.parametrize("sub", ["unipotent", "e-theta", "multiplier", "wprime", "tor-demo"])
def test_other_subcommands_pass(tmp_path, sub):
    code, rep = _report(tmp_path, [sub])
    assert code == 0 and rep["command"] == sub


def test_multiplier_schema(tmp_path):
    code, rep = _report(tmp_path, ["multiplier", "--c=-1/3", "--window", "10"])
    details = rep["reports"][0]["details"]
    assert set(details) == {"factors", "product", "stabilized"}
    assert details["product"] == 1 and rep["input"]["c"] == "-1/3"


def test_tor_demo_module_json(tmp_path):
    _, rep = _report(tmp_path, ["tor-demo"])
    k = rep["reports"][0]["details"]["kummer"]
    assert set(k) == {"coset_rep", "dim", "nu"} and k["coset_rep"] == ["0", "0"]


def test_determinism(tmp_path):
    cfg = _write(tmp_path, "kp.toml", KEY_PROP)
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    run(["key-prop", "--config", cfg, "--json", str(a)])
    run(["key-prop", "--config", cfg, "--json", str(b)])
    strip = lambda p: [l for l in p.read_text().splitlines() if '"seconds"' not in l]
    assert strip(a) == strip(b)


def test_smoke_suite_parallel_matches_serial(tmp_path):
    code1, serial = _report(tmp_path, ["suite", "--profile", "smoke"])
    code2, parallel = _report(tmp_path, ["suite", "--profile", "smoke", "--jobs", "2"])
    assert code1 == code2 == 0
    serial.pop("timing"), parallel.pop("timing")
    assert serial == parallel
    ids = [r["id"] for r in serial["reports"]]
    assert ids == sorted(ids)


def test_suite_signed_reports_eta_dependence(tmp_path):
    code, rep = _report(tmp_path, ["suite", "--profile", "smoke", "--convention", "signed"])
    assert code == 1
    double = [r for r in rep["reports"] if r["id"] == "ac8/gl2/double/xi=0,0/c=1"][0]
    assert double["details"]["signed"]["eta_independent"] is False
    assert double["passed"]


def test_parse_config_defaults():
    cfg = parse_config({})
    assert cfg.convention == "unsigned" and cfg.window == 24 and cfg.c == 1


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "mellingamma", "wprime"], capture_output=True, text=True)
    assert out.returncode == 0 and "PASS" in out.stdout


def test_no_command_is_input_error():
    assert run([]) == 2
