import csv
import io
import json
import subprocess
import sys

import pytest

from rank1.cli import ConfigError, Grid, parse, render, run


def _rows(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_grid_values():
    assert Grid.parse("1:3:0.5").values() == [1.0, 1.5, 2.0, 2.5, 3.0]
    assert Grid.parse("0.7").values() == [0.7]


@pytest.mark.parametrize("text", ["1:2", "a:b:c", "3:1:1", "0:1:0"])
def test_grid_rejects(text):
    with pytest.raises(ConfigError):
        Grid.parse(text)


def test_parse_collects_options():
    cfg = parse(["kernel", "bgr", "--family", "q", "--m", "2", "--gamma", "1.5", "--format", "csv"])
    assert (cfg.command, cfg.target, cfg.fmt) == ("kernel", "bgr", "csv")
    assert cfg.options["m"] == 2 and cfg.options["gamma"] == 1.5


def test_config_file_and_command_line_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# comment\nfamily = q\nm = 1\ngamma = 2.5\n")
    cfg = parse(["kernel", "bgr", "--config", str(conf), "--gamma", "1.5"])
    assert cfg.options["family"] == "q"
    assert cfg.options["m"] == 1
    assert cfg.options["gamma"] == 1.5


def test_bad_config_line(tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text("family q\n")
    with pytest.raises(ConfigError):
        parse(["spaces", "info", "--config", str(conf)])
    assert run(["spaces", "info", "--config", str(tmp_path / "missing.conf")]) == 2


def test_spaces_info(capsys):
    code, rows = _rows(capsys, ["spaces", "info", "--family", "q", "--m", "2"])
    assert code == 0
    assert rows[0]["N"] == 8 and rows[0]["Q"] == 10


def test_render_csv_has_header_and_blank_nulls():
    text = render([{"check": "x", "pass": True, "value": 0.5, "reference": None}], "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows == [["check", "pass", "value", "reference"], ["x", "true", "0.5", ""]]


def test_render_json_handles_nonfinite():
    out = json.loads(render([{"value": float("inf")}], "json"))
    assert out == [{"value": "inf"}]


def test_kernel_grid_rows(capsys):
    code, rows = _rows(capsys, ["kernel", "bgr", "--family", "q", "--m", "1", "--gamma", "1.5", "--rho", "0.5:1.5:0.5"])
    assert code == 0
    assert [r["rho"] for r in rows] == [0.5, 1.0, 1.5]
    vals = [r["value"] for r in rows]
    assert vals == sorted(vals, reverse=True)
    assert all(r["rel_err"] is None for r in rows)


def test_failing_check_exits_one(capsys):
    code, rows = _rows(capsys, ["verify", "hypertrig", "--beta", "2.5", "--rho", "1", "--tolerance", "0"])
    assert code == 1 and rows[0]["pass"] is False


def test_usage_errors_exit_two(capsys):
    assert run(["nonsense", "x"]) == 2
    assert run(["kernel", "nosuch", "--family", "q", "--m", "1", "--rho", "1"]) == 2
    assert run(["kernel", "bgr", "--family", "q", "--m", "1", "--rho", "1"]) == 2
    assert run(["kernel", "bgr", "--family", "q", "--m", "1", "--gamma", "1.5", "--rho", "1:0:1"]) == 2
    capsys.readouterr()


def test_factorization_and_mutation(capsys):
    code, rows = _rows(capsys, ["verify", "factorization", "--model", "damek-ricci", "--k", "2"])
    assert code == 0 and all(r["pass"] for r in rows)


def test_output_file_is_deterministic(tmp_path):
    argv = ["verify", "funk-hecke", "--case", "quaternionic", "--n", "1", "--alpha", "1.5", "--r", "0.6",
            "--samples", "20000", "--seed", "7", "--format", "csv"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(argv + ["--output", str(a)]) in (0, 1)
    assert run(argv + ["--output", str(b)]) in (0, 1)
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rank1.cli", "spaces", "info", "--family", "ca", "--m", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)[0]["Q"] == 22


@pytest.mark.parametrize("model", ["conjugation", "square", "product", "weighted-laplacian", "geller", "commutators", "ball"])
def test_factorization_models(capsys, model):
    code, rows = _rows(capsys, ["verify", "factorization", "--model", model, "--k", "2", "--m", "1", "--degree", "2"])
    assert code == 0 and all(r["residual"] == "0" for r in rows)


def test_mutation_makes_the_check_pass_only_when_caught(capsys):
    code, rows = _rows(capsys, ["verify", "factorization", "--model", "ball", "--k", "1", "--m", "1", "--mutation", "constant"])
    assert code == 0 and rows[0]["residual"] != "0"
