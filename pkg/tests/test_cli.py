import csv
import json

import pytest

from conekit import cli
from conekit.cli import DEFAULTS, load_config_file, main, make_config


def run(tmp_path, *args, name="out"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, (out.read_text() if out.exists() else None)


def csv_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def test_gram_example(tmp_path):
    code, text = run(tmp_path, "gram", "--d", "2", "--family", "solid-jacobi", "--mu", "0.5", "--beta", "0",
                     "--gamma", "0.5", "--max-degree", "6")
    assert code == 0
    data = json.loads(text)
    assert data["pass"] is True and data["max_offdiag"] <= 1e-10
    assert data["elements"] == 84


def test_kernel_compare_csv(tmp_path):
    code, text = run(tmp_path, "kernel-compare", "--d", "2", "--n", "8", "--routes", "sum,closed",
                     "--format", "csv")
    assert code == 0
    rows = csv_rows(text)
    assert len(rows) == DEFAULTS["pairs"]
    assert max(float(r["relerr_closed_form"]) for r in rows) <= 1e-8


def test_eigen_surface(tmp_path):
    code, text = run(tmp_path, "eigen", "--family", "surface-jacobi", "--beta", "-1", "--gamma", "0",
                     "--max-degree", "8")
    assert code == 0
    assert json.loads(text)["mode"] == "theorem"


def test_tables(tmp_path):
    code, text = run(tmp_path, "cesaro-table", "--format", "csv")
    assert code == 0
    assert csv_rows(text)[0].keys() == {"n", "delta", "value", "route_disagreement"}
    code, text = run(tmp_path, "lebesgue-table", "--format", "csv")
    assert code == 0
    assert csv_rows(text)[0].keys() == {"n", "delta", "value", "ratio_to_previous"}


def test_deterministic(tmp_path):
    args = ("kernel-compare", "--n", "5", "--routes", "sum,triangle,closed", "--seed", "3")
    _, a = run(tmp_path, *args, name="a.json")
    _, b = run(tmp_path, *args, name="b.json")
    assert a == b
    _, c = run(tmp_path, *args[:-1], "4", name="c.json")
    assert c != a


@pytest.mark.parametrize("args", [
    ["kernel-compare", "--routes", "sum,bogus"],
    ["project", "--f", "x1 + * t"],
    ["gram", "--mu", "-0.7"],
    ["kernel-compare", "--kind", "Kdelta"],
    ["gram", "--max-degree", "4", "--quad-order", "3"],
])
def test_configuration_errors(tmp_path, capsys, args):
    assert main([*args, "--out", str(tmp_path / "x")]) == 2
    assert "conekit:" in capsys.readouterr().err
    assert not (tmp_path / "x").exists()


def test_syntax_error_message(capsys):
    assert main(["project", "--f", "x1 + * t"]) == 2
    assert "column 6" in capsys.readouterr().err


def test_argparse_rejects_unknown_command():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_io_errors(tmp_path):
    assert main(["basis", "--max-degree", "1", "--out", str(tmp_path / "no" / "dir.json")]) == 3
    assert main(["basis", "--config", str(tmp_path / "missing.cfg")]) == 3


def test_failing_report_exit_code(tmp_path, monkeypatch):
    real = cli.HANDLERS["basis"]

    def failing(cfg):
        rep = real(cfg)
        rep.passed = False
        return rep

    monkeypatch.setitem(cli.HANDLERS, "basis", failing)
    assert main(["basis", "--max-degree", "1", "--out", str(tmp_path / "b.json")]) == 1
    assert json.loads((tmp_path / "b.json").read_text())["pass"] is False


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# demo\nmax-degree = 3\ngamma = 1.0  # inline\nseed = 11\n")
    assert load_config_file(str(cfg)) == {"max_degree": "3", "gamma": "1.0", "seed": "11"}
    code, text = run(tmp_path, "gram", "--config", str(cfg), "--seed", "12")
    assert code == 0
    data = json.loads(text)
    assert data["seed"] == 12
    assert data["params"]["gamma"] == 1.0
    assert data["params"]["mu"] == DEFAULTS["mu"]
    assert data["elements"] == 20

    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    assert main(["gram", "--config", str(bad)]) == 2
    bad.write_text("just words\n")
    assert main(["gram", "--config", str(bad)]) == 2


def test_surface_default_beta():
    cfg = make_config("eigen", {"family": "surface-jacobi"})
    assert cfg.params.beta == -1
    assert make_config("eigen", {"family": "surface-jacobi", "beta": 0.5}).params.beta == 0.5


def test_acceptance_subset(tmp_path, capsys):
    code, text = run(tmp_path, "acceptance", "--criteria", "6")
    assert code == 0
    assert json.loads(text)["pass"] is True
    assert "PASS" in capsys.readouterr().err
