import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from scaled_euler import cli
from scaled_euler.limit_analysis import SWEEP_COLUMNS

SYM = ["--ul", "1", "--rhol", "1", "--ur", "-1", "--rhor", "1"]


def run(argv):
    buf = io.StringIO()
    code = cli.run(argv, buf)
    return code, buf.getvalue()


def test_solve_two_shock():
    code, out = run(["solve", "--flux", "brio", *SYM, "--eps", "1e-4"])
    assert code == 0
    head = out.splitlines()[0]
    assert "case=TwoShock" in head and "u_star=" in head and "rho_star=" in head
    kinds = [r[0] for r in csv.reader(io.StringIO(out.split("\n\n")[0].split("\n", 1)[1]))][1:]
    assert kinds == ["constant", "shock", "constant", "shock", "constant"]


def test_solve_vacuum_reports_edges():
    code, out = run(["solve", "--ul", "-1", "--rhol", "1", "--ur", "1", "--rhor", "1", "--eps", "1e-4"])
    assert code == 0
    assert "case=TwoRarefactionVacuum" in out and "u_star1=" in out and "u_star2=" in out
    assert "vacuum" in out


def test_limit_json():
    code, out = run(["limit", *SYM])
    assert code == 0
    doc = json.loads(out)
    for k in ("c_slope", "u_left", "u_right", "rho_left", "rho_right", "weight_slope", "l", "u_on_line", "case"):
        assert k in doc
    assert doc["case"] == "TwoShock"
    assert doc["c_slope"] == pytest.approx(0.0, abs=1e-3)
    assert doc["weight_slope"] == pytest.approx(2.0, rel=1e-3)
    assert doc["l"] == pytest.approx(1.0, rel=1e-3)
    assert doc["closed_form"]["weight_slope"] == 2.0
    assert doc["extrapolation"]["u_star"]["converged"] is True


def test_limit_contact_and_vacuum():
    doc = json.loads(run(["limit", "--ul", "0", "--rhol", "2", "--ur", "0", "--rhor", "1"])[1])
    assert doc["case"] == "Contact" and doc["rho_left"] == 2.0
    doc = json.loads(run(["limit", "--ul", "-1", "--rhol", "1", "--ur", "1", "--rhor", "1"])[1])
    assert doc["case"] == "TwoRarefactionVacuum"


def test_negative_density_exit_1(capsys):
    code, _ = run(["solve", "--ul", "1", "--rhol", "-1", "--ur", "-1", "--rhor", "1"])
    assert code == 1
    assert "density must be >= 0" in capsys.readouterr().err


def test_bad_flag_value_exit_1():
    assert run(["solve", "--ul", "abc"])[0] == 1
    assert run(["no-such-command"])[0] == 1


def test_solver_error_exit_2(capsys):
    code, _ = run(["fv-compare", *SYM, "--eps", "0.05", "--x-min", "-0.3", "--x-max", "0.3",
                   "--n-cells", "64", "--t-end", "5"])
    assert code == 2
    assert "DomainOverflowError" in capsys.readouterr().err


def test_sweep_csv_and_determinism():
    code, a = run(["sweep", *SYM, "--eps-list", "1e-2,1e-3,1e-4"])
    assert code == 0
    _, b = run(["sweep", *SYM, "--eps-list", "1e-2,1e-3,1e-4"])
    assert a == b
    rows = list(csv.reader(io.StringIO(a)))
    assert tuple(rows[0]) == SWEEP_COLUMNS and len(rows) == 4


def test_eps_list_validation():
    assert run(["sweep", *SYM, "--eps-list", "1e-3,1e-2"])[0] == 1


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "scenario.cfg"
    cfg.write_text("# symmetric data\nul = 2\nrhol = 1\nur = 0\nrhor = 3\neps_list = 1e-2, 1e-3, 1e-4\n")
    _, from_cfg = run(["sweep", "--config", str(cfg)])
    _, direct = run(["sweep", "--ul", "2", "--rhol", "1", "--ur", "0", "--rhor", "3",
                     "--eps-list", "1e-2,1e-3,1e-4"])
    assert from_cfg == direct
    _, flag_wins = run(["sweep", "--config", str(cfg), "--ul", "1", "--rhol", "1", "--ur", "-1", "--rhor", "1"])
    _, sym = run(["sweep", *SYM, "--eps-list", "1e-2,1e-3,1e-4"])
    assert flag_wins == sym


def test_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("ul = 1\nwidth = 3\n")
    assert run(["solve", "--config", str(bad)])[0] == 1
    err = capsys.readouterr().err
    assert ":2:" in err and "width" in err
    bad.write_text("eps = small\n")
    assert run(["solve", "--config", str(bad)])[0] == 1
    assert "'eps'" in capsys.readouterr().err
    bad.write_text("just words\n")
    assert run(["solve", "--config", str(bad)])[0] == 1


def test_table_flux_matches_brio(tmp_path):
    rho = np.linspace(0.0, 40.0, 161)
    table = tmp_path / "f.csv"
    with open(table, "w") as fh:
        fh.write("rho,f,fprime\n")
        for r in rho.tolist():
            fh.write(f"{r!r},{0.5 * r * r!r},{r!r}\n")
    _, a = run(["solve", "--flux", "table", "--flux-table", str(table), *SYM, "--eps", "1e-2"])
    _, b = run(["solve", "--flux", "brio", *SYM, "--eps", "1e-2"])
    head_a = dict(kv.split("=") for kv in a.splitlines()[0][2:].split())
    head_b = dict(kv.split("=") for kv in b.splitlines()[0][2:].split())
    assert float(head_a["rho_star"]) == pytest.approx(float(head_b["rho_star"]), rel=1e-10)
    code, out = run(["validate-flux", "--flux", "table", "--flux-table", str(table), "--rho-max", "30"])
    assert code == 0 and "hypotheses_ok,1" in out


def test_validate_flux_brio():
    code, out = run(["validate-flux"])
    assert code == 0 and "nonlinearity_ok,1" in out


def test_entropy_command():
    code, out = run(["entropy", *SYM, "--eps-list", "1e-2,1e-4,1e-6"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 3 and all(r["admissible"] == "1" for r in rows)
    assert float(rows[-1]["coeff1"]) == pytest.approx(-1 / 3, rel=2e-2)


def test_fv_compare_and_snapshot(tmp_path):
    snap = tmp_path / "snap.csv"
    code, out = run(["fv-compare", *SYM, "--eps", "0.05", "--n-cells", "400", "--snapshot-out", str(snap)])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["n_cells"]) for r in rows] == [100, 200, 400]
    assert rows[0]["order"] == "" and float(rows[-1]["order"]) > 0.5
    assert snap.read_text().startswith("x,u,rho\n")


def test_weak_residual_command():
    code, out = run(["weak-residual", *SYM, "--bumps", "3"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 3 and all(r["pass"] == "1" for r in rows)


def test_all_writes_outputs(tmp_path):
    code, out = run(["all", *SYM, "--eps", "0.05", "--eps-list", "1e-2,1e-3,1e-4", "--bumps", "2",
                     "--n-cells", "200", "--out-dir", str(tmp_path / "o")])
    assert code == 0
    names = sorted(p.name for p in (tmp_path / "o").iterdir())
    assert names == ["entropy.csv", "fv-compare.csv", "limit.json", "solve.csv", "sweep.csv",
                     "weak-residual.csv"]


def test_out_file(tmp_path):
    dest = tmp_path / "sweep.csv"
    code, out = run(["sweep", *SYM, "--eps-list", "1e-2,1e-3", "--out", str(dest)])
    assert code == 0 and out == ""
    assert dest.read_text().startswith("epsilon,")


def test_help_documents_columns(capsys):
    for cmd, needles in (("sweep", SWEEP_COLUMNS), ("limit", ("weight_slope", "u_on_line")),
                         ("fv-compare", ("l1_rho", "x,u,rho"))):
        with pytest.raises(SystemExit) as exc:
            cli.build_parser().parse_args([cmd, "--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        for n in needles:
            assert n in text


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "scaled_euler", "solve", *SYM, "--samples", "3"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "case=TwoShock" in res.stdout
