import csv
import io
import json
import math
import subprocess
import sys

import pytest

from spinsqueeze.cli import METRIC_COLUMNS, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sweep_chi_layout(capsys):
    code, out, _ = run(capsys, "sweep-chi", "--n", "30,10", "--chi", "0.2,0.05", "--kind", "interaction")
    assert code == 0
    assert out.splitlines()[0] == ",".join(METRIC_COLUMNS)
    table = rows(out)
    assert [(int(r["N"]), float(r["chi"])) for r in table] == [(10, 0.05), (10, 0.2), (30, 0.05), (30, 0.2)]
    for r in table:
        assert float(r["delta_phi_w"]) >= float(r["delta_phi_f"]) >= float(r["heisenberg"])


def test_zero_strength_rows_sit_at_sql(capsys):
    for kind in ("interaction", "measurement"):
        _, out, _ = run(capsys, "sweep-chi", "--n", "5,40", "--chi", "0", "--kind", kind)
        for r in rows(out):
            assert float(r["delta_phi_w"]) == pytest.approx(float(r["sql"]), rel=1e-9)


def test_sweep_chi_default_range(capsys):
    _, out, _ = run(capsys, "sweep-chi", "--n", "20")
    chis = [float(r["chi"]) for r in rows(out)]
    assert len(chis) == 25
    assert chis[0] == pytest.approx(1e-3) and chis[-1] == pytest.approx(1.0)


def test_sweep_n_unsqueezed(capsys):
    _, out, _ = run(capsys, "sweep-n", "--kind", "none", "--n", "4,9,100")
    for r in rows(out):
        assert float(r["delta_phi_w"]) == pytest.approx(int(r["N"]) ** -0.5, rel=1e-12)
        assert r["kind"] == "none"


def test_json_output(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "sweep-n", "--n", "10", "--chi", "0.1", "--format", "json", "--out", str(target))
    assert code == 0 and out == ""
    data = json.loads(target.read_text())
    assert data[0]["N"] == 10 and data[0]["kind"] == "interaction"


def test_optimal_chi(capsys):
    _, out, _ = run(capsys, "optimal-chi", "--n", "40", "--kind", "interaction")
    (row,) = rows(out)
    assert float(row["chi_opt"]) == pytest.approx(0.177, abs=0.02)
    _, out, _ = run(capsys, "optimal-chi", "--n-range", "10:100:3", "--kind", "interaction")
    chis = [float(r["chi_opt"]) for r in rows(out)]
    assert len(chis) == 3 and chis[0] > chis[1] > chis[2]


def test_wigner_export(capsys):
    _, out, _ = run(capsys, "wigner", "--n", "10", "--chi", "0,0.1", "--n-theta", "5", "--n-phi", "8")
    table = rows(out)
    assert list(table[0]) == ["chi", "theta", "phi", "W"]
    assert len(table) == 2 * 5 * 8
    _, out, _ = run(capsys, "wigner", "--n", "10", "--kind", "measurement", "--chi", "0.5", "--h", "3", "--n-theta", "5", "--n-phi", "8")
    assert all(math.isfinite(float(r["W"])) for r in rows(out))


def test_montecarlo_summary(capsys, tmp_path):
    shots = tmp_path / "shots.csv"
    code, out, _ = run(capsys, "montecarlo", "--n", "20", "--shots", "20000", "--seed", "3", "--shots-csv", str(shots))
    assert code == 0
    summary = json.loads(out)
    assert summary["kind"] == "none"
    assert summary["rms_error"] == pytest.approx(summary["predicted_delta_phi_w"], rel=0.05)
    assert len(shots.read_text().splitlines()) == 20001


def test_montecarlo_is_reproducible(capsys):
    argv = ["montecarlo", "--n", "12", "--kind", "measurement", "--chi", "1", "--shots", "9000", "--seed", "9"]
    first = run(capsys, *argv)[1]
    assert run(capsys, *argv, "--workers", "4")[1] == first


def test_design(capsys):
    _, out, _ = run(capsys, "design", "--energy-kev", "100", "--d-over-r", "10", "--dose", "20", "--pixel-angstrom", "10")
    values = json.loads(out)
    assert values["chi_int"] == pytest.approx(0.122, abs=5e-4)
    assert values["electron_spacing_m"] == pytest.approx(0.026, abs=5e-4)
    assert values["batch_size"] == 2000


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep-chi", "--chi-range", "1:0.1:5"],
        ["sweep-chi", "--chi-range", "1e-3:1:0"],
        ["sweep-chi", "--chi", "-0.1"],
        ["sweep-n", "--n", "0"],
        ["montecarlo", "--phi", "2.0"],
        ["design", "--d-over-r", "1.5"],
        ["optimal-chi", "--bracket", "2:1"],
        ["no-such-command"],
    ],
)
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""


def test_config_file_with_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep manifest\nn = 12\nchi = 0.3  # strength\nkind = interaction\n")
    _, out, _ = run(capsys, "sweep-n", "--config", str(cfg))
    assert [(r["N"], r["chi"]) for r in rows(out)] == [("12", "0.29999999999999999")]
    _, out, _ = run(capsys, "sweep-n", "--config", str(cfg), "--n", "7")
    assert [r["N"] for r in rows(out)] == ["7"]
    bad = tmp_path / "bad.cfg"
    bad.write_text("just words\n")
    assert run(capsys, "sweep-n", "--config", str(bad))[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spinsqueeze", "design"], capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["batch_size"] == 20
