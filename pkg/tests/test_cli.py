import csv
import io
import json

import numpy as np
import pytest
from scipy.integrate import trapezoid

from thspec.cli import main
from thspec.tables import TABLE2, TABLE6


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_spectrum_table2_example(capsys):
    code, out, _ = run(capsys, "spectrum", "--preset", "table2", "--ch", "0.01", "--n", "0",
                       "--kappa", "-2", "--format", "csv")
    assert code == 0
    (row,) = rows_csv(out)
    assert float(row["E"]) == pytest.approx(0.0156445, abs=5e-7)
    assert set(row) == {"n", "kappa", "label", "E", "residual", "bracket_lo", "bracket_hi"}


def test_spectrum_doublet_partner(capsys):
    _, a, _ = run(capsys, "spectrum", "--preset", "table2", "--kappa", "-2", "--format", "csv")
    _, b, _ = run(capsys, "spectrum", "--preset", "table2", "--kappa", "1", "--format", "csv")
    assert rows_csv(a)[0]["E"] == rows_csv(b)[0]["E"]


def test_text_output_has_seven_decimals(capsys):
    _, out, _ = run(capsys, "spectrum", "--preset", "table2")
    assert "0.0156445" in out


def test_csv_round_trip(capsys):
    from thspec.tables import fm_table

    _, out, _ = run(capsys, "table", "2", "--format", "csv")
    for got, ref in zip(rows_csv(out), fm_table(2)):
        assert float(got["th"]) == float(f"{ref['th']:.12g}")


def test_json_shape(capsys):
    code, out, _ = run(capsys, "spectrum", "--preset", "table2", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and set(doc) == {"meta", "rows"}
    assert {"version", "params"} <= set(doc["meta"])
    assert doc["meta"]["params"]["c_h"] == 0.01


def test_table2_rows_and_columns(capsys):
    _, out, _ = run(capsys, "table", "2", "--format", "csv")
    rows = rows_csv(out)
    assert len(rows) == 8
    for col in ("morse2", "morse1", "th"):
        assert all(abs(float(r[f"{col}_delta_vs_ref"])) < 5e-6 for r in rows)
    assert [(int(r["n"]), int(r["kappa"])) for r in rows] == [(n, k) for n, k, *_ in TABLE2]


def test_table3_negative(capsys):
    _, out, _ = run(capsys, "table", "3", "--format", "csv")
    rows = rows_csv(out)
    assert all(float(r[c]) < 0 for r in rows for c in ("morse2", "morse1", "th"))


def test_table6_discrepancy_report(capsys):
    code, out, err = run(capsys, "table", "6", "--format", "csv")
    assert code == 0
    rows = rows_csv(out)
    row = next(r for r in rows if (r["n"], r["kappa"]) == ("2", "-3"))
    assert float(row["I2_ref"]) == TABLE6[-1][4]
    assert "discrepancy report" in err


def test_wavefunction_output(capsys):
    code, out, _ = run(capsys, "wavefunction", "--preset", "table2", "--n", "1", "--kappa", "-1",
                       "--points", "4000", "--format", "csv")
    assert code == 0
    rows = rows_csv(out)
    r = np.array([float(x["r"]) for x in rows])
    F = np.array([float(x["F"]) for x in rows])
    rho = np.array([float(x["density"]) for x in rows])
    assert np.all(np.diff(r) > 0) and np.all(np.isfinite(F))
    assert trapezoid(rho, r) == pytest.approx(1.0, abs=1e-4)
    signs = np.sign(F[np.abs(F) > 1e-12 * np.abs(F).max()])
    assert np.count_nonzero(signs[1:] != signs[:-1]) == 1


def test_wavefunction_tabulated_is_missing_state(capsys):
    code, _, err = run(capsys, "wavefunction", "--preset", "table2", "--convention", "tabulated")
    assert code == 3 and "physical" in err


def test_missing_state_exit_code(capsys):
    code, _, _ = run(capsys, "spectrum", "--preset", "table3", "--convention", "physical", "--n", "1",
                     "--kappa", "-1")
    assert code == 3


@pytest.mark.parametrize("argv", [
    ["spectrum", "--kappa", "0"],
    ["spectrum", "--bogus"],
    ["sweep", "--param", "bh", "--lo", "2", "--hi", "1"],
    ["sweep", "--param", "bh", "--lo", "1", "--hi", "2", "--steps", "1"],
    ["verify"],
    ["spectrum", "--molecule", "XX"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_verify_table2(capsys):
    code, out, _ = run(capsys, "verify", "--preset", "table2", "--grid-n", "3000", "--format", "csv")
    assert code == 0
    rows = rows_csv(out)
    assert len(rows) == 8 and all(r["status"] == "ok" for r in rows)


def test_sweep_rows_and_reasons(capsys):
    code, out, _ = run(capsys, "sweep", "--param", "ch", "--lo", "-0.1", "--hi", "0.1", "--steps", "3",
                       "--symmetry", "both", "--format", "csv")
    assert code == 0
    rows = rows_csv(out)
    assert {r["symmetry"] for r in rows} == {"spin", "pspin"}
    bad = [r for r in rows if r["E"] == ""]
    assert bad and all(r["reason"] for r in bad)


def test_molecules_and_registry_override(capsys, tmp_path, monkeypatch):
    code, out, _ = run(capsys, "molecules", "--format", "csv")
    assert code == 0 and {"H2", "I2"} <= {r["name"] for r in rows_csv(out)}
    path = tmp_path / "reg.csv"
    path.write_text("name,c_h,mu_amu,b_h_inv_angstrom,r_e_angstrom,D_wavenumber\nXY,0.1,1.0,1.5,1.0,30000\n")
    monkeypatch.setenv("THSPEC_REGISTRY", str(path))
    _, out, _ = run(capsys, "molecules", "--format", "csv")
    assert [r["name"] for r in rows_csv(out)] == ["XY"]


def test_molecule_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum", "--molecule", "H2", "--symmetry", "spin", "--n", "1",
                       "--kappa", "-1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["params"]["units"] == "eVA"
    assert doc["rows"][0]["E"] > 0


def test_out_file(capsys, tmp_path):
    path = tmp_path / "t.csv"
    assert run(capsys, "table", "2", "--format", "csv", "--out", str(path))[0] == 0
    assert len(rows_csv(path.read_text())) == 8
