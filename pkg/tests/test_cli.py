"""End-to-end tests of the command-line interface (in-process)."""

import json
import os

import numpy as np
import pytest

import siegelps as sp
from siegelps.cli import main

RADIAL_M4_T1 = 0.1763784476141347


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# thresholds
# ---------------------------------------------------------------------------


def test_n0_text_output(capsys):
    code, out, _ = run(capsys, "n0", "--n", "1", "--l", "0", "--m", "6")
    assert code == 0
    assert "N0 = 4" in out


def test_n0_json_deterministic(capsys):
    args = ("n0", "--n", "1", "--l", "0", "--m", "6", "--format", "json")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    payload = json.loads(out1)
    assert payload["n0"] == 4
    assert payload["method"] == sp.METHOD_CLOSED


def test_n0_csv(capsys):
    code, out, _ = run(capsys, "n0", "--n", "1", "--l", "1", "--m", "4",
                       "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,l,m,N0,method,margin"
    fields = lines[1].split(",")
    assert fields[:4] == ["1", "1", "4", "9"]


def test_n0_vanishing_note(capsys):
    code, out, _ = run(capsys, "n0", "--n", "1", "--l", "0", "--m", "13")
    assert code == 0
    assert "level 1 the average vanishes" in out


def test_n0_general_weight(capsys):
    code, out, _ = run(capsys, "n0", "--n", "1", "--l", "0", "--m", "6",
                       "--mu", "1", "--samples", "200000", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["n0"] == 4
    assert payload["note"] == ""


def test_n0_general_zero_weight_exits_3(capsys):
    code, _, err = run(capsys, "n0", "--n", "2", "--m", "6",
                       "--mu", "X_{1,2} - X_{2,1}", "--samples", "2000")
    assert code == 3
    assert "numerical failure" in err


def test_n0_table_small_rectangle(capsys):
    code, out, _ = run(capsys, "n0-table", "--n", "1", "--l-min", "0",
                       "--l-max", "1", "--m-min", "4", "--m-max", "5",
                       "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,l,m,N0,method,margin"
    got = {tuple(map(int, row.split(",")[:3])): int(row.split(",")[3])
           for row in lines[1:]}
    expected = {(1, l, m): sp.REFERENCE_N0[1][(l, m)]
                for l in (0, 1) for m in (4, 5)}
    assert got == expected


def test_n0_table_text_grid(capsys):
    code, out, _ = run(capsys, "n0-table", "--n", "1", "--l-min", "0",
                       "--l-max", "0", "--m-min", "3", "--m-max", "10")
    assert code == 0
    grid_row = out.strip().splitlines()[1].split()
    assert grid_row[0] == "0"
    assert [int(v) for v in grid_row[1:]] == [14, 6, 4, 4, 3, 3, 3, 2]


# ---------------------------------------------------------------------------
# constants and coefficients
# ---------------------------------------------------------------------------


def test_cmn_closed_form(capsys):
    code, out, _ = run(capsys, "cmn", "--n", "1", "--m", "12", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] == pytest.approx(4 * np.pi / 11, rel=1e-12)


def test_cmn_rejects_non_integrable(capsys):
    code, _, err = run(capsys, "cmn", "--n", "1", "--m", "2")
    assert code == 2
    assert "error:" in err


def test_cmn_seed_env_changes_mc(capsys, monkeypatch):
    monkeypatch.setenv("SIEGEL_SEED", "1")
    _, out1, _ = run(capsys, "cmn", "--n", "1", "--m", "4", "--mc",
                     "--samples", "2000", "--format", "json")
    monkeypatch.setenv("SIEGEL_SEED", "2")
    _, out2, _ = run(capsys, "cmn", "--n", "1", "--m", "4", "--mc",
                     "--samples", "2000", "--format", "json")
    v1 = json.loads(out1)["mc"]["value"]
    v2 = json.loads(out2)["mc"]["value"]
    assert v1 != v2


def test_coeff_radial(capsys):
    code, out, _ = run(capsys, "coeff", "--n", "1", "--m", "4", "--t", "1.0",
                       "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["value"]["re"] == pytest.approx(RADIAL_M4_T1, rel=1e-12)
    assert payload["rel_diff"] < 1e-10
    assert payload["kak_t"] == pytest.approx([1.0], abs=1e-9)


def test_coeff_matrix_file(capsys, tmp_path):
    path = str(tmp_path / "g.json")
    sp.save_matrix(path, np.array([[1.0, 1.0], [0.0, 1.0]]))
    code, out, _ = run(capsys, "coeff", "--n", "1", "--m", "8",
                       "--matrix", path, "--format", "json")
    assert code == 0
    assert json.loads(out)["rel_diff"] < 1e-10


def test_coeff_requires_element(capsys):
    code, _, err = run(capsys, "coeff", "--n", "1", "--m", "4")
    assert code == 2
    assert "error:" in err


def test_coeff_wrong_t_length(capsys):
    code, _, _ = run(capsys, "coeff", "--n", "2", "--m", "6", "--t", "1.0")
    assert code == 2


# ---------------------------------------------------------------------------
# series commands
# ---------------------------------------------------------------------------


def test_poincare_matches_library(capsys):
    code, out, _ = run(capsys, "poincare", "--n", "1", "--N", "1", "--m", "12",
                       "--z", "i", "--radius", "10", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    ref = sp.poincare_f(sp.MatrixPolynomial.one(1), sp.Weight(12, 1),
                        sp.CongruenceGroup(1, 1), sp.SiegelPoint.center(1), 10.0)
    assert payload["value"]["re"] == pytest.approx(ref.value.real, rel=1e-12)
    assert payload["value"]["im"] == pytest.approx(ref.value.imag, abs=1e-15)
    assert payload["terms"] == ref.terms


def test_poincare_vanishing_note(capsys):
    code, out, _ = run(capsys, "poincare", "--n", "1", "--N", "1", "--m", "13",
                       "--z", "i", "--radius", "6")
    assert code == 0
    assert "vanishes identically" in out


def test_poincare_bad_point(capsys):
    code, _, err = run(capsys, "poincare", "--n", "1", "--N", "1", "--m", "12",
                       "--z", "abc")
    assert code == 2
    assert "error:" in err


def test_poincare_missing_point_file(capsys):
    code, _, err = run(capsys, "poincare", "--n", "2", "--N", "1", "--m", "6",
                       "--point", "no-such-file.json", "--radius", "4")
    assert code == 2
    assert "error:" in err


def test_poincare_budget_exit_3(capsys, tmp_path):
    path = str(tmp_path / "z.json")
    sp.save_matrix(path, 1j * np.eye(2))
    code, _, err = run(capsys, "poincare", "--n", "2", "--N", "1", "--m", "6",
                       "--point", path, "--radius", "7", "--budget", "2000000")
    assert code == 3
    assert "fits the budget" in err


def test_kernel_matches_library(capsys):
    code, out, _ = run(capsys, "kernel", "--n", "1", "--N", "1", "--m", "12",
                       "--z", "i", "--xi", "0.2+1.1i", "--radius", "10",
                       "--format", "json")
    assert code == 0
    payload = json.loads(out)
    xi = sp.SiegelPoint.from_complex(np.array([[0.2 + 1.1j]]))
    ref = sp.kernel_series(sp.Weight(12, 1), sp.CongruenceGroup(1, 1), xi,
                           sp.SiegelPoint.center(1), 10.0)
    assert payload["value"]["re"] == pytest.approx(ref.value.real, rel=1e-12)
    assert payload["value"]["im"] == pytest.approx(ref.value.imag, rel=1e-12)


def test_kernel_requires_xi(capsys):
    code, _, _ = run(capsys, "kernel", "--n", "1", "--N", "1", "--m", "12",
                     "--z", "i")
    assert code == 2


def test_ball_cache_cold_and_warm(capsys, tmp_path):
    cache = str(tmp_path / "cache")
    args = ("poincare", "--n", "1", "--N", "1", "--m", "12", "--z", "i",
            "--radius", "10", "--cache-dir", cache, "--format", "json")
    code1, out1, _ = run(capsys, *args)
    assert code1 == 0
    path = os.path.join(cache, "ball_n1_N1_r10.bin")
    assert os.path.exists(path)
    stamp = os.path.getmtime(path)
    code2, out2, _ = run(capsys, *args)
    assert code2 == 0
    assert out1 == out2
    assert os.path.getmtime(path) == stamp  # reused, not rebuilt


def test_corrupt_cache_is_rejected(capsys, tmp_path):
    cache = str(tmp_path / "cache")
    args = ("poincare", "--n", "1", "--N", "1", "--m", "12", "--z", "i",
            "--radius", "10", "--cache-dir", cache)
    assert run(capsys, *args)[0] == 0
    path = os.path.join(cache, "ball_n1_N1_r10.bin")
    raw = bytearray(open(path, "rb").read())
    raw[32] ^= 1  # first diagonal entry: breaks the exact symplectic relation
    with open(path, "wb") as fh:
        fh.write(bytes(raw))
    code, _, err = run(capsys, *args)
    assert code == 2
    assert "error:" in err


def test_output_file(capsys, tmp_path):
    target = str(tmp_path / "result.json")
    code, out, _ = run(capsys, "n0", "--n", "1", "--l", "0", "--m", "6",
                       "--format", "json", "--output", target)
    assert code == 0
    assert out == ""
    assert json.load(open(target))["n0"] == 4


def test_norms_command(capsys):
    code, out, _ = run(capsys, "norms", "--n", "1", "--N", "2",
                       "--samples", "20")
    assert code == 0
    assert "PASS" in out


# ---------------------------------------------------------------------------
# verification battery
# ---------------------------------------------------------------------------


def test_verify_table1_genus1(capsys):
    code, out, _ = run(capsys, "verify", "table1", "--n", "1")
    assert code == 0
    assert "PASS threshold-table-genus1" in out
    assert "104/104" in out


def test_verify_coeff_small(capsys):
    code, out, _ = run(capsys, "verify", "coeff", "--samples", "3")
    assert code == 0
    assert "PASS coefficient-identity" in out


def test_verify_unknown_target_exits_2(capsys):
    code, _, _ = run(capsys, "verify", "nonsense")
    assert code == 2


def test_csv_unavailable_for_cmn(capsys):
    code, _, err = run(capsys, "cmn", "--n", "1", "--m", "12",
                       "--format", "csv")
    assert code == 2
    assert "csv" in err
