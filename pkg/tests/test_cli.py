import csv
import io
import json
import math

import pytest

from dslp.cli import (
    EXIT_INPUT,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFY,
    example_closed_form,
    main,
)


def write_problem(path, eq, bc):
    path.write_text(json.dumps({**eq, "bc": bc}))
    return str(path)


HARMONIC2 = {"N": 2, "f": [1, 1, 1], "q": [0, 0], "w": [1, 1]}
PERIODIC = {"type": "coupled", "gamma": 0.0, "K": [[1, 0], [0, 1]]}


def solve_json(capsys, path):
    assert main(["solve", path, "--format", "json"]) == EXIT_OK
    return json.loads(capsys.readouterr().out)


def test_solve_periodic(tmp_path, capsys):
    out = solve_json(capsys, write_problem(tmp_path / "p.json", HARMONIC2, PERIODIC))
    assert out["eigenvalues"] == pytest.approx([0.0, 4.0])
    assert (out["r"], out["k"]) == (2, 2)


def test_solve_table_format(tmp_path, capsys):
    path = write_problem(tmp_path / "p.json", HARMONIC2, PERIODIC)
    assert main(["solve", path]) == EXIT_OK
    assert "k  = 2" in capsys.readouterr().out


def test_solve_example_raw_at_s_one(tmp_path, capsys):
    raw = {"type": "raw", "A": [[1, 1], [0, -1]], "B": [[-1, 0], [0, 1]]}
    out = solve_json(capsys, write_problem(tmp_path / "e.json", HARMONIC2, raw))
    assert out["eigenvalues"] == pytest.approx([0.0], abs=1e-12)
    assert out["k"] == 1


def test_raw_and_canonical_inputs_agree(tmp_path, capsys):
    g = 0.7
    K = [[2.0, 1.0], [1.0, 1.0]]
    c, s = math.cos(g), math.sin(g)
    A = [[[2 * c, 2 * s], [c, s]], [[c, s], [c, s]]]
    raw = {"type": "raw", "A": A, "B": [[-1, 0], [0, -1]]}
    canon = {"type": "coupled", "gamma": g, "K": K}
    eq = {"N": 4, "f": [1, 2, 1, 3, 1], "q": [0, 1, -1, 0], "w": [1, 1, 2, 1]}
    a = solve_json(capsys, write_problem(tmp_path / "a.json", eq, raw))
    b = solve_json(capsys, write_problem(tmp_path / "b.json", eq, canon))
    assert a["eigenvalues"] == pytest.approx(b["eigenvalues"], abs=1e-10)


def test_invalid_weight_names_the_field(tmp_path, capsys):
    eq = dict(HARMONIC2, w=[1, -1])
    assert main(["solve", write_problem(tmp_path / "w.json", eq, PERIODIC)]) == EXIT_INPUT
    assert "w[1]" in capsys.readouterr().err


def test_non_unimodular_coupling_is_input_error(tmp_path):
    bc = {"type": "coupled", "gamma": 0.0, "K": [[1, 2], [0, 0.5]]}
    assert main(["solve", write_problem(tmp_path / "k.json", HARMONIC2, bc)]) == EXIT_INPUT


def test_missing_file_is_input_error(tmp_path):
    assert main(["solve", str(tmp_path / "absent.json")]) == EXIT_INPUT


def test_verify_writes_report(tmp_path, capsys):
    report = tmp_path / "r.json"
    code = main(["verify", "--theorems", "T3.8i", "--trials", "20", "--report", str(report)])
    assert code == EXIT_OK
    assert capsys.readouterr().out.rstrip().endswith("PASS")
    data = json.loads(report.read_text())
    assert data["passed"] and data["theorems"]["T3.8i"]["passed"] == 20


def test_verify_seed_from_environment(tmp_path, monkeypatch):
    report = tmp_path / "r.json"
    monkeypatch.setenv("DSLP_SEED", "99")
    main(["verify", "--theorems", "T3.6i", "--trials", "2", "--seed", "1", "--report", str(report)])
    assert json.loads(report.read_text())["seed"] == 99


def test_verify_unknown_theorem_is_usage_error():
    assert main(["verify", "--theorems", "T9.9"]) == EXIT_USAGE


def test_unknown_subcommand_is_usage_error():
    assert main(["frobnicate"]) == EXIT_USAGE


def sweep(tmp_path, name, *args):
    out = tmp_path / name
    assert main(["sweep", *args, "--out", str(out)]) == EXIT_OK
    return out


def test_sweep_is_byte_identical(tmp_path):
    args = ["--family", "gamma", "--harmonic", "3", "--K", "1,0,0,1", "--grid", "9"]
    a = sweep(tmp_path, "a.csv", *args).read_bytes()
    b = sweep(tmp_path, "b.csv", *args).read_bytes()
    assert a == b and b"\r\n" not in a


def test_gamma_sweep_ladder(tmp_path):
    out = sweep(tmp_path, "g.csv", "--family", "gamma", "--harmonic", "2", "--K", "1,0,0,1",
                "--grid", "4")
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    by_gamma = {round(float(r["param"]), 6): (float(r["lambda_0"]), float(r["lambda_1"])) for r in rows}
    assert by_gamma[0.0] == pytest.approx((0.0, 4.0), abs=1e-12)
    assert by_gamma[round(math.pi / 2, 6)] == pytest.approx((2 - math.sqrt(2), 2 + math.sqrt(2)))
    assert by_gamma[round(math.pi, 6)] == pytest.approx((2.0, 2.0))


def test_example_sweep_matches_closed_form(tmp_path):
    out = sweep(tmp_path, "s.csv", "--family", "example-3.1-s", "--grid", "21")
    for r in csv.DictReader(io.StringIO(out.read_text())):
        s = float(r["param"])
        expected = example_closed_form(s)
        got = [float(r[f"lambda_{i}"]) for i in range(int(r["count"]))]
        assert got == pytest.approx(expected, abs=1e-10)


def test_sweep_missing_flag_is_rejected(tmp_path):
    code = main(["sweep", "--family", "alpha", "--harmonic", "4", "--out", str(tmp_path / "x")])
    assert code in (EXIT_INPUT, EXIT_USAGE)


def test_example_exit_codes(capsys):
    assert main(["example", "--id", "3.1"]) == EXIT_OK
    assert capsys.readouterr().out.rstrip().endswith("PASS")
    assert main(["example", "--id", "3.1", "--perturb", "1e-6"]) == EXIT_VERIFY
    assert main(["example", "--id", "9"]) == EXIT_USAGE
