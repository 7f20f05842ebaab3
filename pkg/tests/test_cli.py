"""
Pruebas de la interfaz de línea de comandos
"""

import json

import pytest

from app import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out) if out else None


@pytest.fixture
def split_alpha(tmp_path):
    path = tmp_path / "split.json"
    path.write_text(json.dumps({"hermitian": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]], "label": "split"}),
                    encoding="utf-8")
    return str(path)


def test_catalog_listing(capsys):
    code, data = run_json(capsys, "catalog")
    assert code == 0
    assert {e["name"] for e in data["entries"]} == {"checkerboard", "gamma_ab", "gamma_t", "product", "standard"}


def test_catalog_entry_prints_lattice_file(capsys):
    code, data = run_json(capsys, "catalog", "standard", "--params", "n=2")
    assert code == 0
    assert data["n"] == 2
    assert data["label"] == "standard(n=2)"
    assert data["basis"][0] == ["1", "0", "0", "0"]


def test_dual_of_gamma_ab(capsys):
    code, data = run_json(capsys, "dual", "--entry", "gamma_ab", "--params", "a=2", "b=3")
    assert code == 0
    assert data["check_dual"] is True
    diagonal = [data["dual"]["basis"][i][i] for i in range(4)]
    assert diagonal == ["1", "2", "1", "3"]


def test_spectrum_json(capsys):
    code, data = run_json(capsys, "spectrum", "--entry", "checkerboard", "--params", "m=4", "--levels", "2", "--json")
    assert code == 0
    assert data["levels"][0]["l"] == 12
    assert data["levels"][0]["multiplicity"] == 24


def test_spectrum_text(capsys):
    code, out, _ = run(capsys, "spectrum", "--entry", "standard", "--params", "n=1")
    assert code == 0
    assert "Espectro del Laplaciano" in out


def test_check_kahler(capsys):
    code, data = run_json(capsys, "check-kahler", "--entry", "standard", "--params", "n=2")
    assert code == 0
    assert data["kahler"]["status"] == "feasible"
    assert data["verification"]["passed"] is True
    assert data["lookup"]["first_index"] == 1


def test_check_kahler_skips_odd_dimension(capsys):
    code, data = run_json(capsys, "check-kahler", "--entry", "checkerboard", "--params", "m=3")
    assert code == 0
    assert data["kahler"] == {"skipped": "no Kähler check (odd dimension)"}
    assert "verification" not in data


def test_check_immersion_infeasible(capsys):
    code, data = run_json(capsys, "check-immersion", "--entry", "gamma_ab", "--params", "a=2", "b=3")
    assert code == 0
    assert data["immersion"]["status"] == "infeasible"
    assert data["immersion"]["farkas"]
    assert "verification" not in data


def test_verify_identities(capsys):
    code, data = run_json(capsys, "verify-identities", "--entry", "standard", "--params", "n=1", "--samples", "2")
    assert code == 0
    assert data["identities"]["passed"] is True


def test_derivative_check(capsys, split_alpha):
    code, data = run_json(capsys, "derivative-check", "--entry", "standard", "--params", "n=2",
                          "--alpha", split_alpha)
    assert code == 0
    assert data["case"] == "above_prev"
    assert data["pass"] is True
    assert data["alpha"]["label"] == "split"


def test_report_then_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "report", "--entry", "gamma_ab", "--params", "a=2", "b=3",
                       "--json", "--no-identities")
    assert code == 0
    path = tmp_path / "report.json"
    path.write_text(out, encoding="utf-8")
    code, data = run_json(capsys, "verify-report", str(path))
    assert code == 0
    assert data["success"] is True


def test_tampered_report_exit_code(capsys, tmp_path):
    _, out, _ = run(capsys, "report", "--entry", "standard", "--params", "n=1", "--json", "--no-identities")
    data = json.loads(out)
    data["kahler"]["weights"] = ["0", "0"]
    path = tmp_path / "tampered.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    code, result = run_json(capsys, "verify-report", str(path))
    assert code == 4
    assert result["success"] is False


def test_report_is_deterministic(capsys):
    argv = ("report", "--entry", "standard", "--params", "n=1", "--json", "--samples", "2", "--derivatives", "1")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_text_report(capsys):
    code, out, _ = run(capsys, "report", "--entry", "standard", "--params", "n=1", "--samples", "1")
    assert code == 0
    assert "Retículo" in out


def test_lattice_file_input(capsys, tmp_path):
    path = tmp_path / "square.json"
    path.write_text(json.dumps({"n": 1, "basis": [["1", "0"], ["0", "1"]]}), encoding="utf-8")
    code, data = run_json(capsys, "check-kahler", "--file", str(path))
    assert code == 0
    assert data["kahler"]["weights"] == ["1", "0"]


@pytest.mark.parametrize(
    "argv",
    [
        ("dual", "--file", "/nonexistent/lattice.json"),
        ("dual",),
        ("catalog", "e8"),
        ("dual", "--entry", "standard", "--params", "n=0"),
        ("verify-identities", "--entry", "checkerboard", "--params", "m=3"),
        ("report", "--entry", "standard", "--params", "n=1", "--k", "0"),
    ],
)
def test_input_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_bad_json_file(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"n": 1,\n "basis": [', encoding="utf-8")
    code, _, err = run(capsys, "dual", "--file", str(path))
    assert code == 2
    assert "ParseError" in err


def test_invalid_tolerance_environment(capsys, monkeypatch):
    monkeypatch.setenv("TORUS_EXTREMAL_TOL", "abc")
    code, _, err = run(capsys, "catalog")
    assert code == 2
    assert "ConfigError" in err
