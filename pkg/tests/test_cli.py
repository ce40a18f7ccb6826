import json

import pytest

from regimecalc.__main__ import _parser, main
from regimecalc.cli import EXIT_ERROR, EXIT_NOT_IDENTIFIED, EXIT_OK, TOLERANCE_ENV, make_run_config
from regimecalc.utils.serialization import dump_json, save_model

NDE = {"kind": "nde", "treatment": "X", "mediator": "Z", "response": "Y", "x": 1, "x_star": 0}
CDE = {"kind": "cde", "treatment": "X", "mediator": "Z", "response": "Y", "x": 1, "x_star": 0, "z": 1}


def run_cli(capsys, *args):
    status = main(_parser().parse_args([str(arg) for arg in args]))
    captured = capsys.readouterr()
    return status, captured.out, captured.err


@pytest.fixture
def nde_query(tmp_path):
    file = tmp_path / "nde.json"
    file.write_text(dump_json(NDE))
    return file


@pytest.fixture
def cde_query(tmp_path):
    file = tmp_path / "cde.yaml"
    file.write_text("".join(f"{key}: {value}\n" for key, value in CDE.items()))
    return file


def test_dsep(capsys):
    status, out, _ = run_cli(capsys, "dsep", "-r", "sequential", "-a", "X", "-b", "Y", "--given", "V", "Z")
    assert status == EXIT_OK
    document = json.loads(out)
    assert document["d_separated"] is False
    assert document["open_path"][0] == "X" and document["open_path"][-1] == "Y"


def test_dsep_with_regime_indicator(capsys):
    args = ["dsep", "-r", "sequential", "-a", "Y", "-b", "sigma_Z", "--given", "X", "Z", "V", "--sigma", "Z"]
    status, out, _ = run_cli(capsys, *args)
    assert status == EXIT_OK
    assert json.loads(out) == {"d_separated": True, "open_path": None}


def test_check(capsys, nde_query):
    status, out, _ = run_cli(capsys, "check", "-r", "confounded-mediation-observed", "-q", nde_query)
    assert status == EXIT_OK
    document = json.loads(out)
    assert "value" not in document
    assert document["roles"] == {"W": ["U2"], "S": ["U1"], "L1": ["U2"], "L2": []}


def test_check_not_identified(capsys, nde_query):
    status, out, _ = run_cli(capsys, "check", "-r", "confounded-mediation", "-q", nde_query)
    assert status == EXIT_NOT_IDENTIFIED
    document = json.loads(out)
    assert document["verdict"] == "not_identified"
    assert document["witness"]["path"]


def test_check_not_defined_as_text(capsys, nde_query):
    status, out, _ = run_cli(capsys, "check", "-r", "sequential", "-q", nde_query, "-f", "text")
    assert status == EXIT_NOT_IDENTIFIED
    assert "verdict: not_defined\n" in out


@pytest.mark.parametrize("mode", ["identified", "oracle", "both"])
def test_effect(capsys, cde_query, mode):
    status, out, _ = run_cli(capsys, "effect", "-r", "sequential", "-s", 3, "-q", cde_query, "--mode", mode)
    assert status == EXIT_OK
    document = json.loads(out)
    if mode == "both":
        assert document["within_tolerance"] is True
        assert document["effect_deviation"] < 1e-9
    else:
        assert isinstance(document["value"], float)


def test_oracle_and_compare_agree(capsys, cde_query):
    _, oracle_out, _ = run_cli(capsys, "oracle", "-r", "sequential", "-q", cde_query)
    _, compare_out, _ = run_cli(capsys, "compare", "-r", "sequential", "-q", cde_query)
    assert json.loads(oracle_out)["value"] == json.loads(compare_out)["oracle_value"]


def test_oracle_of_natural_effect_reports_strata(capsys, nde_query):
    status, out, _ = run_cli(capsys, "oracle", "-r", "confounded-mediation", "-q", nde_query)
    assert status == EXIT_OK
    assert json.loads(out)["W"] == ["U2"]


def test_compare_not_identified(capsys, nde_query):
    status, out, _ = run_cli(capsys, "compare", "-r", "confounded-mediation", "-q", nde_query)
    assert status == EXIT_NOT_IDENTIFIED
    assert json.loads(out)["skipped"] is True


def test_effect_to_file(capsys, tmp_path, cde_query):
    out_file = tmp_path / "effect.json"
    status, out, _ = run_cli(capsys, "effect", "-r", "sequential", "-q", cde_query, "-o", out_file)
    assert status == EXIT_OK and out == ""
    assert json.loads(out_file.read_text())["identified"] is True


def test_model_file(capsys, tmp_path, seq_model, cde_query):
    model_file = tmp_path / "model.json"
    save_model(seq_model, model_file)
    status, out, _ = run_cli(capsys, "effect", "-m", model_file, "-q", cde_query, "--mode", "both")
    assert status == EXIT_OK
    assert json.loads(out)["within_tolerance"] is True


@pytest.mark.parametrize(
    "args,msg",
    [
        (["effect", "-r", "sequential"], "query file"),
        (["effect", "-q", "missing.json"], "model file"),
        (["simulate", "-r", "sequential", "-n", "0"], "at least 1"),
        (["estimate", "-r", "sequential"], "dataset"),
        (["effect", "-r", "sequential", "-q", "does-not-exist.json"], "No such file"),
    ],
)
def test_errors(capsys, args, msg):
    status, out, err = run_cli(capsys, *args)
    assert status == EXIT_ERROR
    assert out == ""
    assert err.startswith("error: ") and msg in err


def test_simulate_and_estimate(capsys, tmp_path, cde_query):
    data = tmp_path / "data.csv"
    status, out, _ = run_cli(capsys, "simulate", "-r", "sequential", "-n", 5000, "-s", 1, "-o", data)
    assert status == EXIT_OK
    assert json.loads(out) == {"rows": 5000, "out": str(data)}
    assert data.read_text().splitlines()[0] == "X,V,Z,Y"

    args = ["estimate", "-r", "sequential", "-s", 1, "-q", cde_query, "-d", data, "--truth", "--smoothing", 1]
    status, out, _ = run_cli(capsys, *args)
    assert status == EXIT_OK
    document = json.loads(out)
    assert document["absolute_error"] == pytest.approx(abs(document["estimate"] - document["true_value"]))


def test_simulate_to_stdout(capsys):
    status, out, _ = run_cli(capsys, "simulate", "-r", "mediation", "-n", 3)
    assert status == EXIT_OK
    assert out.splitlines()[0] == "X,Z,V,Y" and len(out.splitlines()) == 4


def test_estimate_not_identified(capsys, tmp_path, nde_query):
    data = tmp_path / "data.csv"
    run_cli(capsys, "simulate", "-r", "confounded-mediation", "-n", 2000, "-o", data)
    status, out, _ = run_cli(capsys, "estimate", "-r", "confounded-mediation", "-q", nde_query, "-d", data)
    assert status == EXIT_NOT_IDENTIFIED
    document = json.loads(out)
    assert document["estimate"] is None
    assert document["notes"][-1] == "not estimable from this data"


def test_export_dot(capsys):
    status, out, _ = run_cli(capsys, "export-dot", "-r", "confounded-mediation")
    assert status == EXIT_OK
    assert out.startswith('digraph "confounded-mediation" {\n')
    assert '    "U1" [shape=ellipse, style=dashed];\n' in out


def test_config_priority(tmp_path, monkeypatch):
    config = tmp_path / "config.yaml"
    config.write_text("seed: 5\nn: 10\ntolerance: 0.1\nreference: mediation\n")
    monkeypatch.delenv(TOLERANCE_ENV, raising=False)
    run_config = make_run_config(_parser().parse_args(["simulate", "-c", str(config), "-s", "2"]))
    assert (run_config.seed, run_config.n, run_config.tolerance) == (2, 10, 0.1)
    assert run_config.reference == "mediation"

    monkeypatch.setenv(TOLERANCE_ENV, "1e-3")
    run_config = make_run_config(_parser().parse_args(["simulate", "-c", str(config)]))
    assert run_config.tolerance == 1e-3


def test_tolerance_from_environment(capsys, monkeypatch, cde_query):
    monkeypatch.setenv(TOLERANCE_ENV, "-1")
    status, _, err = run_cli(capsys, "compare", "-r", "sequential", "-q", cde_query)
    assert status == EXIT_ERROR
    assert "Tolerance must be positive" in err
