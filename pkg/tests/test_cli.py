"""Tests for the command-line front end, local and against the service."""
from __future__ import annotations

import json
import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from nolabel import cli
from nolabel.dsl import parse_state
from nolabel.pipeline import canonical_json, run_decompose
from nolabel.service import create_app

BELL = ("fermion; basis L:up,L:dn,R:up,R:dn; obs site,spin; "
        "params a=0.6, b=0.8; a*|L:up,R:dn> + b*|L:dn,R:up>")
QUBITS = ("boson; basis up,dn; params theta=1.5707963267948966, phi=0.0; "
          "cos(theta/2)*|up,up> + exp(i*phi)*sin(theta/2)*|up,dn>")
SERVER = "http://testserver"


@pytest.fixture
def service(monkeypatch):
    app = create_app()
    monkeypatch.setattr(cli, "_make_client", lambda server: TestClient(app))
    return SERVER


class TestDecomposeCommand:
    def test_stdout_is_the_canonical_record(self, capsys):
        assert cli.main(["decompose", "--state", BELL,
                         "--trace", "local:L"]) == 0
        out = capsys.readouterr().out
        want = canonical_json(run_decompose(parse_state(BELL), "local:L"))
        assert out == want + "\n"

    def test_json_file_output(self, tmp_path):
        target = tmp_path / "out.json"
        assert cli.main(["decompose", "--state", BELL,
                         "--json", str(target)]) == 0
        record = json.loads(target.read_text())
        assert record["command"] == "decompose"
        assert record["input"]["trace"] == "global"

    def test_state_read_from_file(self, tmp_path, capsys):
        source = tmp_path / "pair.state"
        source.write_text(BELL + "\n")
        assert cli.main(["decompose", "--state", str(source)]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["input"]["statistics"] == "fermion"

    def test_set_overrides_parameters(self, capsys):
        assert cli.main(["decompose", "--state", BELL, "--set", "a=0.8",
                         "--set", "b=0.6"]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["input"]["params"] == {"a": 0.8, "b": 0.6}

    def test_set_accepts_constant_expressions(self, capsys):
        assert cli.main(["decompose", "--state", QUBITS,
                         "--set", "theta=pi/2"]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["input"]["params"]["theta"] == pytest.approx(
            3.141592653589793 / 2)

    def test_oracle_off_is_recorded(self, capsys):
        assert cli.main(["decompose", "--state", BELL,
                         "--oracle", "off"]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["oracle_check"]["performed"] is False

    def test_remote_output_is_byte_identical(self, service, capsys):
        assert cli.main(["decompose", "--state", BELL,
                         "--trace", "local:L"]) == 0
        local = capsys.readouterr().out
        assert cli.main(["decompose", "--state", BELL, "--trace", "local:L",
                         "--server", service]) == 0
        assert capsys.readouterr().out == local


class TestSweepCommand:
    ARGS = ["sweep", "--state", QUBITS, "--param", "theta",
            "--range", "0:pi:5"]

    def test_csv_on_stdout(self, capsys):
        assert cli.main(self.ARGS) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == ("param,entropy_bits,schmidt_number,"
                            "lambda_1,lambda_2,flag")
        assert len(lines) == 6

    def test_range_bounds_accept_constants(self, capsys):
        assert cli.main(["sweep", "--state", QUBITS, "--param", "theta",
                         "--range", "pi/2:pi:2"]) == 0
        rows = capsys.readouterr().out.splitlines()[1:]
        assert float(rows[0].split(",")[0]) == pytest.approx(
            3.141592653589793 / 2)

    def test_csv_and_json_files(self, tmp_path):
        csv_path = tmp_path / "curve.csv"
        json_path = tmp_path / "curve.json"
        assert cli.main(self.ARGS + ["--csv", str(csv_path),
                                     "--json", str(json_path)]) == 0
        record = json.loads(json_path.read_text())
        assert len(record["rows"]) == 5
        assert csv_path.read_text().startswith("param,")

    def test_remote_csv_is_byte_identical(self, service, capsys):
        assert cli.main(self.ARGS) == 0
        local = capsys.readouterr().out
        assert cli.main(self.ARGS + ["--server", service]) == 0
        assert capsys.readouterr().out == local

    def test_remote_json_is_byte_identical(self, service, tmp_path):
        local = tmp_path / "local.json"
        remote = tmp_path / "remote.json"
        assert cli.main(self.ARGS + ["--json", str(local)]) == 0
        assert cli.main(self.ARGS + ["--json", str(remote),
                                     "--server", service]) == 0
        assert remote.read_bytes() == local.read_bytes()


class TestCheckCommand:
    def test_prints_one_line_per_fixture(self, capsys):
        assert cli.main(["check"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert all(line.startswith("PASS ") for line in lines[:-1])
        assert lines[-1].endswith("fixtures passed")

    def test_remote_check_matches_local(self, service, capsys):
        assert cli.main(["check"]) == 0
        local = capsys.readouterr().out
        assert cli.main(["check", "--server", service]) == 0
        assert capsys.readouterr().out == local


class TestExitCodes:
    def test_parse_error_is_2(self, capsys):
        assert cli.main(["decompose", "--state", "boson basis x"]) == 2
        err = capsys.readouterr().err
        assert err.startswith("error[E_SYNTAX]")

    def test_physics_error_is_3(self, capsys):
        assert cli.main(["decompose", "--state",
                         "fermion; basis x,y; |x,x>"]) == 3
        assert "error[E_PAULI]" in capsys.readouterr().err

    def test_verification_error_is_4(self, capsys):
        assert cli.main(["decompose", "--state", BELL,
                         "--trace", "fixed:site=L"]) == 4
        assert "error[E_RECONSTRUCTION]" in capsys.readouterr().err

    def test_remote_errors_replay_the_exit_code(self, service, capsys):
        assert cli.main(["decompose", "--state", BELL,
                         "--trace", "fixed:site=L",
                         "--server", service]) == 4
        assert "error[E_RECONSTRUCTION]" in capsys.readouterr().err
        assert cli.main(["decompose", "--state", "fermion; basis x,y; |x,x>",
                         "--server", service]) == 3
        capsys.readouterr()

    def test_bad_set_pair_is_2(self, capsys):
        assert cli.main(["decompose", "--state", BELL, "--set", "a"]) == 2
        assert "error[E_BAD_PARAM]" in capsys.readouterr().err

    def test_complex_set_value_is_2(self, capsys):
        assert cli.main(["decompose", "--state", BELL, "--set", "a=i"]) == 2
        capsys.readouterr()

    def test_bad_range_is_2(self, capsys):
        assert cli.main(["sweep", "--state", QUBITS, "--param", "theta",
                         "--range", "0:pi"]) == 2
        assert cli.main(["sweep", "--state", QUBITS, "--param", "theta",
                         "--range", "0:pi:few"]) == 2
        assert "error[E_BAD_RANGE]" in capsys.readouterr().err

    def test_unknown_subcommand_is_2(self, capsys):
        assert cli.main(["frobnicate"]) == 2
        capsys.readouterr()

    def test_help_exits_zero(self, capsys):
        assert cli.main(["--help"]) == 0
        assert "decompose" in capsys.readouterr().out


class TestDeterminism:
    def test_repeated_runs_are_byte_identical(self, capsys):
        outputs = []
        for _ in range(2):
            assert cli.main(["decompose", "--state", BELL]) == 0
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1]
