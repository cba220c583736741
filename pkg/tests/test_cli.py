# Copyright (c) 2021-2022, InterDigital Communications, Inc
# All rights reserved.

# Redistribution and use in source and binary forms, with or without
# modification, are permitted (subject to the limitations in the disclaimer
# below) provided that the following conditions are met:

# * Redistributions of source code must retain the above copyright notice,
#   this list of conditions and the following disclaimer.
# * Redistributions in binary form must reproduce the above copyright notice,
#   this list of conditions and the following disclaimer in the documentation
#   and/or other materials provided with the distribution.
# * Neither the name of InterDigital Communications, Inc nor the names of its
#   contributors may be used to endorse or promote products derived from this
#   software without specific prior written permission.

# NO EXPRESS OR IMPLIED LICENSES TO ANY PARTY'S PATENT RIGHTS ARE GRANTED BY
# THIS LICENSE. THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND
# CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT
# NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A
# PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR
# CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL,
# EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO,
# PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS;
# OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY,
# WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR
# OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF
# ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.

import importlib
import json
import os

import numpy as np
import pytest

cli = importlib.import_module("hybridsignal.utils.cli.__main__")

# Example: GENERATE_EXPECTED=1 pytest -sx tests/test_cli.py
GENERATE_EXPECTED = os.getenv("GENERATE_EXPECTED")

STATES = {
    "states": [
        {"nu": 0.4, "p": 0.3},
        {"nu": 0.6, "p": 0.3},
        {"nu": 1.0, "p": 0.4},
    ],
    "gammas": [0.5, 0.9, 1.2],
}

POOLING = {
    "prior": {"family": "uniform", "low": 0, "high": 10},
    "beliefs": [[8, 10]],
}


def write_config(tmp_path, name, config):
    path = tmp_path / name
    path.write_text(json.dumps(config))
    return str(path)


def run(capsys, argv):
    cli.main(argv)
    captured = capsys.readouterr()
    return captured.out, captured.err


def run_json(capsys, argv):
    out, err = run(capsys, argv)
    return json.loads(out), err


def exit_code(argv):
    with pytest.raises(SystemExit) as excinfo:
        cli.main(argv)
    return excinfo.value.code


def test_cli():
    with pytest.raises(SystemExit):
        cli.main(["--help"])

    with pytest.raises(SystemExit):
        cli.main([])

    with pytest.raises(SystemExit):
        cli.main(["design-stateless"])


class TestDesignStateless:
    def test_pooling(self, capsys, tmp_path):
        scenario = write_config(tmp_path, "scenario.json", POOLING)
        output, err = run_json(capsys, ["design-stateless", "--scenario", scenario])
        assert output["schema"] == "1"
        assert output["regime"]["name"] == "R4"
        assert output["value"] == pytest.approx(0.4, abs=1e-7)
        assert output["beliefs"] == [[8, 10]]
        assert "Regime R4" in err

    def test_goal(self, capsys, tmp_path):
        config = {
            "prior": {"family": "uniform", "low": 0, "high": 10},
            "population": {"masses": [0.5, 0.5], "benefits": [2, 1]},
            "goal": {"type": "capacity", "b": 0.75},
        }
        scenario = write_config(tmp_path, "scenario.json", config)
        output, _ = run_json(capsys, ["design-stateless", "--scenario", scenario])
        assert np.allclose(output["beliefs"], [[8, 10]])
        assert output["value"] == pytest.approx(0.4, abs=1e-6)

    def test_empty_beliefs(self, capsys, tmp_path):
        config = {"prior": POOLING["prior"], "beliefs": []}
        scenario = write_config(tmp_path, "scenario.json", config)
        output, err = run_json(capsys, ["design-stateless", "--scenario", scenario])
        assert output["value"] == 0
        assert "Warning" in err

    def test_out(self, capsys, tmp_path):
        scenario = write_config(tmp_path, "scenario.json", POOLING)
        out = str(tmp_path / "design.json")
        output, _ = run_json(
            capsys, ["design-stateless", "--scenario", scenario, "-o", out]
        )
        with open(out) as f:
            assert json.load(f) == output

    def test_input_errors(self, tmp_path):
        config = dict(POOLING, schema="2")
        scenario = write_config(tmp_path, "scenario.json", config)
        assert exit_code(["design-stateless", "--scenario", scenario]) == 2

        config = {"prior": {"family": "lognormal"}, "beliefs": [[8, 10]]}
        scenario = write_config(tmp_path, "scenario.json", config)
        assert exit_code(["design-stateless", "--scenario", scenario]) == 2

        config = {"prior": POOLING["prior"], "beliefs": [[3, 2]]}
        scenario = write_config(tmp_path, "scenario.json", config)
        assert exit_code(["design-stateless", "--scenario", scenario]) == 2

        missing = str(tmp_path / "missing.json")
        assert exit_code(["design-stateless", "--scenario", missing]) == 2


class TestDesignStateful:
    def test_table(self, capsys, tmp_path):
        here = os.path.dirname(__file__)
        scenario = write_config(tmp_path, "states.json", STATES)
        output, err = run_json(capsys, ["design-stateful", "--scenario", scenario])
        assert "V*=0.425000" in err

        expected = os.path.join(here, "expected", "stateful_table.json")
        if not os.path.isfile(expected):
            if not GENERATE_EXPECTED:
                raise RuntimeError(f"Missing expected file {expected}")
            with open(expected, "w") as f:
                json.dump(output, f)

        with open(expected, "r") as f:
            expected = json.loads(f.read())

        for key in ("schema", "gammas"):
            assert expected[key] == output[key]

        for key in ("value", "conditionals"):
            assert np.allclose(expected[key], output[key], rtol=1e-4, atol=1e-4)

        for row, other in zip(expected["benchmarks"], output["benchmarks"]):
            assert row["mechanism"] == other["mechanism"]
            assert np.allclose(row["value"], other["value"], atol=1e-4)
            assert np.allclose(row["conditionals"], other["conditionals"], atol=1e-4)

    def test_weights(self, capsys, tmp_path):
        scenario = write_config(tmp_path, "states.json", STATES)
        output, _ = run_json(
            capsys,
            ["design-stateful", "--scenario", scenario, "--weights", "1,0,0"],
        )
        assert output["weights"] == [1, 0, 0]
        assert output["value"] == pytest.approx(1, abs=1e-9)
        assert "benchmarks" not in output

        argv = ["design-stateful", "--scenario", scenario, "--weights", "1,0"]
        assert exit_code(argv) == 2

    def test_floors(self, capsys, tmp_path):
        config = {
            "population": {"masses": [0.5, 0.5], "benefits": [2, 1]},
            "states": [
                {"nu": 1.0, "p": 0.5, "b": 0.25},
                {"nu": 3.0, "p": 0.5, "b": 0.5},
            ],
        }
        scenario = write_config(tmp_path, "states.json", config)
        output, _ = run_json(capsys, ["design-stateful", "--scenario", scenario])
        assert np.allclose(output["gammas"], [4 / 3, 2])
        # pooling the two states puts the common mean of 2 above both floors
        assert output["value"] == pytest.approx(1, abs=1e-9)

    def test_input_errors(self, tmp_path):
        scenario = write_config(tmp_path, "states.json", {"gammas": [0.5]})
        assert exit_code(["design-stateful", "--scenario", scenario]) == 2

        config = dict(STATES, gammas=[0.9, 0.5, 1.2])
        scenario = write_config(tmp_path, "states.json", config)
        assert exit_code(["design-stateful", "--scenario", scenario]) == 2


class TestEvaluate:
    def test_stateless(self, capsys, tmp_path):
        scenario = write_config(tmp_path, "scenario.json", POOLING)
        out = str(tmp_path / "design.json")
        run(capsys, ["design-stateless", "--scenario", scenario, "-o", out])

        output, _ = run_json(
            capsys, ["evaluate", "--scenario", scenario, "--mechanism", out]
        )
        assert output["value"] == pytest.approx(0.4, abs=1e-7)

        config = {"type": "full_information"}
        mechanism = write_config(tmp_path, "mechanism.json", config)
        output, _ = run_json(
            capsys, ["evaluate", "--scenario", scenario, "--mechanism", mechanism]
        )
        assert output["value"] == pytest.approx(0.2)

    def test_stateful(self, capsys, tmp_path):
        scenario = write_config(tmp_path, "states.json", STATES)
        out = str(tmp_path / "design.json")
        run(capsys, ["design-stateful", "--scenario", scenario, "-o", out])

        output, _ = run_json(
            capsys, ["evaluate", "--scenario", scenario, "--mechanism", out]
        )
        assert output["value"] == pytest.approx(0.425, abs=1e-6)
        assert np.allclose(output["breakdown"], [1, 0.41667, 0], atol=5e-4)

    def test_table_needs_states(self, tmp_path):
        scenario = write_config(tmp_path, "scenario.json", POOLING)
        mechanism = write_config(tmp_path, "mechanism.json", {"rows": [[1.0]]})
        argv = ["evaluate", "--scenario", scenario, "--mechanism", mechanism]
        assert exit_code(argv) == 2


class TestOracle:
    def test_value(self, capsys, tmp_path):
        scenario = write_config(tmp_path, "scenario.json", POOLING)
        output, err = run_json(capsys, ["oracle", "--scenario", scenario])
        assert output["grid"] == 2000
        assert output["value"] == pytest.approx(0.4, abs=5e-3)
        assert output["value"] <= 0.4 + 1e-6
        assert "V_oracle" in err

    def test_grid_too_small(self, tmp_path):
        scenario = write_config(tmp_path, "scenario.json", POOLING)
        assert exit_code(["oracle", "--scenario", scenario, "--grid", "1"]) == 2


class TestSweep:
    def test_stdout(self, capsys, tmp_path):
        config = write_config(tmp_path, "sweep.json", {"K": 3})
        out, _ = run(capsys, ["sweep", "--config", config, "--trials", "2"])
        lines = out.splitlines()
        assert lines[0].startswith("b,v_noinfo_analytic")
        assert len(lines) == 22

    def test_files(self, capsys, tmp_path):
        config = write_config(tmp_path, "sweep.json", {"K": 3, "b_grid": [0, 0.5]})
        first = str(tmp_path / "first.csv")
        second = str(tmp_path / "second.csv")
        argv = ["sweep", "--config", config, "--trials", "3", "--seed", "4"]
        run(capsys, argv + ["-o", first])
        _, err = run(capsys, argv + ["-o", second, "-j", "2"])
        assert "Wrote 2 rows" in err
        with open(first) as f1, open(second) as f2:
            assert f1.read() == f2.read()

    def test_input_errors(self, tmp_path):
        config = write_config(tmp_path, "sweep.json", {"K": 0})
        assert exit_code(["sweep", "--config", config]) == 2
