#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : test_cli.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


'''End-to-end tests of the ``mmtherm`` subcommands and their exit codes.
'''


import json

import pytest

from mmtherm import cli
from mmtherm import scenarios
from mmtherm.measure import ExtrapolationError


def test_list(capsys):
    assert cli.main(["list"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "s24" in out and "UNRESOLVED" in out

    assert cli.main(["list", "--format", "json"]) == cli.EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["scenarios"]) == len(scenarios.REGISTRY)


def test_thermo(tmp_path):
    out = tmp_path / "curves" / "s24.json"
    code = cli.main(["thermo", "--scenario", "s24", "--beta", "0:1:0.5",
                     "--format", "json", "--out", str(out)])
    assert code == cli.EXIT_OK

    doc = json.loads(out.read_text())
    print(doc["meta"])
    assert doc["meta"]["scenario"] == "s24"
    assert len(doc["rows"]) == 3
    for row in doc["rows"]:
        assert row["Q_num"] == pytest.approx(row["Q_closed"], rel = 1e-6)

    csv = tmp_path / "s24.csv"
    assert cli.main(["thermo", "--scenario", "s24", "--beta", "2",
                     "--h", "2", "--out", str(csv)]) == cli.EXIT_OK
    assert "# scenario: s24" in csv.read_text()


def test_improper_prior(capsys):
    code = cli.main(["thermo", "--scenario", "s22", "--metric", "maximal"])
    assert code == cli.EXIT_DIVERGENT
    assert "improper prior" in capsys.readouterr().err


def test_prior(tmp_path):
    out = tmp_path / "s24.csv"
    code = cli.main(["prior", "--scenario", "s24", "--grid", "21",
                     "--out", str(out)])
    assert code == cli.EXIT_OK
    assert out.read_text().startswith("# support")

    # Two-parameter scenarios also get the density grid
    out = tmp_path / "s21.csv"
    assert cli.main(["prior", "--scenario", "s21", "--grid", "21",
                     "--out", str(out)]) == cli.EXIT_OK
    assert (tmp_path / "s21_grid.csv").exists()

    assert cli.main(["prior", "--scenario", "s24", "--axis", "3"]) == \
        cli.EXIT_CONFIG


def test_infogain(capsys):
    code = cli.main(["infogain", "--scenario", "s24", "--sequence", "DA",
                     "--format", "json"])
    assert code == cli.EXIT_OK

    doc = json.loads(capsys.readouterr().out)
    assert [s["label"] for s in doc["steps"]] == ["D", "A"]
    assert doc["expected_gain_nats"] == pytest.approx(.145376, abs = 2e-5)

    assert cli.main(["infogain", "--scenario", "s24", "--sequence",
                     "AX"]) == cli.EXIT_CONFIG
    assert cli.main(["infogain", "--scenario", "s26-3"]) == cli.EXIT_CONFIG


def test_compare(capsys):
    assert cli.main(["compare", "--scenario", "s24", "--seed", "3"]) == \
        cli.EXIT_OK
    out = capsys.readouterr().out
    assert "# ratio_spread:" in out
    assert "min_eig_max_minus_min" in out

    assert cli.main(["compare", "--scenario", "quat-min"]) == cli.EXIT_CONFIG


def test_validate(capsys, monkeypatch):
    assert cli.main(["validate", "--scenario", "s26-3"]) == cli.EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"]
    assert doc["scenarios"][0]["scenario"] == "s26-3"

    def failing(sid, kinds = None, verbose = False):
        report = scenarios.ValidationReport(sid)
        report.fail("demo", "forced failure")
        return report

    monkeypatch.setattr(cli.scenarios, "validate_scenario", failing)
    assert cli.main(["validate", "--scenario", "s24", "--format", "csv"]) \
        == cli.EXIT_VALIDATION
    assert "forced failure" in capsys.readouterr().out


def test_configuration_errors(tmp_path, capsys):
    assert cli.main(["thermo", "--scenario", "s99"]) == cli.EXIT_CONFIG
    assert cli.main(["thermo"]) == cli.EXIT_CONFIG
    assert cli.main(["thermo", "--scenario", "s24", "--tol", "0.5"]) == \
        cli.EXIT_CONFIG
    assert cli.main(["prior", "--scenario", "bloch-min", "--metric",
                     "maximal"]) == cli.EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err

    config = tmp_path / "run.toml"
    config.write_text('scenario = "s24"\nbeta = "0:1:1"\nformat = "json"\n')
    assert cli.main(["thermo", "--config", str(config)]) == cli.EXIT_OK
    assert len(json.loads(capsys.readouterr().out)["rows"]) == 2

    # Argument parsing errors use the same exit code
    for argv in [["bogus"], ["thermo", "--format", "xml"], []]:
        with pytest.raises(SystemExit) as err:
            cli.main(argv)
        assert err.value.code == cli.EXIT_CONFIG


def test_numerical_failures(monkeypatch, capsys):
    def fail(*args, **kwargs):
        raise ExtrapolationError("The shrink limit did not settle.")

    # Odd grid size keeps the cached shrink-limit tables out of the way
    monkeypatch.setattr(scenarios.measure, "shrink_limit_marginal", fail)
    code = cli.main(["prior", "--scenario", "bloch-max", "--shrink-limit",
                     "--grid", "31"])
    assert code == cli.EXIT_FAILURE
    assert "numerical failure" in capsys.readouterr().err

    # Programming errors are not configuration errors
    def broken(*args, **kwargs):
        raise ValueError("broken")

    monkeypatch.setattr(cli.thermo, "thermo_curve", broken)
    with pytest.raises(ValueError):
        cli.main(["thermo", "--scenario", "s24", "--beta", "1"])


def test_scenario_errors(capsys):
    # Unresolved scenarios and multi-axis energies are configuration errors
    assert cli.main(["thermo", "--scenario", "s26-4-open"]) == \
        cli.EXIT_CONFIG
    assert cli.main(["thermo", "--scenario", "s23", "--shrink-limit"]) == \
        cli.EXIT_CONFIG
    err = capsys.readouterr().err
    assert "unresolved" in err and "energy" in err

    assert cli.main(["thermo", "--scenario", "s26-5", "--beta",
                     "0:1:1"]) == cli.EXIT_OK
    assert "s26-5: DEVIATION" in capsys.readouterr().err


if __name__ == "__main__":
    # Every test here needs pytest fixtures
    pytest.main([__file__, "-q"])
