#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : test_config.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


'''Tests for run configuration: defaults, config files, flags and the
environment.
'''


import pytest

from mmtherm import config
from mmtherm.config import ConfigError, RunConfig, load_config


def test_defaults():
    cfg = load_config()
    print(cfg)

    assert cfg.beta == "0:10:0.1"
    assert len(cfg.beta_grid()) == 101
    assert cfg.h == 1.
    assert cfg.format == "csv"
    assert cfg.grid == 201
    assert cfg.seed == 20
    assert cfg.shrink_limit is False
    assert cfg.metric is None and cfg.out is None

    assert set(cfg.to_dict()) == set(RunConfig.defaults)


def test_flags_normalised():
    cfg = load_config(scenario = "s24", metric = "Maximal", h = "2",
                      tol = "1e-8", grid = 51, axis = "1", shrink_limit = None)
    assert cfg.metric == "maximal"
    assert cfg.h == 2.
    assert cfg.tol == 1e-8
    assert cfg.axis == 1
    assert cfg.shrink_limit is False


def test_config_file(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(
        'scenario = "s24"\n'
        'beta = "0:2:0.5"\n'
        'h = 2.0\n'
        'format = "json"\n'
        'shrink-limit = true\n'
    )

    cfg = load_config(str(path))
    assert cfg.scenario == "s24"
    assert cfg.format == "json"
    assert cfg.shrink_limit is True
    assert cfg.beta_grid().tolist() == [0., 0.5, 1., 1.5, 2.]

    # Flags override the file; None flags do not
    cfg = load_config(str(path), h = 3., format = None)
    assert cfg.h == 3.
    assert cfg.format == "json"


def test_config_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.toml"))

    bad = tmp_path / "bad.toml"
    bad.write_text("scenario = \n")
    with pytest.raises(ConfigError):
        config.read_config_file(str(bad))

    unknown = tmp_path / "unknown.toml"
    unknown.write_text("temperature = 3\n")
    with pytest.raises(ConfigError):
        config.read_config_file(str(unknown))


def test_validation_errors():
    for flags in [
        dict(h = 0.),
        dict(h = "abc"),
        dict(tol = 0.5),
        dict(grid = 2),
        dict(format = "xml"),
        dict(beta = "1:0:0.1"),
        dict(metric = "wigner-yanase"),
    ]:
        with pytest.raises(ConfigError):
            load_config(**flags)

    with pytest.raises(ConfigError):
        RunConfig(temperature = 3.)

    # Config errors are value errors
    assert issubclass(ConfigError, ValueError)


def test_max_workers(monkeypatch):
    monkeypatch.setenv("MMTHERM_THREADS", "3")
    assert config.max_workers() == 3

    monkeypatch.setenv("MMTHERM_THREADS", "")
    assert config.max_workers() >= 1

    for bad in ["0", "-2", "four"]:
        monkeypatch.setenv("MMTHERM_THREADS", bad)
        with pytest.raises(ConfigError):
            config.max_workers()

    monkeypatch.delenv("MMTHERM_THREADS")
    assert config.max_workers() >= 1


if __name__ == "__main__":
    import tempfile
    import pathlib

    test_defaults()
    test_flags_normalised()
    with tempfile.TemporaryDirectory() as d:
        test_config_file(pathlib.Path(d))
        test_config_file_errors(pathlib.Path(d))
    test_validation_errors()
