#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : config.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


'''Run configuration for the command-line interface: defaults, TOML config
files and environment variables, merged with the precedence command-line
flags > config file > defaults.
'''


import  textwrap

import  toml

from    .metric     import  MetricKind
from    .thermo     import  parse_beta_grid
from    .utilities  import  autorepr, worker_count


# Largest quadrature tolerance accepted from users
MAX_TOL = 1e-2

# Smallest marginal grid accepted from users
MIN_GRID = 5




class ConfigError(ValueError):
    '''Invalid configuration value, config file or environment variable.'''
    pass




@autorepr
class RunConfig:
    '''Settings of one command-line run.

    Attributes
    ----------
    scenario : str
        Registered scenario id.

    metric : str or None
        "minimal" or "maximal"; None selects the scenario's default kind.

    beta : str
        Inverse temperature grid ``"start:stop:step"`` (stop inclusive) or a
        single value.

    h : float
        Field scale.

    format : {"csv", "json"}

    out : str or None
        Output path; None writes to stdout.

    tol : float or None
        Quadrature tolerance; None uses the per-dimension defaults.

    grid : int
        Number of marginal grid points.

    shrink_limit : bool
        Use the shrink-limit marginal for improper priors.

    sequence : str or None
        Outcome sequence over group names, e.g. "AD".

    axis : int or None
        Marginal axis; None selects the energy axis.

    seed : int
        Seed of the random interior points used by `compare`.

    verbose : int
        0 silent, 1 banners and summaries, 2 per-item progress.
    '''

    defaults = dict(
        scenario = None,
        metric = None,
        beta = "0:10:0.1",
        h = 1.,
        format = "csv",
        out = None,
        tol = None,
        grid = 201,
        shrink_limit = False,
        sequence = None,
        axis = None,
        seed = 20,
        verbose = 0,
    )

    def __init__(self, **kwargs):
        unknown = set(kwargs) - set(self.defaults)
        if unknown:
            raise ConfigError(textwrap.fill((
                f"Unknown configuration keys {sorted(unknown)}. Valid keys: "
                f"{sorted(self.defaults)}."
            )))

        for key, default in self.defaults.items():
            setattr(self, key, kwargs.get(key, default))


    def validate(self):
        '''Check and normalise every field; returns `self`.

        Raises
        ------
        ConfigError
        '''

        try:
            self.h = float(self.h)
            self.grid = int(self.grid)
            self.verbose = int(self.verbose)
            self.seed = int(self.seed)
            self.shrink_limit = bool(self.shrink_limit)
            if self.tol is not None:
                self.tol = float(self.tol)
            if self.axis is not None:
                self.axis = int(self.axis)
            if self.metric is not None:
                self.metric = MetricKind.parse(self.metric).value
        except (TypeError, ValueError) as err:
            raise ConfigError(str(err)) from err

        if not self.h > 0.:
            raise ConfigError(f"The field scale h must be positive; got "
                              f"{self.h}.")

        if self.tol is not None and not 0. < self.tol <= MAX_TOL:
            raise ConfigError(textwrap.fill((
                f"The tolerance must lie in (0, {MAX_TOL}]; got {self.tol}."
            )))

        if self.grid < MIN_GRID:
            raise ConfigError(f"The grid needs at least {MIN_GRID} points; "
                              f"got {self.grid}.")

        if self.format not in ("csv", "json"):
            raise ConfigError(f"Unknown output format `{self.format}`; use "
                              "'csv' or 'json'.")

        self.beta_grid()
        return self


    def beta_grid(self):
        '''The inverse temperatures of `beta` as an array.'''
        try:
            return parse_beta_grid(self.beta)
        except ValueError as err:
            raise ConfigError(str(err)) from err


    def to_dict(self):
        return {key: getattr(self, key) for key in self.defaults}




def read_config_file(path):
    '''Read a TOML config file of ``key = value`` lines into a dict.

    Raises
    ------
    ConfigError
        If the file is missing, malformed or contains unknown keys.

    Examples
    --------
    A config file for ``mmtherm thermo --config run.toml``:

    ::

        scenario = "s24"
        beta = "0:10:0.1"
        h = 2.0
        format = "json"
    '''

    try:
        with open(path) as f:
            values = toml.load(f)
    except FileNotFoundError as err:
        raise ConfigError(f"Config file `{path}` not found.") from err
    except toml.TomlDecodeError as err:
        raise ConfigError(f"Malformed config file `{path}`: {err}") from err

    values = {key.replace("-", "_"): v for key, v in values.items()}
    unknown = set(values) - set(RunConfig.defaults)
    if unknown:
        raise ConfigError(textwrap.fill((
            f"Unknown keys {sorted(unknown)} in config file `{path}`."
        )))
    return values




def load_config(path = None, **flags):
    '''Merge defaults, an optional config file and command-line flags.

    Flags that are None are treated as not given, so they never override
    the config file.

    Examples
    --------
    >>> from mmtherm.config import load_config
    >>> cfg = load_config(scenario = "s24", h = None)
    >>> cfg.scenario, cfg.h
    ('s24', 1.0)
    '''

    values = {}
    if path is not None:
        values.update(read_config_file(path))
    values.update({k: v for k, v in flags.items() if v is not None})
    return RunConfig(**values).validate()




def max_workers(env = "MMTHERM_THREADS"):
    '''Worker process cap from the environment.

    Raises
    ------
    ConfigError
        If the environment variable is not a positive integer.
    '''

    try:
        return worker_count(env)
    except ValueError as err:
        raise ConfigError(str(err)) from err
