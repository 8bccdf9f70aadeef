#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : __init__.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


# Import density-matrix families and metrics
from        .matrixcore     import  AffineFamily, PauliWord, build_family
from        .matrixcore     import  eigensystem, is_feasible
from        .metric         import  MetricKind, MetricTensor
from        .metric         import  bures_tensor, maximal_tensor, metric_tensor
from        .metric         import  volume_element, volume_function

# Import priors, thermodynamics and information gains
from        .measure        import  Prior, normalize_prior, marginal
from        .measure        import  ConvergenceError, DivergenceError
from        .thermo         import  EnergyObservable, ThermoCurve, thermo_curve
from        .bayes          import  joint_spin_model, expected_gain
from        .bayes          import  sequential_gains, GainReport
from        .scenarios      import  Scenario, get_scenario, validate_scenario

# Import submodules
from        .               import  specfun
from        .               import  scenarios
from        .               import  config

# Import package version
from        .__version__    import  __version__


__author__ = "the mmtherm developers"
__license__ = "GNU v3.0"
__status__ = "Alpha"
