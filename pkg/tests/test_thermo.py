#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : test_thermo.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


'''Integration tests for partition functions, energy moments and the
closed-form registry.
'''


import io
import json

import numpy as np
import pytest

from mmtherm import measure
from mmtherm import scenarios
from mmtherm import specfun
from mmtherm import thermo


BETAS = [0.1, 0.5, 1., 2., 5.]


def arcsine_prior(lo, hi):
    return measure.normalize_prior(
        lambda x: 1 / np.sqrt((x[:, 0] - lo) * (hi - x[:, 0])),
        measure.Interval(lo, hi),
    )


def marginal_prior(density, lo, hi):
    return measure.normalize_prior(lambda x: density(x[:, 0]),
                                   measure.Interval(lo, hi))


def check_against(prior, key, betas = BETAS, kind = "minimal", h = 1.):
    closed = thermo.get_closed_form(key, kind)
    curve = thermo.thermo_curve(prior, thermo.EnergyObservable([1.]), betas,
                                h = h, closed = closed)
    rq, re = curve.max_residuals()
    assert rq < 1e-6, (key, rq)
    assert re < 1e-6, (key, re)
    return curve


def test_energy_observable():
    obs = thermo.EnergyObservable([0., 1.], h = 2.)
    print(obs)
    np.testing.assert_allclose(obs.energies(np.array([[0.3, 0.5]])), [[1.]])
    assert obs.components == 1 and obs.num_params == 2
    assert obs.with_scale(3.).h == 3.

    beta, scalar = obs.beta_vector(0.5)
    assert scalar and beta.tolist() == [0.5]

    with pytest.raises(ValueError):
        obs.beta_vector([1., 2.])

    with pytest.raises(ValueError):
        thermo.EnergyObservable([0., 0.])

    with pytest.raises(ValueError):
        thermo.EnergyObservable([1.], h = -1.)

    # Axially reduced regions only accept energies of the first coordinate
    with pytest.raises(ValueError):
        thermo.EnergyObservable([0., 1., 0.]).check_region(measure.Ball(3))

    with pytest.raises(ValueError):
        thermo.EnergyObservable([1.]).check_region(measure.Ball(3))


def test_parse_beta_grid():
    np.testing.assert_allclose(thermo.parse_beta_grid("0:1:0.25"),
                               [0., 0.25, 0.5, 0.75, 1.])
    assert len(thermo.parse_beta_grid("0:10:0.1")) == 101
    np.testing.assert_allclose(thermo.parse_beta_grid("2"), [2.])

    for bad in ["1:0:0.1", "-1:1:1", "a:b:c", "0:1:0", "0:1"]:
        with pytest.raises(ValueError):
            thermo.parse_beta_grid(bad)


def test_arcsine_forms():
    # Equal correlations on two spins: zeta in [-1, 1/3]
    prior = arcsine_prior(-1., 1. / 3.)
    curve = check_against(prior, "s24", BETAS + [20.])
    print(curve)

    # Variance at infinite temperature is the prior variance 2/9
    mom = thermo.tilted_moments(prior, thermo.EnergyObservable([1.]), 0.)
    assert mom.Q == pytest.approx(1., rel = 1e-7)
    assert mom.mean == pytest.approx(-1. / 3., abs = 1e-7)
    assert mom.variance == pytest.approx(2. / 9., rel = 1e-6)

    check_against(arcsine_prior(-1. / 3., 1. / 3.), "s26-3")
    check_against(arcsine_prior(-1. / 3., 1.), "s25-4")
    check_against(arcsine_prior(-0.5, 0.5), "s23a", h = 2.)
    check_against(arcsine_prior(-3 ** -0.5, 3 ** -0.5), "s25-3",
                  kind = "maximal")


def test_triangle_forms():
    # Marginals of the correlated and anticorrelated two-spin triangles
    prior = marginal_prior(lambda z: 1 / np.sqrt(1 - z), -1., 1.)
    curve = check_against(prior, "s21", [0.2, 0.9, 1.1, 3.])
    assert curve["E_num"][0] < 1. / 3.

    anti = marginal_prior(lambda z: 1 / np.sqrt(1 + z), -1., 1.)
    check_against(anti, "s21-anti", [0.2, 0.9, 1.1, 3.])

    # The series and Dawson branches meet at t = 1
    closed = thermo.get_closed_form("s21")
    assert closed.Q(1. - 1e-9) == pytest.approx(closed.Q(1. + 1e-9),
                                                rel = 1e-7)
    assert closed.E(0.) == pytest.approx(1. / 3., rel = 1e-12)


def test_three_level_form():
    prior = marginal_prior(lambda v: 3 * v / (4 * np.sqrt(1 - v)), 0., 1.)
    check_against(prior, "s3", [0.5, 1.9, 2.1, 6.])

    closed = thermo.get_closed_form("s3")
    assert closed.Q(2. - 1e-9) == pytest.approx(closed.Q(2. + 1e-9),
                                                rel = 1e-7)
    assert closed.E(0.) == pytest.approx(0.8, rel = 1e-12)


def test_ball_forms():
    # (1 - x^2)^(nu - 1/2) marginals of balls
    for key, power in [("bloch-min", 0.5), ("quat-min", 1.5),
                       ("quat-max", 1.)]:
        prior = marginal_prior(lambda x: (1 - x * x) ** power, -1., 1.)
        check_against(prior, key)

    flat = marginal_prior(lambda x: np.ones_like(x), -1., 1.)
    check_against(flat, "s22")
    check_against(flat, "bloch-max")

    # Printed forms keep their infinite-temperature constants
    single = thermo.get_closed_form("single-min")
    assert single.printed_Q(0.) == pytest.approx(np.pi / 2)
    assert thermo.get_closed_form("quat-min").printed_Q(0.) == \
        pytest.approx(3 * np.pi / 32)


def test_closed_form_registry():
    for key in thermo.CLOSED_FORMS:
        closed = thermo.get_closed_form(key)
        assert closed.Q(0.) == pytest.approx(1., rel = 1e-12), key
        assert closed.to_dict()["key"] == key

    # Maximal-route override and fallback
    assert thermo.get_closed_form("s25-3", "maximal").formula == \
        "Q = I0(t / sqrt 3)"
    assert thermo.get_closed_form("s24", "maximal") is \
        thermo.get_closed_form("s24")

    brillouin = thermo.get_closed_form("brillouin")
    assert brillouin.Q(0.7) == pytest.approx(np.cosh(0.7))
    assert brillouin.E(0.7, h = 2.) == pytest.approx(-2 * np.tanh(1.4))
    assert thermo.closed_form("langevin", 0.) == 1.
    assert thermo.closed_form_energy("s26-3", 0.) == 0.

    np.testing.assert_allclose(
        thermo.closed_form("s24", np.array([0., 1.])),
        [1., np.exp(1. / 3.) * specfun.bessel_i(0, 2. / 3.)],
        rtol = 1e-14,
    )

    with pytest.raises(KeyError):
        thermo.get_closed_form("s99")

    with pytest.raises(ValueError):
        thermo.closed_form("s24", -1.)


def test_thermo_curve_output():
    prior = arcsine_prior(-1. / 3., 1. / 3.)
    curve = thermo.thermo_curve(prior, thermo.EnergyObservable([1.]),
                                "0:1:0.5", meta = dict(scenario = "s26-3"))
    assert len(curve) == 3
    assert not curve.has_closed_form
    assert curve.max_residuals() == (0., 0.)
    assert np.isnan(curve["Q_closed"]).all()

    text = curve.to_csv()
    assert "# scenario: s26-3" in text
    assert text.splitlines()[2].startswith("beta,Q_num,Q_closed")

    doc = json.loads(curve.to_json())
    assert doc["fields"] == thermo.ThermoCurve.columns
    assert doc["rows"][0]["Q_num"] == pytest.approx(1.)

    buf = io.StringIO()
    curve.to_csv(buf)
    assert buf.getvalue() == text


def test_partition_grid():
    # Independent fields on the square: product of two arcsines
    prior = measure.normalize_prior(
        lambda p: 1 / np.sqrt((1 - 4 * p[:, 0] ** 2) * (1 - 4 * p[:, 1] ** 2)),
        measure.Box([(-0.5, 0.5), (-0.5, 0.5)]),
    )
    obs = thermo.EnergyObservable([[1., 0.], [0., 1.]])
    grid = thermo.partition_grid(prior, obs, [0.5, 2.], [0., 1.],
                                 closed = thermo.independent_fields_q)
    print(grid)

    assert len(grid) == 4
    assert grid["residual_Q"].max() < 1e-6

    # Vector beta gives one mean per component
    mom = thermo.tilted_moments(prior, obs, [1., 0.])
    assert mom.mean[1] == pytest.approx(0., abs = 1e-8)
    assert mom.mean[0] < 0.

    with pytest.raises(ValueError):
        thermo.partition_grid(prior, thermo.EnergyObservable([1., 1.]),
                              [1.], [1.])


def test_log_q_slope():
    prior = arcsine_prior(-1., 1. / 3.)
    obs = thermo.EnergyObservable([1.])
    mean = thermo.energy_mean(prior, obs, 1.)
    assert thermo.log_q_slope(prior, obs, 1.) == pytest.approx(mean,
                                                               abs = 1e-6)
    assert thermo.energy_variance(prior, obs, 1.) > 0.
    assert thermo.partition(prior, obs, 1.) == pytest.approx(
        thermo.closed_form("s24", 1.), rel = 1e-6,
    )


def one_dimensional_priors():
    # Scenario priors plus the energy marginals of s21 and s3
    out = []
    for sid in ["s24", "s25-4", "s25-6", "s26-3", "s23a", "single-min"]:
        sc = scenarios.get_scenario(sid)
        out.append((sid, sc.prior(tol = 1e-10), sc.energy))

    s21 = measure.normalize_prior(
        lambda x: 1. / (2. * np.sqrt(2.) * np.sqrt(1. - x[:, 0])),
        measure.Interval(-1., 1.), 1e-10,
    )
    s3 = measure.normalize_prior(
        lambda v: 3. * v[:, 0] / (4. * np.sqrt(1. - v[:, 0])),
        measure.Interval(0., 1.), 1e-10,
    )
    out.append(("s21 marginal", s21, thermo.EnergyObservable([1.])))
    out.append(("s3 marginal", s3, thermo.EnergyObservable([1.])))
    return out


def test_log_q_slope_scenarios():
    # -d log Q / d beta matches the moment-ratio mean energy
    for name, prior, obs in one_dimensional_priors():
        for bh in [0.5, 1., 2.]:
            beta = bh / obs.h
            slope = thermo.log_q_slope(prior, obs, beta, tol = 1e-10)
            mean = thermo.energy_mean(prior, obs, beta, tol = 1e-10)
            print(name, bh, slope, mean)
            assert abs(slope - mean) < 1e-5, (name, bh)


def test_energy_slope_is_variance():
    # dE / d beta = -Var, by central differences
    step = 1e-3
    for name, prior, obs in one_dimensional_priors():
        for beta in [0.5, 1., 2.]:
            lo = thermo.energy_mean(prior, obs, beta - step, tol = 1e-10)
            hi = thermo.energy_mean(prior, obs, beta + step, tol = 1e-10)
            var = thermo.energy_variance(prior, obs, beta, tol = 1e-10)
            slope = (hi - lo) / (2. * step)
            print(name, beta, slope, -var)
            assert abs(slope + var) < 1e-4, (name, beta)


def test_equivalent_spin_counts():
    # Five spins share the three-spin range and six spins the two-spin one
    betas = np.linspace(0., 5., 11)
    for sid, same in [("s25-5", "s25-3"), ("s25-6", "s24")]:
        a = scenarios.get_scenario(sid)
        b = scenarios.get_scenario(same)
        assert a.region.to_dict() == b.region.to_dict()

        ca = thermo.thermo_curve(a.prior(), a.energy, betas)
        cb = thermo.thermo_curve(b.prior(), b.energy, betas)
        for col in ["Q_num", "E_num", "Var_num"]:
            np.testing.assert_allclose(ca[col], cb[col], rtol = 1e-7,
                                       atol = 1e-7)


def test_four_spin_infinite_temperature():
    sc = scenarios.get_scenario("s25-4")
    assert sc.moment_targets == (1. / 3., 2. / 9.)

    mom = thermo.tilted_moments(sc.prior(), sc.energy, 0.)
    print(mom)
    assert mom.mean == pytest.approx(1. / 3., abs = 1e-6)
    assert mom.variance == pytest.approx(2. / 9., abs = 1e-6)



if __name__ == "__main__":
    test_energy_observable()
    test_parse_beta_grid()
    test_arcsine_forms()
    test_triangle_forms()
    test_three_level_form()
    test_ball_forms()
    test_closed_form_registry()
    test_thermo_curve_output()
    test_partition_grid()
    test_log_q_slope()
    test_log_q_slope_scenarios()
    test_energy_slope_is_variance()
    test_equivalent_spin_counts()
    test_four_spin_infinite_temperature()
