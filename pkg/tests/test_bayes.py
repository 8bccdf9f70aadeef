#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : test_bayes.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


'''Integration tests for joint spin measurements, posteriors and
Kullback-Leibler information gains.
'''


import json

import numpy as np
import pytest

from mmtherm import bayes
from mmtherm import matrixcore as mc
from mmtherm import scenarios


def correlated_prior():
    sc = scenarios.get_scenario("s21")
    return sc.prior("minimal"), bayes.joint_spin_model(sc.family)


def test_spin_projector():
    up, down = bayes.spin_projector(3)
    np.testing.assert_allclose(up, np.diag([1., 0.]))
    np.testing.assert_allclose(down, np.diag([0., 1.]))

    up2, _ = bayes.spin_projector([0., 0., 2.])
    np.testing.assert_allclose(up2, up)

    # Projectors along (1, 1, 1) / sqrt(3) are rank one and complete
    up, down = bayes.spin_projector(np.ones(3))
    np.testing.assert_allclose(up @ up, up, atol = 1e-15)
    np.testing.assert_allclose(up + down, np.eye(2), atol = 1e-15)

    with pytest.raises(ValueError):
        bayes.spin_projector(4)

    with pytest.raises(ValueError):
        bayes.spin_projector([1., 0.])


def test_joint_spin_model():
    family = mc.build_family([
        ("xi", [((3, 0), 1.), ((0, 3), 1.)]),
        ("zeta", [((3, 3), 1.)]),
    ])
    model = bayes.joint_spin_model(family)
    print(model)

    assert model.labels == ("uu", "ud", "du", "dd")
    assert model.outcome_sets() == ["A", "D"]
    assert model.outcome_sets(grouped = False) == list(model.labels)
    assert model.dependent_axes() == (0, 1)

    # Agreement and disagreement depend on zeta only
    points = np.array([[0., 1.], [0.2, 0.1], [-0.3, -0.5]])
    agree = model.likelihood("A")
    disagree = model.likelihood("D")
    np.testing.assert_allclose(disagree(points), (1 - points[:, 1]) / 2)
    np.testing.assert_allclose(agree(points) + disagree(points), 1.)
    assert agree.axes == (1,)
    assert bayes.outcome_likelihood(model, "uu").axes == (0, 1)

    with pytest.raises(KeyError):
        model.likelihood("X")

    with pytest.raises(ValueError):
        bayes.joint_spin_model(mc.build_family([("x", [((3,), 1.)])]))

    with pytest.raises(ValueError):
        bayes.MeasurementModel(family, [("all", np.eye(4) / 2)])

    with pytest.raises(ValueError):
        bayes.MeasurementModel(family, [("all", np.eye(4))],
                               groups = dict(G = ["none"]))


def test_posterior_updates():
    prior, model = correlated_prior()

    post, evidence = bayes.posterior(prior, model.likelihood("D"))
    print(post)
    assert evidence == pytest.approx(1. / 3., rel = 1e-6)
    assert post.outcomes == ("D",)
    assert post.likelihood_axes() == (1,)
    assert post.normalization_residual() < 1e-6

    # Chained updates keep the original prior as their base
    post2, evidence2 = bayes.posterior(post, model.likelihood("A"))
    assert post2.base is prior
    assert post2.outcomes == ("D", "A")
    assert 0. < evidence2 < 1.

    with pytest.raises(ZeroDivisionError):
        bayes.posterior(prior, lambda p: np.zeros(len(p)))


def test_correlated_gains():
    prior, model = correlated_prior()
    report = bayes.expected_gain(prior, model)
    print(report.to_frame())

    assert report.gain("D") == pytest.approx(.431946, abs = 2e-5)
    assert report.gain("A") == pytest.approx(.125093, abs = 2e-5)
    assert report.evidence_total == pytest.approx(1., abs = 1e-8)
    assert report.expected_gain == pytest.approx(.2274, abs = 1e-4)

    # The quoted expected gain weights each outcome by the other's evidence
    assert report.swapped_expected_gain() == pytest.approx(.329662,
                                                          abs = 2e-5)
    assert report.match(.329662) == ["swapped_evidences"]
    assert "ungrouped" in report.interpretations()

    # Marginal and full KL agree when likelihoods depend on zeta only
    post, _ = bayes.posterior(prior, model.likelihood("D"))
    assert bayes.kl_gain_marginal(post, prior, 1) == pytest.approx(
        bayes.kl_gain(post, prior), abs = 1e-5,
    )

    # A posterior on the s21 triangle against the s21-anti prior
    anti = scenarios.get_scenario("s21-anti").prior("minimal")
    assert anti.region is not prior.region and anti.dim == prior.dim
    with pytest.raises(ValueError):
        bayes.kl_gain(post, anti)

    doc = json.loads(report.to_json())
    assert doc["expected_gain_nats"] == pytest.approx(report.expected_gain)
    assert len(doc["ungrouped"]["outcomes"]) == 4

    with pytest.raises(KeyError):
        report.gain("X")


def test_sequential_gains():
    prior, model = correlated_prior()
    steps = bayes.sequential_gains(prior, model, "ad")

    assert [s.label for s in steps] == ["A", "D"]
    assert steps[0].gain == pytest.approx(.125093, abs = 2e-5)
    assert steps[0].evidence == pytest.approx(2. / 3., rel = 1e-6)
    assert steps[1].gain == pytest.approx(.542771, abs = 2e-5)
    assert steps[1].to_dict()["label"] == "D"

    assert bayes.parse_sequence(["uu", "dd"], model) == ["uu", "dd"]
    for bad in ["AX", "", "A D"]:
        with pytest.raises(ValueError):
            bayes.parse_sequence(bad, model)


def test_gain_table():
    sc = scenarios.get_scenario("s24")
    prior = sc.prior("minimal")
    model = sc.measurement_model()

    table = bayes.gain_table(prior, model, depth = 2)
    print(table)
    assert len(table) == 6
    assert table[table.step == 2]["path_probability"].sum() == \
        pytest.approx(1., abs = 1e-8)

    gains = dict(zip(table["sequence"], table["gain_nats"]))
    assert gains["A"] == pytest.approx(.306853, abs = 2e-5)
    assert gains["D"] == pytest.approx(.0646381, abs = 2e-5)
    assert gains["DA"] == pytest.approx(.427868, abs = 2e-5)

    report = bayes.expected_gain(prior, model)
    assert report.expected_gain == pytest.approx(.145376, abs = 2e-5)


def test_report_errors():
    report = bayes.GainReport([
        dict(label = k, evidence = 1. / 3., gain_nats = 0.1) for k in "abc"
    ])
    assert report.expected_gain == pytest.approx(0.1)
    assert report.ungrouped_expected_gain is None
    assert "swapped_evidences" not in report.interpretations()

    with pytest.raises(ValueError):
        report.swapped_expected_gain()


if __name__ == "__main__":
    test_spin_projector()
    test_joint_spin_model()
    test_posterior_updates()
    test_correlated_gains()
    test_sequential_gains()
    test_gain_table()
    test_report_errors()
