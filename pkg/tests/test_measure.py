#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : test_measure.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


'''Integration tests for regions, tanh-sinh quadrature, priors and marginals.
'''


import io

import numpy as np
import pytest

from mmtherm import matrixcore as mc
from mmtherm import measure


def ones(points):
    return np.ones(len(points))


def arcsine(points):
    return 1 / np.sqrt(1 - points[:, 0] ** 2)


def ellipse_volume(points):
    # Minimal volume element of the perpendicular two-spin family, up to a
    # constant: 1 / sqrt(1 - 4 xi^2 - zeta^2)
    xi, zeta = points[:, 0], points[:, 1]
    return 1 / np.sqrt(1 - 4 * xi ** 2 - zeta ** 2)


def test_interval_quadrature():
    res = measure.integrate_full(lambda x: x[:, 0] ** -0.5,
                                 measure.Interval(0., 1.))
    print(res)
    assert res.value == pytest.approx(2., rel = 1e-10)
    assert not res.divergent
    assert res.evaluations > 0

    # Inverse-sqrt singularities at both ends
    assert measure.integrate(arcsine, measure.Interval(-1., 1.)) == \
        pytest.approx(np.pi, rel = 1e-7)

    # Vector-valued integrands
    both = measure.integrate(lambda x: np.column_stack([ones(x), x[:, 0]]),
                             measure.Interval(0., 1.))
    np.testing.assert_allclose(both, [1., 0.5], rtol = 1e-10)


def test_divergence_detection():
    with pytest.raises(measure.DivergenceError) as err:
        measure.integrate_full(lambda x: 1 / x[:, 0], measure.Interval(0., 1.),
                               check_divergence = True)
    assert err.value.band_ratio >= measure.DIVERGENCE_RATIO

    with pytest.raises(measure.DivergenceError):
        measure.normalize_prior(lambda x: 1 / (1 - x[:, 0] ** 2),
                                measure.Interval(-1., 1.))

    # Convergent boundary singularities are not flagged
    res = measure.integrate_full(arcsine, measure.Interval(-1., 1.),
                                 check_divergence = True)
    assert res.band_ratio < measure.DIVERGENCE_RATIO


def test_integrand_errors():
    with pytest.raises(ValueError):
        measure.integrate(lambda x: np.full(len(x), np.nan),
                          measure.Interval(0., 1.))

    with pytest.raises(ValueError):
        measure.integrate(lambda x: np.ones(3), measure.Interval(0., 1.))

    with pytest.raises(ValueError):
        measure.Interval(1., 0.)


def test_two_dimensional_regions():
    # Triangle of the correlated two-spin family
    tri = measure.Triangle([(0., -1.), (-1., 1.), (1., 1.)])
    assert tri.area() == 2.
    assert measure.integrate(ones, tri) == pytest.approx(2., rel = 1e-10)
    assert measure.integrate(lambda p: p[:, 1], tri) == \
        pytest.approx(2. / 3., rel = 1e-6)

    np.testing.assert_array_equal(tri.contains([[0., 0.], [0.9, 0.]]),
                                  [True, False])
    sub = tri.slice(1, 0.)
    assert (sub.a, sub.b) == pytest.approx((-0.5, 0.5))

    same = measure.Triangle.from_inequalities([
        (2., -1., 1.), (-2., -1., 1.), (0., 1., 1.),
    ])
    assert same.area() == pytest.approx(2.)

    # Ellipse 4 xi^2 + zeta^2 <= 1
    ell = measure.Ellipse(np.diag([4., 1.]))
    assert ell.area() == pytest.approx(np.pi / 2)
    assert measure.integrate(ones, ell) == pytest.approx(np.pi / 2, rel = 1e-7)
    assert measure.integrate(ellipse_volume, ell) == \
        pytest.approx(np.pi, rel = 1e-6)
    np.testing.assert_allclose(ell.bounds(), [[-0.5, 0.5], [-1., 1.]])

    axis = measure.Ellipse.axis_aligned((0.5, 1.))
    np.testing.assert_allclose(axis.form, ell.form)

    # Product of two arcsines
    box = measure.Box([(-0.5, 0.5), (-0.5, 0.5)])
    val = measure.integrate(
        lambda p: 1 / np.sqrt((1 - 4 * p[:, 0] ** 2) * (1 - 4 * p[:, 1] ** 2)),
        box,
    )
    assert val == pytest.approx(np.pi ** 2 / 4, rel = 1e-6)

    with pytest.raises(ValueError):
        measure.Triangle([(0., 0.), (1., 1.), (2., 2.)])

    with pytest.raises(ValueError):
        measure.Ellipse(-np.eye(2))


def test_balls_and_cones():
    ball = measure.Ball(3)
    assert ball.area() == pytest.approx(4 * np.pi / 3)
    assert measure.integrate(lambda p: p[:, 0] ** 2, ball) == \
        pytest.approx(4 * np.pi / 15, rel = 1e-6)

    radial = measure.Ball(3, symmetry = "radial")
    val = measure.integrate(
        lambda p: 1 / np.sqrt(1 - (p ** 2).sum(axis = 1)), radial,
    )
    assert val == pytest.approx(np.pi ** 2, rel = 1e-7)

    # Slices orthogonal to the axis are radial balls
    sub = ball.slice(0, 0.6)
    assert sub.dim == 2 and sub.radius == pytest.approx(0.8)

    cone = measure.Cone(3)
    assert cone.area() == pytest.approx(np.pi / 3)
    assert measure.integrate(ones, cone) == pytest.approx(np.pi / 3, rel = 1e-6)
    assert cone.slice(0, 0.5).radius == pytest.approx(0.5)

    shrunk = ball.shrink(0.5)
    assert shrunk.radius == 0.5

    with pytest.raises(ValueError):
        measure.Ball(3, symmetry = "none")

    with pytest.raises(ValueError):
        cone.slice(1, 0.)


def test_boundary_margins():
    # Closed-form weights only go non-finite within the edge margin
    for region, weight in [
        (measure.Ball(3), lambda p: (1 - (p ** 2).sum(axis = 1)) ** -1.5),
        (measure.Ball(2), lambda p: (1 - (p ** 2).sum(axis = 1)) ** -0.5),
        (measure.Ellipse(np.diag([4., 1.])), ellipse_volume),
        (measure.Cone(4), lambda p: 1 / np.sqrt(
            p[:, 0] ** 2 - (p[:, 1:] ** 2).sum(axis = 1))),
    ]:
        rule = region.rule(7)
        with np.errstate(all = "ignore"):
            bad = ~np.isfinite(weight(rule.points))
        assert not (bad & (rule.margin >= measure.EDGE_MARGIN)).any(), region

    # Integrable weights are not flagged; non-integrable ones are
    ball = measure.Ball(3)
    assert not measure.integrate_full(
        lambda p: (1 - (p ** 2).sum(axis = 1)) ** -0.5, ball,
    ).divergent
    with pytest.raises((measure.DivergenceError, measure.ConvergenceError)):
        measure.normalize_prior(
            lambda p: (1 - (p ** 2).sum(axis = 1)) ** -1.5, ball,
        )


def test_shrink_limit_marginal():
    # Uniform limit of (1 - r^2)^(-3/2) on the unit ball along any axis
    table = measure.shrink_limit_marginal(
        lambda p: (1 - (p ** 2).sum(axis = 1)) ** -1.5, measure.Ball(3),
        grid_size = 21,
    )
    print(table.meta)
    np.testing.assert_allclose(table.density, 0.5, atol = 1e-4)
    assert float(table.meta["residual"]) < 1e-4

    # Proper weights reproduce the ordinary marginal
    prior = measure.normalize_prior(ellipse_volume,
                                    measure.Ellipse(np.diag([4., 1.])))
    table = measure.shrink_limit_marginal(ellipse_volume, prior.region,
                                          axis = 1, grid_size = 11)
    np.testing.assert_allclose(table.density, 0.5, atol = 1e-5)

    with pytest.raises(ValueError):
        measure.shrink_limit_marginal(ellipse_volume, prior.region,
                                      R_sequence = [0.9, 0.99, 0.999])


def test_implicit_region():
    family = mc.build_family([("zeta", [((1, 2), 1.), ((2, 1), 1.)])])
    region = measure.Implicit(family, [(-1., 1.)])
    print(region)

    # Both ends are located by root finding on the smallest eigenvalue
    lo, hi = region.axis_range(0)
    assert lo == pytest.approx(-0.5, abs = 1e-14)
    assert hi == pytest.approx(0.5, abs = 1e-14)
    assert region.to_dict()["resolved"] == pytest.approx([lo, hi])
    assert measure.BRENT_RTOL >= 4 * np.finfo(float).eps

    val = measure.integrate(lambda x: 1 / np.sqrt(1 - 4 * x[:, 0] ** 2),
                            region)
    assert val == pytest.approx(np.pi / 2, rel = 1e-7)

    # The registry builds implicit regions when the package is imported
    import mmtherm
    s23a = mmtherm.get_scenario("s23a")
    assert isinstance(s23a.region, measure.Implicit)
    assert s23a.region.axis_range(0) == pytest.approx((-0.5, 0.5),
                                                      abs = 1e-14)

    with pytest.raises(ValueError):
        measure.Implicit(family, [(0.6, 1.)])


def test_normalize_prior():
    prior = measure.normalize_prior(arcsine, measure.Interval(-1., 1.),
                                    name = "arcsine")
    print(prior)

    assert prior.Z == pytest.approx(np.pi, rel = 1e-7)
    assert prior(0.) == pytest.approx(1 / np.pi, rel = 1e-7)
    assert prior.normalization_residual() < 1e-8
    assert prior.expectation(lambda x: x[:, 0] ** 2) == \
        pytest.approx(0.5, rel = 1e-7)

    # Vectorised evaluation on 1D regions
    assert prior(np.array([0., 0.5])).shape == (2,)

    with pytest.raises(ValueError):
        measure.Prior(measure.Interval(0., 1.), ones, 0.)


def test_conditional_slice():
    ell = measure.Ellipse(np.diag([4., 1.]))
    cond = measure.conditional_slice_prior(ellipse_volume, ell, 0, 0.)
    assert cond.Z == pytest.approx(np.pi, rel = 1e-7)
    assert cond(0.3) == pytest.approx(1 / (np.pi * np.sqrt(1 - 0.09)),
                                      rel = 1e-7)

    with pytest.raises(ValueError):
        measure.conditional_slice_prior(ellipse_volume, ell, 0, 0.7)


def test_marginals():
    prior = measure.normalize_prior(ellipse_volume,
                                    measure.Ellipse(np.diag([4., 1.])))

    # Uniform marginals along both axes
    density = measure.marginal_density(prior, axis = 1)
    np.testing.assert_allclose(density(np.array([-0.9, 0., 0.4])), 0.5,
                               rtol = 1e-6)
    assert density(1.5) == 0.

    xi = measure.marginal_density(prior, axis = 0)
    assert xi(0.25) == pytest.approx(1., rel = 1e-6)

    tab = measure.marginal(prior, axis = 1, grid_size = 21)
    print(tab)
    np.testing.assert_allclose(tab.density, 0.5, rtol = 1e-6)
    assert abs(tab.integrate() - 1.) < 1e-6
    assert float(tab.meta["residual"]) < 1e-6
    assert tab.meta["axis"] == 1


def test_tabulated():
    x = measure.Tabulated1D.grid((0., 1.), 201)
    assert x[0] == pytest.approx(0.0025)

    tab = measure.Tabulated1D(x, 2 * x, (0., 1.), meta = dict(source = "ramp"))
    assert tab(0.5) == pytest.approx(1.)
    assert tab(1.5) == 0.
    assert tab.integrate() == pytest.approx(1., rel = 1e-6)
    assert tab.expectation(lambda p: p[:, 0]) == \
        pytest.approx(2. / 3., rel = 1e-6)

    buf = io.StringIO()
    tab.to_csv(buf)
    assert buf.getvalue().startswith("# support: 0.0 1.0")

    buf.seek(0)
    again = measure.Tabulated1D.from_csv(buf)
    assert again.support == (0., 1.)
    assert again.meta["source"] == "ramp"
    np.testing.assert_allclose(again.density, tab.density, rtol = 1e-15)

    prior = measure.TabulatedPrior(tab, name = "ramp")
    assert prior.Z == pytest.approx(1., rel = 1e-8)
    assert prior.expectation(lambda p: p[:, 0]) == \
        pytest.approx(2. / 3., rel = 1e-6)
    assert prior(0.25) == pytest.approx(0.5, rel = 1e-7)


if __name__ == "__main__":
    test_interval_quadrature()
    test_divergence_detection()
    test_integrand_errors()
    test_two_dimensional_regions()
    test_balls_and_cones()
    test_boundary_margins()
    test_shrink_limit_marginal()
    test_implicit_region()
    test_normalize_prior()
    test_conditional_slice()
    test_marginals()
    test_tabulated()
