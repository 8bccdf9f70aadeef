#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : test_specfun.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


'''Special functions checked against `scipy.special` as an independent oracle.
'''


import numpy as np
import pytest
import scipy.special as sp

from mmtherm import specfun


def test_order():
    assert specfun.Order(1.5).twice == 3
    assert specfun.Order(2).is_integer
    assert not specfun.Order(0.5).is_integer
    assert specfun.Order(specfun.Order(3)) == specfun.Order(3)
    print(specfun.Order(1.5))

    with pytest.raises(ValueError):
        specfun.Order(0.3)

    with pytest.raises(ValueError):
        specfun.Order(-1.5)


def test_bessel_integer():
    x = np.array([0., 1e-3, 0.5, 1., 5., 14.9, 15.1, 30., 100., 600.])
    for nu in [0, 1, 2, 3]:
        ours = specfun.bessel_i(nu, x)
        ref = sp.ive(nu, x) * np.exp(x)
        np.testing.assert_allclose(ours, ref, rtol = 1e-11, atol = 1e-300)

    assert specfun.bessel_i(0, 0.) == 1.
    assert specfun.bessel_i(1, 0.) == 0.


def test_bessel_half_integer():
    x = np.array([1e-4, 0.05, 0.3, 1., 2.5, 10., 40., 300.])
    for nu in [-0.5, 0.5, 1.5, 2.5]:
        ours = specfun.bessel_i(nu, x)
        ref = sp.ive(nu, x) * np.exp(x)
        np.testing.assert_allclose(ours, ref, rtol = 1e-12)

    # Closed hyperbolic form
    x = 1.7
    assert specfun.bessel_i(0.5, x) == pytest.approx(
        np.sqrt(2 / (np.pi * x)) * np.sinh(x), rel = 1e-14,
    )


def test_bessel_errors():
    with pytest.raises(ValueError):
        specfun.bessel_i(0, -1.)

    with pytest.raises(OverflowError):
        specfun.bessel_i(0, 701.)


def test_bessel_ratio():
    x = np.array([0., 0.1, 1., 10.])
    ratio = specfun.bessel_i_ratio(0, x)
    assert ratio[0] == 0.
    np.testing.assert_allclose(ratio[1:], sp.iv(1, x[1:]) / sp.iv(0, x[1:]),
                               rtol = 1e-12)


def test_erfi_dawson():
    x = np.array([-4., -1., 0., 1e-6, 0.5, 1., 2.9, 3.1, 6., 20.])
    np.testing.assert_allclose(specfun.erfi(x), sp.erfi(x), rtol = 1e-10)
    np.testing.assert_allclose(specfun.dawson(x), sp.dawsn(x), rtol = 1e-10,
                               atol = 1e-300)

    # Odd symmetry
    assert specfun.erfi(-2.) == pytest.approx(-specfun.erfi(2.), rel = 1e-15)


def test_elliptic():
    m = np.array([0., 0.1, 0.5, 8 / 9, 0.99, 0.999999])
    np.testing.assert_allclose(specfun.ellip_k(m), sp.ellipk(m),
                               rtol = 1e-12)
    np.testing.assert_allclose(specfun.ellip_e(m), sp.ellipe(m),
                               rtol = 1e-12)

    assert specfun.ellip_e(1.) == 1.
    assert specfun.ellip_k(0.) == pytest.approx(np.pi / 2, rel = 1e-15)

    with pytest.raises(ValueError):
        specfun.ellip_k(1.)

    with pytest.raises(ValueError):
        specfun.ellip_e(1.5)


def test_langevin_brillouin():
    x = np.array([-3., -1e-3, 0., 1e-5, 5e-3, 0.02, 1., 10.])
    ref = np.where(x == 0., 0., 1 / np.tanh(np.where(x == 0., 1., x)) -
                   1 / np.where(x == 0., 1., x))

    # The direct formula loses digits near zero; compare to the series there
    ref = np.where(np.abs(x) < 1e-2, x / 3 - x**3 / 45, ref)
    np.testing.assert_allclose(specfun.langevin(x), ref, rtol = 1e-9,
                               atol = 1e-15)

    assert specfun.langevin(0.) == 0.
    assert specfun.brillouin_half(0.4) == pytest.approx(np.tanh(0.4))


if __name__ == "__main__":
    test_order()
    test_bessel_integer()
    test_bessel_half_integer()
    test_bessel_errors()
    test_bessel_ratio()
    test_erfi_dawson()
    test_elliptic()
    test_langevin_brillouin()
