#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : specfun.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


'''Self-contained special functions used by the closed-form partition
function registry: modified Bessel functions of the first kind of integer
and half-integer order, the imaginary error function and Dawson's integral,
complete elliptic integrals in the parameter convention (``m = k**2``), and
the Langevin and spin-1/2 Brillouin functions.

Every function accepts scalars or NumPy arrays; scalars give Python floats.
The scalar kernels are compiled with ``numba`` if it is installed.
'''


import  math
import  textwrap
from    fractions   import  Fraction

import  numpy       as      np

from    .utilities  import  njit


# Argument above which the integer-order Bessel functions switch from the
# power series to the large-argument asymptotic expansion
BESSEL_SWITCH = 15.0

# Largest argument accepted by `bessel_i`; exp(700) is still representable
BESSEL_MAX_X = 700.0

# |x| at which `erfi` switches from its Maclaurin series to Dawson's integral
ERFI_SWITCH = 3.0
ERFI_MAX_X = 26.0




class Order:
    '''Order of a modified Bessel function, either an integer or a
    half-integer, stored exactly as twice its value.

    Parameters
    ----------
    nu : int, float, fractions.Fraction or Order
        The order; ``2 * nu`` must be an integer and ``nu >= -1/2``.

    Examples
    --------
    >>> from mmtherm.specfun import Order
    >>> Order(1.5)
    Order(3/2)
    >>> Order(2).is_integer
    True
    '''

    __slots__ = ("twice",)

    def __init__(self, nu):
        if isinstance(nu, Order):
            self.twice = nu.twice
            return

        twice = Fraction(nu).limit_denominator(4) * 2
        if twice.denominator != 1 or abs(float(twice) - 2 * float(nu)) > 1e-12:
            raise ValueError(textwrap.fill((
                "Only integer and half-integer Bessel orders are supported. "
                f"Received `nu = {nu}`."
            )))

        if twice < -1:
            raise ValueError(textwrap.fill((
                f"Bessel orders must satisfy `nu >= -1/2`. Received `{nu}`."
            )))

        self.twice = int(twice)


    @property
    def value(self):
        return self.twice / 2


    @property
    def is_integer(self):
        return self.twice % 2 == 0


    def __eq__(self, other):
        return isinstance(other, Order) and other.twice == self.twice


    def __hash__(self):
        return hash(("Order", self.twice))


    def __repr__(self):
        if self.is_integer:
            return f"Order({self.twice // 2})"
        return f"Order({self.twice}/2)"




@njit(cache = True)
def _bessel_series(nu, x):
    # I_nu(x) = sum (x/2)^(2k+nu) / (k! Gamma(k+nu+1)); all terms positive
    if x == 0.0:
        if nu == 0.0:
            return 1.0
        if nu > 0.0:
            return 0.0
        return math.inf

    half = 0.5 * x
    quarter = half * half
    term = math.exp(nu * math.log(half) - math.lgamma(nu + 1.0))
    total = term

    k = 0
    while True:
        k += 1
        term *= quarter / (k * (k + nu))
        total += term
        if term < 1e-17 * total or k > 500:
            break

    return total




@njit(cache = True)
def _bessel_asymptotic(nu, x):
    # I_nu(x) ~ e^x / sqrt(2 pi x) sum (-1)^k a_k(nu) / x^k, truncated at the
    # smallest term
    mu = 4.0 * nu * nu
    term = 1.0
    total = 1.0

    for k in range(1, 200):
        odd = 2.0 * k - 1.0
        new = -term * (mu - odd * odd) / (8.0 * k * x)
        if abs(new) >= abs(term):
            break

        term = new
        total += term
        if abs(term) < 1e-17 * abs(total):
            break

    return math.exp(x) / math.sqrt(2.0 * math.pi * x) * total




def bessel_i_series(nu, x):
    '''Power series branch of the modified Bessel function :math:`I_\\nu(x)`,
    exposed for branch cross-validation.
    '''
    return float(_bessel_series(Order(nu).value, float(x)))




def bessel_i_asymptotic(nu, x):
    '''Large-argument asymptotic branch of :math:`I_\\nu(x)`, exposed for
    branch cross-validation; only meaningful for ``x`` of order 10 or larger.
    '''
    if x <= 0:
        raise ValueError("The asymptotic branch requires `x > 0`.")
    return float(_bessel_asymptotic(Order(nu).value, float(x)))




def _bessel_half_integer(twice, x):
    # Closed hyperbolic forms for I_{-1/2}, I_{1/2}, then upward recurrence
    # I_{v+1} = I_{v-1} - (2v / x) I_v
    scale = math.sqrt(2.0 / (math.pi * x))
    prev = scale * math.cosh(x)         # I_{-1/2}
    curr = scale * math.sinh(x)         # I_{1/2}

    if twice == -1:
        return prev

    nu = 0.5
    while 2 * nu < twice:
        prev, curr = curr, prev - (2.0 * nu / x) * curr
        nu += 1.0

    return curr




def _bessel_scalar(order, x):
    if not np.isfinite(x) or x < 0:
        raise ValueError(textwrap.fill((
            f"The Bessel argument must be finite and non-negative. Got `{x}`."
        )))

    if x > BESSEL_MAX_X:
        raise OverflowError(textwrap.fill((
            f"The Bessel argument `{x}` exceeds the overflow guard "
            f"`{BESSEL_MAX_X}`."
        )))

    nu = order.value
    if order.is_integer:
        if x <= BESSEL_SWITCH:
            return _bessel_series(nu, x)
        return _bessel_asymptotic(nu, x)

    # Half-integer orders: the recurrence loses digits to cancellation at
    # small x, where the series is cheap and exact
    if x < nu + 2.0:
        return _bessel_series(nu, x)
    return _bessel_half_integer(order.twice, x)




def bessel_i(nu, x):
    '''Modified Bessel function of the first kind :math:`I_\\nu(x)` for
    integer or half-integer order and real argument ``0 <= x <= 700``.

    Integer orders use the power series for ``x <= 15`` and the asymptotic
    expansion above; half-integer orders use the closed hyperbolic forms,
    e.g. :math:`I_{1/2}(x) = \\sqrt{2 / (\\pi x)} \\sinh x`, and the power
    series for small arguments. The relative error is below 1e-12.

    Parameters
    ----------
    nu : int, float or Order
        Integer or half-integer order, ``nu >= -1/2``.

    x : float or numpy.ndarray
        Argument(s), in ``[0, 700]``.

    Returns
    -------
    float or numpy.ndarray

    Raises
    ------
    ValueError
        If the order is unsupported or the argument negative.

    OverflowError
        If ``x > 700``.

    Examples
    --------
    >>> from mmtherm.specfun import bessel_i
    >>> bessel_i(0, 0.)
    1.0
    >>> bessel_i(0.5, 1.)
    0.9376748882454876
    '''

    order = Order(nu)
    if np.ndim(x) == 0:
        return float(_bessel_scalar(order, float(x)))

    x = np.asarray(x, dtype = float)
    out = np.empty(x.shape)
    for idx, xi in np.ndenumerate(x):
        out[idx] = _bessel_scalar(order, float(xi))
    return out




def bessel_i_ratio(nu, x):
    '''Ratio :math:`I_{\\nu+1}(x) / I_\\nu(x)`, with the ``x -> 0`` limit
    handled exactly (the ratio vanishes there).
    '''
    x = np.asarray(x, dtype = float)
    num = bessel_i(Order(nu).value + 1, x)
    den = bessel_i(nu, x)
    ratio = np.where(x == 0., 0., num / np.where(den == 0., 1., den))
    return float(ratio) if ratio.ndim == 0 else ratio




@njit(cache = True)
def _erfi_series(x):
    # erfi(x) = 2/sqrt(pi) sum x^(2n+1) / (n! (2n+1)); all terms share a sign
    x2 = x * x
    term = x
    total = x

    n = 0
    while True:
        n += 1
        term *= x2 / n
        add = term / (2.0 * n + 1.0)
        total += add
        if abs(add) < 1e-17 * abs(total) or n > 2000:
            break

    return 2.0 / math.sqrt(math.pi) * total




@njit(cache = True)
def _dawson_sum(x):
    # Rybicki's sampling sum D(x) = 1/sqrt(pi) sum_{n odd} exp(-(x - nh)^2) / n,
    # exponentially accurate in 1/h (aliasing error ~ exp(-(pi / 2h)^2))
    h = 0.2
    nlo = int(math.floor((x - 9.0) / h)) - 1
    nhi = int(math.ceil((x + 9.0) / h)) + 1

    total = 0.0
    for n in range(nlo, nhi + 1):
        if n % 2 == 0:
            continue
        d = x - n * h
        total += math.exp(-d * d) / n

    return total / math.sqrt(math.pi)




def _dawson_scalar(x):
    ax = abs(x)
    if ax <= ERFI_SWITCH:
        val = 0.5 * math.sqrt(math.pi) * math.exp(-ax * ax) * _erfi_series(ax)
    else:
        val = _dawson_sum(ax)
    return math.copysign(val, x)




def _erfi_scalar(x):
    if not np.isfinite(x):
        raise ValueError(f"erfi requires a finite argument. Got `{x}`.")

    ax = abs(x)
    if ax > ERFI_MAX_X:
        raise OverflowError(textwrap.fill((
            f"erfi({x}) overflows; arguments are limited to "
            f"`|x| <= {ERFI_MAX_X}`."
        )))

    if ax <= ERFI_SWITCH:
        val = _erfi_series(ax)
    else:
        val = 2.0 / math.sqrt(math.pi) * math.exp(ax * ax) * _dawson_sum(ax)
    return math.copysign(val, x)




def _elementwise(fn, x):
    if np.ndim(x) == 0:
        return float(fn(float(x)))

    x = np.asarray(x, dtype = float)
    out = np.empty(x.shape)
    for idx, xi in np.ndenumerate(x):
        out[idx] = fn(float(xi))
    return out




def erfi(x):
    '''Imaginary error function :math:`\\mathrm{erfi}(x) = -i\\,\\mathrm{erf}
    (ix)` for real ``|x| <= 26``.

    Uses the Maclaurin series for ``|x| <= 3`` and
    :math:`2 e^{x^2} D(x) / \\sqrt{\\pi}` with Dawson's integral :math:`D`
    otherwise.

    Examples
    --------
    >>> from mmtherm.specfun import erfi
    >>> erfi(1.)
    1.6504257587975428
    '''
    return _elementwise(_erfi_scalar, x)




def dawson(x):
    '''Dawson's integral :math:`D(x) = e^{-x^2} \\int_0^x e^{t^2} dt`; equal
    to :math:`\\sqrt{\\pi} e^{-x^2} \\mathrm{erfi}(x) / 2` without overflow
    for large arguments.
    '''
    return _elementwise(_dawson_scalar, x)




def ellip_k(m):
    '''Complete elliptic integral of the first kind :math:`K(m)` in the
    parameter convention :math:`K(m) = \\int_0^{\\pi/2} (1 - m \\sin^2
    t)^{-1/2} dt`, valid for ``0 <= m < 1``; computed by the
    arithmetic-geometric mean.

    Examples
    --------
    >>> from mmtherm.specfun import ellip_k
    >>> ellip_k(0.)
    1.5707963267948966
    '''

    def kernel(mi):
        if not 0. <= mi < 1.:
            raise ValueError(textwrap.fill((
                f"ellip_k requires a parameter `0 <= m < 1`. Got `{mi}`."
            )))

        a, b = 1.0, math.sqrt(1.0 - mi)
        while abs(a - b) > 1e-16 * a:
            a, b = 0.5 * (a + b), math.sqrt(a * b)
        return math.pi / (2.0 * a)

    return _elementwise(kernel, m)




def ellip_e(m):
    '''Complete elliptic integral of the second kind :math:`E(m)` in the
    parameter convention :math:`E(m) = \\int_0^{\\pi/2} (1 - m \\sin^2
    t)^{1/2} dt`, valid for ``0 <= m <= 1``.

    Uses :math:`E = K (1 - \\sum_n 2^{n-1} c_n^2)` along the
    arithmetic-geometric mean iteration, with :math:`c_0^2 = m`.

    Examples
    --------
    >>> from mmtherm.specfun import ellip_e
    >>> ellip_e(1.)
    1.0
    '''

    def kernel(mi):
        if not 0. <= mi <= 1.:
            raise ValueError(textwrap.fill((
                f"ellip_e requires a parameter `0 <= m <= 1`. Got `{mi}`."
            )))

        if mi == 1.0:
            return 1.0

        a, b = 1.0, math.sqrt(1.0 - mi)
        total = 0.5 * mi
        power = 0.5
        while abs(a - b) > 1e-16 * a:
            c = 0.5 * (a - b)
            a, b = 0.5 * (a + b), math.sqrt(a * b)
            power *= 2.0
            total += power * c * c

        return math.pi / (2.0 * a) * (1.0 - total)

    return _elementwise(kernel, m)




def langevin(x):
    '''Langevin function :math:`L(x) = \\coth x - 1/x`, with a series branch
    near the removable singularity at zero.

    Examples
    --------
    >>> from mmtherm.specfun import langevin
    >>> langevin(0.)
    0.0
    '''

    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype = float)
    small = np.abs(x) < 1e-2

    xs = np.where(small, x, 0.)
    x2 = xs * xs
    series = xs * (1. / 3. + x2 * (-1. / 45. + x2 * (2. / 945. + x2 * (
        -1. / 4725. + x2 * 2. / 93555.))))

    xl = np.where(small, 1., x)
    direct = 1. / np.tanh(xl) - 1. / xl

    out = np.where(small, series, direct)
    return float(out) if scalar else out




def brillouin_half(x):
    '''Spin-1/2 Brillouin function, :math:`\\tanh x`.
    '''
    out = np.tanh(np.asarray(x, dtype = float))
    return float(out) if out.ndim == 0 else out
