#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : thermo.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


'''Boltzmann-weighted moments of priors - partition functions, mean energies
and energy variances - and the registry of closed-form partition functions
the numeric pipeline is validated against.

Energies are linear in the family parameters, :math:`\\varepsilon(\\theta) =
h \\, c \\cdot \\theta`, and the partition function of a normalised prior
:math:`p` is :math:`Q(\\beta) = \\int p(\\theta) e^{-\\beta \\varepsilon
(\\theta)} d\\theta`. Mean energies and variances are computed as moment
ratios of the tilted density rather than by differentiating :math:`\\log
Q`.
'''


import  json
import  math
import  textwrap

import  numpy       as      np
import  pandas      as      pd
from    tqdm        import  tqdm

from    .specfun    import  bessel_i, bessel_i_ratio, dawson, langevin
from    .utilities  import  autorepr


# Below this |y| the Gaussian moment integrals use their power series
SERIES_SWITCH = 2.




@autorepr
class EnergyObservable:
    '''Linear energy :math:`\\varepsilon = h \\, C \\theta` with one row of
    `C` per energy component.

    A scalar inverse temperature weights the total energy (the sum of the
    components); a vector of inverse temperatures, one per component, gives
    the multivariate ensemble used for independent fields.

    Parameters
    ----------
    c : (p,) or (m, p) array_like
        Coefficients selecting the weighted parameters.

    h : float, default 1
        Field scale; energies are reported in these units.

    Examples
    --------
    >>> import numpy as np
    >>> from mmtherm.thermo import EnergyObservable
    >>> obs = EnergyObservable([0., 1.], h = 2.)
    >>> obs.energies(np.array([[0.3, 0.5]]))
    array([[1.]])
    '''

    def __init__(self, c, h = 1.):
        self.c = np.atleast_2d(np.asarray(c, dtype = float))
        self.h = float(h)

        if not np.isfinite(self.h) or self.h <= 0.:
            raise ValueError(f"The field scale must be positive; got {h}.")
        if not np.any(self.c):
            raise ValueError("The energy coefficients cannot all be zero.")


    @property
    def components(self):
        return self.c.shape[0]


    @property
    def num_params(self):
        return self.c.shape[1]


    def with_scale(self, h):
        return EnergyObservable(self.c, h)


    def energies(self, points):
        '''Energy components at (N, p) points, as an (N, m) array.'''
        return self.h * np.atleast_2d(points) @ self.c.T


    def beta_vector(self, beta):
        '''Per-component inverse temperatures and whether `beta` was scalar.
        '''
        beta = np.asarray(beta, dtype = float)
        if beta.ndim == 0:
            return np.full(self.components, float(beta)), True

        if beta.shape != (self.components,):
            raise ValueError(textwrap.fill((
                f"Expected a scalar or {self.components} inverse "
                f"temperatures; received shape {beta.shape}."
            )))
        return beta, False


    def check_region(self, region):
        '''Regions reduced about their first axis only support energies of
        that coordinate.
        '''
        if region.dim != self.num_params:
            raise ValueError(textwrap.fill((
                f"The energy has {self.num_params} coefficients but the "
                f"region has dimension {region.dim}."
            )))

        if region.symmetry_axis == 0 and np.any(self.c[:, 1:]):
            raise ValueError(textwrap.fill((
                "This region integrates functions symmetric about its first "
                "axis; the energy may only depend on the first parameter."
            )))


    def exponent_minimum(self, region, beta_vec):
        # Smallest beta . energy over the region's bounding box
        a = self.h * (beta_vec @ self.c)
        box = region.bounds()
        return float(np.minimum(a * box[:, 0], a * box[:, 1]).sum())


    def to_dict(self):
        return dict(c = self.c.tolist(), h = self.h)




@autorepr
class Moments:
    '''Partition function, mean energy and energy variance at one `beta`.
    For vector `beta`, `mean` and `variance` hold one value per energy
    component.
    '''

    def __init__(self, beta, Q, mean, variance):
        self.beta = beta
        self.Q = Q
        self.mean = mean
        self.variance = variance




def tilted_moments(prior, obs, beta, tol = None):
    '''Moments of the energy under the Boltzmann-tilted prior.

    The weight :math:`e^{-\\beta \\varepsilon}` is shifted by the smallest
    exponent over the region's bounding box, so it never exceeds one; the
    variance is computed as a central moment in a second pass.

    Parameters
    ----------
    prior : measure.Prior
    obs : EnergyObservable
    beta : float or (m,) array_like
    tol : float, optional
        Quadrature tolerance; region defaults if None.

    Returns
    -------
    Moments
    '''

    obs.check_region(prior.region)
    beta_vec, scalar = obs.beta_vector(beta)
    shift = obs.exponent_minimum(prior.region, beta_vec)

    def observed(points):
        e = obs.energies(points)
        w = np.exp(shift - e @ beta_vec)
        if scalar:
            e = e.sum(axis = 1, keepdims = True)
        return w, e

    def first(points):
        w, e = observed(points)
        return np.column_stack([w, w[:, None] * e])

    m1 = np.atleast_1d(prior.expectation(first, tol))
    z = m1[0]
    if not z > 0.:
        raise ArithmeticError(textwrap.fill((
            f"The tilted normalisation vanished at beta = {beta}; the energy "
            "range times beta is too large for double precision."
        )))

    mean = m1[1:] / z

    def second(points):
        w, e = observed(points)
        return w[:, None] * (e - mean) ** 2

    var = np.atleast_1d(prior.expectation(second, tol)) / z
    Q = z * math.exp(-shift)

    if scalar:
        return Moments(float(beta), Q, float(mean[0]), float(var[0]))
    return Moments(beta_vec, Q, mean, var)




def partition(prior, obs, beta, tol = None):
    '''Partition function :math:`Q(\\beta) = \\int p \\, e^{-\\beta
    \\varepsilon}` of a normalised prior.

    Examples
    --------
    >>> from mmtherm import scenarios
    >>> from mmtherm.thermo import partition
    >>> sc = scenarios.get_scenario("s22")
    >>> q = partition(sc.prior("minimal"), sc.energy, 1.)
    >>> round(q, 6)
    1.175201
    '''
    return tilted_moments(prior, obs, beta, tol).Q




def energy_mean(prior, obs, beta, tol = None):
    '''Mean energy :math:`E = -\\partial \\log Q / \\partial \\beta`, as a
    ratio of moments.
    '''
    return tilted_moments(prior, obs, beta, tol).mean




def energy_variance(prior, obs, beta, tol = None):
    '''Energy variance under the tilted prior; equals :math:`-\\partial E /
    \\partial \\beta`.
    '''
    return tilted_moments(prior, obs, beta, tol).variance




def _gauss_moments(y):
    # F(y) = int_0^1 e^{y u^2} du and G(y) = int_0^1 u^2 e^{y u^2} du
    if abs(y) <= SERIES_SWITCH:
        f = g = 0.
        term = 1.
        for n in range(60):
            f += term / (2 * n + 1)
            g += term / (2 * n + 3)
            term *= y / (n + 1)
            if abs(term) < 1e-18:
                break
        return f, g

    r = math.sqrt(abs(y))
    if y > 0:
        f = math.exp(y) * float(dawson(r)) / r
        g = (math.exp(y) - f) / (2. * y)
    else:
        f = math.sqrt(math.pi) * math.erf(r) / (2. * r)
        g = (f - math.exp(y)) / (-2. * y)
    return f, g




def _check_t(t):
    t = float(t)
    if t < 0. or not np.isfinite(t):
        raise ValueError(f"Closed forms take beta * h >= 0; got {t}.")
    return t




def _triangle_q(t, sign = 1.):
    # Prior with marginal 1/(2 sqrt 2 sqrt(1 - s z)) on [-1, 1], energy h z
    t = _check_t(t)
    f, _ = _gauss_moments(2. * sign * t)
    return math.exp(-sign * t) * f


def _triangle_e(t, sign = 1.):
    t = _check_t(t)
    f, g = _gauss_moments(2. * sign * t)
    return sign * (1. - 2. * g / f)


def _arcsine_q(t, center, half):
    # Arcsine prior on [center - half, center + half]
    t = _check_t(t)
    return math.exp(-center * t) * float(bessel_i(0, half * t))


def _arcsine_e(t, center, half):
    t = _check_t(t)
    return center - half * float(bessel_i_ratio(0, half * t))


def _three_level_moment(n):
    # <v^n> under 3 v / (4 sqrt(1 - v)), i.e. (3/4) B(n + 2, 1/2)
    return 0.75 * math.exp(
        math.lgamma(n + 2) + math.lgamma(0.5) - math.lgamma(n + 2.5)
    )


def _three_level_series(t):
    q = e = 0.
    term = 1.
    for n in range(80):
        q += term * _three_level_moment(n)
        e += term * _three_level_moment(n + 1)
        term *= -t / (n + 1)
        if abs(term) < 1e-20:
            break
    return q, e / q


def _three_level_q(t):
    t = _check_t(t)
    if t <= 2.:
        return _three_level_series(t)[0]
    d = float(dawson(math.sqrt(t)))
    return 3. * ((1. + 2. * t) * d - math.sqrt(t)) / (4. * t ** 1.5)


def _three_level_e(t):
    t = _check_t(t)
    if t <= 2.:
        return _three_level_series(t)[1]
    r = math.sqrt(t)
    d = float(dawson(r))
    n = (1. + 2. * t) * d - r
    return 1.5 / t - (d * (1. - 2. * t) + r) / n


def _bessel_ball_q(t, nu):
    # Gamma(nu + 1) (2 / t)^nu I_nu(t): the normalised (1 - x^2)^(nu - 1/2)
    # marginal
    t = _check_t(t)
    if t == 0.:
        return 1.
    return math.exp(
        math.lgamma(nu + 1.) + nu * math.log(2. / t)
    ) * float(bessel_i(nu, t))


def _bessel_ball_e(t, nu):
    t = _check_t(t)
    return -float(bessel_i_ratio(nu, t))


def _sinhc(t):
    t = _check_t(t)
    return 1. if t == 0. else math.sinh(t) / t




@autorepr(hide = {"Q_fn", "E_fn"})
class ClosedForm:
    '''Closed-form partition function and mean energy of one scenario, as
    functions of the dimensionless :math:`t = \\beta h`.

    Attributes
    ----------
    key : str
    Q_fn : callable
        Normalised partition function, ``Q_fn(0) = 1``.

    E_fn : callable
        Mean energy in units of h.

    q0 : float
        Value of the printed (unnormalised) form at ``t -> 0``; the printed
        partition function is ``q0 * Q_fn(t)``.

    formula : str
        Human-readable formula.
    '''

    def __init__(self, key, Q_fn, E_fn, formula, q0 = 1.):
        self.key = key
        self.Q_fn = Q_fn
        self.E_fn = E_fn
        self.formula = formula
        self.q0 = float(q0)


    def Q(self, beta, h = 1.):
        return _elementwise(self.Q_fn, np.asarray(beta) * h)


    def printed_Q(self, beta, h = 1.):
        return self.q0 * self.Q(beta, h)


    def E(self, beta, h = 1.):
        return h * _elementwise(self.E_fn, np.asarray(beta) * h)


    def to_dict(self):
        return dict(key = self.key, formula = self.formula, q0 = self.q0)




def _elementwise(fn, t):
    if np.ndim(t) == 0:
        return float(fn(float(t)))
    t = np.asarray(t, dtype = float)
    return np.array([fn(float(ti)) for ti in t.ravel()]).reshape(t.shape)




_SQRT3 = math.sqrt(3.)


# Registry keyed by scenario id, for the scenario's natural metric; maximal
# entries below override where the maximal-route prior differs
CLOSED_FORMS = {
    "s21": ClosedForm(
        "s21", _triangle_q, _triangle_e,
        "Q = e^{-t} sqrt(pi) erfi(sqrt(2t)) / (2 sqrt(2t))",
    ),
    "s21-anti": ClosedForm(
        "s21-anti",
        lambda t: _triangle_q(t, -1.), lambda t: _triangle_e(t, -1.),
        "Q = e^{t} sqrt(pi) erf(sqrt(2t)) / (2 sqrt(2t))",
    ),
    "s22": ClosedForm(
        "s22", _sinhc, lambda t: -langevin(_check_t(t)),
        "Q = sinh(t) / t,  E = -h L(t)",
    ),
    "s23": ClosedForm(
        "s23",
        lambda t: _arcsine_q(t, 0., 0.5) ** 2,
        lambda t: 2. * _arcsine_e(t, 0., 0.5),
        "Q = I0(t_xi / 2) I0(t_zeta / 2)",
    ),
    "s23a": ClosedForm(
        "s23a",
        lambda t: _arcsine_q(t, 0., 0.5), lambda t: _arcsine_e(t, 0., 0.5),
        "Q = I0(t / 2)",
    ),
    "s23b": ClosedForm(
        "s23b",
        lambda t: _arcsine_q(t, 0., 0.5), lambda t: _arcsine_e(t, 0., 0.5),
        "Q = I0(t / 2)",
    ),
    "s24": ClosedForm(
        "s24",
        lambda t: _arcsine_q(t, -1. / 3., 2. / 3.),
        lambda t: _arcsine_e(t, -1. / 3., 2. / 3.),
        "Q = e^{t/3} I0(2t/3),  E = (h/3)(-1 - 2 I1(2t/3) / I0(2t/3))",
    ),
    "s25-4": ClosedForm(
        "s25-4",
        lambda t: _arcsine_q(t, 1. / 3., 2. / 3.),
        lambda t: _arcsine_e(t, 1. / 3., 2. / 3.),
        "Q = e^{-t/3} I0(2t/3),  E = (h/3)(1 - 2 I1(2t/3) / I0(2t/3))",
    ),
    "s25-6": ClosedForm(
        "s25-6",
        lambda t: _arcsine_q(t, -1. / 3., 2. / 3.),
        lambda t: _arcsine_e(t, -1. / 3., 2. / 3.),
        "Q = e^{t/3} I0(2t/3)",
    ),
    "s26-3": ClosedForm(
        "s26-3",
        lambda t: _arcsine_q(t, 0., 1. / 3.),
        lambda t: _arcsine_e(t, 0., 1. / 3.),
        "Q = I0(t/3),  E = -(h/3) I1(t/3) / I0(t/3)",
    ),
    "s3": ClosedForm(
        "s3", _three_level_q, _three_level_e,
        "Q = 3 e^{-t} ((1 + 2t) sqrt(pi) erfi(sqrt t) - 2 sqrt(t) e^t) "
        "/ (8 t^{3/2})",
    ),
    "single-min": ClosedForm(
        "single-min",
        lambda t: _bessel_ball_q(t, 1.), lambda t: _bessel_ball_e(t, 1.),
        "Q = pi I1(t) / t,  E = -h I2(t) / I1(t)", q0 = math.pi / 2.,
    ),
    "bloch-min": ClosedForm(
        "bloch-min",
        lambda t: _bessel_ball_q(t, 1.), lambda t: _bessel_ball_e(t, 1.),
        "Q = pi I1(t) / t,  E = -h I2(t) / I1(t)", q0 = math.pi / 2.,
    ),
    "bloch-max": ClosedForm(
        "bloch-max", _sinhc, lambda t: -langevin(_check_t(t)),
        "Q = sinh(t) / t,  E = -h I_{3/2}(t) / I_{1/2}(t)",
    ),
    "quat-min": ClosedForm(
        "quat-min",
        lambda t: _bessel_ball_q(t, 2.), lambda t: _bessel_ball_e(t, 2.),
        "Q = 3 pi I2(t) / (4 t^2),  E = -h I3(t) / I2(t)",
        q0 = 3. * math.pi / 32.,
    ),
    "quat-max": ClosedForm(
        "quat-max",
        lambda t: _bessel_ball_q(t, 1.5), lambda t: _bessel_ball_e(t, 1.5),
        "Q = 3 sqrt(pi / 2) I_{3/2}(t) / t^{3/2},  "
        "E = -h I_{5/2}(t) / I_{3/2}(t)",
    ),
}


MAXIMAL_CLOSED_FORMS = {
    "s25-3": ClosedForm(
        "s25-3",
        lambda t: _arcsine_q(t, 0., 1. / _SQRT3),
        lambda t: _arcsine_e(t, 0., 1. / _SQRT3),
        "Q = I0(t / sqrt 3)",
    ),
    "s25-5": ClosedForm(
        "s25-5",
        lambda t: _arcsine_q(t, 0., 1. / _SQRT3),
        lambda t: _arcsine_e(t, 0., 1. / _SQRT3),
        "Q = I0(t / sqrt 3)",
    ),
}


# Textbook references the scenario curves are contrasted with
REFERENCE_FORMS = {
    "brillouin": ClosedForm(
        "brillouin",
        lambda t: math.cosh(_check_t(t)), lambda t: -math.tanh(t),
        "Q = 2 cosh(t),  E = -h tanh(t)", q0 = 2.,
    ),
    "langevin": ClosedForm(
        "langevin", _sinhc, lambda t: -langevin(_check_t(t)),
        "Q = sinh(t) / t,  E = -h L(t)",
    ),
}




def get_closed_form(key, kind = "minimal"):
    '''Closed form for a scenario id (or a reference key) and metric kind.

    Raises
    ------
    KeyError
        If no closed form is registered.
    '''

    kind = str(getattr(kind, "value", kind)).lower()
    if kind == "maximal" and key in MAXIMAL_CLOSED_FORMS:
        return MAXIMAL_CLOSED_FORMS[key]
    if key in CLOSED_FORMS:
        return CLOSED_FORMS[key]
    if key in REFERENCE_FORMS:
        return REFERENCE_FORMS[key]

    available = sorted(CLOSED_FORMS) + sorted(REFERENCE_FORMS)
    raise KeyError(textwrap.fill((
        f"No closed-form partition function for `{key}` ({kind} metric). "
        f"Available: {available}."
    )))




def closed_form(key, beta, h = 1., kind = "minimal"):
    '''Normalised closed-form partition function Q(beta).

    Examples
    --------
    >>> from mmtherm.thermo import closed_form
    >>> round(closed_form("s26-3", 0.), 12)
    1.0
    '''
    return get_closed_form(key, kind).Q(beta, h)




def closed_form_energy(key, beta, h = 1., kind = "minimal"):
    '''Closed-form mean energy E(beta), in the units of `h`.'''
    return get_closed_form(key, kind).E(beta, h)




def parse_beta_grid(spec):
    '''Parse ``"start:stop:step"`` (stop inclusive) or a single value.

    Raises
    ------
    ValueError
        For malformed specs, negative start, ``stop < start`` or a
        non-positive step.
    '''

    try:
        parts = [float(p) for p in str(spec).split(":")]
    except ValueError as err:
        raise ValueError(textwrap.fill((
            f"The beta grid must be `start:stop:step` or a number; got "
            f"`{spec}`."
        ))) from err

    if len(parts) == 1:
        parts = [parts[0], parts[0], 1.]
    if len(parts) != 3:
        raise ValueError(f"The beta grid must have three fields; got `{spec}`.")

    start, stop, step = parts
    if start < 0. or stop < start or step <= 0.:
        raise ValueError(textwrap.fill((
            f"The beta grid needs start >= 0, stop >= start and step > 0; got "
            f"`{spec}`."
        )))

    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)




class ThermoCurve:
    '''Numeric and closed-form thermodynamics over a beta grid.

    Attributes
    ----------
    data : pandas.DataFrame
        Columns ``beta, Q_num, Q_closed, E_num, E_closed, Var_num,
        residual_Q, residual_E``. Closed-form columns are NaN where none is
        registered; ``residual_Q`` is relative and ``residual_E`` absolute in
        units of h.

    meta : dict
    '''

    columns = ["beta", "Q_num", "Q_closed", "E_num", "E_closed", "Var_num",
               "residual_Q", "residual_E"]

    def __init__(self, data, meta = None):
        self.data = data[self.columns].reset_index(drop = True)
        self.meta = dict(meta) if meta is not None else {}


    def __getitem__(self, column):
        return self.data[column].to_numpy()


    def __len__(self):
        return len(self.data)


    @property
    def has_closed_form(self):
        return bool(np.isfinite(self.data["Q_closed"]).any())


    def max_residuals(self):
        return (
            float(np.nanmax(self.data["residual_Q"], initial = 0.)),
            float(np.nanmax(self.data["residual_E"], initial = 0.)),
        )


    def to_csv(self, path_or_buf = None):
        lines = "".join(f"# {k}: {v}\n" for k, v in self.meta.items())
        text = lines + self.data.to_csv(index = False, float_format = "%.17g")
        if path_or_buf is None:
            return text
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w") as f:
                f.write(text)


    def to_dict(self):
        records = json.loads(self.data.to_json(orient = "records",
                                               double_precision = 15))
        return dict(meta = self.meta, fields = self.columns, rows = records)


    def to_json(self, path_or_buf = None):
        text = json.dumps(self.to_dict(), indent = 2)
        if path_or_buf is None:
            return text
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w") as f:
                f.write(text)


    def __repr__(self):
        meta = "\n".join(f"{k} = {v}" for k, v in self.meta.items())
        return f"ThermoCurve\n-----------\n{meta}\n{self.data}"




def thermo_curve(prior, obs, beta_grid, h = 1., closed = None, tol = None,
                 meta = None, verbose = False):
    '''Numeric partition function, mean energy and variance over a beta
    grid, alongside a closed form when one is given.

    Parameters
    ----------
    prior : measure.Prior
        Normalised prior.

    obs : EnergyObservable
        Energy coefficients; its scale is replaced by `h`.

    beta_grid : array_like or str
        Inverse temperatures, or a ``"start:stop:step"`` spec.

    h : float, default 1

    closed : ClosedForm, optional

    tol : float, optional
        Quadrature tolerance.

    meta : dict, optional
        Metadata stored on the curve (scenario, metric, ...).

    verbose : bool, default False
        Show a `tqdm` progress bar over the grid.

    Returns
    -------
    ThermoCurve

    Examples
    --------
    >>> from mmtherm import scenarios, thermo
    >>> sc = scenarios.get_scenario("s24")
    >>> curve = thermo.thermo_curve(
    ...     sc.prior("minimal"), sc.energy, "0:2:0.5",
    ...     closed = thermo.get_closed_form("s24"),
    ... )
    >>> curve.max_residuals()[0] < 1e-6
    True
    '''

    if isinstance(beta_grid, str):
        beta_grid = parse_beta_grid(beta_grid)
    beta_grid = np.atleast_1d(np.asarray(beta_grid, dtype = float))
    obs = obs.with_scale(h)

    iterator = beta_grid
    if verbose:
        iterator = tqdm(beta_grid, desc = "beta grid")

    rows = []
    for beta in iterator:
        mom = tilted_moments(prior, obs, beta, tol)
        row = dict(beta = beta, Q_num = mom.Q, E_num = mom.mean,
                   Var_num = mom.variance, Q_closed = np.nan,
                   E_closed = np.nan, residual_Q = np.nan,
                   residual_E = np.nan)

        if closed is not None:
            qc = closed.Q(beta, h)
            ec = closed.E(beta, h)
            row.update(
                Q_closed = qc,
                E_closed = ec,
                residual_Q = abs(mom.Q / qc - 1.),
                residual_E = abs(mom.mean - ec) / h,
            )
        rows.append(row)

    info = dict(h = h)
    if closed is not None:
        info["closed_form"] = closed.formula
    if meta is not None:
        info.update(meta)
    return ThermoCurve(pd.DataFrame(rows), info)




def partition_grid(prior, obs, beta_x, beta_y, closed = None, h = 1.,
                   tol = None):
    '''Multivariate partition function on a grid of per-component inverse
    temperatures, for two-component observables.

    Parameters
    ----------
    closed : callable, optional
        ``closed(bx, by)`` giving the normalised closed form, e.g. the
        product of two Bessel functions for independent fields.

    Returns
    -------
    pandas.DataFrame
        Columns ``beta_x, beta_y, Q_num`` and, with `closed`, ``Q_closed``
        and the relative ``residual_Q``.
    '''

    if obs.components != 2:
        raise ValueError("Partition grids need a two-component observable.")
    obs = obs.with_scale(h)

    rows = []
    for bx in np.atleast_1d(beta_x):
        for by in np.atleast_1d(beta_y):
            q = tilted_moments(prior, obs, [bx, by], tol).Q
            row = dict(beta_x = float(bx), beta_y = float(by), Q_num = q)
            if closed is not None:
                qc = closed(bx * h, by * h)
                row.update(Q_closed = qc, residual_Q = abs(q / qc - 1.))
            rows.append(row)

    return pd.DataFrame(rows)




def independent_fields_q(tx, ty):
    '''Closed form :math:`I_0(t_x / 2) I_0(t_y / 2)` for the square domain
    with arcsine marginals on [-1/2, 1/2].
    '''
    return float(bessel_i(0, 0.5 * tx) * bessel_i(0, 0.5 * ty))




def log_q_slope(prior, obs, beta, step = 1e-4, tol = None):
    '''Central finite difference :math:`-\\partial \\log Q / \\partial
    \\beta` with step `step` in :math:`\\beta h`; an independent check of
    the moment-ratio mean energy.
    '''
    db = step / obs.h
    lo = tilted_moments(prior, obs, max(beta - db, 0.), tol).Q
    hi = tilted_moments(prior, obs, beta + db, tol).Q
    width = beta + db - max(beta - db, 0.)
    return -(math.log(hi) - math.log(lo)) / width
