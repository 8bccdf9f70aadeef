#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : scenarios.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


'''Registry of the density-matrix scenarios: each binds a family, its
feasible region, the energy observable and the metric kinds it is studied
under, together with closed-form volume elements, partition functions and
the reference values the numeric pipeline is validated against.

Families label the polarisation direction with :math:`\\sigma_z` (Pauli
letter 3), the second direction with :math:`\\sigma_x` and the third with
:math:`\\sigma_y`, so that the diagonal families have standard-basis
eigenvectors.
'''


import  json
import  math
import  textwrap
from    contextlib  import  contextmanager
from    itertools   import  combinations

import  numpy       as      np
import  pandas      as      pd

from    .           import  bayes
from    .           import  measure
from    .           import  thermo
from    .matrixcore import  AffineFamily, build_family, is_feasible
from    .measure    import  (
    Ball,
    Box,
    Cone,
    DivergenceError,
    Ellipse,
    Implicit,
    Interval,
    Triangle,
)
from    .metric     import  (
    MetricKind,
    compare_metrics,
    volume_elements,
    volume_function,
)
from    .specfun    import  ellip_e
from    .thermo     import  EnergyObservable
from    .utilities  import  autorepr


# Pauli letters of the three directions, indexed from 1; 0 is the identity
POLARIZATION_LETTERS = (0, 3, 1, 2)

# Seeded interior points used by every pointwise check
POINT_SEED = 20
POINT_COUNT = 25

# Inverse temperatures (in units of 1 / h) of the closed-form checks
BETA_CHECKS = (0.1, 0.5, 1., 2., 5.)

# Shrink-limit results are extrapolations and get looser tolerances
SHRINK_TOL_Q = 1e-4
SHRINK_TOL_E = 1e-5




def _word(*directions):
    return tuple(POLARIZATION_LETTERS[d] for d in directions)




def _symmetric_terms(sites, body):
    # Same-direction correlations on every `body`-subset of `sites` spins
    terms = []
    for subset in combinations(range(sites), body):
        for letter in (1, 2, 3):
            word = [0] * sites
            for s in subset:
                word[s] = letter
            terms.append((tuple(word), 1.))
    return terms




def _one_parameter(sites, body, name = "zeta"):
    return build_family([(name, _symmetric_terms(sites, body))])




def _columns(points):
    p = np.atleast_2d(np.asarray(points, dtype = float))
    return p.T




def _radius2(points, start):
    p = np.atleast_2d(np.asarray(points, dtype = float))
    return (p[:, start:] ** 2).sum(axis = 1)




def _arcsine_volume(lo, hi):
    # Integrates to pi over (lo, hi)
    def volume(points):
        x = _columns(points)[0]
        return 1. / np.sqrt((x - lo) * (hi - x))
    return volume




def _triangle_volume(sign):
    def volume(points):
        xi, zeta = _columns(points)
        return 1. / (2. * math.sqrt(2.) * np.sqrt(
            (1. + 2. * xi + sign * zeta) * (1. - 2. * xi + sign * zeta) *
            (1. - sign * zeta)
        ))
    return volume




def _ball_volume(power):
    def volume(points):
        return (1. - _radius2(points, 0)) ** -power
    return volume




def _ellipse_minimal(points):
    xi, zeta = _columns(points)
    return 1. / np.sqrt(1. - 4. * xi * xi - zeta * zeta)




def _ellipse_maximal(points):
    xi, zeta = _columns(points)
    return np.sqrt(1. - 2. * xi * xi - zeta * zeta) / (
        (1. - 4. * xi * xi - zeta * zeta) * np.sqrt(1. - zeta * zeta)
    )




def _ellipse_maximal_printed(points):
    xi, zeta = _columns(points)
    with np.errstate(invalid = "ignore"):
        return math.sqrt(2.) * np.sqrt(zeta * zeta + 2. * xi * xi - 1.) / (
            np.sqrt(1. - zeta * zeta) * (1. - 4. * xi * xi - zeta * zeta)
        )




def _square_volume(points):
    xi, zeta = _columns(points)
    return 1. / np.sqrt((1. - 4. * xi * xi) * (1. - 4. * zeta * zeta))




def _three_level_minimal(points):
    v = _columns(points)[0]
    return 1. / (v * np.sqrt(1. - v) * np.sqrt(v * v - _radius2(points, 1)))




def _three_level_maximal(points):
    v = _columns(points)[0]
    return v / (np.sqrt(1. - v) * (v * v - _radius2(points, 1)) ** 1.5)




def _three_level_maximal_printed(points):
    v = _columns(points)[0]
    return 1. / (np.sqrt(1. - v) * (v * v - _radius2(points, 1)))




def _three_spin_elliptic(points):
    # Normalised by the elliptic integral of the second kind at m = 8/9
    zeta = _columns(points)[0]
    z2 = zeta * zeta
    return np.sqrt((3. - 8. * z2) / (4. - 12. * z2)) / ellip_e(8. / 9.)




def _three_spin_pairs_printed(points):
    zeta = _columns(points)[0]
    return 6. / (math.pi * (4. - 36. * zeta * zeta))




def _five_spin_quadruples(points):
    zeta = _columns(points)[0]
    return math.sqrt(15.) * np.sqrt(1. - 21. * zeta * zeta) / (2. * np.sqrt(
        (1. - 3. * zeta) * (1. + 3. * zeta) * (1. - 5. * zeta) *
        (1. + 7. * zeta)
    ))




def _single_spin_minimal(points):
    return np.sqrt(1. - _columns(points)[0] ** 2)




def _three_level_family():
    e13 = np.zeros((3, 3), dtype = complex)
    e13[0, 2] = 1.
    e31 = e13.T.copy()

    return AffineFamily.from_matrices(
        np.diag([0., 1., 0.]),
        [
            0.5 * np.diag([1., -2., 1.]),
            0.5 * (e13 + e31),
            0.5 * (-1j * e13 + 1j * e31),
            0.5 * np.diag([1., 0., -1.]),
        ],
        ["v", "x", "y", "z"],
    )




def _bloch_family():
    return build_family([
        ("xi1", [(_word(1), 1.)]),
        ("xi2", [(_word(2), 1.)]),
        ("xi3", [(_word(3), 1.)]),
    ])




class PrintedForm:
    '''A closed form quoted in the literature, checked against the metric.

    Attributes
    ----------
    name : str
    kind : str
        Metric kind it claims to describe.

    fn : callable
        Vectorised density.

    expect : {"normalized", "divergent", "proportional", "negative-radicand"}
        What the validation run checks about it.

    note : str
    '''

    def __init__(self, name, kind, fn, expect, note = ""):
        self.name = name
        self.kind = kind
        self.fn = fn
        self.expect = expect
        self.note = note


    def to_dict(self):
        return dict(name = self.name, kind = self.kind, expect = self.expect,
                    note = self.note)


    def __repr__(self):
        return f"PrintedForm({self.name!r}, {self.kind!r}, {self.expect!r})"




@autorepr(hide = {"volumes", "printed", "family", "gain_targets",
                  "marginal_reference", "shrink_reference"})
class Scenario:
    '''One registered scenario.

    Attributes
    ----------
    id : str

    description : str

    category : str
        Short topical tag, e.g. "two-spin" or "three-level".

    family : matrixcore.AffineFamily or None
        None for scenarios given directly by a volume element.

    region : measure.Region

    energy : thermo.EnergyObservable

    kinds : tuple of str
        Supported metric kinds; the first is the default.

    volumes : dict
        Closed-form volume element per kind, proportional to the metric's.

    normalizations : dict
        Integral of each closed-form volume element over the region, when
        known.

    improper : tuple of str
        Kinds whose volume element is not integrable over the region.

    closed_keys : dict
        Key of the closed-form partition function per kind (or None).

    status : {"ok", "unresolved"}

    notes : list of str
    '''

    def __init__(
        self,
        id,
        description,
        category,
        region,
        energy,
        kinds = ("minimal", "maximal"),
        family = None,
        volumes = None,
        normalizations = None,
        improper = (),
        closed_keys = None,
        z_targets = None,
        proportional = True,
        moment_targets = None,
        marginal_reference = None,
        shrink_reference = None,
        conditional_slice = None,
        measurement = None,
        gain_targets = None,
        expected_gain_target = None,
        printed = (),
        status = "ok",
        notes = (),
    ):
        self.id = str(id)
        self.description = description
        self.category = category
        self.region = region
        self.energy = energy
        self.kinds = tuple(MetricKind.parse(k).value for k in kinds)
        self.family = family
        self.volumes = dict(volumes or {})
        self.normalizations = dict(normalizations or {})
        self.improper = tuple(improper)
        self.closed_keys = dict(closed_keys or {})
        self.z_targets = dict(z_targets or {})
        self.proportional = proportional
        self.moment_targets = moment_targets
        self.marginal_reference = marginal_reference
        self.shrink_reference = shrink_reference
        self.conditional_slice = conditional_slice
        self.measurement = measurement
        self.gain_targets = dict(gain_targets or {})
        self.expected_gain_target = expected_gain_target
        self.printed = tuple(printed)
        self.status = status
        self.notes = list(notes)

        self._priors = {}
        self._shrunk = {}

        if family is not None and family.num_params != region.dim:
            raise ValueError(textwrap.fill((
                f"Scenario `{id}`: the family has {family.num_params} "
                f"parameters but the region has dimension {region.dim}."
            )))


    @property
    def default_kind(self):
        return self.kinds[0]


    @property
    def num_params(self):
        return self.region.dim


    @property
    def energy_axis(self):
        '''Parameter carrying the energy, for single-axis observables.'''
        axes = np.flatnonzero(np.abs(self.energy.c).sum(axis = 0))
        if len(axes) != 1:
            raise ValueError(textwrap.fill((
                f"The energy of `{self.id}` depends on parameters "
                f"{axes.tolist()}; a single energy axis is needed."
            )))
        return int(axes[0])


    def axis_energy(self, h = None):
        '''The energy restricted to its axis, for one-dimensional marginal
        priors.
        '''
        axis = self.energy_axis
        h = self.energy.h if h is None else h
        return EnergyObservable(self.energy.c[:, axis:axis + 1].sum(axis = 0),
                                h)


    def kind(self, kind = None):
        '''Validated metric-kind name; None selects the default.'''
        if kind is None:
            return self.default_kind

        kind = MetricKind.parse(kind).value
        if kind not in self.kinds:
            raise ValueError(textwrap.fill((
                f"Scenario `{self.id}` is not defined for the {kind} metric; "
                f"supported: {self.kinds}."
            )))
        return kind


    def _check_resolved(self):
        if self.status != "ok":
            raise ValueError(textwrap.fill((
                f"Scenario `{self.id}` is unresolved: "
                f"{' '.join(self.notes)}"
            )))


    def volume_fn(self, kind = None, source = "auto"):
        '''Vectorised volume element for `kind`.

        Parameters
        ----------
        source : {"auto", "metric", "closed"}
            "metric" evaluates the metric tensor on the family, "closed" the
            stored formula; "auto" prefers the stored formula and falls back
            to the metric. Metric volume elements are NaN where the smallest
            eigenvalue drops below the eigenvalue cutoff, so quadrature with
            them truncates the boundary singularities; they are meant for
            pointwise checks.
        '''

        self._check_resolved()
        kind = self.kind(kind)

        if source == "auto":
            source = "closed" if kind in self.volumes else "metric"

        if source == "metric":
            if self.family is None:
                raise ValueError(textwrap.fill((
                    f"Scenario `{self.id}` has no density-matrix family; use "
                    "the closed-form volume element."
                )))
            return volume_function(self.family, kind)

        if source == "closed":
            if kind not in self.volumes:
                raise ValueError(textwrap.fill((
                    f"Scenario `{self.id}` has no closed-form {kind} volume "
                    "element."
                )))
            return self.volumes[kind]

        raise ValueError(textwrap.fill((
            f"Unknown volume source `{source}`; use 'auto', 'metric' or "
            "'closed'."
        )))


    def prior(self, kind = None, tol = None, source = "auto"):
        '''Normalised prior of `kind`, cached per (kind, source, tol).

        Raises
        ------
        DivergenceError
            For improper kinds; use :meth:`shrink_limit_prior` instead.
        '''

        kind = self.kind(kind)
        if kind in self.improper:
            raise DivergenceError(textwrap.fill((
                f"The {kind} volume element of `{self.id}` is an improper "
                "prior on its region (not normalisable); use --shrink-limit."
            )))

        key = (kind, source, tol)
        if key not in self._priors:
            self._priors[key] = measure.normalize_prior(
                self.volume_fn(kind, source), self.region, tol,
                name = f"{self.id}/{kind}",
            )
        return self._priors[key]


    def shrink_limit_prior(self, kind = None, grid_size = 201, tol = 1e-4,
                           source = "auto", verbose = False):
        '''One-dimensional prior on the energy axis obtained as the limit of
        normalised marginals over shrunken regions.

        Returns
        -------
        measure.TabulatedPrior
        '''

        kind = self.kind(kind)
        key = (kind, grid_size, tol, source)
        if key not in self._shrunk:
            table = measure.shrink_limit_marginal(
                self.volume_fn(kind, source), self.region,
                axis = self.energy_axis, grid_size = grid_size, tol = tol,
                verbose = verbose,
            )
            table.meta["scenario"] = self.id
            table.meta["metric"] = kind
            self._shrunk[key] = measure.TabulatedPrior(
                table, name = f"{self.id}/{kind}/shrink-limit"
            )
        return self._shrunk[key]


    def closed_form(self, kind = None):
        '''Registered closed-form partition function, or None.'''
        kind = self.kind(kind)
        key = self.closed_keys.get(kind)
        return None if key is None else thermo.get_closed_form(key, kind)


    def reference_density(self, kind = None):
        '''Normalised closed-form prior, when its normalisation is known.'''
        kind = self.kind(kind)
        if kind not in self.volumes or kind not in self.normalizations:
            return None

        volume = self.volumes[kind]
        Z = self.normalizations[kind]

        def density(points):
            return volume(points) / Z
        return density


    def measurement_model(self):
        '''Joint spin measurement of the scenario, or None.'''
        if self.measurement is None or self.family is None:
            return None
        return bayes.joint_spin_model(self.family, self.measurement)


    def to_dict(self):
        measurement = self.measurement
        if measurement is not None and np.ndim(measurement):
            measurement = np.asarray(measurement, dtype = float).tolist()

        return dict(
            id = self.id,
            description = self.description,
            category = self.category,
            params = (list(self.family.names) if self.family is not None
                      else [f"x{i}" for i in range(self.num_params)]),
            family = (self.family.to_dict() if self.family is not None
                      else None),
            region = self.region.to_dict(),
            energy = self.energy.to_dict(),
            kinds = list(self.kinds),
            improper = list(self.improper),
            closed_forms = {
                k: (None if key is None else
                    thermo.get_closed_form(key, k).formula)
                for k, key in self.closed_keys.items()
            },
            measurement = measurement,
            status = self.status,
            notes = list(self.notes),
        )




def _build_registry():
    arcsine = dict(minimal = math.pi, maximal = math.pi)
    registry = []

    def add(*args, **kwargs):
        registry.append(Scenario(*args, **kwargs))

    two_spin_xi = [(_word(1, 0), 1.), (_word(0, 1), 1.)]

    # Two spins, correlation along the polarisation axis
    family = build_family([
        ("xi", two_spin_xi),
        ("zeta", [(_word(1, 1), 1.)]),
    ])
    add(
        "s21", "Two spins: equal polarisations xi and the correlation zeta "
        "along one axis", "two-spin",
        Triangle([(0., -1.), (-1., 1.), (1., 1.)]),
        EnergyObservable([0., 1.]),
        family = family,
        volumes = dict(minimal = _triangle_volume(1.),
                       maximal = lambda p: 2. * _triangle_volume(1.)(p)),
        normalizations = dict(minimal = math.pi / 2., maximal = math.pi),
        closed_keys = dict(minimal = "s21", maximal = "s21"),
        z_targets = dict(minimal = math.pi / 2., maximal = math.pi),
        moment_targets = (1. / 3., 16. / 45.),
        marginal_reference = (
            1, lambda x: 1. / (2. * math.sqrt(2.) * np.sqrt(1. - x)),
        ),
        measurement = 3,
        gain_targets = dict(D = .431946, A = .125093, AD = .542771,
                            AA = .0427712, DD = .110826, DA = .235918),
        expected_gain_target = .329662,
        notes = [
            "The quoted expected gain .329662 weights the disagreement gain "
            "by the agreement evidence (2/3) and vice versa; the properly "
            "weighted grouped value is about 0.2274.",
        ],
    )

    family = build_family([
        ("xi", [(_word(1, 0), 1.), (_word(0, 1), -1.)]),
        ("zeta", [(_word(1, 1), 1.)]),
    ])
    add(
        "s21-anti", "Two spins: opposite polarisations +-xi and the "
        "correlation zeta", "two-spin",
        Triangle([(0., 1.), (-1., -1.), (1., -1.)]),
        EnergyObservable([0., 1.]),
        family = family,
        volumes = dict(minimal = _triangle_volume(-1.),
                       maximal = lambda p: 2. * _triangle_volume(-1.)(p)),
        normalizations = dict(minimal = math.pi / 2., maximal = math.pi),
        closed_keys = dict(minimal = "s21-anti", maximal = "s21-anti"),
        moment_targets = (-1. / 3., 16. / 45.),
        marginal_reference = (
            1, lambda x: 1. / (2. * math.sqrt(2.) * np.sqrt(1. + x)),
        ),
        measurement = 3,
        gain_targets = dict(A = .431946, D = .125093),
    )

    family = build_family([
        ("xi", two_spin_xi),
        ("zeta", [(_word(2, 2), 1.)]),
    ])
    add(
        "s22", "Two spins: polarisations xi along one axis, correlation zeta "
        "along a perpendicular axis", "two-spin",
        Ellipse(np.diag([4., 1.])),
        EnergyObservable([0., 1.]),
        family = family,
        volumes = dict(minimal = _ellipse_minimal,
                       maximal = _ellipse_maximal),
        normalizations = dict(minimal = math.pi),
        improper = ("maximal",),
        closed_keys = dict(minimal = "s22", maximal = None),
        z_targets = dict(minimal = math.pi / (2. * math.sqrt(2.))),
        proportional = False,
        moment_targets = (0., 1. / 3.),
        marginal_reference = (1, lambda x: 0.5 * np.ones_like(x)),
        measurement = 1,
        gain_targets = dict(A = .193147, D = .193147, AA = .0721318,
                            DD = .0721318, AD = .265279, DA = .265279),
        expected_gain_target = .193147,
        printed = [
            PrintedForm(
                "maximal volume element as quoted", "maximal",
                _ellipse_maximal_printed, "negative-radicand",
                "The quoted radicand zeta^2 + 2 xi^2 - 1 is negative on the "
                "whole interior; the registry uses 1 - 2 xi^2 - zeta^2.",
            ),
        ],
    )

    family = build_family([
        ("xi", two_spin_xi),
        ("zeta", [(_word(2, 2), 1.), (_word(3, 3), 1.)]),
    ])
    add(
        "s23", "Two spins: polarisations xi and equal perpendicular "
        "correlations zeta, with independent fields", "two-spin",
        Box([(-0.5, 0.5), (-0.5, 0.5)]),
        EnergyObservable([[1., 0.], [0., 1.]]),
        family = family,
        volumes = dict(minimal = _square_volume, maximal = _square_volume),
        normalizations = dict(minimal = math.pi ** 2 / 4.,
                              maximal = math.pi ** 2 / 4.),
        closed_keys = dict(minimal = "s23", maximal = "s23"),
        marginal_reference = (
            0, lambda x: 2. / (math.pi * np.sqrt(1. - 4. * x * x)),
        ),
    )

    for suffix, sign in (("a", 1.), ("b", -1.)):
        family = build_family([
            ("zeta", [(_word(1, 2), 1.), (_word(2, 1), sign)]),
        ])
        add(
            f"s23{suffix}", "Two spins: mixed correlations zeta with the "
            f"transposed correlation equal to {'+' if sign > 0 else '-'}"
            "zeta", "two-spin",
            Implicit(family, [(-1., 1.)]),
            EnergyObservable([1.]),
            family = family,
            volumes = dict(minimal = _arcsine_volume(-0.5, 0.5),
                           maximal = _arcsine_volume(-0.5, 0.5)),
            normalizations = arcsine,
            closed_keys = dict(minimal = f"s23{suffix}",
                               maximal = f"s23{suffix}"),
        )

    family = _one_parameter(2, 2)
    add(
        "s24", "Two spins: equal correlations zeta along all three axes",
        "two-spin",
        Interval(-1., 1. / 3.),
        EnergyObservable([1.]),
        family = family,
        volumes = dict(minimal = _arcsine_volume(-1., 1. / 3.),
                       maximal = _arcsine_volume(-1., 1. / 3.)),
        normalizations = arcsine,
        closed_keys = dict(minimal = "s24", maximal = "s24"),
        moment_targets = (-1. / 3., 2. / 9.),
        measurement = np.ones(3) / math.sqrt(3.),
        gain_targets = dict(A = .306853, D = .0646381, AA = .0680544,
                            DD = .0470689, DA = .427868, AD = .0516789),
        expected_gain_target = .145376,
        notes = [
            "The variance at beta = 0 is 2 h^2 / 9, from the second central "
            "moment of the prior; it is not the square of the mean energy.",
        ],
    )

    ranges = {3: (-1. / math.sqrt(3.), 1. / math.sqrt(3.)),
              4: (-1. / 3., 1.), 5: (-1. / math.sqrt(3.), 1. / math.sqrt(3.)),
              6: (-1., 1. / 3.)}
    for sites, (lo, hi) in ranges.items():
        family = _one_parameter(sites, sites)
        sid = f"s25-{sites}"
        closed = {3: (None, "s25-3"), 4: ("s25-4", "s25-4"),
                  5: (None, "s25-5"), 6: ("s25-6", "s25-6")}[sites]
        printed = []
        notes = []
        if sites == 3:
            printed.append(PrintedForm(
                "minimal prior as quoted (elliptic normalisation)", "minimal",
                _three_spin_elliptic, "normalized",
                "The quoted minimal prior sqrt((3 - 8 z^2)/(4 - 12 z^2)) / "
                "E(8/9) integrates to one, but the metric gives the arcsine "
                "sqrt(3) / (pi sqrt(1 - 3 z^2)).",
            ))
            notes.append("Minimal partition function is numeric only.")

        add(
            sid, f"{sites} spins: equal {sites}-body correlations zeta along "
            "all three axes", "many-spin",
            Interval(lo, hi),
            EnergyObservable([1.]),
            family = family,
            volumes = dict(minimal = _arcsine_volume(lo, hi),
                           maximal = _arcsine_volume(lo, hi)),
            normalizations = arcsine,
            closed_keys = dict(minimal = closed[0], maximal = closed[1]),
            moment_targets = (1. / 3., 2. / 9.) if sites == 4 else None,
            printed = printed,
            notes = notes,
        )

    family = _one_parameter(3, 2)
    add(
        "s26-3", "3 spins: vanishing three-body and equal two-body "
        "same-axis correlations zeta", "many-spin",
        Interval(-1. / 3., 1. / 3.),
        EnergyObservable([1.]),
        family = family,
        volumes = dict(minimal = _arcsine_volume(-1. / 3., 1. / 3.),
                       maximal = _arcsine_volume(-1. / 3., 1. / 3.)),
        normalizations = arcsine,
        closed_keys = dict(minimal = "s26-3", maximal = "s26-3"),
        moment_targets = (0., 1. / 18.),
        printed = [
            PrintedForm(
                "prior as quoted", "minimal", _three_spin_pairs_printed,
                "divergent",
                "The quoted density 6 / (pi (4 - 36 z^2)) diverges "
                "logarithmically at +-1/3; the square-root form "
                "6 / (pi sqrt(4 - 36 z^2)) is normalised and gives "
                "Q = I0(t / 3).",
            ),
        ],
    )

    family = _one_parameter(5, 4)
    add(
        "s26-5", "5 spins: vanishing five-body and equal four-body "
        "same-axis correlations zeta", "many-spin",
        Interval(-1. / 7., 1. / 5.),
        EnergyObservable([1.]),
        family = family,
        volumes = dict(minimal = _five_spin_quadruples,
                       maximal = _five_spin_quadruples),
        closed_keys = dict(minimal = None, maximal = None),
        notes = [
            "DEVIATION: quoted as not normalisable, but the quadrature finds "
            "the volume element normalisable; its endpoint singularities at "
            "-1/7 and 1/5 are only inverse-square-root. No closed-form "
            "normalisation or partition function is known.",
        ],
    )

    add(
        "s26-4-open", "4 spins: vanishing four-body and equal three-body "
        "same-axis correlations zeta", "many-spin",
        Interval(-1. / (4. * math.sqrt(3.)), 1. / (4. * math.sqrt(3.))),
        EnergyObservable([1.]),
        family = _one_parameter(4, 3),
        status = "unresolved",
        notes = [
            "UNRESOLVED: the eigenvectors needed by the metric were never "
            "determined; only the family and its feasible range are "
            "registered.",
        ],
    )

    add(
        "s3", "Three-level extension of the two-level systems, with the "
        "middle level weight 1 - v", "three-level",
        Cone(4, ratio = 1., height = 1.),
        EnergyObservable([1., 0., 0., 0.]),
        family = _three_level_family(),
        volumes = dict(minimal = _three_level_minimal,
                       maximal = _three_level_maximal),
        normalizations = dict(minimal = 4. * math.pi ** 2 / 3.),
        improper = ("maximal",),
        closed_keys = dict(minimal = "s3", maximal = "s3"),
        proportional = False,
        moment_targets = (4. / 5., 8. / 175.),
        marginal_reference = (
            0, lambda v: 3. * v / (4. * np.sqrt(1. - v)),
        ),
        shrink_reference = lambda v: 3. * v / (4. * np.sqrt(1. - v)),
        printed = [
            PrintedForm(
                "maximal volume element as quoted", "maximal",
                _three_level_maximal_printed, "proportional",
                "The quoted 1 / (sqrt(1 - v) (v^2 - r^2)) is not "
                "proportional to the metric's v / (sqrt(1 - v) (v^2 - "
                "r^2)^(3/2)); both give the shrink-limit marginal "
                "3 v / (4 sqrt(1 - v)).",
            ),
        ],
    )

    add(
        "bloch-min", "Single spin on the Bloch ball, minimal metric",
        "single-spin",
        Ball(3, symmetry = "axial"),
        EnergyObservable([1., 0., 0.]),
        kinds = ("minimal",),
        family = _bloch_family(),
        volumes = dict(minimal = _ball_volume(0.5)),
        normalizations = dict(minimal = math.pi ** 2),
        closed_keys = dict(minimal = "bloch-min"),
        marginal_reference = (
            0, lambda x: 2. * np.sqrt(1. - x * x) / math.pi,
        ),
    )

    add(
        "bloch-max", "Single spin on the Bloch ball, maximal metric",
        "single-spin",
        Ball(3, symmetry = "axial"),
        EnergyObservable([1., 0., 0.]),
        kinds = ("maximal",),
        family = _bloch_family(),
        volumes = dict(maximal = _ball_volume(1.5)),
        improper = ("maximal",),
        closed_keys = dict(maximal = "bloch-max"),
        shrink_reference = lambda x: 0.5 * np.ones_like(x),
        conditional_slice = dict(kind = "minimal", axis = 2, value = 0.,
                                 volume = _ball_volume(0.5)),
    )

    add(
        "quat-min", "Quaternionic two-level systems on the unit 5-ball, "
        "minimal metric", "quaternionic",
        Ball(5, symmetry = "axial"),
        EnergyObservable([1., 0., 0., 0., 0.]),
        kinds = ("minimal",),
        volumes = dict(minimal = _ball_volume(0.5)),
        normalizations = dict(minimal = math.pi ** 3 / 2.),
        closed_keys = dict(minimal = "quat-min"),
        marginal_reference = (
            0, lambda x: 8. * (1. - x * x) ** 1.5 / (3. * math.pi),
        ),
    )

    add(
        "quat-max", "Quaternionic two-level systems on the unit 5-ball, "
        "maximal metric", "quaternionic",
        Ball(5, symmetry = "axial"),
        EnergyObservable([1., 0., 0., 0., 0.]),
        kinds = ("maximal",),
        volumes = dict(maximal = _ball_volume(2.5)),
        improper = ("maximal",),
        closed_keys = dict(maximal = "quat-max"),
        shrink_reference = lambda x: 0.75 * (1. - x * x),
    )

    add(
        "single-min", "Single spin: marginal of the minimal Bloch-ball prior "
        "along the field", "single-spin",
        Interval(-1., 1.),
        EnergyObservable([1.]),
        kinds = ("minimal",),
        volumes = dict(minimal = _single_spin_minimal),
        normalizations = dict(minimal = math.pi / 2.),
        closed_keys = dict(minimal = "single-min"),
    )

    return {sc.id: sc for sc in registry}


REGISTRY = _build_registry()




def scenario_ids(include_unresolved = True):
    return [
        sid for sid, sc in REGISTRY.items()
        if include_unresolved or sc.status == "ok"
    ]




def get_scenario(id):
    '''Look up a registered scenario.

    Raises
    ------
    KeyError
        For unknown ids; the message lists the available ones.

    Examples
    --------
    >>> from mmtherm.scenarios import get_scenario
    >>> sc = get_scenario("s24")
    >>> sc.region.a, sc.region.b, sc.num_params
    (-1.0, 0.3333333333333333, 1)
    '''

    try:
        return REGISTRY[id]
    except KeyError:
        raise KeyError(textwrap.fill((
            f"Unknown scenario `{id}`. Available: {list(REGISTRY)}."
        ))) from None




def list_scenarios():
    '''Summary table of the registry.

    Returns
    -------
    pandas.DataFrame
        Columns ``id, category, params, kinds, closed_form, status,
        description``.
    '''

    rows = []
    for sc in REGISTRY.values():
        rows.append(dict(
            id = sc.id,
            category = sc.category,
            params = sc.num_params,
            kinds = ",".join(sc.kinds),
            closed_form = ",".join(
                k for k in sc.kinds if sc.closed_keys.get(k) is not None
            ) or "-",
            status = "UNRESOLVED" if sc.status != "ok" else "ok",
            description = sc.description,
        ))
    return pd.DataFrame(rows)




def export_registry(path = None):
    '''Write the registry metadata as JSON to `path`, or return the text.'''
    text = json.dumps(
        dict(scenarios = [sc.to_dict() for sc in REGISTRY.values()]),
        indent = 2,
    )
    if path is None:
        return text
    with open(path, "w") as f:
        f.write(text)




def _plain(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value




@autorepr(hide = {"entries"})
class ValidationReport:
    '''Outcome of the checks run on one scenario.

    Every entry has a ``check`` name, a ``status`` ("pass", "fail" or
    "note"), and optionally ``value``, ``target``, ``residual`` and a
    ``detail`` message. Notes document known discrepancies and never fail
    the report.
    '''

    def __init__(self, scenario):
        self.scenario = scenario
        self.entries = []


    def add(self, check, status, value = None, target = None,
            residual = None, detail = ""):
        self.entries.append(dict(
            check = check,
            status = status,
            value = _plain(value),
            target = _plain(target),
            residual = _plain(residual),
            detail = detail,
        ))


    def compare(self, check, value, target, tol, relative = False,
                detail = ""):
        residual = abs(value - target)
        if relative:
            residual /= abs(target)
        status = "pass" if residual <= tol else "fail"
        self.add(check, status, value, target, residual, detail)


    def bound(self, check, residual, tol, detail = ""):
        status = "pass" if residual <= tol else "fail"
        self.add(check, status, residual = residual, target = tol,
                 detail = detail)


    def note(self, check, detail, value = None):
        self.add(check, "note", value = value, detail = detail)


    def fail(self, check, detail):
        self.add(check, "fail", detail = detail)


    @property
    def passed(self):
        return all(e["status"] != "fail" for e in self.entries)


    @property
    def failures(self):
        return [e for e in self.entries if e["status"] == "fail"]


    def to_dict(self):
        return dict(scenario = self.scenario, passed = self.passed,
                    entries = self.entries)


    def to_frame(self):
        return pd.DataFrame(self.entries)




@contextmanager
def _guard(report, check):
    # Exceptions inside a check become failed report entries
    try:
        yield
    except Exception as err:
        report.fail(check, f"{type(err).__name__}: {err}")




def _axis_points(region, axis, count = 7):
    lo, hi = region.axis_range(axis)
    return lo + (hi - lo) * (np.arange(1, count + 1) / (count + 1))




def _check_volume(sc, kind, points, report):
    if sc.family is None or kind not in sc.volumes:
        return

    with _guard(report, f"volume[{kind}]"):
        metric = volume_elements(sc.family, points, kind)
        closed = sc.volumes[kind](points)
        ratio = metric / closed
        spread = float(ratio.max() / ratio.min() - 1.)
        report.bound(
            f"volume[{kind}]", spread, 1e-9,
            f"metric / closed-form volume element = {ratio.mean():.12g} at "
            f"{len(points)} interior points",
        )




def _check_normalization(sc, kind, points, report):
    check = f"normalization[{kind}]"
    if kind in sc.improper:
        with _guard(report, check):
            try:
                res = measure.integrate_full(sc.volume_fn(kind), sc.region)
                divergent, ratio = res.divergent, res.band_ratio
            except measure.ConvergenceError:
                divergent, ratio = True, float("nan")
            status = "pass" if divergent else "fail"
            report.add(check, status, value = ratio,
                       detail = "improper prior: boundary band ratio "
                       f"{ratio:.3g} (divergent = {divergent})")
        return

    with _guard(report, check):
        prior = sc.prior(kind)
        target = sc.z_targets.get(kind)
        if target is not None:
            report.compare(check, prior.Z, target, 1e-7, relative = True)
        else:
            report.note(check, f"normalisation {prior.Z:.12g} (band ratio "
                        f"{prior.band_ratio:.3g})", prior.Z)

        reference = sc.reference_density(kind)
        if reference is not None:
            num = prior(points)
            ref = reference(points)
            report.bound(f"prior_reference[{kind}]",
                         float(np.abs(num / ref - 1.).max()), 1e-7)




def _thermo_prior(sc, kind):
    # Proper kinds use the full prior; improper ones the shrink limit
    if kind in sc.improper:
        return sc.shrink_limit_prior(kind), sc.axis_energy(), True
    return sc.prior(kind), sc.energy, False




def _check_thermo(sc, kind, report):
    check = f"closed_form[{kind}]"
    if kind in sc.improper and sc.shrink_reference is None:
        return

    with _guard(report, check):
        closed = sc.closed_form(kind)
        prior, obs, shrunk = _thermo_prior(sc, kind)
        curve = thermo.thermo_curve(prior, obs, BETA_CHECKS, closed = closed)

        if closed is None:
            report.note(check, "no closed-form partition function; numeric "
                        f"Q(1) = {curve['Q_num'][2]:.12g}")
            return

        rq, re = curve.max_residuals()
        tol_q = SHRINK_TOL_Q if shrunk else 1e-6
        tol_e = SHRINK_TOL_E if shrunk else 1e-6
        report.bound(f"{check}.Q", rq, tol_q, closed.formula)
        report.bound(f"{check}.E", re, tol_e, closed.formula)

    if sc.energy.components == 2:
        with _guard(report, f"partition_grid[{kind}]"):
            betas = np.array([0.5, 1., 2., 3., 5.])
            grid = thermo.partition_grid(
                sc.prior(kind), sc.energy, betas, betas,
                closed = thermo.independent_fields_q,
            )
            report.bound(f"partition_grid[{kind}]",
                         float(grid["residual_Q"].max()), 1e-6,
                         "Q = I0(t_x / 2) I0(t_y / 2) on a 5 x 5 grid")




def _check_marginal(sc, kind, report):
    if kind in sc.improper:
        if sc.shrink_reference is None:
            return
        with _guard(report, f"shrink_limit[{kind}]"):
            prior = sc.shrink_limit_prior(kind)
            xs = _axis_points(sc.region, sc.energy_axis)
            dev = np.abs(prior(xs) - sc.shrink_reference(xs)).max()
            report.bound(f"shrink_limit[{kind}]", float(dev), SHRINK_TOL_Q,
                         "shrink-limit marginal against its closed form; "
                         f"extrapolation residual "
                         f"{prior.table.meta['residual']}")
        return

    if sc.marginal_reference is None:
        return
    with _guard(report, f"marginal[{kind}]"):
        axis, reference = sc.marginal_reference
        density = measure.marginal_density(sc.prior(kind), axis)
        xs = _axis_points(sc.region, axis)
        dev = np.abs(density(xs) - reference(xs)).max()
        report.bound(f"marginal[{kind}]", float(dev), 1e-6)




def _check_conditional(sc, report):
    spec = sc.conditional_slice
    if spec is None:
        return

    with _guard(report, "conditional_slice"):
        volume = spec.get("volume")
        if volume is None:
            volume = volume_function(sc.family, spec["kind"])
        prior = measure.conditional_slice_prior(volume, sc.region,
                                                spec["axis"], spec["value"])
        obs = EnergyObservable(np.delete(sc.energy.c[0], spec["axis"]))
        closed = sc.closed_form()
        curve = thermo.thermo_curve(prior, obs, BETA_CHECKS, closed = closed)
        report.bound(
            "conditional_slice", curve.max_residuals()[1], SHRINK_TOL_Q,
            f"{spec['kind']} volume element on x[{spec['axis']}] = "
            f"{spec['value']} against the {sc.default_kind} closed form",
        )




def _check_moments(sc, report):
    if sc.moment_targets is None:
        return

    with _guard(report, "beta0_moments"):
        mom = thermo.tilted_moments(sc.prior(), sc.energy, 0.)
        mean, var = sc.moment_targets
        if mean is not None:
            report.compare("beta0_moments.E", mom.mean, mean, 1e-6)
        if var is not None:
            report.compare("beta0_moments.Var", mom.variance, var, 1e-6)




def _check_printed(sc, points, report):
    for form in sc.printed:
        check = f"printed[{form.name}]"
        with _guard(report, check):
            if form.expect == "normalized":
                total = measure.integrate(form.fn, sc.region, 1e-10)
                report.compare(check, total, 1., 1e-7, detail = form.note)
                dev = np.abs(form.fn(points) / sc.prior(form.kind)(points)
                             - 1.).max()
                report.note(f"{check}.metric", "largest relative deviation "
                            f"from the metric prior {dev:.3g}. {form.note}",
                            float(dev))

            elif form.expect == "divergent":
                res = measure.integrate_full(form.fn, sc.region)
                report.note(check, f"boundary band ratio "
                            f"{res.band_ratio:.3g} (divergent = "
                            f"{res.divergent}). {form.note}", res.band_ratio)

            elif form.expect == "proportional":
                ratio = form.fn(points) / sc.volumes[form.kind](points)
                spread = float(ratio.max() / ratio.min() - 1.)
                report.note(check, f"ratio spread to the metric form "
                            f"{spread:.3g}. {form.note}", spread)

            elif form.expect == "negative-radicand":
                vals = form.fn(points)
                report.note(check, f"{int(np.isnan(vals).sum())} of "
                            f"{len(vals)} interior points give NaN. "
                            f"{form.note}")




def _check_metric_order(sc, report):
    if sc.family is None or len(sc.kinds) < 2:
        return

    with _guard(report, "metric_order"):
        count = POINT_COUNT if sc.family.dim <= 8 else 5
        points = sc.region.interior_points(count, rng = POINT_SEED,
                                           margin = 0.05)
        table = compare_metrics(sc.family, points,
                                with_sld = sc.family.dim <= 8)

        report.compare("metric_order.maximality",
                       min(float(table["min_eig_max_minus_min"].min()), 0.),
                       0., 1e-9,
                       detail = "G_max - G_min is positive semidefinite")

        spread = float(table["ratio"].max() / table["ratio"].min() - 1.)
        if sc.proportional:
            report.bound("metric_order.proportional", spread, 1e-8,
                         f"volume ratio {table['ratio'].mean():.12g}")
        else:
            report.note("metric_order.proportional", "maximal and minimal "
                        f"volume elements are not proportional (spread "
                        f"{spread:.3g})", spread)

        if "sld_deviation" in table:
            report.bound("metric_order.sld",
                         float(table["sld_deviation"].max()), 1e-8)

    if sc.proportional and not sc.improper:
        with _guard(report, "metric_order.priors"):
            points = sc.region.interior_points(POINT_COUNT, rng = POINT_SEED)
            pmin = sc.prior("minimal")(points)
            pmax = sc.prior("maximal")(points)
            report.bound("metric_order.priors",
                         float(np.abs(pmax / pmin - 1.).max()), 1e-7)




def _check_bayes(sc, report):
    model = sc.measurement_model()
    if model is None or not sc.gain_targets:
        return

    gains = None
    with _guard(report, "bayes.expected"):
        prior = sc.prior("minimal")
        gains = bayes.expected_gain(prior, model)
        report.compare("bayes.evidence_sum", gains.evidence_total, 1., 1e-8)

    if gains is None:
        return

    for label, target in sc.gain_targets.items():
        with _guard(report, f"bayes[{label}]"):
            if len(label) == 1:
                value = gains.gain(label)
            else:
                value = bayes.sequential_gains(prior, model, label)[-1].gain
            report.compare(f"bayes[{label}]", value, target, 1e-4)

    target = sc.expected_gain_target
    if target is None:
        return

    matches = gains.match(target)
    if "grouped" in matches:
        report.compare("bayes.expected_gain", gains.expected_gain, target,
                       1e-4)
    elif matches:
        report.note("bayes.expected_gain", f"{target} is reproduced by the "
                    f"{', '.join(matches)} reading(s) "
                    f"{gains.interpretations()}; grouped expected gain "
                    f"{gains.expected_gain:.6f}", gains.expected_gain)
    else:
        report.fail("bayes.expected_gain", f"no reading reproduces {target}: "
                    f"{gains.interpretations()}")




def validate_scenario(id, kinds = None, verbose = False):
    '''Run every applicable check on a scenario.

    Checks compare the metric volume element with the stored closed form at
    seeded interior points, normalise the priors (or confirm improper ones
    diverge), compare partition functions, energies and marginals with their
    closed forms, evaluate moments at zero inverse temperature, order the
    two metrics, document quoted formulas that disagree with the metric,
    and reproduce the information gains of the joint spin measurement.

    Parameters
    ----------
    id : str
    kinds : sequence of str, optional
        Restrict to these metric kinds; unsupported kinds are skipped.
    verbose : bool, default False
        Print each check as it completes.

    Returns
    -------
    ValidationReport
        Failures are report entries; nothing is raised for failing checks.

    Examples
    --------
    >>> from mmtherm.scenarios import validate_scenario
    >>> report = validate_scenario("s26-3")
    >>> report.passed
    True
    '''

    sc = get_scenario(id)
    report = ValidationReport(sc.id)

    if sc.status != "ok":
        report.note("status", " ".join(sc.notes))
        return report

    if kinds is None:
        kinds = sc.kinds
    else:
        kinds = [k for k in (MetricKind.parse(k).value for k in kinds)
                 if k in sc.kinds]

    points = sc.region.interior_points(POINT_COUNT, rng = POINT_SEED)
    if sc.family is not None:
        with _guard(report, "feasibility"):
            ok = is_feasible(sc.family, points)
            report.bound("feasibility", float(np.size(ok) - np.sum(ok)), 0.,
                         "infeasible interior points")

    for kind in kinds:
        for run in (
            lambda: _check_volume(sc, kind, points, report),
            lambda: _check_normalization(sc, kind, points, report),
            lambda: _check_thermo(sc, kind, report),
            lambda: _check_marginal(sc, kind, report),
        ):
            start = len(report.entries)
            run()
            if verbose:
                for e in report.entries[start:]:
                    print(f"{sc.id:>12} {e['check']:<40} {e['status']}",
                          flush = True)

    _check_conditional(sc, report)
    _check_moments(sc, report)
    _check_printed(sc, points, report)
    if set(kinds) == set(sc.kinds):
        _check_metric_order(sc, report)
    _check_bayes(sc, report)

    for note in sc.notes:
        report.note("note", note)

    return report
