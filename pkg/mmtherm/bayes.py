#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : bayes.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


'''Bayesian updates of metric priors by joint spin measurements, with
Kullback-Leibler information gains (in nats), expected gains and sequential
measurement chains.

Outcome likelihoods :math:`\\mathrm{tr}(\\Pi \\rho(\\theta))` are affine in
the parameters. Posteriors keep the original prior together with the product
of all likelihoods seen so far, and are normalised only when evaluated.
'''


import  json
import  textwrap

import  numpy       as      np
import  pandas      as      pd

from    .matrixcore import  PAULI
from    .measure    import  Interval, Prior, integrate, marginal_density
from    .utilities  import  autorepr


# Posterior densities below this contribute nothing to a KL integral
DENSITY_FLOOR = 1e-300

# Quadrature tolerance for KL integrals
KL_TOL = 1e-6

GROUP_AGREE = "A"
GROUP_DISAGREE = "D"




def spin_projector(axis):
    '''Projectors onto spin up and down along `axis`: a Pauli letter 1-3 or
    a real 3-vector (normalised internally).
    '''

    if np.ndim(axis) == 0:
        letter = int(axis)
        if letter not in (1, 2, 3):
            raise ValueError(f"Pauli axis letters are 1, 2 or 3; got {axis}.")
        sigma = PAULI[letter]
    else:
        n = np.asarray(axis, dtype = float)
        norm = np.linalg.norm(n)
        if n.shape != (3,) or norm == 0.:
            raise ValueError(f"An axis vector needs three components; got "
                             f"{axis}.")
        n = n / norm
        sigma = np.tensordot(n, PAULI[1:], axes = 1)

    eye = np.eye(2)
    return 0.5 * (eye + sigma), 0.5 * (eye - sigma)




@autorepr(hide = {"family", "projectors"})
class MeasurementModel:
    '''Complete set of measurement outcomes on an affine family.

    Parameters
    ----------
    family : matrixcore.AffineFamily

    outcomes : list of (str, (n, n) array_like)
        Outcome labels and projectors; they must sum to the identity.

    groups : dict of str to list of str, optional
        Coarse-grained outcomes (e.g. agreement / disagreement), each the
        union of fine outcomes.

    Attributes
    ----------
    offset, slopes : numpy.ndarray
        Affine likelihood coefficients: outcome ``o`` has likelihood
        ``offset[o] + slopes[o] @ theta``.
    '''

    def __init__(self, family, outcomes, groups = None, axis = None):
        self.family = family
        self.labels = tuple(str(label) for label, _ in outcomes)
        self.projectors = np.array([p for _, p in outcomes], dtype = complex)
        self.groups = dict(groups) if groups is not None else {}
        self.axis = axis

        n = family.dim
        if self.projectors.shape[1:] != (n, n):
            raise ValueError(textwrap.fill((
                f"Projectors of shape {self.projectors.shape[1:]} do not act "
                f"on the family's {n}-dimensional space."
            )))

        if np.abs(self.projectors.sum(axis = 0) - np.eye(n)).max() > 1e-12:
            raise ValueError("The outcome projectors must sum to the identity.")

        for name, members in self.groups.items():
            missing = set(members) - set(self.labels)
            if missing:
                raise ValueError(f"Group `{name}` has unknown outcomes "
                                 f"{sorted(missing)}.")

        # tr(P rho) = tr(P B0) + sum_k theta_k tr(P B_k)
        self.offset = np.einsum("oij,ji->o", self.projectors,
                                family.base).real
        self.slopes = np.einsum("oij,kji->ok", self.projectors,
                                family.directions).real


    def _coefficients(self, outcome):
        if outcome in self.groups:
            idx = [self.labels.index(m) for m in self.groups[outcome]]
        elif outcome in self.labels:
            idx = [self.labels.index(outcome)]
        else:
            raise KeyError(textwrap.fill((
                f"Unknown outcome `{outcome}`. Outcomes: {self.labels}; "
                f"groups: {tuple(self.groups)}."
            )))
        return self.offset[idx].sum(), self.slopes[idx].sum(axis = 0)


    def likelihood(self, outcome):
        '''Vectorised likelihood ``theta -> tr(P rho(theta))`` of an outcome
        label or group name.
        '''
        offset, slopes = self._coefficients(outcome)

        def fn(points):
            return offset + np.atleast_2d(points) @ slopes

        fn.outcome = outcome
        fn.axes = tuple(int(k) for k in np.flatnonzero(np.abs(slopes) > 1e-15))
        return fn


    def outcome_sets(self, grouped = True):
        if grouped and self.groups:
            return list(self.groups)
        return list(self.labels)


    def dependent_axes(self):
        '''Parameters any outcome likelihood depends on.'''
        return tuple(int(k) for k in
                     np.flatnonzero(np.abs(self.slopes).max(axis = 0) > 1e-15))




def joint_spin_model(family, axis = 3):
    '''Joint measurement of both spins of a two-particle family along the
    same `axis`, with outcomes ``uu, ud, du, dd`` and the groups ``A``
    (agreement: uu, dd) and ``D`` (disagreement: ud, du).

    Examples
    --------
    >>> from mmtherm import scenarios
    >>> from mmtherm.bayes import joint_spin_model
    >>> model = joint_spin_model(scenarios.get_scenario("s21").family)
    >>> float(model.likelihood("D")([[0., 1.]])[0])
    0.0
    '''

    if family.dim != 4:
        raise ValueError(textwrap.fill((
            f"Joint spin measurements need a two-particle (4-dimensional) "
            f"family; got dimension {family.dim}."
        )))

    up, down = spin_projector(axis)
    single = dict(u = up, d = down)
    outcomes = [
        (a + b, np.kron(single[a], single[b]))
        for a in "ud" for b in "ud"
    ]
    groups = {GROUP_AGREE: ["uu", "dd"], GROUP_DISAGREE: ["ud", "du"]}
    return MeasurementModel(family, outcomes, groups, axis = axis)




def outcome_likelihood(model, outcome):
    '''Likelihood function of `outcome` (label or group) under `model`.'''
    return model.likelihood(outcome)




@autorepr(hide = {"density_fn", "region", "base", "factors"})
class Posterior(Prior):
    '''Prior updated by a product of likelihood factors, normalised by the
    product of the step evidences.

    Attributes
    ----------
    base : measure.Prior
        The original prior.

    factors : tuple of callable
        Likelihoods in the order they were applied.

    outcomes : tuple of str
    '''

    def __init__(self, base, factors, Z):
        self.base = base
        self.factors = tuple(factors)
        self.outcomes = tuple(getattr(f, "outcome", "?") for f in factors)

        def density(points):
            out = base.unnormalized(points)
            for f in self.factors:
                out = out * f(points)
            return out

        super().__init__(base.region, density, Z,
                         name = f"{base.name} | {''.join(self.outcomes)}")


    def likelihood_axes(self):
        axes = set()
        for f in self.factors:
            axes.update(getattr(f, "axes", range(self.dim)))
        return tuple(sorted(axes))




def posterior(prior, likelihood, tol = None):
    '''Bayes update of `prior` (a Prior or a Posterior) by `likelihood`.

    Returns
    -------
    (Posterior, float)
        The posterior and the evidence of this step, ``integral of prior *
        likelihood``.

    Raises
    ------
    ZeroDivisionError
        If the evidence vanishes.
    '''

    evidence = float(prior.expectation(likelihood, tol))
    if not evidence > 1e-14:
        raise ZeroDivisionError(textwrap.fill((
            f"The outcome `{getattr(likelihood, 'outcome', '?')}` has zero "
            f"evidence ({evidence:.3e}) under the prior."
        )))

    if isinstance(prior, Posterior):
        base, factors = prior.base, prior.factors + (likelihood,)
    else:
        base, factors = prior, (likelihood,)

    return Posterior(base, factors, prior.Z * evidence), evidence




def _kl_density(post, prior):
    ok = post > DENSITY_FLOOR
    safe_prior = np.where(ok & (prior > 0.), prior, 1.)
    safe_post = np.where(ok, post, 1.)
    return np.where(ok, post * np.log(safe_post / safe_prior), 0.)




def kl_gain(post, prior, tol = KL_TOL):
    '''Information gain :math:`\\int p_{post} \\log(p_{post} / p_{prior})`
    in nats, by quadrature over the common region.

    Examples
    --------
    >>> from mmtherm import scenarios
    >>> from mmtherm.bayes import joint_spin_model, kl_gain, posterior
    >>> sc = scenarios.get_scenario("s21")
    >>> prior = sc.prior("minimal")
    >>> model = joint_spin_model(sc.family)
    >>> post, ev = posterior(prior, model.likelihood("D"))
    >>> round(kl_gain(post, prior), 5)
    0.43195
    '''

    if post.region is not prior.region and (
        post.dim != prior.dim or
        post.region.to_dict() != prior.region.to_dict()
    ):
        raise ValueError("The posterior and prior live on different regions.")

    def integrand(points):
        p = np.asarray(post(points), dtype = float)
        q = np.asarray(prior(points), dtype = float)
        return _kl_density(p, q)

    gain = float(integrate(integrand, post.region, tol))
    return max(gain, 0.) if gain > -1e-10 else gain




def kl_gain_marginal(post, prior, axis, tol = KL_TOL):
    '''Information gain computed from the one-dimensional marginals along
    `axis`; equal to :func:`kl_gain` when every likelihood depends on that
    parameter only.
    '''

    lo, hi = prior.region.axis_range(axis)
    m_post = marginal_density(post, axis)
    m_prior = marginal_density(prior, axis)

    def integrand(points):
        x = points[:, 0]
        return _kl_density(np.asarray(m_post(x)), np.asarray(m_prior(x)))

    return float(integrate(integrand, Interval(lo, hi), tol))




@autorepr(hide = {"outcomes", "ungrouped"})
class GainReport:
    '''Evidences and information gains of every outcome of a measurement.

    Attributes
    ----------
    outcomes : list of dict
        ``label``, ``evidence`` and ``gain_nats`` per (grouped) outcome.

    expected_gain : float
        Evidence-weighted mean gain.

    ungrouped : list of dict
        The same for the fine-grained outcomes, when the model has groups.

    ungrouped_expected_gain : float or None
    '''

    def __init__(self, outcomes, ungrouped = None):
        self.outcomes = list(outcomes)
        self.ungrouped = list(ungrouped) if ungrouped is not None else []

        self.expected_gain = _expected(self.outcomes)
        self.ungrouped_expected_gain = (
            _expected(self.ungrouped) if self.ungrouped else None
        )


    @property
    def evidence_total(self):
        return float(sum(o["evidence"] for o in self.outcomes))


    def gain(self, label):
        for o in self.outcomes + self.ungrouped:
            if o["label"] == label:
                return o["gain_nats"]
        raise KeyError(f"No outcome `{label}` in the report.")


    def swapped_expected_gain(self):
        '''Expected gain of a two-outcome report with the evidences of the
        outcomes exchanged.
        '''
        if len(self.outcomes) != 2:
            raise ValueError("Evidence swapping needs exactly two outcomes.")
        a, b = self.outcomes
        return a["gain_nats"] * b["evidence"] + b["gain_nats"] * a["evidence"]


    def interpretations(self):
        '''Candidate readings of "the expected gain" of this measurement.'''
        out = dict(grouped = self.expected_gain)
        if self.ungrouped_expected_gain is not None:
            out["ungrouped"] = self.ungrouped_expected_gain
        if len(self.outcomes) == 2:
            out["swapped_evidences"] = self.swapped_expected_gain()
        return out


    def match(self, target, tol = 1e-4):
        '''Names of the interpretations reproducing `target` within `tol`.
        '''
        return [
            name for name, value in self.interpretations().items()
            if abs(value - target) <= tol
        ]


    def to_dict(self):
        out = dict(
            outcomes = self.outcomes,
            expected_gain_nats = self.expected_gain,
        )
        if self.ungrouped:
            out["ungrouped"] = dict(
                outcomes = self.ungrouped,
                expected_gain_nats = self.ungrouped_expected_gain,
            )
        out["interpretations"] = self.interpretations()
        return out


    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


    def to_frame(self):
        return pd.DataFrame(self.outcomes + self.ungrouped)




def _expected(outcomes):
    return float(sum(o["evidence"] * o["gain_nats"] for o in outcomes))




def _outcome_gains(prior, model, labels, tol):
    rows = []
    for label in labels:
        post, evidence = posterior(prior, model.likelihood(label))
        rows.append(dict(label = label, evidence = evidence,
                         gain_nats = kl_gain(post, prior, tol)))
    return rows




def expected_gain(prior, model, tol = KL_TOL):
    '''Gains of every outcome and their evidence-weighted mean, for both the
    grouped (agreement / disagreement) and the fine-grained outcomes.

    Returns
    -------
    GainReport
    '''

    grouped = _outcome_gains(prior, model, model.outcome_sets(True), tol)
    ungrouped = None
    if model.groups:
        ungrouped = _outcome_gains(prior, model, model.outcome_sets(False),
                                   tol)

    return GainReport(grouped, ungrouped)




def parse_sequence(sequence, model):
    '''Split an outcome sequence: a string over group names (e.g. ``"AD"``)
    or a list of labels.

    Raises
    ------
    ValueError
        For characters that are not outcome or group names.
    '''

    if isinstance(sequence, str):
        steps = list(sequence.strip().upper())
    else:
        steps = [str(s) for s in sequence]

    valid = set(model.labels) | set(model.groups)
    bad = [s for s in steps if s not in valid]
    if not steps or bad:
        raise ValueError(textwrap.fill((
            f"Invalid outcome sequence `{sequence}`; steps must be among "
            f"{sorted(valid)}."
        )))
    return steps




@autorepr
class GainStep:
    '''One step of a measurement chain.'''

    def __init__(self, label, gain, evidence):
        self.label = label
        self.gain = gain
        self.evidence = evidence


    def to_dict(self):
        return dict(label = self.label, gain_nats = self.gain,
                    evidence = self.evidence)




def sequential_gains(prior, model, sequence, tol = KL_TOL):
    '''Gains along a chain of outcomes: each posterior becomes the next
    prior, and every step reports the KL divergence of the new posterior
    from the current prior together with the step evidence.

    Examples
    --------
    >>> from mmtherm import scenarios
    >>> from mmtherm.bayes import joint_spin_model, sequential_gains
    >>> sc = scenarios.get_scenario("s21")
    >>> model = joint_spin_model(sc.family)
    >>> steps = sequential_gains(sc.prior("minimal"), model, "AD")
    >>> round(steps[1].gain, 5)
    0.54277
    '''

    steps = []
    current = prior
    for label in parse_sequence(sequence, model):
        post, evidence = posterior(current, model.likelihood(label))
        steps.append(GainStep(label, kl_gain(post, current, tol), evidence))
        current = post
    return steps




def gain_table(prior, model, depth = 2, tol = KL_TOL):
    '''Gains of every grouped outcome chain up to `depth` steps.

    Returns
    -------
    pandas.DataFrame
        Columns ``sequence``, ``step``, ``gain_nats``, ``evidence`` and the
        chain probability ``path_probability``.
    '''

    labels = model.outcome_sets(True)
    rows = []

    def walk(current, chain, prob):
        if len(chain) == depth:
            return
        for label in labels:
            post, evidence = posterior(current, model.likelihood(label))
            seq = chain + [label]
            rows.append(dict(
                sequence = "".join(seq),
                step = len(seq),
                gain_nats = kl_gain(post, current, tol),
                evidence = evidence,
                path_probability = prob * evidence,
            ))
            walk(post, seq, prob * evidence)

    walk(prior, [], 1.)
    return pd.DataFrame(rows)
