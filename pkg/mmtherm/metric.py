#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : metric.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


'''Minimal (Bures) and maximal monotone metric tensors of affine
density-matrix families, their volume elements, and an independent
symmetric-logarithmic-derivative computation of the Bures tensor.

With the eigendecomposition :math:`\\rho = \\sum_i \\lambda_i |i\\rangle
\\langle i|` and the constant family directions :math:`B_k`, both metrics
read :math:`G_{kl} = \\frac{1}{2} \\sum_{ij} \\mathrm{Re}[\\langle i | B_k |
j \\rangle \\langle j | B_l | i \\rangle] \\, c(\\lambda_i, \\lambda_j)`
with kernel :math:`c = 1 / (\\lambda_i + \\lambda_j)` for the minimal and
:math:`c = (\\lambda_i + \\lambda_j) / (2 \\lambda_i \\lambda_j)` for the
maximal metric.
'''


import  textwrap
from    enum        import  Enum

import  numpy       as      np
import  pandas      as      pd

from    .matrixcore import  eigensystem, FEASIBILITY_TOL
from    .utilities  import  autorepr


# Pairs (i, j) with lambda_i + lambda_j below this are dropped from the Bures
# sum; eigenvalues below it make the maximal kernel undefined
EIGEN_CUTOFF = 1e-12

# Matrix elements of dropped Bures terms must vanish to this precision
DROPPED_TERM_TOL = 1e-10

# Points per batch in `volume_elements`
CHUNK_SIZE = 32768




class InfeasiblePointError(ValueError):
    '''A metric was requested at an infeasible point, or on the boundary where
    the requested kernel is undefined.
    '''




class MetricKind(Enum):
    '''The two extreme monotone metrics.'''

    Minimal = "minimal"
    Maximal = "maximal"

    @classmethod
    def parse(cls, kind):
        '''Accept a ``MetricKind`` or its (case-insensitive) name.'''
        if isinstance(kind, cls):
            return kind

        for member in cls:
            if str(kind).lower() in (member.value, member.name.lower()):
                return member

        raise ValueError(textwrap.fill((
            f"Unknown metric kind `{kind}`; use 'minimal' or 'maximal'."
        )))




@autorepr
class MetricTensor:
    '''Real symmetric metric tensor in family parameters with the convention
    :math:`ds^2 = \\sum_{kl} G_{kl} d\\theta_k d\\theta_l`.

    Note that a printed line element :math:`g_{\\xi\\zeta} d\\xi d\\zeta`
    with a single cross term corresponds to :math:`g_{\\xi\\zeta} = 2
    G_{\\xi\\zeta}`.
    '''

    def __init__(self, matrix, names = None, kind = None):
        self.matrix = np.asarray(matrix, dtype = float)
        self.names = tuple(names) if names is not None else None
        self.kind = kind


    def __array__(self, dtype = None, copy = None):
        return np.asarray(self.matrix, dtype = dtype)


    def __getitem__(self, idx):
        return self.matrix[idx]


    @property
    def shape(self):
        return self.matrix.shape


    def asymmetry(self):
        return float(np.abs(self.matrix - self.matrix.T).max(initial = 0.))


    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.T))[0])


    def is_positive_semidefinite(self):
        return self.min_eigenvalue() >= -1e-10 * abs(np.trace(self.matrix))


    def volume_element(self):
        return volume_element(self)




def volume_element(tensor):
    '''Volume element :math:`\\sqrt{\\det G}` of a metric tensor.

    Parameters
    ----------
    tensor : MetricTensor or (p, p) array_like

    Returns
    -------
    float

    Raises
    ------
    ValueError
        If the determinant is negative beyond -1e-12, which signals an
        evaluation at an infeasible point.

    Examples
    --------
    >>> import numpy as np
    >>> from mmtherm.metric import volume_element
    >>> volume_element(np.eye(3) / 4)
    0.125
    '''

    g = np.asarray(tensor, dtype = float)
    det = float(np.linalg.det(0.5 * (g + g.T)))
    if det < -1e-12:
        raise ValueError(textwrap.fill((
            f"The metric determinant is negative ({det:.3e}); the tensor was "
            "probably evaluated outside the feasible region."
        )))

    return float(np.sqrt(max(det, 0.)))




def _prepare(family, theta, method):
    theta = np.asarray(theta, dtype = float)
    es = eigensystem(family.density(theta), method = method)
    lam = es.eigenvalues

    if lam[-1] < -FEASIBILITY_TOL:
        raise InfeasiblePointError(textwrap.fill((
            f"The point {theta.tolist()} is infeasible: smallest eigenvalue "
            f"{lam[-1]:.3e}."
        )))

    # <i|B_k|j> for every direction
    vecs = es.eigenvectors
    elems = np.einsum("ai,kab,bj->kij", vecs.conj(), family.directions, vecs)
    return lam, elems, es




def _contract(elems, kernel):
    # G_kl = 1/2 sum_ij Re[<i|B_k|j> <j|B_l|i>] c_ij; <j|B_l|i> = conj(<i|B_l|j>)
    g = 0.5 * np.einsum("kij,lij,ij->kl", elems, elems.conj(), kernel).real
    return 0.5 * (g + g.T)




def bures_tensor(family, theta, cutoff = EIGEN_CUTOFF, method = "jacobi"):
    '''Minimal monotone (Bures) metric tensor of `family` at `theta`.

    Terms with :math:`\\lambda_i + \\lambda_j \\le` `cutoff` are dropped;
    their matrix elements must vanish within 1e-10, otherwise the metric is
    not finite there and an error is raised.

    Parameters
    ----------
    family : AffineFamily
    theta : (p,) array_like
    cutoff : float, default 1e-12
    method : {"jacobi", "lapack"}, default "jacobi"
        Eigensolver used.

    Returns
    -------
    MetricTensor

    Raises
    ------
    InfeasiblePointError
        If `theta` is infeasible or a dropped term has a non-vanishing matrix
        element.

    Examples
    --------
    >>> from mmtherm import scenarios
    >>> from mmtherm.metric import bures_tensor
    >>> family = scenarios.get_scenario("s21").family
    >>> g = bures_tensor(family, [0.2, 0.1])
    >>> round(g[0, 0], 6)
    0.52381
    '''

    lam, elems, _ = _prepare(family, theta, method)
    lsum = lam[:, None] + lam[None, :]
    keep = lsum > cutoff

    if not keep.all():
        dropped = np.abs(elems[:, ~keep]).max(initial = 0.)
        if dropped > DROPPED_TERM_TOL:
            raise InfeasiblePointError(textwrap.fill((
                f"The Bures metric diverges at {np.asarray(theta).tolist()}: "
                f"a direction has matrix element {dropped:.3e} on the null "
                "space of the density matrix."
            )))

    kernel = np.where(keep, 1. / np.where(keep, lsum, 1.), 0.)
    return MetricTensor(_contract(elems, kernel), family.names,
                        MetricKind.Minimal)




def maximal_tensor(family, theta, cutoff = EIGEN_CUTOFF, method = "jacobi",
                   check = True):
    '''Maximal monotone metric tensor of `family` at `theta`, with kernel
    :math:`(\\lambda_i + \\lambda_j) / (2 \\lambda_i \\lambda_j)`.

    The result is also computed as :math:`\\frac{1}{2} \\mathrm{Re}\\,
    \\mathrm{tr}(B_k \\rho^{-1} B_l)` and the two are compared when `check`
    is True.

    Raises
    ------
    InfeasiblePointError
        If any eigenvalue is at or below `cutoff`.

    RuntimeError
        If the two equivalent evaluations disagree.
    '''

    lam, elems, es = _prepare(family, theta, method)
    if lam[-1] <= cutoff:
        raise InfeasiblePointError(textwrap.fill((
            "The maximal metric is undefined on the boundary; smallest "
            f"eigenvalue at {np.asarray(theta).tolist()} is {lam[-1]:.3e}."
        )))

    kernel = (lam[:, None] + lam[None, :]) / (2. * np.outer(lam, lam))
    g = _contract(elems, kernel)

    if check:
        # Same object via the inverse density matrix, in the eigenbasis
        inv = elems / lam[None, None, :]
        alt = 0.5 * np.einsum("kij,lji->kl", inv, elems).real
        alt = 0.5 * (alt + alt.T)
        scale = max(np.abs(g).max(), 1e-300)
        if np.abs(g - alt).max() > 1e-8 * scale:
            raise RuntimeError(textwrap.fill((
                "Inconsistent maximal metric: the kernel sum and the inverse "
                "trace formula differ by "
                f"{np.abs(g - alt).max() / scale:.3e} (relative)."
            )))

    return MetricTensor(g, family.names, MetricKind.Maximal)




def metric_tensor(family, theta, kind, **kwargs):
    '''Dispatch to :func:`bures_tensor` or :func:`maximal_tensor`.'''
    kind = MetricKind.parse(kind)
    if kind is MetricKind.Minimal:
        return bures_tensor(family, theta, **kwargs)
    return maximal_tensor(family, theta, **kwargs)




def sld_cross_check(family, theta):
    '''Bures tensor from symmetric logarithmic derivatives.

    Each :math:`L_k` solves the linear system :math:`B_k = (L_k \\rho + \\rho
    L_k) / 2` directly (no eigendecomposition), and :math:`G_{kl} =
    \\frac{1}{4} \\mathrm{Re}\\,\\mathrm{tr}(B_k L_l)`. Limited to dimension
    8 to keep the :math:`n^2 \\times n^2` systems small.

    Raises
    ------
    ValueError
        If the dimension exceeds 8 or the density matrix is singular.
    '''

    n = family.dim
    if n > 8:
        raise ValueError(textwrap.fill((
            f"The SLD cross-check is limited to dimension 8; got {n}."
        )))

    rho = family.density(np.asarray(theta, dtype = float))
    eye = np.eye(n)

    # Row-major vectorisation: vec(L rho) = (I kron rho^T) vec(L) and
    # vec(rho L) = (rho kron I) vec(L)
    system = 0.5 * (np.kron(eye, rho.T) + np.kron(rho, eye))

    slds = []
    for d in family.directions:
        try:
            sol = np.linalg.solve(system, d.reshape(-1))
        except np.linalg.LinAlgError as err:
            raise ValueError(textwrap.fill((
                "The SLD equations are singular at "
                f"{np.asarray(theta).tolist()}; the density matrix is not "
                "full rank."
            ))) from err
        slds.append(sol.reshape(n, n))

    p = family.num_params
    g = np.empty((p, p))
    for k in range(p):
        for l in range(p):
            g[k, l] = 0.25 * np.trace(family.directions[k] @ slds[l]).real

    return MetricTensor(0.5 * (g + g.T), family.names, MetricKind.Minimal)




def volume_elements(family, thetas, kind, cutoff = EIGEN_CUTOFF):
    '''Batched volume elements :math:`\\sqrt{\\det G}` at an (N, p) array of
    points, using LAPACK eigendecompositions for throughput. Points whose
    smallest eigenvalue is at or below `cutoff` give NaN.
    '''

    kind = MetricKind.parse(kind)
    thetas = np.atleast_2d(np.asarray(thetas, dtype = float))

    if len(thetas) > CHUNK_SIZE:
        return np.concatenate([
            volume_elements(family, thetas[i:i + CHUNK_SIZE], kind, cutoff)
            for i in range(0, len(thetas), CHUNK_SIZE)
        ])

    rho = family.density(thetas)
    lam, vecs = np.linalg.eigh(rho)

    out = np.full(len(thetas), np.nan)
    ok = lam[:, 0] > cutoff
    if not ok.any():
        return out

    lam = lam[ok]
    vecs = vecs[ok]
    elems = np.einsum(
        "nai,kab,nbj->nkij", vecs.conj(), family.directions, vecs,
        optimize = True,
    )

    lsum = lam[:, :, None] + lam[:, None, :]
    if kind is MetricKind.Minimal:
        kernel = 1. / lsum
    else:
        kernel = lsum / (2. * lam[:, :, None] * lam[:, None, :])

    g = 0.5 * np.einsum(
        "nkij,nlij,nij->nkl", elems, elems.conj(), kernel, optimize = True,
    ).real
    det = np.linalg.det(0.5 * (g + np.swapaxes(g, 1, 2)))
    out[ok] = np.sqrt(np.clip(det, 0., None))
    return out




def volume_function(family, kind, cutoff = EIGEN_CUTOFF):
    '''Vectorised volume-element callable ``f(points) -> values`` for use as
    an (unnormalised) prior density in quadrature.
    '''
    kind = MetricKind.parse(kind)

    def volume(points):
        return volume_elements(family, points, kind, cutoff = cutoff)

    volume.kind = kind
    return volume




def compare_metrics(family, points, with_sld = True):
    '''Compare the minimal and maximal metrics at the given points.

    Returns
    -------
    pandas.DataFrame
        One row per point with the volume elements, their ratio, the smallest
        eigenvalue of :math:`G_{max} - G_{min}` (non-negative by maximality)
        and, for dimension at most 8, the largest absolute deviation between
        the Bures tensor and its SLD computation.
    '''

    rows = []
    for theta in np.atleast_2d(points):
        gmin = bures_tensor(family, theta)
        gmax = maximal_tensor(family, theta)
        vmin = volume_element(gmin)
        vmax = volume_element(gmax)

        diff = np.asarray(gmax) - np.asarray(gmin)
        row = dict(
            {name: float(t) for name, t in zip(family.names, theta)},
            volume_minimal = vmin,
            volume_maximal = vmax,
            ratio = vmax / vmin,
            min_eig_max_minus_min = float(np.linalg.eigvalsh(diff)[0]),
        )

        if with_sld and family.dim <= 8:
            sld = sld_cross_check(family, theta)
            row["sld_deviation"] = float(
                np.abs(np.asarray(sld) - np.asarray(gmin)).max()
            )

        rows.append(row)

    return pd.DataFrame(rows)
