#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : measure.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


'''Feasibility regions, double-exponential (tanh-sinh) quadrature for
integrands with boundary singularities, priors, marginals and the shrunken
domain limit for improper volume elements.

Every region turns a refinement level into a quadrature rule - points,
weights and a *margin*, the distance of each node to the region boundary in
unit coordinates. Nodes never touch the boundary; their complements to the
interval ends are computed directly, so that coordinates within 1e-30 of a
boundary stay exact. Two-dimensional regions are mapped onto product squares
(triangles by collapsing an edge onto a vertex, ellipses in polar
coordinates); balls and cones in three or more dimensions integrate
functions symmetric about their first axis through an exact reduction to
two variables.
'''


import  io
import  math
import  textwrap

import  numpy       as      np
import  pandas      as      pd

from    scipy.optimize      import  brentq, minimize_scalar
from    scipy.interpolate   import  PchipInterpolator
from    scipy.integrate     import  simpson
from    tqdm                import  tqdm

from    .matrixcore import  min_eigenvalue
from    .utilities  import  autorepr


# Truncation of the tanh-sinh parameter; complements reach ~1e-37
T_MAX = 4.0

# Refinement levels (step h = 2^-level) for one- and two-variable rules
MIN_LEVEL = 3
MAX_LEVEL_1D = 12
MAX_LEVEL_2D = 7

DEFAULT_TOL_1D = 1e-8
DEFAULT_TOL_2D = 1e-6

# Nodes closer than this to the boundary may return non-finite values, which
# are then dropped; anywhere else they are an error
EDGE_MARGIN = 1e-9

# Boundary bands (in margin) compared by the divergence test, and the ratio
# of their masses above which an integral is flagged divergent
INNER_BAND = (1e-12, 1e-8)
OUTER_BAND = (1e-8, 1e-4)
DIVERGENCE_RATIO = 0.5

# Tolerance of the nested normalisation in the shrink limit
SHRINK_Z_TOL = 1e-8

# Smallest relative tolerance scipy's brentq accepts
BRENT_RTOL = 4. * np.finfo(float).eps




class ConvergenceError(ArithmeticError):
    '''Quadrature did not reach its tolerance at the maximum level.'''

    def __init__(self, message, estimate = None, error = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error




class DivergenceError(ArithmeticError):
    '''A non-integrable boundary singularity was detected: the weight is an
    improper prior on the region.
    '''

    def __init__(self, message, estimate = None, band_ratio = None):
        super().__init__(message)
        self.estimate = estimate
        self.band_ratio = band_ratio




class ExtrapolationError(ArithmeticError):
    '''Shrunken-domain extrapolation did not settle within tolerance.'''




def _sphere_area(m):
    # Surface area of the unit sphere in R^m, 2 pi^(m/2) / Gamma(m/2)
    return 2. * math.pi ** (0.5 * m) / math.gamma(0.5 * m)




def tanh_sinh_nodes(level, t_max = T_MAX):
    '''Tanh-sinh nodes on (-1, 1) with step ``h = 2**-level``.

    Returns
    -------
    u : numpy.ndarray
        Nodes in (-1, 1).

    weights : numpy.ndarray
        Quadrature weights, :math:`h \\frac{\\pi}{2} \\cosh t \\,
        \\mathrm{sech}^2(\\frac{\\pi}{2} \\sinh t)`.

    lower, upper : numpy.ndarray
        Complements ``1 + u`` and ``1 - u``, accurate to full relative
        precision near the ends.
    '''

    h = 2. ** -level
    kmax = int(round(t_max / h))
    t = h * np.arange(-kmax, kmax + 1)
    s = 0.5 * np.pi * np.sinh(np.abs(t))

    # Complement to the nearer end: 1 - tanh(s) = 2 / (1 + e^{2s})
    near = 2. / (1. + np.exp(2. * s))
    far = 2. - near

    lower = np.where(t < 0, near, far)
    upper = np.where(t < 0, far, near)
    weights = h * 0.5 * np.pi * np.cosh(t) * near * far

    keep = (near > 0.) & (weights > 0.)
    u = np.where(t < 0, lower - 1., 1. - upper)
    return u[keep], weights[keep], lower[keep], upper[keep]




def _interval_nodes(a, b, level):
    # Nodes mapped to (a, b) with accurate coordinates near both ends
    u, w, lo, up = tanh_sinh_nodes(level)
    half = 0.5 * (b - a)
    x = np.where(u < 0, a + half * lo, b - half * up)
    return x, half * w, lo, up




@autorepr(short = {"points", "weights", "margin"})
class QuadratureRule:
    '''Quadrature points (N, d), weights (N,) and boundary margins (N,).'''

    def __init__(self, points, weights, margin):
        self.points = np.asarray(points, dtype = float)
        self.weights = np.asarray(weights, dtype = float)
        self.margin = np.asarray(margin, dtype = float)


    @property
    def size(self):
        return len(self.weights)




class Region:
    '''Base class for feasibility regions.

    Subclasses define ``dim``, ``quadrature_dim`` (the number of variables
    the quadrature actually runs over), ``bounds()``, ``contains(points)``,
    ``area()``, ``axis_range(axis)``, ``slice(axis, value)``, ``to_dict()``
    and ``_build_rule(level)``. ``symmetry_axis`` is None for regions
    integrating arbitrary functions, or 0 for balls and cones whose
    integrands must be symmetric about the first axis.
    '''

    symmetry_axis = None

    def rule(self, level):
        '''Quadrature rule at refinement `level`, cached per region.'''
        cache = self.__dict__.setdefault("_rules", {})
        if level not in cache:
            cache[level] = self._build_rule(level)
        return cache[level]


    @property
    def max_level(self):
        return MAX_LEVEL_1D if self.quadrature_dim == 1 else MAX_LEVEL_2D


    @property
    def default_tol(self):
        return DEFAULT_TOL_1D if self.quadrature_dim == 1 else DEFAULT_TOL_2D


    def axis_range(self, axis):
        lo, hi = self.bounds()[axis]
        return float(lo), float(hi)


    def _check_axis(self, axis):
        if not 0 <= axis < self.dim:
            raise IndexError(textwrap.fill((
                f"Axis {axis} out of range for a {self.dim}-dimensional "
                "region."
            )))


    def interior_points(self, n, rng = None, margin = 1e-3):
        '''Draw `n` points uniformly from the region (rejection sampling in
        the bounding box), at least `margin` away from the boundary in the
        sense of `contains`.
        '''
        rng = np.random.default_rng(rng)
        box = self.bounds()
        out = []
        while sum(len(o) for o in out) < n:
            cand = rng.uniform(box[:, 0], box[:, 1], size = (4 * n, self.dim))
            out.append(cand[self.contains(cand, tol = -margin)])
        return np.concatenate(out)[:n]




@autorepr(hide = {"dim", "quadrature_dim", "max_level", "default_tol"})
class Interval(Region):
    '''Open interval (a, b).'''

    dim = 1
    quadrature_dim = 1

    def __init__(self, a, b):
        a, b = float(a), float(b)
        if not (np.isfinite(a) and np.isfinite(b) and a < b):
            raise ValueError(textwrap.fill((
                f"An interval needs finite ends with a < b. Got ({a}, {b})."
            )))
        self.a = a
        self.b = b


    def bounds(self):
        return np.array([[self.a, self.b]])


    def contains(self, points, tol = 0.):
        x = np.asarray(points, dtype = float).reshape(-1, 1)[:, 0]
        return (x >= self.a - tol) & (x <= self.b + tol)


    def area(self):
        return self.b - self.a


    def shrink(self, factor):
        mid = 0.5 * (self.a + self.b)
        return Interval(mid + factor * (self.a - mid),
                        mid + factor * (self.b - mid))


    def slice(self, axis, value):
        raise ValueError("A one-dimensional region cannot be sliced further.")


    def _build_rule(self, level):
        x, w, lo, up = _interval_nodes(self.a, self.b, level)
        return QuadratureRule(x[:, None], w, np.minimum(lo, up))


    def to_dict(self):
        return dict(type = "interval", a = self.a, b = self.b)




@autorepr(hide = {"dim", "quadrature_dim", "max_level", "default_tol"})
class Box(Region):
    '''Product of open intervals, one per axis.'''

    def __init__(self, intervals):
        self.intervals = np.array(intervals, dtype = float).reshape(-1, 2)
        if (self.intervals[:, 0] >= self.intervals[:, 1]).any():
            raise ValueError(textwrap.fill((
                f"Box intervals must satisfy lo < hi. Got {self.intervals}."
            )))


    @property
    def dim(self):
        return len(self.intervals)


    @property
    def quadrature_dim(self):
        return self.dim


    def bounds(self):
        return self.intervals.copy()


    def contains(self, points, tol = 0.):
        p = np.atleast_2d(points)
        return (
            (p >= self.intervals[:, 0] - tol) &
            (p <= self.intervals[:, 1] + tol)
        ).all(axis = 1)


    def area(self):
        return float(np.prod(self.intervals[:, 1] - self.intervals[:, 0]))


    def shrink(self, factor):
        mid = self.intervals.mean(axis = 1, keepdims = True)
        return Box(mid + factor * (self.intervals - mid))


    def slice(self, axis, value):
        self._check_axis(axis)
        lo, hi = self.intervals[axis]
        if not lo < value < hi:
            raise ValueError(f"Slice value {value} outside ({lo}, {hi}).")

        rest = np.delete(self.intervals, axis, axis = 0)
        if len(rest) == 1:
            return Interval(*rest[0])
        return Box(rest)


    def _build_rule(self, level):
        nodes = [_interval_nodes(a, b, level) for a, b in self.intervals]
        grids = np.meshgrid(*[n[0] for n in nodes], indexing = "ij")
        wgrid = np.meshgrid(*[n[1] for n in nodes], indexing = "ij")
        mgrid = np.meshgrid(
            *[np.minimum(n[2], n[3]) for n in nodes], indexing = "ij"
        )

        points = np.stack([g.ravel() for g in grids], axis = 1)
        weights = np.prod([g.ravel() for g in wgrid], axis = 0)
        margin = np.min([g.ravel() for g in mgrid], axis = 0)
        return QuadratureRule(points, weights, margin)


    def to_dict(self):
        return dict(type = "box", intervals = self.intervals.tolist())




@autorepr(hide = {"dim", "quadrature_dim", "max_level", "default_tol"})
class Triangle(Region):
    '''Triangle with vertices ``(apex, b, c)``.

    Integration uses the collapsed map :math:`x = A + s (B - A) + s t (C - B)`
    for ``s, t`` in (0, 1), whose Jacobian :math:`s |\\det(B - A, C - B)|`
    removes the apex corner singularity.
    '''

    dim = 2
    quadrature_dim = 2

    def __init__(self, vertices):
        self.vertices = np.array(vertices, dtype = float).reshape(3, 2)
        a, b, c = self.vertices
        self._det = float(np.linalg.det(np.stack([b - a, c - b], axis = 1)))
        if abs(self._det) < 1e-14:
            raise ValueError("Degenerate triangle: the vertices are collinear.")


    @staticmethod
    def from_inequalities(rows):
        '''Triangle from three inequalities ``a x + b y <= c`` given as rows
        ``(a, b, c)``; vertices are pairwise intersections of their lines.
        '''
        rows = np.asarray(rows, dtype = float).reshape(3, 3)
        vertices = []
        for i, j in ((1, 2), (0, 2), (0, 1)):
            mat = rows[[i, j], :2]
            vertices.append(np.linalg.solve(mat, rows[[i, j], 2]))
        return Triangle(vertices)


    def _halfplanes(self):
        # Inward-facing edge inequalities n . x <= d for each edge
        out = []
        for i in range(3):
            p, q, r = (self.vertices[(i + k) % 3] for k in range(3))
            edge = q - p
            normal = np.array([edge[1], -edge[0]])
            if normal @ (r - p) > 0:
                normal = -normal
            out.append((normal, normal @ p))
        return out


    def bounds(self):
        return np.stack(
            [self.vertices.min(axis = 0), self.vertices.max(axis = 0)],
            axis = 1,
        )


    def contains(self, points, tol = 0.):
        p = np.atleast_2d(points)
        ok = np.ones(len(p), dtype = bool)
        for normal, d in self._halfplanes():
            ok &= p @ normal <= d + tol * np.linalg.norm(normal)
        return ok


    def area(self):
        return 0.5 * abs(self._det)


    def shrink(self, factor):
        centroid = self.vertices.mean(axis = 0)
        return Triangle(centroid + factor * (self.vertices - centroid))


    def slice(self, axis, value):
        self._check_axis(axis)
        other = 1 - axis

        # Intersections of the line x[axis] = value with the three edges
        hits = []
        for i in range(3):
            p, q = self.vertices[i], self.vertices[(i + 1) % 3]
            if p[axis] == q[axis]:
                continue
            lam = (value - p[axis]) / (q[axis] - p[axis])
            if -1e-15 <= lam <= 1 + 1e-15:
                hits.append(p[other] + lam * (q[other] - p[other]))

        if len(hits) < 2 or max(hits) - min(hits) <= 0.:
            raise ValueError(textwrap.fill((
                f"The slice x[{axis}] = {value} does not cross the triangle's "
                "interior."
            )))
        return Interval(min(hits), max(hits))


    def _build_rule(self, level):
        u, w, lo, up = tanh_sinh_nodes(level)
        s, ws, s_up = 0.5 * lo, 0.5 * w, up
        t, wt = 0.5 * lo, 0.5 * w
        t_edge = np.minimum(lo, up)

        ss, tt = np.meshgrid(s, t, indexing = "ij")
        wss, wtt = np.meshgrid(ws, wt, indexing = "ij")
        mss, mtt = np.meshgrid(s_up, t_edge, indexing = "ij")

        a, b, c = self.vertices
        ss, tt = ss.ravel(), tt.ravel()
        points = a + np.outer(ss, b - a) + np.outer(ss * tt, c - b)
        weights = (wss * wtt).ravel() * ss * abs(self._det)
        margin = np.minimum(mss.ravel(), ss * mtt.ravel())
        return QuadratureRule(points, weights, margin)


    def to_dict(self):
        return dict(type = "triangle", vertices = self.vertices.tolist())




@autorepr(hide = {"dim", "quadrature_dim", "max_level", "default_tol"})
class Ellipse(Region):
    '''Ellipse :math:`(x - c)^T Q (x - c) \\le 1` with symmetric positive
    definite `form` Q, integrated in polar coordinates of the Cholesky
    factor.
    '''

    dim = 2
    quadrature_dim = 2

    def __init__(self, form, center = (0., 0.)):
        self.form = np.array(form, dtype = float).reshape(2, 2)
        self.center = np.array(center, dtype = float).reshape(2)
        if not np.allclose(self.form, self.form.T):
            raise ValueError("The ellipse quadratic form must be symmetric.")
        try:
            chol = np.linalg.cholesky(self.form)
        except np.linalg.LinAlgError as err:
            raise ValueError(
                "The ellipse quadratic form must be positive definite."
            ) from err

        # x = c + M y maps the unit disk onto the ellipse
        self._map = np.linalg.inv(chol.T)
        self._jac = abs(float(np.linalg.det(self._map)))


    @staticmethod
    def axis_aligned(semi_axes, center = (0., 0.)):
        a, b = semi_axes
        return Ellipse(np.diag([1. / a ** 2, 1. / b ** 2]), center)


    def bounds(self):
        # Half-widths sqrt((Q^-1)_ii)
        half = np.sqrt(np.diag(np.linalg.inv(self.form)))
        return np.stack([self.center - half, self.center + half], axis = 1)


    def contains(self, points, tol = 0.):
        d = np.atleast_2d(points) - self.center
        q = np.einsum("ni,ij,nj->n", d, self.form, d)
        return q <= (1. + tol) ** 2


    def area(self):
        return np.pi * self._jac


    def shrink(self, factor):
        return Ellipse(self.form / factor ** 2, self.center)


    def slice(self, axis, value):
        self._check_axis(axis)
        other = 1 - axis
        q = self.form
        dv = value - self.center[axis]

        # q_oo y^2 + 2 q_ao dv y + q_aa dv^2 - 1 <= 0 in y = x[other] - c
        a = q[other, other]
        b = 2. * q[axis, other] * dv
        c = q[axis, axis] * dv * dv - 1.
        disc = b * b - 4. * a * c
        if disc <= 0.:
            raise ValueError(textwrap.fill((
                f"The slice x[{axis}] = {value} does not cross the ellipse's "
                "interior."
            )))

        root = np.sqrt(disc)
        lo = (-b - root) / (2. * a) + self.center[other]
        hi = (-b + root) / (2. * a) + self.center[other]
        return Interval(lo, hi)


    def _build_rule(self, level):
        # rho in (0, 1): only the outer end is boundary
        rho, wr, _, rho_up = _interval_nodes(0., 1., level)
        phi, wp, _, _ = _interval_nodes(0., 2. * np.pi, level)

        rr, pp = np.meshgrid(rho, phi, indexing = "ij")
        wrr, wpp = np.meshgrid(wr, wp, indexing = "ij")
        mrr, _ = np.meshgrid(rho_up, phi, indexing = "ij")

        rr, pp = rr.ravel(), pp.ravel()
        unit = np.stack([rr * np.cos(pp), rr * np.sin(pp)], axis = 1)
        points = self.center + unit @ self._map.T
        weights = (wrr * wpp).ravel() * rr * self._jac
        return QuadratureRule(points, weights, mrr.ravel())


    def to_dict(self):
        return dict(
            type = "ellipse",
            form = self.form.tolist(),
            center = self.center.tolist(),
        )




@autorepr(hide = {"quadrature_dim", "max_level", "default_tol"})
class Ball(Region):
    '''Ball of dimension `dim` and `radius` centred at the origin.

    Parameters
    ----------
    dim : int
    radius : float, default 1
    symmetry : {"axial", "radial", "none"}, default "axial"
        Symmetry assumed of the integrands. "axial": functions of
        :math:`(x_0, |x_{1:}|)`, integrated over two variables with the
        sphere-area weight; "radial": functions of :math:`|x|` only,
        integrated over the radius; "none": general functions, supported for
        ``dim <= 2``.
    '''

    def __init__(self, dim, radius = 1., symmetry = "axial"):
        self.dim = int(dim)
        self.radius = float(radius)
        self.symmetry = str(symmetry)

        if self.dim < 1 or not self.radius > 0.:
            raise ValueError("A ball needs dim >= 1 and a positive radius.")
        if self.symmetry not in ("axial", "radial", "none"):
            raise ValueError(f"Unknown ball symmetry `{symmetry}`.")
        if self.symmetry == "none" and self.dim > 2:
            raise ValueError(textwrap.fill((
                "Balls in three or more dimensions only integrate axially or "
                "radially symmetric functions."
            )))


    @property
    def symmetry_axis(self):
        return 0 if self.symmetry == "axial" and self.dim > 1 else None


    @property
    def quadrature_dim(self):
        if self.dim == 1 or self.symmetry == "radial":
            return 1
        return 2


    def bounds(self):
        return np.tile([-self.radius, self.radius], (self.dim, 1))


    def contains(self, points, tol = 0.):
        p = np.atleast_2d(points)
        return np.sqrt((p * p).sum(axis = 1)) <= self.radius + tol


    def area(self):
        return (
            math.pi ** (0.5 * self.dim) * self.radius ** self.dim /
            math.gamma(0.5 * self.dim + 1.)
        )


    def shrink(self, factor):
        return Ball(self.dim, self.radius * factor, self.symmetry)


    def slice(self, axis, value):
        self._check_axis(axis)
        if self.dim == 1:
            raise ValueError("A one-dimensional region cannot be sliced.")

        r2 = (self.radius - value) * (self.radius + value)
        if not r2 > 0.:
            raise ValueError(textwrap.fill((
                f"The slice x[{axis}] = {value} lies outside the ball of "
                f"radius {self.radius}."
            )))

        radius = math.sqrt(r2)
        if self.dim == 2:
            return Interval(-radius, radius)

        if self.symmetry == "radial" or axis == 0:
            return Ball(self.dim - 1, radius, "radial")
        return Ball(self.dim - 1, radius, "axial")


    def _build_rule(self, level):
        d, R = self.dim, self.radius

        if d == 1:
            x, w, lo, up = _interval_nodes(-R, R, level)
            return QuadratureRule(x[:, None], w, np.minimum(lo, up))

        if self.symmetry == "radial":
            rho, w, _, up = _interval_nodes(0., R, level)
            points = np.zeros((len(rho), d))
            points[:, 0] = rho
            weights = w * _sphere_area(d) * rho ** (d - 1)
            return QuadratureRule(points, weights, up)

        if self.symmetry == "none":
            return Ellipse(np.eye(2) / R ** 2).rule(level)

        # Axial: outer x0 in (-R, R), inner rho in (0, sqrt(R^2 - x0^2))
        x0, w0, lo0, up0 = _interval_nodes(-R, R, level)
        half = 0.5 * R
        rmax = np.sqrt((half * lo0) * (2. * R - half * lo0))
        rmax = np.where(x0 >= 0, np.sqrt((half * up0) * (2. * R - half * up0)),
                        rmax)

        u, wu, _, upu = tanh_sinh_nodes(level)
        frac = 1. - 0.5 * upu           # rho / rmax in (0, 1)

        xx, ff = np.meshgrid(x0, frac, indexing = "ij")
        ww, wf = np.meshgrid(w0, 0.5 * wu, indexing = "ij")
        rr, _ = np.meshgrid(rmax, frac, indexing = "ij")
        m0, mf = np.meshgrid(np.minimum(lo0, up0), upu, indexing = "ij")

        rho = (rr * ff).ravel()
        points = np.zeros((rho.size, d))
        points[:, 0] = xx.ravel()
        points[:, 1] = rho

        area = _sphere_area(d - 1)
        weights = (ww * wf * rr).ravel() * area * rho ** (d - 2)
        # Distance to the sphere is about 1 - r^2 / R^2 = upu (rmax / R)^2
        margin = np.minimum(m0.ravel(), (mf * (rr / R) ** 2).ravel())
        return QuadratureRule(points, weights, margin)


    def to_dict(self):
        return dict(
            type = "ball",
            dim = self.dim,
            radius = self.radius,
            symmetry = self.symmetry,
        )




@autorepr(hide = {"quadrature_dim", "max_level", "default_tol",
                  "symmetry_axis"})
class Cone(Region):
    '''Solid cone :math:`\\{(v, r): 0 < v < h, |r| \\le a v\\}` in `dim`
    dimensions, with the axis along the first coordinate. Integrands must be
    functions of :math:`(v, |r|)`.
    '''

    symmetry_axis = 0
    quadrature_dim = 2

    def __init__(self, dim, ratio = 1., height = 1.):
        self.dim = int(dim)
        self.ratio = float(ratio)
        self.height = float(height)
        if self.dim < 2 or self.ratio <= 0. or self.height <= 0.:
            raise ValueError(
                "A cone needs dim >= 2 and positive ratio and height."
            )


    def bounds(self):
        out = np.tile([-self.ratio * self.height, self.ratio * self.height],
                      (self.dim, 1))
        out[0] = [0., self.height]
        return out


    def contains(self, points, tol = 0.):
        p = np.atleast_2d(points)
        r = np.sqrt((p[:, 1:] ** 2).sum(axis = 1))
        return (
            (p[:, 0] >= -tol) & (p[:, 0] <= self.height + tol) &
            (r <= self.ratio * p[:, 0] + tol)
        )


    def area(self):
        m = self.dim - 1
        base = math.pi ** (0.5 * m) / math.gamma(0.5 * m + 1.)
        return base * self.ratio ** m * self.height ** self.dim / self.dim


    def shrink(self, factor):
        return Cone(self.dim, self.ratio * factor, self.height)


    def slice(self, axis, value):
        if axis != 0:
            raise ValueError("Cones can only be sliced along their axis.")
        if not 0. < value < self.height:
            raise ValueError(f"Slice value {value} outside the cone height.")

        radius = self.ratio * value
        if self.dim == 2:
            return Interval(-radius, radius)
        return Ball(self.dim - 1, radius, "radial")


    def _build_rule(self, level):
        v, wv, lov, upv = _interval_nodes(0., self.height, level)
        u, wu, _, upu = tanh_sinh_nodes(level)
        frac = 1. - 0.5 * upu

        vv, ff = np.meshgrid(v, frac, indexing = "ij")
        wvv, wff = np.meshgrid(wv, 0.5 * wu, indexing = "ij")
        mv, mf = np.meshgrid(np.minimum(lov, upv), upu, indexing = "ij")

        smax = (self.ratio * vv).ravel()
        s = smax * ff.ravel()
        points = np.zeros((s.size, self.dim))
        points[:, 0] = vv.ravel()
        points[:, 1] = s

        m = self.dim - 1
        weights = (wvv * wff).ravel() * smax * _sphere_area(m) * s ** (m - 1)
        margin = np.minimum(mv.ravel(), mf.ravel())
        return QuadratureRule(points, weights, margin)


    def to_dict(self):
        return dict(
            type = "cone",
            dim = self.dim,
            ratio = self.ratio,
            height = self.height,
        )




@autorepr(hide = {"family", "quadrature_dim", "max_level", "default_tol"})
class Implicit(Region):
    '''Feasible set of an affine family (smallest eigenvalue at least
    ``-tol``) inside a bounding box, whose center must be feasible.

    In one variable the interval ends are located by root finding on the
    smallest eigenvalue; in two variables the bounding-box rule is masked
    with the feasibility indicator, which is only first-order accurate and
    is meant for validation.
    '''

    def __init__(self, family, box, tol = 0.):
        self.family = family
        self.box = np.array(box, dtype = float).reshape(-1, 2)
        self.tol = float(tol)

        if self.box.shape[0] != family.num_params:
            raise ValueError(textwrap.fill((
                f"The bounding box has {self.box.shape[0]} axes, but the "
                f"family has {family.num_params} parameters."
            )))

        center = self.box.mean(axis = 1)
        if self._lmin(center) < -self.tol:
            raise ValueError(textwrap.fill((
                f"The bounding box center {center.tolist()} must be feasible "
                "for the family."
            )))

        self._interval = None
        if self.dim == 1:
            self._interval = _feasible_interval(
                lambda x: self._lmin(np.array([x])) + self.tol,
                self.box[0], center[0],
            )


    def _lmin(self, points):
        return min_eigenvalue(self.family, points)


    @property
    def dim(self):
        return len(self.box)


    @property
    def quadrature_dim(self):
        return self.dim


    @property
    def default_tol(self):
        return DEFAULT_TOL_1D if self.dim == 1 else 1e-3


    @property
    def interval(self):
        return self._interval


    def bounds(self):
        if self._interval is not None:
            return self._interval.bounds()
        return self.box.copy()


    def contains(self, points, tol = 0.):
        p = np.atleast_2d(points)
        inbox = (
            (p >= self.box[:, 0] - tol) & (p <= self.box[:, 1] + tol)
        ).all(axis = 1)
        return inbox & (self._lmin(p) >= -self.tol - max(tol, 0.) * 1e-3)


    def area(self):
        if self._interval is not None:
            return self._interval.area()
        return float(self.rule(MAX_LEVEL_2D).weights.sum())


    def slice(self, axis, value):
        '''Interval of feasible values of the other parameter with
        ``theta[axis] = value``; two-parameter families only.
        '''
        self._check_axis(axis)
        if self.dim != 2:
            raise ValueError("Only two-parameter implicit regions are sliced.")

        other = 1 - axis

        def lmin(x):
            theta = np.empty(2)
            theta[axis] = value
            theta[other] = x
            return self._lmin(theta) + self.tol

        # Start the root search from the most feasible point on the line
        grid = np.linspace(*self.box[other], 401)[1:-1]
        vals = [lmin(x) for x in grid]
        start = grid[int(np.argmax(vals))]
        if max(vals) <= 0.:
            raise ValueError(textwrap.fill((
                f"The slice x[{axis}] = {value} does not cross the feasible "
                "region."
            )))
        return _feasible_interval(lmin, self.box[other], start)


    def _build_rule(self, level):
        if self._interval is not None:
            return self._interval.rule(level)

        rule = Box(self.box).rule(level)
        inside = self._lmin(rule.points) >= -self.tol
        return QuadratureRule(
            rule.points[inside], rule.weights[inside], rule.margin[inside]
        )


    def to_dict(self):
        out = dict(type = "implicit", box = self.box.tolist(), tol = self.tol)
        if self._interval is not None:
            out["resolved"] = [self._interval.a, self._interval.b]
        return out




def _feasible_interval(lmin, box, start):
    # Feasible interval around `start` along one axis, clipped to `box`
    ends = []
    for end in box:
        if lmin(end) >= 0.:
            ends.append(float(end))
        else:
            ends.append(brentq(lambda x: float(lmin(x)), start, end,
                               xtol = 1e-15, rtol = BRENT_RTOL))
    return Interval(min(ends), max(ends))




@autorepr
class IntegrationResult:
    '''Quadrature value with diagnostics.

    Attributes
    ----------
    value : float or numpy.ndarray
    error : float
        Difference between the last two refinement levels.
    level : int
    evaluations : int
        Total integrand evaluations over all levels.
    band_ratio : float
        Integrand mass in the inner boundary band over the outer band.
    divergent : bool
        True if `band_ratio` flags a non-integrable boundary singularity.
    '''

    def __init__(self, value, error, level, evaluations, band_ratio,
                 divergent):
        self.value = value
        self.error = error
        self.level = level
        self.evaluations = evaluations
        self.band_ratio = band_ratio
        self.divergent = divergent




def _evaluate(f, rule):
    vals = np.asarray(f(rule.points), dtype = float)
    if vals.shape[:1] != (rule.size,):
        raise ValueError(textwrap.fill((
            f"The integrand returned shape {vals.shape} for {rule.size} "
            "points; it must be vectorised over the first axis."
        )))

    bad = ~np.isfinite(vals)
    if bad.any():
        rows = bad if bad.ndim == 1 else bad.any(axis = 1)
        if (rule.margin[rows] >= EDGE_MARGIN).any():
            where = rule.points[rows & (rule.margin >= EDGE_MARGIN)][0]
            raise ValueError(textwrap.fill((
                "The integrand returned non-finite values away from the "
                f"boundary, e.g. at {where.tolist()}."
            )))
        vals = np.where(bad, 0., vals)

    return vals




def _band_ratio(rule, vals):
    mass = np.abs(vals) if vals.ndim == 1 else np.abs(vals).sum(axis = 1)
    mass = mass * rule.weights
    m = rule.margin

    inner = mass[(m > INNER_BAND[0]) & (m <= INNER_BAND[1])].sum()
    outer = mass[(m > OUTER_BAND[0]) & (m <= OUTER_BAND[1])].sum()
    if outer <= 0.:
        return 0.
    return float(inner / outer)




def integrate_full(f, region, tol = None, min_level = MIN_LEVEL,
                   max_level = None, check_divergence = False):
    '''Integrate a vectorised function over a region with level-wise
    tanh-sinh refinement, returning diagnostics.

    Parameters
    ----------
    f : callable
        ``f(points)`` with points of shape (N, region.dim), returning (N,) or
        (N, k) values. Values at nodes within 1e-9 of the boundary may be
        non-finite; they are dropped.

    region : Region

    tol : float, optional
        Target accuracy relative to the integral of ``|f|``; defaults to 1e-8
        for one-variable and 1e-6 for two-variable rules.

    min_level, max_level : int
        Refinement range; the step halves with every level.

    check_divergence : bool, default False
        Raise ``DivergenceError`` if the boundary-band test flags the
        integral as divergent.

    Returns
    -------
    IntegrationResult

    Raises
    ------
    ConvergenceError
        If successive levels still differ by more than `tol` at `max_level`.

    DivergenceError
        If `check_divergence` and the integral is flagged divergent.

    ValueError
        If `f` returns non-finite values at interior nodes.

    Examples
    --------
    >>> import numpy as np
    >>> from mmtherm.measure import Interval, integrate_full
    >>> res = integrate_full(lambda x: x[:, 0] ** -0.5, Interval(0., 1.))
    >>> round(res.value, 12)
    2.0
    '''

    tol = region.default_tol if tol is None else float(tol)
    max_level = region.max_level if max_level is None else int(max_level)

    previous = None
    evaluations = 0
    for level in range(min_level - 1, max_level + 1):
        rule = region.rule(level)
        vals = _evaluate(f, rule)
        evaluations += rule.size

        w = rule.weights if vals.ndim == 1 else rule.weights[:, None]
        value = np.sum(w * vals, axis = 0)
        scale = np.sum(w * np.abs(vals), axis = 0)

        if previous is None:
            previous = value
            continue

        error = np.abs(value - previous)
        ratio = _band_ratio(rule, vals)
        divergent = ratio >= DIVERGENCE_RATIO

        if divergent and check_divergence and level >= min_level:
            raise DivergenceError(textwrap.fill((
                "The integral diverges at the region boundary (boundary band "
                f"mass ratio {ratio:.3g}); the weight is an improper prior "
                "on this region."
            )), estimate = value, band_ratio = ratio)

        converged = np.all(error <= tol * np.maximum(scale, 1e-300))
        if converged and level >= min_level:
            value = float(value) if np.ndim(value) == 0 else value
            return IntegrationResult(value, float(np.max(error)), level,
                                     evaluations, ratio, bool(divergent))

        previous = value

    raise ConvergenceError(
        textwrap.fill((
            f"Quadrature did not converge to {tol:.1e} by level {max_level}: "
            f"last estimate {value}, error {np.max(error):.3e}."
        )),
        estimate = value, error = float(np.max(error)),
    )




def integrate(f, region, tol = None, **kwargs):
    '''Integrate `f` over `region`; see :func:`integrate_full` for details.

    Examples
    --------
    >>> import numpy as np
    >>> from mmtherm.measure import Triangle, integrate
    >>> tri = Triangle([(0., -1.), (-1., 1.), (1., 1.)])
    >>> round(integrate(lambda p: np.ones(len(p)), tri), 10)
    2.0
    '''
    return integrate_full(f, region, tol, **kwargs).value




def _as_points(theta, dim):
    # Scalars and (d,) vectors are single points; 1D regions also take (N,)
    theta = np.asarray(theta, dtype = float)
    if theta.ndim == 0:
        return theta.reshape(1, 1), True
    if theta.ndim == 1:
        if dim == 1:
            return theta[:, None], False
        return theta[None, :], True
    return theta, False




@autorepr(hide = {"density_fn", "region"})
class Prior:
    '''Normalised density over a region.

    Parameters
    ----------
    region : Region
    density_fn : callable
        Unnormalised density, vectorised over (N, d) points.
    Z : float
        Normalisation constant; evaluation returns ``density_fn / Z``.
    name : str, optional
    band_ratio : float, optional
        Boundary-band diagnostic of the normalisation integral.
    '''

    def __init__(self, region, density_fn, Z, name = None, band_ratio = None):
        if not (np.isfinite(Z) and Z > 0.):
            raise ValueError(f"The normalisation constant must be positive; "
                             f"got {Z}.")
        self.region = region
        self.density_fn = density_fn
        self.Z = float(Z)
        self.name = name
        self.band_ratio = band_ratio


    @property
    def dim(self):
        return self.region.dim


    def unnormalized(self, points):
        return np.asarray(self.density_fn(points), dtype = float)


    def __call__(self, theta):
        points, single = _as_points(theta, self.dim)
        vals = self.unnormalized(points) / self.Z
        return float(vals[0]) if single else vals


    def expectation(self, f, tol = None):
        '''Integral of ``prior * f`` over the region; `f` may return (N,) or
        (N, k) values.
        '''
        def integrand(points):
            vals = np.asarray(f(points), dtype = float)
            dens = self.unnormalized(points) / self.Z
            return dens * vals if vals.ndim == 1 else dens[:, None] * vals

        return integrate(integrand, self.region, tol)


    def normalization_residual(self, tol = None):
        '''``|integral of the density - 1|``, recomputed independently.'''
        return abs(integrate(lambda p: self.unnormalized(p), self.region, tol)
                   / self.Z - 1.)




def normalize_prior(volume_fn, region, tol = None, name = None):
    '''Normalise a volume element into a prior over `region`.

    Parameters
    ----------
    volume_fn : callable
        Unnormalised density, vectorised over (N, d) points.

    region : Region

    tol : float, optional
        Quadrature tolerance.

    Returns
    -------
    Prior

    Raises
    ------
    DivergenceError
        If the normalisation integral diverges (improper prior).

    Examples
    --------
    >>> import numpy as np
    >>> from mmtherm.measure import Interval, normalize_prior
    >>> prior = normalize_prior(
    ...     lambda x: 1 / np.sqrt(1 - x[:, 0] ** 2), Interval(-1., 1.)
    ... )
    >>> round(prior.Z, 6)
    3.141593
    '''

    res = integrate_full(volume_fn, region, tol, check_divergence = True)
    if not (np.isfinite(res.value) and res.value > 0.):
        raise DivergenceError(
            f"Non-positive or infinite normalisation {res.value}.",
            estimate = res.value, band_ratio = res.band_ratio,
        )

    return Prior(region, volume_fn, res.value, name = name,
                 band_ratio = res.band_ratio)




def conditional_slice_prior(volume_fn, region, fixed_axis, value, tol = None):
    '''Normalised prior on the slice ``theta[fixed_axis] = value`` of
    `region`, using the volume element restricted to the slice.

    Raises
    ------
    ValueError
        If the slice has an empty interior.

    DivergenceError
        If the restricted volume element is not normalisable.
    '''

    sub = region.slice(fixed_axis, value)

    def restricted(points):
        return volume_fn(np.insert(points, fixed_axis, value, axis = 1))

    return normalize_prior(restricted, sub, tol,
                           name = f"slice[{fixed_axis}]={value}")




def _slice_integral(fn, region, axis, x, tol):
    if region.dim == 1:
        return float(fn(np.array([[x]]))[0])

    sub = region.slice(axis, x)

    def restricted(points):
        return fn(np.insert(points, axis, x, axis = 1))

    return integrate(restricted, sub, tol)




def marginal_density(prior, axis = 0, tol = 1e-10):
    '''Callable ``m(x)`` evaluating the marginal density of `prior` along
    `axis` by integrating over the conditional slice at each ``x``.
    '''

    prior.region._check_axis(axis)
    lo, hi = prior.region.axis_range(axis)

    def density(x):
        xs = np.atleast_1d(np.asarray(x, dtype = float))
        out = np.zeros(xs.shape)
        for i, xi in enumerate(xs.ravel()):
            if lo < xi < hi:
                out.flat[i] = _slice_integral(prior, prior.region, axis, xi,
                                              tol)
        return float(out[0]) if np.ndim(x) == 0 else out

    return density




@autorepr(short = {"x", "density"})
class Tabulated1D:
    '''Density tabulated on a uniform midpoint grid over ``support``, with
    monotone cubic (PCHIP) interpolation.

    Attributes
    ----------
    x, density : numpy.ndarray
    support : (float, float)
    meta : dict
        Free-form metadata written as CSV header comments.
    '''

    def __init__(self, x, density, support = None, meta = None):
        self.x = np.asarray(x, dtype = float)
        self.density = np.clip(np.asarray(density, dtype = float), 0., None)
        if support is None:
            dx = self.x[1] - self.x[0]
            support = (self.x[0] - 0.5 * dx, self.x[-1] + 0.5 * dx)
        self.support = (float(support[0]), float(support[1]))
        self.meta = dict(meta) if meta is not None else {}
        self._interp = PchipInterpolator(self.x, self.density,
                                         extrapolate = True)


    @staticmethod
    def grid(support, size):
        lo, hi = support
        dx = (hi - lo) / size
        return lo + dx * (np.arange(size) + 0.5)


    def __call__(self, x):
        x = np.asarray(x, dtype = float)
        inside = (x > self.support[0]) & (x < self.support[1])
        out = np.where(inside, np.clip(self._interp(x), 0., None), 0.)
        return float(out) if out.ndim == 0 else out


    def _end_integral(self, d, y):
        # Fit y ~ d^-s (c0 + c1 d + c2 d^2) and integrate from 0 to d[-1]
        def fit(s):
            design = d[:, None] ** (np.arange(3) - s)
            coef, *_ = np.linalg.lstsq(design, y, rcond = None)
            return coef, np.linalg.norm(design @ coef - y)

        best = minimize_scalar(lambda s: fit(s)[1], bounds = (-3., 0.99),
                               method = "bounded",
                               options = dict(xatol = 1e-10))
        s = best.x
        coef, _ = fit(s)
        top = d[-1]
        powers = np.arange(3) + 1. - s
        return float(np.sum(coef * top ** powers / powers))


    def integrate(self, nend = 6):
        '''Integral of the tabulated density over its support, with the
        outermost `nend` samples at each end replaced by a fitted
        :math:`d^{-s}(c_0 + c_1 d + c_2 d^2)` boundary model integrated
        analytically.
        '''

        x, y = self.x, self.density
        lo, hi = self.support
        if len(x) < 2 * nend + 3:
            return float(simpson(y, x = x))

        left = self._end_integral(x[:nend] - lo, y[:nend])
        right = self._end_integral((hi - x[::-1])[:nend], y[::-1][:nend])
        middle = simpson(y[nend - 1:len(x) - nend + 1],
                         x = x[nend - 1:len(x) - nend + 1])
        return float(left + middle + right)


    def expectation(self, f, order = 8):
        '''Integral of ``f * density`` over the support with `order`-point
        Gauss-Legendre rules on each cell between samples, on which the
        interpolant is an exact cubic. `f` takes (N, 1) points and may return
        (N,) or (N, k) values.
        '''
        knots = np.concatenate([[self.support[0]], self.x, [self.support[1]]])
        nodes, weights = np.polynomial.legendre.leggauss(order)

        left, right = knots[:-1, None], knots[1:, None]
        x = (0.5 * (left + right) + 0.5 * (right - left) * nodes).ravel()
        w = (0.5 * (right - left) * weights).ravel()

        dens = np.clip(self._interp(x), 0., None) * w
        vals = np.asarray(f(x[:, None]), dtype = float)
        if vals.ndim == 1:
            return float(np.sum(dens * vals))
        return np.sum(dens[:, None] * vals, axis = 0)


    def to_frame(self):
        return pd.DataFrame(dict(x = self.x, density = self.density))


    def to_csv(self, path_or_buf):
        '''Write ``# key: value`` comment lines for `meta`, then the columns
        ``x,density`` with 17 significant digits.
        '''
        lines = [f"# support: {self.support[0]!r} {self.support[1]!r}"]
        lines += [f"# {k}: {v}" for k, v in self.meta.items()]
        body = self.to_frame().to_csv(index = False, float_format = "%.17g")
        text = "\n".join(lines) + "\n" + body

        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w") as f:
                f.write(text)


    @staticmethod
    def from_csv(path_or_buf):
        '''Inverse of :meth:`to_csv`.'''
        if hasattr(path_or_buf, "read"):
            text = path_or_buf.read()
        else:
            with open(path_or_buf) as f:
                text = f.read()

        meta = {}
        support = None
        for line in text.splitlines():
            if not line.startswith("#"):
                continue
            key, _, value = line[1:].partition(":")
            key, value = key.strip(), value.strip()
            if key == "support":
                support = tuple(float(v) for v in value.split())
            else:
                meta[key] = value

        frame = pd.read_csv(io.StringIO(text), comment = "#")
        return Tabulated1D(frame["x"].to_numpy(), frame["density"].to_numpy(),
                           support, meta)




@autorepr(hide = {"density_fn", "region", "table"})
class TabulatedPrior(Prior):
    '''One-dimensional prior backed by a :class:`Tabulated1D`, e.g. a
    shrink-limit marginal; expectations use the piecewise-cubic rule of
    :meth:`Tabulated1D.expectation`.
    '''

    def __init__(self, table, name = None):
        self.table = table
        super().__init__(
            Interval(*table.support),
            lambda points: table(np.asarray(points)[:, 0]),
            table.expectation(lambda x: np.ones(len(x))),
            name = name,
        )


    def expectation(self, f, tol = None):
        return self.table.expectation(f) / self.Z




def marginal(prior, axis = 0, grid_size = 201, tol = 1e-10):
    '''Tabulate the marginal density of `prior` along `axis` on a uniform
    midpoint grid of `grid_size` points spanning the axis range.

    Raises
    ------
    ConvergenceError, DivergenceError
        If a slice integral fails.

    Examples
    --------
    >>> from mmtherm import scenarios
    >>> from mmtherm.measure import marginal
    >>> prior = scenarios.get_scenario("s22").prior("minimal")
    >>> tab = marginal(prior, axis = 1)
    >>> round(float(tab(0.3)), 6)
    0.5
    '''

    lo, hi = prior.region.axis_range(axis)
    xs = Tabulated1D.grid((lo, hi), grid_size)
    dens = marginal_density(prior, axis, tol)(xs)

    tab = Tabulated1D(xs, dens, (lo, hi))
    tab.meta["normalization"] = repr(prior.Z)
    tab.meta["axis"] = axis
    tab.meta["residual"] = repr(abs(tab.integrate() - 1.))
    return tab




def _richardson(eps, values, powers):
    # Solve values_i = F0 + sum_j a_j eps_i^powers_j for F0, per grid column
    design = np.column_stack(
        [np.ones(len(eps))] + [np.asarray(eps) ** p for p in powers]
    )
    return np.linalg.solve(design, values)[0]




def shrink_limit_marginal(volume_fn, region, axis = 0, R_sequence = None,
                          grid_size = 201, tol = 1e-4, quad_tol = 1e-10,
                          verbose = False):
    '''Limit of the normalised marginal along `axis` of `volume_fn` on the
    shrunken regions ``region.shrink(R)`` as R tends to 1.

    For each R (default ``1 - 10**-k``, k = 1..6) the marginal on the
    shrunken region is computed by slice integration and normalised by the
    integral of `volume_fn` over the shrunken region. The values are
    extrapolated pointwise to R = 1 in powers of :math:`(1 - R)^{1/2}`,
    using the last four shrink factors; the difference from the three-point
    extrapolation is the reported residual.

    Returns
    -------
    Tabulated1D
        The limit marginal, with ``meta["residual"]``.

    Raises
    ------
    ExtrapolationError
        If the residual exceeds `tol`.
    '''

    if R_sequence is None:
        R_sequence = 1. - 10. ** -np.arange(1, 7)
    R_sequence = np.sort(np.asarray(R_sequence, dtype = float))
    if len(R_sequence) < 4:
        raise ValueError("The shrink limit needs at least four radii.")

    lo, hi = region.axis_range(axis)
    xs = Tabulated1D.grid((lo, hi), grid_size)

    if verbose:
        iterator = tqdm(R_sequence, desc = "shrink limit")
    else:
        iterator = R_sequence

    rows = []
    for R in iterator:
        shrunk = region.shrink(R)
        slo, shi = shrunk.axis_range(axis)

        def unnormalized(x):
            out = np.zeros(len(x))
            for i, xi in enumerate(x):
                if slo < xi < shi:
                    out[i] = _slice_integral(volume_fn, shrunk, axis, xi,
                                             quad_tol)
            return out

        # Near R = 1 the weight has a thin boundary layer that product rules
        # resolve poorly; integrate the slice integrals along the axis
        if shrunk.dim == 1:
            Z = integrate(volume_fn, shrunk, quad_tol)
        else:
            Z = integrate(lambda p: unnormalized(p[:, 0]),
                          Interval(slo, shi), SHRINK_Z_TOL)
        rows.append(unnormalized(xs) / Z)

    values = np.array(rows)
    eps = 1. - R_sequence

    limit = _richardson(eps[-4:], values[-4:], (0.5, 1., 1.5))
    check = _richardson(eps[-3:], values[-3:], (0.5, 1.))
    residual = float(np.abs(limit - check).max())

    if residual > tol:
        raise ExtrapolationError(textwrap.fill((
            f"The shrink-limit extrapolation residual {residual:.3e} exceeds "
            f"the tolerance {tol:.1e}."
        )))

    tab = Tabulated1D(xs, limit, (lo, hi))
    tab.meta["residual"] = repr(residual)
    tab.meta["R_sequence"] = " ".join(repr(float(r)) for r in R_sequence)
    tab.meta["axis"] = axis
    return tab
