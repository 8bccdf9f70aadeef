#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : matrixcore.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


'''Hermitian matrix arithmetic for density-matrix families: Pauli tensor
products, affine families :math:`\\rho(\\theta) = B_0 + \\sum_k \\theta_k
B_k`, a deterministic cyclic Jacobi eigensolver and feasibility tests.
'''


import  json
import  textwrap
from    functools   import  reduce

import  numpy       as      np

from    .utilities  import  autorepr, njit


# Default tolerance on the smallest eigenvalue for a point to be feasible
FEASIBILITY_TOL = 1e-10

# Absolute tolerance on the Hermitian symmetry of inputs
HERMITIAN_TOL = 1e-14


PAULI = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype = complex)




class PauliWord(tuple):
    '''Sequence of Pauli letters, one per tensor factor: 0 is the identity,
    1, 2, 3 are :math:`\\sigma_x, \\sigma_y, \\sigma_z`.

    Examples
    --------
    >>> from mmtherm.matrixcore import PauliWord
    >>> PauliWord((3, 3)).matrix().real.diagonal()
    array([ 1., -1., -1.,  1.])
    '''

    def __new__(cls, letters):
        letters = tuple(int(c) for c in np.atleast_1d(letters))

        if len(letters) == 0:
            raise ValueError("A Pauli word must contain at least one letter.")

        for c in letters:
            if c not in (0, 1, 2, 3):
                raise ValueError(textwrap.fill((
                    "Pauli letters must be 0 (identity), 1, 2 or 3 (x, y, z). "
                    f"Received word `{letters}`."
                )))

        return super().__new__(cls, letters)


    @property
    def length(self):
        return len(self)


    def matrix(self):
        return reduce(np.kron, (PAULI[c] for c in self))




def pauli_word_matrix(word):
    '''Kronecker product of the 2x2 Pauli matrices named by `word`, in order.

    Parameters
    ----------
    word : sequence of int
        Letters in {0, 1, 2, 3}; the result has dimension ``2 ** len(word)``.

    Returns
    -------
    numpy.ndarray
        Complex Hermitian matrix squaring to the identity.

    Raises
    ------
    ValueError
        If the word is empty or contains an invalid letter.

    Examples
    --------
    >>> from mmtherm.matrixcore import pauli_word_matrix
    >>> pauli_word_matrix((1, 1)).real
    array([[0., 0., 0., 1.],
           [0., 0., 1., 0.],
           [0., 1., 0., 0.],
           [1., 0., 0., 0.]])
    '''
    return PauliWord(word).matrix()




def check_hermitian(matrix, tol = HERMITIAN_TOL, name = "matrix"):
    '''Return `matrix` as a square complex array, raising a ``ValueError`` if
    it is not Hermitian within `tol` (relative to its largest entry).
    '''

    m = np.asarray(matrix, dtype = complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(textwrap.fill((
            f"The {name} must be a square 2D matrix. Received shape "
            f"`{m.shape}`."
        )))

    scale = max(1.0, float(np.abs(m).max(initial = 0.)))
    asym = float(np.abs(m - m.conj().T).max(initial = 0.))
    if asym > tol * scale:
        raise ValueError(textwrap.fill((
            f"The {name} is not Hermitian: max |M - M^H| = {asym:.3e} exceeds "
            f"the tolerance {tol:.1e}."
        )))

    return m




def check_density(matrix, trace_tol = 1e-12, eig_tol = FEASIBILITY_TOL):
    '''Check that `matrix` is a density matrix: Hermitian, unit trace and
    eigenvalues no smaller than ``-eig_tol``. Returns the matrix.
    '''

    m = check_hermitian(matrix, name = "density matrix")
    tr = np.trace(m).real
    if abs(tr - 1.) > trace_tol:
        raise ValueError(f"The density matrix has trace {tr!r}, not 1.")

    lmin = np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min()
    if lmin < -eig_tol:
        raise ValueError(textwrap.fill((
            f"The density matrix has a negative eigenvalue {lmin:.3e}."
        )))

    return m




@njit(cache = True)
def _jacobi_sweeps(a, v, tol, max_sweeps):
    # Cyclic complex Jacobi. Each rotation first makes a[p, q] real with a
    # phase on column q, then zeroes it with a real plane rotation
    n = a.shape[0]

    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += abs(a[i, j]) ** 2
    threshold = (tol * tol) * max(fro, 1e-300)

    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += abs(a[p, q]) ** 2
        if off <= threshold:
            return sweeps - 1

        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                babs = abs(b)
                if babs == 0.0:
                    continue

                phase = b / babs                # e^{i phi}
                app = a[p, p].real
                aqq = a[q, q].real
                theta = 0.5 * np.arctan2(2.0 * babs, aqq - app)
                c = np.cos(theta)
                s = np.sin(theta)

                # V restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                v10 = -s * np.conj(phase)
                v11 = c * np.conj(phase)

                # Columns: A <- A V
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * c + akq * v10
                    a[k, q] = akp * s + akq * v11

                # Rows: A <- V^H A
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk + np.conj(v10) * aqk
                    a[q, k] = s * apk + np.conj(v11) * aqk

                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * c + vkq * v10
                    v[k, q] = vkp * s + vkq * v11

    return sweeps




def _canonical_phase(vec, tol = 1e-12):
    # First component with non-negligible modulus made real and positive
    idx = np.flatnonzero(np.abs(vec) > tol)
    if len(idx) == 0:
        return vec
    first = vec[idx[0]]
    return vec * (abs(first) / first)




def _sort_key(vec):
    # Lexicographic on descending |components|, rounded so that round-off
    # does not reorder equal vectors
    return tuple(-np.round(np.abs(vec), 10))




@autorepr
class EigenSystem:
    '''Eigenvalues (sorted descending) and orthonormal eigenvectors (stored as
    matrix columns) of a Hermitian matrix.

    Attributes
    ----------
    eigenvalues : (n,) numpy.ndarray
    eigenvectors : (n, n) numpy.ndarray
        Column ``i`` is the eigenvector of ``eigenvalues[i]``.
    sweeps : int
        Jacobi sweeps used; zero for the LAPACK path.
    '''

    def __init__(self, eigenvalues, eigenvectors, sweeps = 0):
        self.eigenvalues = np.asarray(eigenvalues, dtype = float)
        self.eigenvectors = np.asarray(eigenvectors, dtype = complex)
        self.sweeps = int(sweeps)


    @property
    def dim(self):
        return len(self.eigenvalues)


    def vector(self, i):
        return self.eigenvectors[:, i]


    def reconstruct(self):
        '''Rebuild the matrix as :math:`\\sum_i \\lambda_i |i\\rangle\\langle
        i|`.
        '''
        vecs = self.eigenvectors
        return (vecs * self.eigenvalues) @ vecs.conj().T


    def in_basis(self, matrix):
        '''Matrix elements :math:`\\langle i | M | j \\rangle` in the
        eigenbasis.
        '''
        vecs = self.eigenvectors
        return vecs.conj().T @ np.asarray(matrix) @ vecs




def eigensystem(matrix, tol = HERMITIAN_TOL, method = "jacobi",
                max_sweeps = 60):
    '''Eigendecomposition of a Hermitian matrix with deterministic ordering.

    Eigenvalues are sorted in descending order; each eigenvector's first
    non-negligible component is made real and positive; eigenvectors within
    a degenerate cluster are re-orthonormalised and ordered lexicographically
    by descending component moduli.

    Parameters
    ----------
    matrix : (n, n) array_like
        Hermitian input.

    tol : float, default 1e-14
        Hermitian symmetry tolerance for the input.

    method : {"jacobi", "lapack"}, default "jacobi"
        "jacobi" runs the in-house cyclic complex Jacobi iteration;
        "lapack" delegates to ``numpy.linalg.eigh`` for bulk evaluations.

    max_sweeps : int, default 60
        Jacobi sweep limit.

    Returns
    -------
    EigenSystem

    Raises
    ------
    ValueError
        If `matrix` is not Hermitian or `method` is unknown.

    Examples
    --------
    >>> import numpy as np
    >>> from mmtherm.matrixcore import eigensystem
    >>> eigensystem(np.eye(4) / 4).eigenvalues
    array([0.25, 0.25, 0.25, 0.25])
    '''

    m = check_hermitian(matrix, tol = tol)
    m = 0.5 * (m + m.conj().T)
    n = m.shape[0]

    if method == "jacobi":
        a = m.copy()
        v = np.eye(n, dtype = complex)
        sweeps = _jacobi_sweeps(a, v, 1e-15 * max(n, 4), max_sweeps)
        vals = a.diagonal().real.copy()
        vecs = v
    elif method == "lapack":
        vals, vecs = np.linalg.eigh(m)
        sweeps = 0
    else:
        raise ValueError(textwrap.fill((
            f"Unknown eigensolver method `{method}`; use 'jacobi' or 'lapack'."
        )))

    order = np.argsort(-vals, kind = "stable")
    vals = vals[order]
    vecs = vecs[:, order]

    # Group degenerate clusters and canonicalise each
    scale = max(1.0, float(np.abs(vals).max(initial = 0.)))
    cluster_tol = 1e-10 * scale

    out = np.empty_like(vecs)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and vals[stop - 1] - vals[stop] <= cluster_tol:
            stop += 1

        block = vecs[:, start:stop]
        if stop - start > 1:
            block, _ = np.linalg.qr(block)

        cols = [_canonical_phase(block[:, k]) for k in range(block.shape[1])]
        cols.sort(key = _sort_key)
        for k, col in enumerate(cols):
            out[:, start + k] = col

        start = stop

    return EigenSystem(vals, out, sweeps)




@autorepr(short = {"base", "directions"})
class AffineFamily:
    '''An affine family of density matrices :math:`\\rho(\\theta) = B_0 +
    \\sum_k \\theta_k B_k` with named parameters.

    Parameters
    ----------
    base : (n, n) array_like
        Hermitian, unit-trace base matrix :math:`B_0`.

    directions : sequence of (n, n) array_like
        Traceless Hermitian directions :math:`B_k`.

    names : sequence of str
        Unique parameter names, one per direction.

    terms : list, optional
        The Pauli terms the directions were built from, kept for JSON export.

    Examples
    --------
    >>> from mmtherm.matrixcore import build_family
    >>> family = build_family([
    ...     ("xi", [((1, 0), 1.), ((0, 1), 1.)]),
    ...     ("zeta", [((1, 1), 1.)]),
    ... ])
    >>> family.names
    ('xi', 'zeta')
    '''

    def __init__(self, base, directions, names, terms = None):
        base = check_hermitian(base, name = "base matrix")
        if abs(np.trace(base).real - 1.) > 1e-12:
            raise ValueError("The base matrix must have unit trace.")

        names = tuple(str(n) for n in names)
        if len(set(names)) != len(names):
            raise ValueError(textwrap.fill((
                f"Duplicate parameter names in `{names}`."
            )))

        dirs = []
        for name, d in zip(names, directions):
            d = check_hermitian(d, name = f"direction `{name}`")
            if d.shape != base.shape:
                raise ValueError(textwrap.fill((
                    f"Direction `{name}` has shape {d.shape}, but the base "
                    f"matrix has shape {base.shape}."
                )))
            if abs(np.trace(d)) > 1e-12:
                raise ValueError(f"Direction `{name}` must be traceless.")
            dirs.append(d)

        if len(dirs) != len(names):
            raise ValueError(textwrap.fill((
                f"Got {len(dirs)} directions for {len(names)} names."
            )))

        self.base = base
        self.directions = np.array(dirs, dtype = complex).reshape(
            (len(dirs),) + base.shape
        )
        self.names = names
        self._terms = terms


    @property
    def dim(self):
        return self.base.shape[0]


    @property
    def num_params(self):
        return len(self.names)


    @property
    def maximally_mixed(self):
        return np.allclose(self.base, np.eye(self.dim) / self.dim, atol = 1e-15)


    def _check_theta(self, theta):
        theta = np.asarray(theta, dtype = float)
        if theta.shape[-1:] != (self.num_params,):
            raise ValueError(textwrap.fill((
                f"Expected {self.num_params} parameters {self.names}; received "
                f"an array of shape {theta.shape}."
            )))
        return theta


    def density(self, theta):
        '''Evaluate :math:`\\rho(\\theta)`; `theta` may be a single point or an
        (N, p) array of points, giving an (N, n, n) stack.
        '''
        theta = self._check_theta(theta)
        return self.base + np.tensordot(theta, self.directions, axes = (-1, 0))


    __call__ = density


    def commuting(self, tol = 1e-12):
        '''True if the base and all directions commute pairwise, i.e. the whole
        family is simultaneously diagonalisable.
        '''
        mats = [self.base] + list(self.directions)
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                comm = mats[i] @ mats[j] - mats[j] @ mats[i]
                if np.abs(comm).max() > tol:
                    return False
        return True


    def to_dict(self):
        '''Serialisable description. Pauli-built families export their terms;
        other families export their matrices as real and imaginary parts.
        '''
        if self._terms is not None:
            return dict(
                dim = self.dim,
                params = [
                    dict(
                        name = name,
                        terms = [
                            dict(word = list(w), coeff = float(c))
                            for w, c in terms
                        ],
                    )
                    for name, terms in zip(self.names, self._terms)
                ],
            )

        def mat(m):
            return dict(real = m.real.tolist(), imag = m.imag.tolist())

        return dict(
            dim = self.dim,
            base = mat(self.base),
            params = [
                dict(name = name, direction = mat(d))
                for name, d in zip(self.names, self.directions)
            ],
        )


    @staticmethod
    def from_matrices(base, directions, names = None):
        '''Family from explicit matrices; parameters default to ``theta0,
        theta1, ...``.

        Examples
        --------
        >>> import numpy as np
        >>> from mmtherm.matrixcore import AffineFamily
        >>> family = AffineFamily.from_matrices(
        ...     np.diag([0., 1., 0.]), [0.5 * np.diag([1., -2., 1.])], ["v"]
        ... )
        >>> family([1.]).real.diagonal()
        array([0.5, 0. , 0.5])
        '''
        directions = list(directions)
        if names is None:
            names = [f"theta{i}" for i in range(len(directions))]
        return AffineFamily(base, directions, names)


    @staticmethod
    def from_dict(doc):
        '''Inverse of :meth:`to_dict`; also accepts the plain Pauli-term
        document ``{"dim": 4, "params": [{"name": "xi1", "terms": [{"word":
        [1, 0], "coeff": 1.0}]}]}``.
        '''

        try:
            params = doc["params"]
            if all("terms" in p for p in params):
                family = build_family([
                    (p["name"], [(t["word"], t["coeff"]) for t in p["terms"]])
                    for p in params
                ])
            else:
                def mat(d):
                    return np.array(d["real"]) + 1j * np.array(d["imag"])

                family = AffineFamily(
                    mat(doc["base"]),
                    [mat(p["direction"]) for p in params],
                    [p["name"] for p in params],
                )
        except (KeyError, TypeError) as err:
            raise ValueError(textwrap.fill((
                f"Malformed family document: missing or invalid field {err}."
            ))) from err

        if "dim" in doc and int(doc["dim"]) != family.dim:
            raise ValueError(textwrap.fill((
                f"The family document declares dim = {doc['dim']}, but its "
                f"terms give matrices of dimension {family.dim}."
            )))

        return family




def build_family(spec):
    '''Build an :class:`AffineFamily` with base :math:`I / 2^m` from Pauli
    term specifications.

    Parameters
    ----------
    spec : list of (str, list of (word, float))
        Parameter names with their Pauli words and real coefficients; each
        direction is :math:`\\sum c \\, \\sigma_{word} / 2^m`. A dict mapping
        names to term lists is also accepted.

    Returns
    -------
    AffineFamily

    Raises
    ------
    ValueError
        If words differ in length, a name is duplicated, or a term is the
        identity word (which would break the unit trace).

    Examples
    --------
    >>> import numpy as np
    >>> from mmtherm.matrixcore import build_family, eigensystem
    >>> family = build_family([
    ...     ("xi", [((1, 0), 1.), ((0, 1), 1.)]),
    ...     ("zeta", [((1, 1), 1.)]),
    ... ])
    >>> eigensystem(family([0.2, 0.1])).eigenvalues
    array([0.375, 0.225, 0.225, 0.175])
    '''

    if isinstance(spec, dict):
        spec = list(spec.items())

    names = []
    all_terms = []
    length = None
    for name, terms in spec:
        clean = []
        for word, coeff in terms:
            word = PauliWord(word)
            if length is None:
                length = len(word)
            elif len(word) != length:
                raise ValueError(textwrap.fill((
                    f"All Pauli words must have the same length; parameter "
                    f"`{name}` has word {tuple(word)} but previous words have "
                    f"length {length}."
                )))
            if not any(word):
                raise ValueError(textwrap.fill((
                    f"Parameter `{name}` contains the identity word, which is "
                    "not traceless."
                )))
            clean.append((word, float(coeff)))

        names.append(name)
        all_terms.append(clean)

    if length is None:
        raise ValueError("A family needs at least one parameter with terms.")

    n = 2 ** length
    directions = [
        sum(c * w.matrix() for w, c in terms) / n
        for terms in all_terms
    ]

    return AffineFamily(np.eye(n) / n, directions, names, terms = all_terms)




def family_from_json(text):
    '''Build a family from a JSON document string; see
    :meth:`AffineFamily.from_dict`.
    '''
    return AffineFamily.from_dict(json.loads(text))




def load_family(path):
    '''Load a family from a JSON file; see :meth:`AffineFamily.from_dict`.
    '''
    with open(path) as f:
        return AffineFamily.from_dict(json.load(f))




def eval_density(family, theta):
    '''Evaluate the density matrix :math:`B_0 + \\sum_k \\theta_k B_k` of
    `family` at the parameter vector `theta`.
    '''
    theta = np.asarray(theta, dtype = float)
    if theta.ndim != 1:
        raise ValueError("`eval_density` takes a single parameter vector.")
    return family.density(theta)




def min_eigenvalue(family, theta):
    '''Smallest eigenvalue of :math:`\\rho(\\theta)`; vectorised over an
    (N, p) array of points.
    '''
    rho = family.density(theta)
    return np.linalg.eigvalsh(rho)[..., 0]




def is_feasible(family, theta, tol = FEASIBILITY_TOL):
    '''True iff the smallest eigenvalue of :math:`\\rho(\\theta)` is at least
    ``-tol``, i.e. all eigenvalues lie in [0, 1] up to `tol`.

    Examples
    --------
    >>> from mmtherm import scenarios
    >>> family = scenarios.get_scenario("s21").family
    >>> is_feasible(family, [0., 0.]), is_feasible(family, [0.9, 0.])
    (True, False)
    '''
    lmin = min_eigenvalue(family, theta)
    result = lmin >= -tol
    return bool(result) if np.ndim(result) == 0 else result
