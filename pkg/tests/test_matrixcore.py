#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : test_matrixcore.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


'''Integration tests for Pauli words, eigensystems and affine families.
'''


import json

import numpy as np
import pytest

from mmtherm import matrixcore as mc


def two_spin_family():
    return mc.build_family([
        ("xi", [((3, 0), 1.), ((0, 3), 1.)]),
        ("zeta", [((3, 3), 1.)]),
    ])


def test_pauli_words():
    # Every word is Hermitian and squares to the identity
    for word in [(1,), (2,), (3,), (1, 2), (3, 0, 2), (2, 2, 2, 2)]:
        m = mc.pauli_word_matrix(word)
        np.testing.assert_allclose(m, m.conj().T, atol = 0.)
        np.testing.assert_allclose(m @ m, np.eye(len(m)), atol = 1e-15)

    assert mc.PauliWord((3, 3)).length == 2
    np.testing.assert_allclose(
        mc.pauli_word_matrix((3, 3)).real.diagonal(), [1, -1, -1, 1],
    )

    with pytest.raises(ValueError):
        mc.PauliWord(())

    with pytest.raises(ValueError):
        mc.PauliWord((1, 4))


def test_check_density():
    mc.check_density(np.eye(2) / 2)

    with pytest.raises(ValueError):
        mc.check_hermitian([[0, 1], [0, 0]])

    with pytest.raises(ValueError):
        mc.check_density(np.eye(2))

    with pytest.raises(ValueError):
        mc.check_density(np.diag([1.5, -0.5]))

    with pytest.raises(ValueError):
        mc.check_hermitian(np.ones((2, 3)))


def test_eigensystem_random():
    rng = np.random.default_rng(20)
    for n in [2, 3, 4, 8, 16]:
        a = rng.normal(size = (n, n)) + 1j * rng.normal(size = (n, n))
        h = a + a.conj().T

        eig = mc.eigensystem(h)
        print(eig)

        # Descending, matching LAPACK, orthonormal and reconstructing h
        assert np.all(np.diff(eig.eigenvalues) <= 0.)
        np.testing.assert_allclose(eig.eigenvalues,
                                   np.linalg.eigvalsh(h)[::-1], atol = 1e-12)
        vecs = eig.eigenvectors
        np.testing.assert_allclose(vecs.conj().T @ vecs, np.eye(n),
                                   atol = 1e-12)
        np.testing.assert_allclose(eig.reconstruct(), h, atol = 1e-11)

        # First non-negligible component real and positive
        for i in range(n):
            v = eig.vector(i)
            first = v[np.argmax(np.abs(v) > 1e-12)]
            assert abs(first.imag) < 1e-12 and first.real > 0.

        lapack = mc.eigensystem(h, method = "lapack")
        np.testing.assert_allclose(lapack.eigenvalues, eig.eigenvalues,
                                   atol = 1e-12)


def test_eigensystem_large():
    # Normalised so the spectrum stays O(1) as n grows
    rng = np.random.default_rng(21)
    for n in [24, 32, 64]:
        a = (rng.normal(size = (n, n)) + 1j * rng.normal(size = (n, n))) / \
            np.sqrt(n)
        h = 0.5 * (a + a.conj().T)

        eig = mc.eigensystem(h)
        err = np.abs(eig.reconstruct() - h).max()
        print(n, eig.sweeps, err)

        assert err <= 1e-12
        vecs = eig.eigenvectors
        assert np.abs(vecs.conj().T @ vecs - np.eye(n)).max() <= 1e-12
        np.testing.assert_allclose(eig.eigenvalues,
                                   np.linalg.eigvalsh(h)[::-1], atol = 1e-12)


def test_eigensystem_degenerate():
    # Degenerate clusters come out as deterministic orthonormal bases
    eig = mc.eigensystem(np.eye(4) / 4)
    np.testing.assert_allclose(eig.eigenvalues, 0.25)
    np.testing.assert_allclose(np.abs(eig.eigenvectors), np.eye(4),
                               atol = 1e-15)

    rho = two_spin_family()([0.1, 0.])
    first = mc.eigensystem(rho)
    second = mc.eigensystem(rho.copy())
    np.testing.assert_array_equal(first.eigenvectors, second.eigenvectors)

    in_basis = first.in_basis(rho)
    np.testing.assert_allclose(in_basis, np.diag(first.eigenvalues),
                               atol = 1e-15)

    with pytest.raises(ValueError):
        mc.eigensystem(np.eye(2), method = "qr")


def test_build_family():
    family = two_spin_family()
    print(family)

    assert family.names == ("xi", "zeta")
    assert family.dim == 4
    assert family.num_params == 2
    assert family.maximally_mixed
    assert family.commuting()

    # Polarisation along z: diagonal (1 + 2 xi + zeta, 1 - zeta, 1 - zeta,
    # 1 - 2 xi + zeta) / 4
    rho = family([0.2, 0.1])
    np.testing.assert_allclose(rho.real.diagonal(),
                               [0.375, 0.225, 0.225, 0.175], atol = 1e-15)
    np.testing.assert_allclose(np.trace(rho).real, 1.)

    # Vectorised over points
    stack = family.density(np.zeros((5, 2)))
    assert stack.shape == (5, 4, 4)

    with pytest.raises(ValueError):
        mc.build_family([("a", [((1, 0), 1.)]), ("a", [((0, 1), 1.)])])

    with pytest.raises(ValueError):
        mc.build_family([("a", [((1, 0), 1.)]), ("b", [((1,), 1.)])])

    with pytest.raises(ValueError):
        mc.build_family([("a", [((0, 0), 1.)])])

    with pytest.raises(ValueError):
        family([0.1])


def test_non_commuting_family():
    family = mc.build_family([
        ("xi", [((3, 0), 1.), ((0, 3), 1.)]),
        ("zeta", [((2, 2), 1.)]),
    ])
    assert not family.commuting()


def test_from_matrices():
    family = mc.AffineFamily.from_matrices(
        np.diag([0., 1., 0.]), [0.5 * np.diag([1., -2., 1.])],
    )
    assert family.names == ("theta0",)
    assert not family.maximally_mixed
    np.testing.assert_allclose(family([1.]).real.diagonal(), [0.5, 0., 0.5])

    with pytest.raises(ValueError):
        mc.AffineFamily.from_matrices(np.eye(3), [np.diag([1., -1., 0.])])

    with pytest.raises(ValueError):
        mc.AffineFamily.from_matrices(np.eye(2) / 2, [np.eye(2)])


def test_family_json(tmp_path):
    family = two_spin_family()
    doc = family.to_dict()
    again = mc.family_from_json(json.dumps(doc))
    assert again.names == family.names
    np.testing.assert_allclose(again.directions, family.directions)

    # Matrix-based families export their matrices
    three = mc.AffineFamily.from_matrices(
        np.diag([0., 1., 0.]), [0.5 * np.diag([1., -2., 1.])], ["v"],
    )
    path = tmp_path / "three.json"
    path.write_text(json.dumps(three.to_dict()))
    loaded = mc.load_family(str(path))
    np.testing.assert_allclose(loaded.base, three.base)

    with pytest.raises(ValueError):
        mc.AffineFamily.from_dict({"params": [{"name": "x"}]})

    with pytest.raises(ValueError):
        mc.AffineFamily.from_dict(dict(doc, dim = 8))


def test_feasibility():
    family = two_spin_family()

    assert mc.is_feasible(family, [0., 0.])
    assert mc.is_feasible(family, [0., -1.])
    assert not mc.is_feasible(family, [0.9, 0.])

    points = np.array([[0., 0.], [0.5, 1.], [0.6, 0.]])
    np.testing.assert_array_equal(mc.is_feasible(family, points),
                                  [True, True, False])

    assert mc.min_eigenvalue(family, [0., 1.]) == pytest.approx(0., abs = 1e-15)
    np.testing.assert_allclose(mc.eval_density(family, [0., 0.]),
                               np.eye(4) / 4)


if __name__ == "__main__":
    import tempfile
    import pathlib

    test_pauli_words()
    test_check_density()
    test_eigensystem_random()
    test_eigensystem_large()
    test_eigensystem_degenerate()
    test_build_family()
    test_non_commuting_family()
    test_from_matrices()
    with tempfile.TemporaryDirectory() as d:
        test_family_json(pathlib.Path(d))
    test_feasibility()
