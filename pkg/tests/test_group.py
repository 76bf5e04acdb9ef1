import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cheeger.group import (IsotropyRep, LieAlgebraData, fixed_axes, null_space, orbit_dimension, s_tilde, so_basis,
                           standard_block_rep, structure_constants)
from cheeger.limiting import random_orthogonal


def q(a, b):
    return -0.5 * np.trace(a @ b)


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_so_basis_is_q_orthonormal(m):
    basis = so_basis(m)
    assert len(basis) == m * (m - 1) // 2
    gram = np.array([[q(a, b) for b in basis] for a in basis])
    np.testing.assert_allclose(gram, np.eye(len(basis)), atol=1e-15)


def test_so3_structure_constants_are_levi_civita():
    c = structure_constants(so_basis(3))
    # every non-degenerate triple has |c| = 1, degenerate ones vanish
    for i in range(3):
        for j in range(3):
            for k in range(3):
                expected = 1.0 if len({i, j, k}) == 3 else 0.0
                assert abs(abs(c[i, j, k]) - expected) < 1e-14


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_so_lie_algebra_passes_checks(m):
    res = LieAlgebraData.so(m).check()
    assert max(res.values()) < 1e-12


def test_check_rejects_non_antisymmetric_constants():
    c = structure_constants(so_basis(3)).copy()
    c[0, 1, 2] += 0.1
    with pytest.raises(ValueError):
        LieAlgebraData(c).check()


def test_partition_validation():
    c = structure_constants(so_basis(3))
    with pytest.raises(ValueError):
        LieAlgebraData(c, (0,), (0, 1, 2))
    lie = LieAlgebraData(c, (0,))
    assert lie.complement_indices == (1, 2)


def test_change_basis_preserves_identities(rng):
    lie = LieAlgebraData.so(4)
    o = random_orthogonal(rng, lie.dim)
    assert max(lie.change_basis(o).check().values()) < 1e-12


def test_bracket_matches_matrix_commutator(rng):
    basis = so_basis(4)
    lie = LieAlgebraData.from_matrices(basis)
    u, v = rng.standard_normal(6), rng.standard_normal(6)
    U = sum(a * e for a, e in zip(u, basis))
    V = sum(a * e for a, e in zip(v, basis))
    W = sum(a * e for a, e in zip(lie.bracket(u, v), basis))
    np.testing.assert_allclose(W, U @ V - V @ U, atol=1e-12)


def test_isotropy_rep_validation():
    g = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(ValueError, match="skew"):
        IsotropyRep(2, (g,))
    e = so_basis(3)[0]
    with pytest.raises(ValueError, match="invariant"):
        IsotropyRep(3, (e,), (np.eye(3)[:, [0]], np.eye(3)[:, 1:]))
    with pytest.raises(ValueError, match="commutation"):
        IsotropyRep(3, tuple(so_basis(3)), structure_constants=np.zeros((3, 3, 3)))


def test_standard_rep_orbits(rng):
    rep = standard_block_rep(2, 3)
    assert fixed_axes(rep).shape[1] == 2
    y = rng.standard_normal(5)
    assert orbit_dimension(rep, y) == 2
    y[2:] = 0
    assert orbit_dimension(rep, y) == 0
    assert s_tilde(rep, y).shape == (5, 3)


@given(st.floats(1e-6, 1e6), st.integers(0, 2 ** 31 - 1))
@settings(max_examples=50, deadline=None)
def test_orbit_dimension_scale_invariant(scale, seed):
    rep = standard_block_rep(1, 4)
    y = np.random.default_rng(seed).standard_normal(5)
    assert orbit_dimension(rep, scale * y) == orbit_dimension(rep, y) == 3


def test_null_space():
    m = np.array([[1.0, 1.0, 0.0]])
    ns = null_space(m)
    assert ns.shape == (3, 2)
    np.testing.assert_allclose(m @ ns, 0, atol=1e-15)
    assert null_space(np.zeros((0, 3))).shape == (3, 3)
