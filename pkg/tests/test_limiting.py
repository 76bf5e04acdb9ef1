from fractions import Fraction

import numpy as np
import pytest

from cheeger.group import IsotropyRep, orbit_dimension, standard_block_rep
from cheeger.limiting import (adjoint_matrices, block_sum_rep, effectiveness_criterion, generic_orbit_dimension,
                              inf_trace, limiting_space, principal_codimension, random_block_rep, trace_projection)


def test_limiting_space_is_orthogonal_to_orbit(rng):
    rep = standard_block_rep(2, 3)
    y = rng.standard_normal(5)
    W = limiting_space(rep, y)
    assert W.dim == 5 - orbit_dimension(rep, y) == 3
    for g in rep.generators:
        np.testing.assert_allclose(W.basis.T @ (g @ y), 0, atol=1e-12)
    # a fixed vector gives the whole space
    assert limiting_space(rep, np.eye(5)[0]).dim == 5


def test_mono_axial_traces_are_one(rng):
    rep = standard_block_rep(2, 3)
    y = rng.standard_normal(5)
    y[0] = 0.0
    for block in (1, 2):
        res = inf_trace(rep, block, y)
        assert res.closed_form == 1
        assert res.regular
        assert abs(res.gap) <= 1e-6
        assert res.monotone()


def test_random_reps_sweep_to_closed_form():
    r = np.random.default_rng(0)
    for _ in range(10):
        rep = random_block_rep(r)
        y = r.standard_normal(rep.dim_H)
        for j in range(1, len(rep.decomposition)):
            res = inf_trace(rep, j, y, rng=r)
            assert abs(res.gap) <= 1e-6
            assert res.monotone()
            assert res.sweep_inf >= res.closed_form - 1e-6


def test_trace_projection_total_is_dim_w(rng):
    rep = block_sum_rep(3, ["std", "adj"])
    y = rng.standard_normal(rep.dim_H)
    W = limiting_space(rep, y)
    total = sum(trace_projection(W, b) for b in rep.decomposition)
    assert total == pytest.approx(W.dim)


def test_adjoint_representation_is_a_representation():
    mats = adjoint_matrices(4)
    for m in mats:
        np.testing.assert_allclose(m, -m.T, atol=1e-14)
    rep = block_sum_rep(4, ["adj"], axis=False)
    assert rep.dim_H == 6


def test_principal_codimension():
    assert principal_codimension(standard_block_rep(2, 3)) == 3
    # so(3) on R^3 + R^3: generic orbits are 3-dimensional
    assert principal_codimension(block_sum_rep(3, ["std2"], axis=False)) == 3
    assert generic_orbit_dimension(standard_block_rep(0, 4), np.random.default_rng(0)) == 3


def test_effectiveness_mono_axial():
    rep = standard_block_rep(2, 3)
    report = effectiveness_criterion(rep)
    assert not report.effective
    assert report.l == 3 and report.infima == [1, 1]
    assert report.thresholds == [0.5, 1.5]
    assert report.feasibility.lambdas == (Fraction(12, 5), Fraction(-7, 5))


def test_effectiveness_without_fixed_axis_or_single_block():
    rep = standard_block_rep(0, 3)
    assert effectiveness_criterion(rep, axis_first=False).reason == "no fixed axis"
    rep1 = standard_block_rep(1, 3)
    assert effectiveness_criterion(rep1).effective


def test_effectiveness_rejects_non_fixed_axis():
    rep = standard_block_rep(1, 3)
    blocks = (rep.decomposition[1][:, [0]], np.eye(4)[:, [0]], np.eye(4)[:, [2, 3]])
    with pytest.raises(ValueError):
        effectiveness_criterion(IsotropyRep(4, rep.generators, rep.decomposition), blocks)
