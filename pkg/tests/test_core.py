import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cheeger.core import (OrbitTensor, TangentVector, ZtInput, adapted_basis, c_t_apply, check_adapted, kappa_t,
                          model_from_isotropy, p_t, ricci_direct, ricci_limit, ricci_t, scal_bracket_term, scal_t,
                          z_t, z_t_refined, z_t_sampled, zt_lower_bound, sample_unit_sphere, fake_horizontal_component)
from cheeger.fdcurv import fd_ricci, fd_riemann, fd_scalar
from cheeger.group import so_basis
from cheeger.limiting import random_block_rep
from cheeger.warped import RotationAction, WarpedChart, WarpedMetricSpec, cheeger_chart_metric, warped_point_model


def random_orbit_tensor(rng, k, iso=0):
    a = rng.standard_normal((k, k))
    m = np.zeros((k + iso, k + iso))
    m[iso:, iso:] = a @ a.T + 0.1 * np.eye(k)
    return OrbitTensor(m, tuple(range(iso)))


# ---------------------------------------------------------------------------
# orbit tensor and C_t


def test_orbit_tensor_validation():
    with pytest.raises(ValueError, match="symmetric"):
        OrbitTensor(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError, match="isotropy"):
        OrbitTensor(np.eye(2), (0,))
    with pytest.raises(ValueError, match="positive definite"):
        OrbitTensor(np.diag([1.0, 0.0]))


def test_p_t_and_c_t(rng):
    P = random_orbit_tensor(rng, 3, iso=1)
    t = 0.7
    w, v = P.eigen()
    pt = p_t(P, t).matrix
    np.testing.assert_allclose(pt, (v * (w / (1 + t * w))) @ v.T, atol=1e-14)
    u = rng.standard_normal(4)
    c = c_t_apply(P, t, TangentVector(np.ones(2), u))
    c2 = c_t_apply(P, t, c_t_apply(P, t, TangentVector(np.ones(2), u), 0.5), 0.5)
    np.testing.assert_allclose(c.vertical_gen, c2.vertical_gen, atol=1e-14)
    assert c.vertical_gen[0] == 0.0  # isotropy component dropped
    with pytest.raises(ValueError):
        p_t(P, -1.0)


# ---------------------------------------------------------------------------
# z_t


def test_z_t_vanishes_at_zero(rng):
    P = random_orbit_tensor(rng, 3)
    assert z_t(P, ZtInput(rng.standard_normal(3), rng.standard_normal(3)), 0.0) == 0.0


@pytest.mark.parametrize("k", [1, 2, 4, 6])
@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_z_t_dominates_samples_and_refinement_closes_gap(k, t, rng):
    P = random_orbit_tensor(rng, k)
    d = ZtInput(rng.standard_normal(k), rng.standard_normal(k))
    z = z_t(P, d, t)
    zs = sample_unit_sphere(rng, 10_000, k)
    assert z_t_sampled(P, d, t, zs) <= z * (1 + 1e-12)
    refined = z_t_refined(P, d, t, rng)
    assert refined <= z * (1 + 1e-12)
    assert (z - refined) / max(1.0, z) <= 1e-4


def test_z_t_with_isotropy_block(rng):
    # isotropy directions have P = 0, so they contribute 3t c_iso^2
    P = random_orbit_tensor(rng, 2, iso=1)
    d = ZtInput(np.array([1.0, 0.0, 0.0]), np.zeros(3))
    assert z_t(P, d, 2.0) == pytest.approx(6.0)


@given(st.floats(0.01, 100.0), st.floats(0.1, 10.0), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_z_t_homogeneity(t, scale, seed):
    r = np.random.default_rng(seed)
    P = random_orbit_tensor(r, 3)
    dw = r.standard_normal(3)
    base = z_t(P, ZtInput(dw, np.zeros(3)), t)
    assert z_t(P, ZtInput(scale * dw, np.zeros(3)), t) == pytest.approx(scale ** 2 * base, rel=1e-10)
    assert base >= 0


# ---------------------------------------------------------------------------
# point models: formulas vs finite differences of the deformed metric


@pytest.fixture(scope="module")
def warped_setup():
    spec = WarpedMetricSpec(1, 2, 6.0, -2.4, profile_kind="sinh", psi_shift=0.1, domain=(0.15, np.pi / np.sqrt(6)))
    action = RotationAction(tuple(so_basis(3)))
    r = np.random.default_rng(1)
    x, y = r.standard_normal(2), r.standard_normal(3)
    model, act = warped_point_model(spec, action, 0.5, x, y)
    chart = WarpedChart(spec, 0.5, x, y)
    return model, act, chart


def _random_vector(model, r):
    u = r.standard_normal(model.lie.dim)
    u[list(model.lie.isotropy_indices)] = 0.0
    return TangentVector(r.standard_normal(model.dim_H), u)


@pytest.mark.parametrize("t", [0.0, 0.3, 1.7])
def test_curvature_formulas_match_fd_of_deformed_metric(warped_setup, t):
    model, act, chart = warped_setup
    r = np.random.default_rng(5)
    metric, fields = cheeger_chart_metric(chart, act, t)
    u0 = chart.origin
    riem = fd_riemann(metric, u0)
    g = chart.metric(u0)
    k = np.column_stack([f(u0) for f in fields])
    c_inv = np.eye(len(u0)) + t * k @ k.T @ g
    scale = 1.0 / chart.scales

    def to_chart(v):
        return model.frame(v) * scale

    for _ in range(3):
        v, w = _random_vector(model, r), _random_vector(model, r)
        a, b = c_inv @ to_chart(v), c_inv @ to_chart(w)
        fd = np.einsum("abcd,a,b,c,d->", riem, a, b, b, a)
        assert kappa_t(model, v, w, t) == pytest.approx(fd, rel=1e-6, abs=1e-6)
    v = _random_vector(model, r)
    a = to_chart(v)
    ric_fd = a @ fd_ricci(metric, u0) @ a
    assert ricci_t(model, v, t) == pytest.approx(ric_fd, rel=1e-6, abs=1e-6)
    assert ricci_direct(model, v, t) == pytest.approx(ricci_t(model, v, t), rel=1e-10, abs=1e-10)
    assert scal_t(model, t) == pytest.approx(fd_scalar(metric, u0), rel=1e-6)


def test_adapted_basis(warped_setup):
    model = warped_setup[0]
    basis = adapted_basis(model)
    check_adapted(model, basis)
    assert basis.k == model.lie.dim - len(model.lie.isotropy_indices)
    bad = type(basis)(basis.vectors[::-1], basis.eigenvalues, basis.eigenvectors)
    with pytest.raises(ValueError):
        check_adapted(model, bad)


def test_model_symmetries(warped_setup):
    assert warped_setup[0].check_symmetries() < 1e-12


def test_ricci_limit_matches_large_t(warped_setup):
    model = warped_setup[0]
    X = TangentVector(np.eye(model.dim_H)[0], np.zeros(model.lie.dim))
    lim = ricci_limit(model, X)
    vals = [ricci_t(model, X, t) for t in (1e3, 1e4, 1e5)]
    gaps = [abs(v - lim) for v in vals]
    assert gaps[2] < gaps[1] < gaps[0]
    assert gaps[2] < 1e-3 * max(1.0, abs(lim))


def test_scal_bracket_term_vanishes_for_abelian(warped_setup):
    spec = WarpedMetricSpec(1, 2, 6.0, -2.4, profile_kind="sinh", psi_shift=0.1, domain=(0.15, np.pi / np.sqrt(6)))
    action = RotationAction((so_basis(3)[0],))
    model, _ = warped_point_model(spec, action, 0.5, [1.0, 0.2], [0.3, 0.4, 0.5])
    assert scal_bracket_term(model, 100.0) == 0.0
    assert scal_bracket_term(warped_setup[0], 100.0) >= 0.0


# ---------------------------------------------------------------------------
# lower bound at singular points


def test_zt_lower_bound_never_exceeds_z_t():
    r = np.random.default_rng(11)
    for _ in range(40):
        rep = random_block_rep(r)
        model = model_from_isotropy(rep)
        x, y = r.standard_normal(rep.dim_H), r.standard_normal(rep.dim_H)
        zero = np.zeros(model.lie.dim)
        for t in (0.5, 5.0):
            z = z_t(model.P, model.zt_input(TangentVector(x, zero), TangentVector(y, zero)), t)
            assert zt_lower_bound(rep, x, y, t) <= z * (1 + 1e-12) + 1e-12


def test_zt_lower_bound_zero_for_orthogonal_y():
    from cheeger.group import standard_block_rep
    rep = standard_block_rep(1, 3)
    x = np.array([0.0, 1.0, 0.0, 0.0])
    y = np.array([1.0, 0.0, 0.0, 0.0])  # fixed axis: orthogonal to S_X(g_p)
    assert zt_lower_bound(rep, x, y, 10.0) == 0.0
    y2 = np.array([0.0, 0.0, 1.0, 0.0])
    assert zt_lower_bound(rep, x, y2, 10.0) == pytest.approx(30.0)
    yp = fake_horizontal_component(rep, x, y2)
    np.testing.assert_allclose(sum(c * g for c, g in zip(yp, rep.generators)) @ x, y2, atol=1e-12)
