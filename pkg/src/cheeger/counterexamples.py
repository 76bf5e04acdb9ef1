"""SO(n-2)-invariant metrics on S^n whose Cheeger deformations keep Ric(X) < 0.

The sphere is written as the join S^1 * S^{n-2}:

    g = dt^2 + phi(t)^2 dtheta^2 + psi(t)^2 ds^2_{S^{n-2}},   t in (t_L, T),

with t_L = pi / (2 sqrt(l1)), T = pi / sqrt(l1), phi = sin(sqrt(l1) t)/sqrt(l1)
(even about t_L, vanishing to first order at T) and
psi = sinh(sqrt(-l2)(t - t_L))/sqrt(-l2) (vanishing to first order at t_L),
closed up near T by a C^2 quintic with psi'(T) = 0.  In R^{n+1} = R^2 x R^{n-1}
this is the round topology of S^n, and SO(n-2) rotates the S^{n-2} factor
about its pole N, i.e. fixes three ambient coordinates.

At p = (t0, theta, N) the orbit is a point, H_p = T_pS^n splits as
span{d/dt} + span{d/dtheta} + T_N S^{n-2} with dimensions 1, 1, n-2, and
R_X = l1 on the first block, l2 on the second.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (CurvatureModel, TangentVector, ricci_direct, ricci_t, scal_bracket_term, scal_t, z_t,
                   zt_lower_bound)
from .fdcurv import FDOracleConfig, fd_ricci, fd_riemann, sectional
from .feasibility import FeasibilityResult
from .group import IsotropyRep, orbit_dimension, so_basis, standard_block_rep
from .limiting import EffectivenessReport, effectiveness_criterion
from .warped import (RotationAction, WarpedChart, WarpedMetricSpec, ricci_H_of_fixed_axis, warped_point_model)

logger = logging.getLogger(__name__)

DEFAULT_T_GRID = (0.0, 1.0, 10.0, 1e3, 1e6)


def mono_axial_rep(n: int) -> IsotropyRep:
    """Isotropy data at the fixed point: R^n = span{X} + H_1 (line) + H_2 (standard so(n-2))."""
    return standard_block_rep(2, n - 2)


def pole_rotations(m: int) -> RotationAction:
    """so(m) acting on the last m coordinates of R^{m+1} (fixing the pole e_0)."""
    gens = []
    for e in so_basis(m):
        g = np.zeros((m + 1, m + 1))
        g[1:, 1:] = e
        gens.append(g)
    return RotationAction(tuple(gens))


@dataclass(frozen=True)
class CounterexampleSpec:
    n: int
    lambdas: tuple[float, float]
    warped: WarpedMetricSpec
    action: RotationAction
    t0: float
    effectiveness: EffectivenessReport | None = None
    feasibility: FeasibilityResult | None = None

    @property
    def ricci_H(self) -> float:
        return ricci_H_of_fixed_axis(self.warped, (1, self.n - 2))

    @property
    def t_range(self) -> tuple[float, float]:
        return self.warped.domain


def build(n: int, lambdas: Sequence[float] | None = None, t0: float | None = None,
          closing_start: float = 0.6) -> CounterexampleSpec:
    """Run the effectiveness criterion and the solver, then assemble the warped metric.

    ``closing_start`` is the fraction of (t_L, T) after which psi is the
    closing quintic; ``t0`` (default: a quarter of the way) must lie before it.
    """
    if int(n) != n or n < 5:
        raise ValueError("the construction needs n >= 5")
    n = int(n)
    report = effectiveness_criterion(mono_axial_rep(n))
    feas = report.feasibility
    if lambdas is None:
        if feas is None or not feas.feasible:
            raise ValueError("effectiveness criterion found no admissible curvature constants")
        lambdas = feas.lambdas_float
    l1, l2 = (float(x) for x in lambdas)
    tl = np.pi / (2 * np.sqrt(l1))
    T = np.pi / np.sqrt(l1)
    t1 = tl + closing_start * (T - tl)
    if t0 is None:
        t0 = tl + 0.25 * (T - tl)
    if not tl < t0 < t1:
        raise ValueError("t0 must lie on the sinh segment")
    warped = WarpedMetricSpec(1, n - 2, l1, l2, t0=t0, profile_kind="sinh", domain=(tl, T),
                              psi_shift=tl, closing=(t1, T))
    return CounterexampleSpec(n, (l1, l2), warped, pole_rotations(n - 2), float(t0), report, feas)


def point_model(spec: CounterexampleSpec, t: float | None = None, theta: float = 0.0,
                y: np.ndarray | None = None) -> tuple[CurvatureModel, RotationAction]:
    """Curvature model at (t, theta, y); the default y is the fixed pole N."""
    t = spec.t0 if t is None else t
    x = np.array([np.cos(theta), np.sin(theta)])
    y = np.eye(spec.n - 1)[0] if y is None else y
    return warped_point_model(spec.warped, spec.action, t, x, y)


def singular_model(spec: CounterexampleSpec, t: float | None = None) -> CurvatureModel:
    model, _ = point_model(spec, t)
    if model.lie.complement_indices:
        raise AssertionError("the pole should be fixed by the whole group")
    return model


# ---------------------------------------------------------------------------
# verification reports


@dataclass
class Report:
    passed: bool
    failure: str | None = None
    rows: list[dict] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def fail(self, name: str) -> None:
        if self.passed:
            self.passed = False
            self.failure = name


def verify_negative_ricci(spec: CounterexampleSpec, t_grid: Sequence[float] = DEFAULT_T_GRID,
                          tol: float = 1e-8, z_tol: float = 1e-10) -> Report:
    """Ric_{g_t}(X) at the fixed point equals l1 + (n-2) l2 < 0 for every t, and z_t(X, e_i) = 0."""
    model = singular_model(spec)
    X = TangentVector(np.eye(model.dim_H)[0], np.zeros(model.lie.dim))
    target = spec.ricci_H
    rep = Report(True, info={"target": target})
    if not target < 0:
        rep.fail("Ric^H(X) < 0")
    for t in t_grid:
        ric = ricci_t(model, X, t)
        direct = ricci_direct(model, X, t)
        zmax = max(z_t(model.P, model.zt_input(X, TangentVector(e, np.zeros(model.lie.dim))), t)
                   for e in np.eye(model.dim_H))
        rep.rows.append({"t": float(t), "ricci_t_X": ric, "ricci_direct": direct, "z_max": zmax})
        if abs(ric - target) > tol:
            rep.fail("ricci_t(X) = l1 + (n-2) l2")
        if abs(direct - ric) > tol:
            rep.fail("ricci_t(X) consistent with sum of kappa_t")
        if zmax > z_tol:
            rep.fail("z_t(X, e_i) = 0 at the fixed point")
        if not ric < 0:
            rep.fail("ricci_t(X) < 0")
    return rep


def join_quotient_ricci(spec: WarpedMetricSpec, t: float) -> np.ndarray:
    """Ricci of the quotient dt^2 + phi^2 dtheta^2 + psi^2 dsigma^2 on the unit frame (diagonal)."""
    phi, dphi, ddphi, psi, dpsi, ddpsi = spec.profiles(t)
    k_tt = -ddphi / phi
    k_ts = -ddpsi / psi
    k_ths = -dphi * dpsi / (phi * psi)
    return np.array([k_tt + k_ts, k_tt + k_ths, k_ts + k_ths])


def quotient_ricci_fd(spec: WarpedMetricSpec, t: float, sphere_fibre: bool = False,
                      config: FDOracleConfig | None = None) -> np.ndarray:
    """FD Ricci eigenvalues of the quotient metric at parameter t.

    ``sphere_fibre=False``: dt^2 + phi^2 dtheta^2 + psi^2 dsigma^2 (3-dim, coordinates t, theta, sigma).
    ``sphere_fibre=True``: dt^2 + phi^2 ds^2_{S^{n1}}.
    """
    if sphere_fibre:
        base = WarpedMetricSpec(spec.n1, 0, spec.lambda1, spec.lambda2, b=spec.b, profile_kind=spec.profile_kind,
                                domain=spec.domain, psi_shift=spec.psi_shift)
        chart = WarpedChart(base, t, np.eye(spec.n1 + 1)[0], np.ones(1))
        metric, u = chart.metric, chart.origin
    else:
        def metric(u):
            phi, _, _, psi, _, _ = spec.profiles(u[0])
            return np.diag([1.0, phi ** 2, psi ** 2])
        u = np.array([t, 0.3, 0.7])
    ric = fd_ricci(metric, u, config)
    g = metric(u)
    return np.sort(np.linalg.eigvals(np.linalg.solve(g, ric)).real)


def rescale_factor(min_quotient_ricci: float) -> float:
    """Curvature multiplier s = 1/min Ric_quot: the metric g/s has quotient Ricci >= 1."""
    if not min_quotient_ricci > 0:
        raise ValueError("quotient Ricci curvature is not positive; no rescaling helps")
    return 1.0 / min_quotient_ricci


def quotient_ricci_profile(spec: CounterexampleSpec, num: int = 400, margin: float = 1e-3) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = spec.t_range
    ts = np.linspace(lo + margin * (hi - lo), hi - margin * (hi - lo), num)
    return ts, np.array([join_quotient_ricci(spec.warped, t) for t in ts])


def _loglog_slope(ts: Sequence[float], gaps: Sequence[float]) -> float:
    return float(-np.polyfit(np.log(ts), np.log(gaps), 1)[0])


def verify_quotient_ricci(spec: CounterexampleSpec, points: Sequence[tuple[float, np.ndarray]] | None = None,
                          t_grid: Sequence[float] = (1e3, 1e4, 1e5, 1e6), rng: np.random.Generator | None = None,
                          n_points: int = 5, slope_range: tuple[float, float] = (0.8, 1.2)) -> Report:
    """Ric_{g_t}(X) -> Ric_quot(X) at regular points, at rate 1/t; quotient Ricci positive after rescaling."""
    rng = rng or np.random.default_rng(0)
    lo, hi = spec.t_range
    t1 = spec.warped.closing[0] if spec.warped.closing else hi
    if points is None:
        points = []
        for _ in range(n_points):
            y = rng.standard_normal(spec.n - 1)
            points.append((float(rng.uniform(lo + 0.1 * (t1 - lo), t1 - 0.1 * (t1 - lo))), y))
    _, prof = quotient_ricci_profile(spec)
    s = rescale_factor(float(prof.min()))
    rep = Report(True, info={"rescale": s, "min_quotient_ricci": float(prof.min())})
    for tp, y in points:
        model, _ = point_model(spec, tp, 0.0, y)
        target = join_quotient_ricci(spec.warped, tp)[0]  # X = d/dt
        X = TangentVector(model.horizontal.T @ np.eye(model.n)[0], np.zeros(model.lie.dim))
        gaps = [abs(ricci_t(model, X, t) - target) for t in t_grid]
        slope = _loglog_slope(t_grid, gaps)
        rep.rows.append({"t_point": tp, "target": target, "gaps": gaps, "slope": slope})
        if not slope_range[0] <= slope <= slope_range[1]:
            rep.fail("O(1/t) convergence to the quotient Ricci curvature")
    if not s * float(prof.min()) >= 1 - 1e-12:
        rep.fail("rescaled quotient Ricci >= 1")
    return rep


# ---------------------------------------------------------------------------
# the literal S^2 * S^{n-3} local model (quotient of constant curvature)


def literal_join_spec(n: int, lambdas: Sequence[float]) -> tuple[WarpedMetricSpec, RotationAction]:
    """dt^2 + phi^2 ds^2_{S^2} + psi^2 ds^2_{S^{n-3}}, psi = sinh(sqrt(-l2) t)/sqrt(-l2), SO(n-2) on S^{n-3}."""
    l1, l2 = (float(x) for x in lambdas)
    tl, T = np.pi / (2 * np.sqrt(l1)), np.pi / np.sqrt(l1)
    spec = WarpedMetricSpec(2, n - 3, l1, l2, profile_kind="sinh", domain=(tl, T))
    return spec, RotationAction(tuple(so_basis(n - 2)))


@dataclass
class RegularLimitResult:
    t_grid: list[float]
    ricci: list[float]
    target: float
    gaps: list[float]
    slope: float
    rescale: float
    quotient_curvatures: list[float]


def regular_limit(n: int, lambdas: Sequence[float], t_point: float | None = None,
                  t_grid: Sequence[float] = (10.0, 1e2, 1e3, 1e4), rng: np.random.Generator | None = None,
                  quotient_points: int = 10) -> RegularLimitResult:
    """Ric_{g_t}(d/dt) at a regular point of the literal join vs the quotient value 2 l1."""
    rng = rng or np.random.default_rng(0)
    spec, action = literal_join_spec(n, lambdas)
    lo, hi = spec.domain
    t_point = lo + 0.4 * (hi - lo) if t_point is None else t_point
    y = rng.standard_normal(n - 2)
    x = rng.standard_normal(3)
    model, _ = warped_point_model(spec, action, t_point, x, y)
    X = TangentVector(model.horizontal.T @ np.eye(model.n)[0], np.zeros(model.lie.dim))
    target = 2.0 * spec.lambda1
    ric = [ricci_t(model, X, t) for t in t_grid]
    gaps = [abs(r - target) for r in ric]
    curv = []
    for tq in rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), quotient_points):
        base = WarpedMetricSpec(2, 0, spec.lambda1, spec.lambda2, profile_kind="sinh", domain=spec.domain)
        chart = WarpedChart(base, float(tq), rng.standard_normal(3), np.ones(1))
        r = fd_riemann(chart.metric, chart.origin, FDOracleConfig(step=1e-3))
        g = chart.metric(chart.origin)
        e = np.eye(3)
        curv += [sectional(r, g, e[0], e[1]), sectional(r, g, e[0], e[2]), sectional(r, g, e[1], e[2])]
    return RegularLimitResult(list(map(float, t_grid)), ric, target, gaps, _loglog_slope(t_grid, gaps),
                              rescale_factor(target), curv)


# ---------------------------------------------------------------------------
# scalar curvature blow-up


def sample_points(spec: CounterexampleSpec, rng: np.random.Generator, n_regular: int = 40,
                  n_singular: int = 10, margin: float = 0.05) -> list[tuple[float, float, np.ndarray]]:
    lo, hi = spec.t_range
    pts = []
    for _ in range(n_regular):
        pts.append((float(rng.uniform(lo + margin * (hi - lo), hi - margin * (hi - lo))),
                    float(rng.uniform(0, 2 * np.pi)), rng.standard_normal(spec.n - 1)))
    for i in range(n_singular):
        pole = np.eye(spec.n - 1)[0] * (1 if i % 2 == 0 else -1)
        pts.append((float(rng.uniform(lo + margin * (hi - lo), hi - margin * (hi - lo))),
                    float(rng.uniform(0, 2 * np.pi)), pole))
    return pts


def scalar_blowup_scan(spec: CounterexampleSpec, t_grid: Sequence[float] = (0.0, 1.0, 10.0, 1e2, 1e3),
                       points: Sequence[tuple[float, float, np.ndarray]] | None = None,
                       rng: np.random.Generator | None = None, action: RotationAction | None = None) -> Report:
    """Find the first T in ``t_grid`` with scal_{g_T} > 0 at every sample point."""
    rng = rng or np.random.default_rng(0)
    points = sample_points(spec, rng) if points is None else points
    action = action or spec.action
    models = []
    for t, th, y in points:
        x = np.array([np.cos(th), np.sin(th)])
        models.append(warped_point_model(spec.warped, action, t, x, y)[0])
    rep = Report(True, info={"points": len(models)})
    found = None
    for T in t_grid:
        vals = [scal_t(m, T) for m in models]
        brackets = [scal_bracket_term(m, T) for m in models]
        rep.rows.append({"t": float(T), "scal_min": float(min(vals)), "bracket_max": float(max(brackets))})
        if found is None and min(vals) > 0:
            found = float(T)
    rep.info["T"] = found
    if found is None:
        rep.fail("finite T with positive scalar curvature")
    return rep


def abelian_action(n: int) -> RotationAction:
    """The SO(2) subgroup rotating the first two coordinates moved by SO(n-2)."""
    return RotationAction((pole_rotations(n - 2).generators[0],))


def singular_blowup_bounds(spec: CounterexampleSpec, t_grid: Sequence[float] = (1.0, 10.0, 100.0),
                           rng: np.random.Generator | None = None) -> list[float]:
    """max over Y of zt_lower_bound(X', Y, t) for a non-fixed X' in H_2 at the fixed point."""
    rng = rng or np.random.default_rng(0)
    model = singular_model(spec)
    rep = model.rep
    xp = np.zeros(model.dim_H)
    xp[2] = 1.0
    if orbit_dimension(rep, xp) == 0:
        raise AssertionError("X' should not be fixed")
    ys = [g @ xp for g in rep.generators] + [rng.standard_normal(model.dim_H) for _ in range(10)]
    return [max(zt_lower_bound(rep, xp, y, t) for y in ys) for t in t_grid]
