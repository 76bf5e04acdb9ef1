"""Doubly warped products dt^2 + phi(t)^2 ds_1^2 + psi(t)^2 ds_2^2.

The fibres are unit round spheres S^{n1} and S^{n2}.  Points are written
``(t, x, y)`` with ``x`` a unit vector of R^{n1+1} and ``y`` a unit vector
of R^{n2+1}.  The orthonormal frame at a
point is ``[d/dt, x-frame, y-frame]`` where the fibre frames are orthonormal
bases of T_x S^{n1} and T_y S^{n2}, scaled by 1/phi and 1/psi.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.interpolate import BPoly

from .core import CurvatureModel, isotropy_split
from .fdcurv import FDOracleConfig, fd_riemann, killing_residual
from .group import IsotropyRep, LieAlgebraData, null_space, structure_constants

PROFILE_KINDS = ("exp", "sinh")


@dataclass(frozen=True)
class WarpedMetricSpec:
    """Parameters of a doubly warped metric.

    phi(t) = sin(sqrt(lambda1) t) / sqrt(lambda1) always.  For ``profile_kind``
    ``"exp"``, psi(t) = exp(sqrt(-lambda2) t - b) / sqrt(-lambda2); for
    ``"sinh"``, psi(t) = sinh(sqrt(-lambda2) (t - psi_shift)) / sqrt(-lambda2).
    With ``closing = (t1, T)`` psi is replaced on [t1, T] by a C^2 quintic that
    matches psi to second order at t1 and has psi'(T) = 0, psi''(T) < 0, so the
    metric closes up where phi vanishes.
    """

    n1: int
    n2: int
    lambda1: float
    lambda2: float
    b: float = 0.0
    t0: float | None = None
    profile_kind: str = "exp"
    domain: tuple[float, float] | None = None
    psi_shift: float = 0.0
    closing: tuple[float, float] | None = None

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError("fibre dimensions must be non-negative")
        if not self.lambda1 > 0:
            raise ValueError("lambda1 must be positive")
        if not self.lambda2 < 0:
            raise ValueError("lambda2 must be negative")
        if self.profile_kind not in PROFILE_KINDS:
            raise ValueError(f"profile_kind must be one of {PROFILE_KINDS}")
        if self.domain is None:
            object.__setattr__(self, "domain", (0.0, float(np.pi / np.sqrt(self.lambda1))))
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError("domain must be a non-empty interval")
        if self.t0 is not None:
            if not lo < self.t0 < hi:
                raise ValueError("t0 must lie inside the domain")
            if self.profile_kind == "exp" and not self.b > np.sqrt(-self.lambda2) * self.t0:
                raise ValueError("exp profile requires b > sqrt(-lambda2) * t0")
        if self.closing is not None:
            t1, T = self.closing
            if not lo < t1 < T <= hi:
                raise ValueError("closing interval must sit inside the domain")
        object.__setattr__(self, "_closing_poly", self._make_closing())
        ts = np.linspace(lo, hi, 401)[1:-1]
        vals = np.array([self.profiles(t)[0::3] for t in ts])
        if np.any(vals <= 0):
            raise ValueError("warping functions must be positive on the open domain")

    # -- profiles -----------------------------------------------------------

    def _psi_raw(self, t: float) -> tuple[float, float, float]:
        m = np.sqrt(-self.lambda2)
        if self.profile_kind == "exp":
            e = np.exp(m * t - self.b)
            return e / m, e, m * e
        s = m * (t - self.psi_shift)
        return np.sinh(s) / m, np.cosh(s), m * np.sinh(s)

    def _make_closing(self):
        if self.closing is None:
            return None
        t1, T = self.closing
        p0, p1, p2 = self._psi_raw(t1)
        end = p0 + 0.5 * p1 * (T - t1)
        return BPoly.from_derivatives([t1, T], [[p0, p1, p2], [end, 0.0, -end / (T - t1) ** 2]])

    def profiles(self, t: float) -> tuple[float, float, float, float, float, float]:
        """(phi, phi', phi'', psi, psi', psi'') at t."""
        lo, hi = self.domain
        if not lo <= t <= hi:
            raise ValueError(f"t = {t} outside the domain [{lo}, {hi}]")
        r = np.sqrt(self.lambda1)
        phi = np.sin(r * t) / r
        dphi = np.cos(r * t)
        ddphi = -r * np.sin(r * t)
        poly = self._closing_poly  # type: ignore[attr-defined]
        if poly is not None and t >= self.closing[0]:
            psi, dpsi, ddpsi = float(poly(t)), float(poly(t, 1)), float(poly(t, 2))
        else:
            psi, dpsi, ddpsi = self._psi_raw(t)
        return float(phi), float(dphi), float(ddphi), float(psi), float(dpsi), float(ddpsi)

    @property
    def dim(self) -> int:
        return 1 + self.n1 + self.n2

    def t0_condition(self, dim_H: int, l: int, dim_H1: int) -> tuple[float, float]:
        """(lhs, rhs) of -sqrt(-l1 l2) cot(sqrt(l1) t0) >= max(l1, (1 - l2)(dim_H - 1)/((l - 1) dim_H1))."""
        if self.t0 is None:
            raise ValueError("t0 is not set")
        lhs = -np.sqrt(-self.lambda1 * self.lambda2) / np.tan(np.sqrt(self.lambda1) * self.t0)
        rhs = max(self.lambda1, (1 - self.lambda2) * (dim_H - 1) / ((l - 1) * dim_H1))
        return float(lhs), float(rhs)


# ---------------------------------------------------------------------------
# closed-form curvature


@dataclass(frozen=True)
class WarpedCurvature:
    """Curvature operator diagonal on the wedges of the frame [t, x-frame, y-frame].

    ``K[a, b]`` is the sectional curvature of the frame plane (a, b).
    """

    K: np.ndarray
    n1: int
    n2: int

    def tensor(self) -> np.ndarray:
        n = self.K.shape[0]
        r = np.zeros((n, n, n, n))
        for a in range(n):
            for b in range(n):
                if a != b:
                    # R(e_a, e_b, e_b, e_a) = K_ab
                    r[a, b, b, a] = self.K[a, b]
                    r[a, b, a, b] = -self.K[a, b]
        return r

    def __call__(self, A, B, C, D) -> float:
        return float(np.einsum("abcd,a,b,c,d->", self.tensor(), A, B, C, D))

    def R_X(self) -> np.ndarray:
        """Jacobi operator of d/dt on its orthogonal complement (diagonal)."""
        return np.diag(self.K[0, 1:])


def sectional_curvatures(spec: WarpedMetricSpec, t: float) -> dict[str, float]:
    phi, dphi, ddphi, psi, dpsi, ddpsi = spec.profiles(t)
    return {
        "XV": -ddphi / phi,
        "XW": -ddpsi / psi,
        "VV": (1.0 - dphi ** 2) / phi ** 2,
        "WW": (1.0 - dpsi ** 2) / psi ** 2,
        "VW": -dphi * dpsi / (phi * psi),
    }


def curvature_operator(spec: WarpedMetricSpec, t: float) -> WarpedCurvature:
    k = sectional_curvatures(spec, t)
    n = spec.dim
    K = np.zeros((n, n))
    xs = range(1, 1 + spec.n1)
    ys = range(1 + spec.n1, n)
    for a in xs:
        K[0, a] = K[a, 0] = k["XV"]
    for a in ys:
        K[0, a] = K[a, 0] = k["XW"]
    for a in xs:
        for b in xs:
            if a != b:
                K[a, b] = k["VV"]
        for b in ys:
            K[a, b] = K[b, a] = k["VW"]
    for a in ys:
        for b in ys:
            if a != b:
                K[a, b] = k["WW"]
    return WarpedCurvature(K, spec.n1, spec.n2)


def ricci_H_of_fixed_axis(spec: WarpedMetricSpec, dims: Sequence[int] | None = None) -> float:
    """tr R_X = lambda1 n1 + lambda2 n2 (with ``dims`` overriding (n1, n2))."""
    n1, n2 = (spec.n1, spec.n2) if dims is None else dims
    return float(spec.lambda1 * n1 + spec.lambda2 * n2)


def schur_residual(curv: WarpedCurvature, blocks: Sequence[np.ndarray]) -> list[tuple[float, float]]:
    """For each block (columns in the X-complement), (scalar, max off-scalar residual) of R_X there."""
    rx = curv.R_X()
    out = []
    for b in blocks:
        m = b.T @ rx @ b
        s = float(np.trace(m) / m.shape[0])
        out.append((s, float(np.max(np.abs(m - s * np.eye(m.shape[0]))))))
    return out


# ---------------------------------------------------------------------------
# charts and the finite-difference oracle


def tangent_frame(v: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the orthogonal complement of the unit vector v."""
    return null_space(np.asarray(v, dtype=float)[None, :])


@dataclass(frozen=True)
class WarpedChart:
    """Chart u = (t, u_x, u_y) -> (t, normalize(x0 + Bx u_x), normalize(y0 + By u_y)).

    At u = (t0, 0, 0) the coordinate vectors are d/dt, phi * (x-frame) and
    psi * (y-frame), so chart components of a frame vector are obtained by
    dividing by ``scales``.
    """

    spec: WarpedMetricSpec
    t: float
    x0: np.ndarray
    y0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x0", np.asarray(self.x0, dtype=float) / np.linalg.norm(self.x0))
        object.__setattr__(self, "y0", np.asarray(self.y0, dtype=float) / np.linalg.norm(self.y0))
        if self.x0.size != self.spec.n1 + 1 or self.y0.size != self.spec.n2 + 1:
            raise ValueError("base point has the wrong number of coordinates")
        object.__setattr__(self, "Bx", tangent_frame(self.x0))
        object.__setattr__(self, "By", tangent_frame(self.y0))

    @property
    def origin(self) -> np.ndarray:
        return np.concatenate([[self.t], np.zeros(self.spec.n1 + self.spec.n2)])

    def _split(self, u):
        n1 = self.spec.n1
        return u[0], u[1:1 + n1], u[1 + n1:]

    @staticmethod
    def _sphere(p0, B, w):
        v = p0 + B @ w
        r = np.linalg.norm(v)
        xh = v / r
        return xh, (B - np.outer(xh, xh @ B)) / r

    def point(self, u) -> tuple[float, np.ndarray, np.ndarray]:
        t, ux, uy = self._split(np.asarray(u, dtype=float))
        return t, self._sphere(self.x0, self.Bx, ux)[0], self._sphere(self.y0, self.By, uy)[0]

    def jacobians(self, u):
        t, ux, uy = self._split(np.asarray(u, dtype=float))
        x, jx = self._sphere(self.x0, self.Bx, ux)
        y, jy = self._sphere(self.y0, self.By, uy)
        return t, x, jx, y, jy

    def metric(self, u) -> np.ndarray:
        t, x, jx, y, jy = self.jacobians(u)
        phi, _, _, psi, _, _ = self.spec.profiles(t)
        n1, n2 = self.spec.n1, self.spec.n2
        g = np.zeros((1 + n1 + n2,) * 2)
        g[0, 0] = 1.0
        g[1:1 + n1, 1:1 + n1] = phi ** 2 * jx.T @ jx
        g[1 + n1:, 1 + n1:] = psi ** 2 * jy.T @ jy
        return g

    def killing_field(self, Z: np.ndarray):
        """Chart components of the action field y -> Z y of a rotation of R^{n2+1}."""
        n1 = self.spec.n1

        def field(u):
            t, x, jx, y, jy = self.jacobians(u)
            out = np.zeros(1 + n1 + self.spec.n2)
            out[1 + n1:] = np.linalg.lstsq(jy, Z @ y, rcond=None)[0]
            return out

        return field

    @property
    def scales(self) -> np.ndarray:
        phi, _, _, psi, _, _ = self.spec.profiles(self.t)
        return np.concatenate([[1.0], np.full(self.spec.n1, phi), np.full(self.spec.n2, psi)])


def fd_frame_riemann(chart: WarpedChart, config: FDOracleConfig | None = None) -> np.ndarray:
    """FD curvature tensor at the chart origin, expressed in the orthonormal frame."""
    r = fd_riemann(chart.metric, chart.origin, config)
    s = 1.0 / chart.scales
    return np.einsum("abcd,a,b,c,d->abcd", r, s, s, s, s)


def compare_with_fd(spec: WarpedMetricSpec, t: float, x0=None, y0=None,
                    config: FDOracleConfig | None = None) -> float:
    """max |R_closed - R_fd| / max |R_closed| at (t, x0, y0)."""
    x0 = np.eye(spec.n1 + 1)[0] if x0 is None else x0
    y0 = np.eye(spec.n2 + 1)[0] if y0 is None else y0
    chart = WarpedChart(spec, t, x0, y0)
    r_fd = fd_frame_riemann(chart, config)
    r = curvature_operator(spec, t).tensor()
    return float(np.max(np.abs(r - r_fd)) / np.max(np.abs(r)))


# ---------------------------------------------------------------------------
# group action on the second fibre, Killing fields and dw


@dataclass(frozen=True)
class RotationAction:
    """A group of rotations of R^{n2+1} acting on the S^{n2} fibre.

    ``generators`` are skew (n2+1)x(n2+1) matrices, orthonormal for
    Q(A, B) = -tr(AB)/2 and closed under the bracket.
    """

    generators: tuple[np.ndarray, ...]

    def __post_init__(self):
        gens = tuple(np.asarray(g, dtype=float) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        gram = np.array([[-0.5 * np.trace(a @ b) for b in gens] for a in gens])
        if gens and np.max(np.abs(gram - np.eye(len(gens)))) > 1e-12:
            raise ValueError("rotation generators must be Q-orthonormal")
        for a in gens:
            if np.max(np.abs(a + a.T)) > 1e-12:
                raise ValueError("rotation generators must be skew-symmetric")
        if gens:
            c = structure_constants(gens)
            for i, a in enumerate(gens):
                for j, b in enumerate(gens):
                    br = a @ b - b @ a
                    if np.max(np.abs(br - sum(c[i, j, k] * gens[k] for k in range(len(gens))))) > 1e-10:
                        raise ValueError("rotation generators do not span a subalgebra")

    @property
    def dim(self) -> int:
        return len(self.generators)

    def lie(self) -> LieAlgebraData:
        return LieAlgebraData.from_matrices(self.generators)

    def rotate(self, o: np.ndarray) -> "RotationAction":
        """Re-express in the orthonormal basis of the Lie algebra given by the columns of ``o``."""
        return RotationAction(tuple(sum(o[a, b] * self.generators[a] for a in range(self.dim))
                                    for b in range(o.shape[1])))


def warped_point_model(spec: WarpedMetricSpec, action: RotationAction, t: float,
                       x=None, y=None, rtol: float = 1e-9) -> tuple[CurvatureModel, RotationAction]:
    """Curvature model of the warped metric at (t, x, y) with G acting on the second fibre.

    The Lie algebra basis is rotated so that the isotropy subalgebra comes
    first; the rotated action is returned alongside the model.
    """
    n1, n2 = spec.n1, spec.n2
    n = spec.dim
    x = np.eye(n1 + 1)[0] if x is None else np.asarray(x, dtype=float) / np.linalg.norm(x)
    y = np.eye(n2 + 1)[0] if y is None else np.asarray(y, dtype=float) / np.linalg.norm(y)
    phi, dphi, ddphi, psi, dpsi, ddpsi = spec.profiles(t)
    By = tangent_frame(y)
    ys = slice(1 + n1, n)

    raw = np.zeros((n, action.dim))
    for a, Z in enumerate(action.generators):
        raw[ys, a] = psi * By.T @ Z @ y
    o = isotropy_split(raw, rtol)
    k_iso = o.shape[1] - np.linalg.matrix_rank(raw, tol=rtol * max(1.0, np.abs(raw).max(initial=0)))
    act = action.rotate(o)
    lie = LieAlgebraData(act.lie().structure_constants, tuple(range(k_iso)))

    killing = np.zeros((n, act.dim))
    dw = np.zeros((act.dim, n, n))
    for a, Z in enumerate(act.generators):
        zhat = By.T @ Z @ y
        killing[ys, a] = psi * zhat
        # dw_Z(A, B) = g(nabla_A Z*, B)
        #            = psi' (A_t <zhat, B_y> - B_t <zhat, A_y>) + B_y^T (By^T Z By) A_y
        dw[a, 0, ys] += dpsi * zhat
        dw[a, ys, 0] -= dpsi * zhat
        dw[a, ys, ys] += (By.T @ Z @ By).T
    killing[np.abs(killing) < 1e-15 * max(1.0, np.abs(killing).max(initial=0))] = 0.0

    # horizontal space: orthogonal complement of the action fields
    vert = killing[:, k_iso:]
    horizontal = null_space(vert.T, rtol) if vert.shape[1] else np.eye(n)
    gens = []
    for a in range(k_iso):
        # d rho(Z) = restriction of nabla Z* (= dw[a]^T as an endomorphism) to H_p
        gens.append(horizontal.T @ dw[a].T @ horizontal)
    rep = IsotropyRep(horizontal.shape[1], tuple(gens),
                      structure_constants=lie.restrict(range(k_iso)) if k_iso else None)
    riemann = curvature_operator(spec, t).tensor()
    return CurvatureModel(riemann, horizontal, killing, dw, lie, rep), act


def killing_residuals(spec: WarpedMetricSpec, action: RotationAction, t: float, x=None, y=None,
                      h: float = 1e-5) -> list[float]:
    """|L_{Z*} g| at (t, x, y) for every generator, computed by finite differences in a chart."""
    x = np.eye(spec.n1 + 1)[0] if x is None else x
    y = np.eye(spec.n2 + 1)[0] if y is None else y
    chart = WarpedChart(spec, t, x, y)
    return [killing_residual(chart.metric, chart.killing_field(Z), chart.origin, h) for Z in action.generators]


def cheeger_chart_metric(chart: WarpedChart, action: RotationAction, t_def: float):
    """Chart metric of the Cheeger deformation g_t = (g^{-1} + t sum_a Z_a* Z_a*^T)^{-1}."""
    fields = [chart.killing_field(Z) for Z in action.generators]

    def metric(u):
        g = chart.metric(u)
        if not fields:
            return g
        k = np.column_stack([f(u) for f in fields])
        return np.linalg.inv(np.linalg.inv(g) + t_def * k @ k.T)

    return metric, fields
