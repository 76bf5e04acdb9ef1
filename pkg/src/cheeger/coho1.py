"""Diagonal cohomogeneity-one metrics and the positivity criterion for their Cheeger deformations.

Along a normal geodesic s in (0, R) the orbit tensor is diagonal,
P_s = f_i(s)^2 on a block of multiplicity n_i, and the deformation
eventually has Ric > 0 iff d^2/ds^2 tr P_s^{-1} >= c > 0 on (0, R).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.differentiate import derivative
from scipy.interpolate import CubicSpline

PROFILE_KINDS = ("sin", "const", "exp", "spline")
BOUNDARY_TAGS = ("neither", "zero", "R", "both")

#: smallest admissible finite-difference step
MIN_FD_STEP = 1e-8


@dataclass(frozen=True)
class Profile:
    """Scalar warping profile f with two derivatives.

    * ``sin``:    f = sin(A u)/A with u = s (or R - s when ``reflect``)
    * ``const``:  f = c
    * ``exp``:    f = c exp(A s)
    * ``spline``: cubic spline through (knots, values); no closed form
    """

    kind: str
    A: float = 1.0
    c: float = 1.0
    reflect: bool = False
    R: float | None = None
    knots: tuple[float, ...] = ()
    values: tuple[float, ...] = ()
    _spline: CubicSpline | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"profile kind must be one of {PROFILE_KINDS}, got {self.kind!r}")
        if self.kind in ("sin", "exp") and not np.isfinite(self.A):
            raise ValueError("A must be finite")
        if self.kind == "sin" and self.A == 0:
            raise ValueError("sin profile needs A != 0")
        if self.reflect and self.R is None:
            raise ValueError("a reflected profile needs R")
        if self.kind == "spline":
            k = np.asarray(self.knots, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if k.ndim != 1 or k.size < 4 or k.shape != v.shape:
                raise ValueError("spline needs at least 4 knots and matching values")
            if np.any(np.diff(k) <= 0):
                raise ValueError("spline knots must be strictly increasing")
            object.__setattr__(self, "_spline", CubicSpline(k, v))

    @property
    def closed_form(self) -> bool:
        return self.kind != "spline"

    def derivatives(self, s: float) -> tuple[float, float, float]:
        """(f, f', f'') at s."""
        if self.kind == "spline":
            sp = self._spline
            return float(sp(s)), float(sp(s, 1)), float(sp(s, 2))
        if self.kind == "const":
            return float(self.c), 0.0, 0.0
        if self.kind == "exp":
            e = self.c * np.exp(self.A * s)
            return float(e), float(self.A * e), float(self.A ** 2 * e)
        sign = -1.0 if self.reflect else 1.0
        u = (self.R - s) if self.reflect else s
        a = self.A
        return float(np.sin(a * u) / a), float(sign * np.cos(a * u)), float(-a * np.sin(a * u))

    def __call__(self, s: float) -> float:
        return self.derivatives(s)[0]


@dataclass(frozen=True)
class Block:
    n: int
    profile: Profile
    tag: str = "neither"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("block multiplicity must be a positive integer")
        if self.tag not in BOUNDARY_TAGS:
            raise ValueError(f"boundary tag must be one of {BOUNDARY_TAGS}")


@dataclass(frozen=True)
class DiagonalMetricFamily:
    """P_s = diag(f_i(s)^2 id_{n_i}) on (0, R) with boundary tags per block."""

    R: float
    blocks: tuple[Block, ...]
    tag_tol: float = 1e-6

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("R must be positive")
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if not self.blocks:
            raise ValueError("at least one block is required")
        ss = np.linspace(0.0, self.R, 203)[1:-1]
        for i, b in enumerate(self.blocks):
            if np.any(np.array([b.profile(s) for s in ss]) <= 0):
                raise ValueError(f"block {i}: profile must be positive on (0, R)")
            for end, want in (("zero", 1.0), ("R", -1.0)):
                if b.tag in (end, "both"):
                    s0 = 0.0 if end == "zero" else self.R
                    f, df, _ = b.profile.derivatives(s0)
                    if abs(f) > self.tag_tol or abs(df - want) > self.tag_tol:
                        raise ValueError(f"block {i}: tag {b.tag!r} requires f = 0, f' = {want:+g} at s = {s0:g} "
                                         f"(got f = {f:.3g}, f' = {df:.3g})")

    @property
    def dim(self) -> int:
        return sum(b.n for b in self.blocks)

    @property
    def closed_form(self) -> bool:
        return all(b.profile.closed_form for b in self.blocks)

    def _check_s(self, s: float) -> None:
        if not 0.0 <= s <= self.R:
            raise ValueError(f"s = {s} outside [0, {self.R}]")
        for i, b in enumerate(self.blocks):
            if not b.profile(s) > 0:
                raise ValueError(f"block {i} vanishes at s = {s}; P_s is not invertible")


def assemble_p(family: DiagonalMetricFamily, s: float) -> np.ndarray:
    family._check_s(s)
    return np.diag(np.concatenate([np.full(b.n, b.profile(s) ** 2) for b in family.blocks]))


def trace_p_inverse(family: DiagonalMetricFamily, s: float) -> float:
    """tr P_s^{-1} = sum n_i / f_i(s)^2."""
    family._check_s(s)
    return float(sum(b.n / b.profile(s) ** 2 for b in family.blocks))


def _fd2(fun, s: float, h: float) -> float:
    return (-fun(s + 2 * h) + 16 * fun(s + h) - 30 * fun(s) + 16 * fun(s - h) - fun(s - 2 * h)) / (12 * h * h)


def _fd_step(family: DiagonalMetricFamily, s: float, h: float | None) -> float:
    h = 1e-3 * family.R if h is None else h
    room = min(s, family.R - s) / 2.5
    h = min(h, room)
    if h < MIN_FD_STEP:
        raise ValueError(f"finite-difference step underflow at s = {s} (too close to the boundary)")
    return h


def d2_trace_p_inverse(family: DiagonalMetricFamily, s: float, method: str = "auto", h: float | None = None) -> float:
    """d^2/ds^2 tr P_s^{-1}: analytic sum n_i (6 f'^2/f^4 - 2 f''/f^3), or 5-point central FD."""
    if method not in ("auto", "analytic", "fd"):
        raise ValueError("method must be 'auto', 'analytic' or 'fd'")
    if method == "auto":
        method = "analytic" if family.closed_form else "fd"
    if method == "analytic":
        if not family.closed_form:
            raise ValueError("analytic derivative needs closed-form profiles")
        family._check_s(s)
        tot = 0.0
        for b in family.blocks:
            f, df, ddf = b.profile.derivatives(s)
            tot += b.n * (6 * df * df / f ** 4 - 2 * ddf / f ** 3)
        return float(tot)
    h = _fd_step(family, s, h)
    return float(_fd2(lambda x: trace_p_inverse(family, x), s, h))


@dataclass
class CriterionReport:
    passed: bool
    infimum: float
    argmin: float
    c_min: float
    method: str
    grid: np.ndarray
    values: np.ndarray

    @property
    def failure(self) -> str | None:
        return None if self.passed else "d2/ds2 tr P^-1 >= c_min"


def criterion(family: DiagonalMetricFamily, grid: Sequence[float] | None = None, c_min: float = 1.0,
              boundary_layer: float = 0.05, num: int = 401, method: str = "auto", tol: float = 1e-9) -> CriterionReport:
    """inf over the grid of d^2/ds^2 tr P_s^{-1}, compared with ``c_min``.

    Points within ``boundary_layer * R`` of either end are excluded.  ``tol``
    is a relative allowance for rounding when the infimum equals ``c_min``.
    """
    if not c_min > 0:
        raise ValueError("c_min must be positive")
    lo, hi = boundary_layer * family.R, (1 - boundary_layer) * family.R
    if grid is None:
        grid = np.linspace(lo, hi, num)
    g = np.asarray(grid, dtype=float)
    if np.any((g <= 0) | (g >= family.R)):
        raise ValueError("grid must be interior to (0, R)")
    g = g[(g >= lo - 1e-15 * family.R) & (g <= hi + 1e-15 * family.R)]
    if g.size == 0:
        raise ValueError("no grid points outside the boundary layers")
    m = "analytic" if (method == "auto" and family.closed_form) else ("fd" if method == "auto" else method)
    vals = np.array([d2_trace_p_inverse(family, s, m) for s in g])
    i = int(np.argmin(vals))
    inf = float(vals[i])
    return CriterionReport(inf >= c_min * (1 - tol), inf, float(g[i]), float(c_min), m, g, vals)


def dual_holonomy_identity_check(family: DiagonalMetricFamily, s: float, i: int) -> float:
    """|LHS - RHS| for the block-i identity at s.

    LHS = kappa_0(P^{-1}v*, X) + 3 |S_X P^{-1}v*|^2 with |P^{-1}v*| = 1/f,
    sectional curvature -f''/f and shape operator f'/f:  -f''/f^3 + 3 f'^2/f^4.
    RHS = (1/2) d^2/ds^2 Q(P^{-1}v, v) = (1/2) d/ds (-2 f'/f^3), the outer
    derivative taken numerically (adaptive high-order differences).
    """
    b = family.blocks[i]
    if not b.profile.closed_form:
        raise NotImplementedError("identity check needs a closed-form profile")
    family._check_s(s)
    f, df, ddf = b.profile.derivatives(s)
    lhs = -ddf / f ** 3 + 3 * df * df / f ** 4

    def dq(x):
        vals = [b.profile.derivatives(float(v)) for v in np.ravel(x)]
        return np.reshape([-2 * d1 / f0 ** 3 for f0, d1, _ in vals], np.shape(x))

    step = 0.1 * min(1.0, s, family.R - s)
    if step < MIN_FD_STEP:
        raise ValueError(f"finite-difference step underflow at s = {s} (too close to the boundary)")
    res = derivative(dq, s, initial_step=step, tolerances=dict(rtol=1e-14))
    return float(abs(lhs - 0.5 * float(res.df)))


# ---------------------------------------------------------------------------
# library families


def sin_family(A: float = 1.0, n: int = 1) -> DiagonalMetricFamily:
    """One block f = sin(A s)/A on (0, pi/A), vanishing at both ends."""
    R = float(np.pi / A)
    return DiagonalMetricFamily(R, (Block(n, Profile("sin", A=A), "zero"),))


def const_family(R: float = 1.0, ns: Sequence[int] = (1, 2), cs: Sequence[float] = (1.0, 2.0)) -> DiagonalMetricFamily:
    return DiagonalMetricFamily(R, tuple(Block(n, Profile("const", c=c)) for n, c in zip(ns, cs)))


def concave_family() -> DiagonalMetricFamily:
    """Concave blocks on (0, pi): sin s (both ends), 2 sin(s/2) (at 0), 2 sin((pi - s)/2) (at pi)."""
    R = float(np.pi)
    return DiagonalMetricFamily(R, (Block(1, Profile("sin", A=1.0), "both"),
                                    Block(2, Profile("sin", A=0.5), "zero"),
                                    Block(2, Profile("sin", A=0.5, reflect=True, R=R), "R")))


def library_profiles() -> list[tuple[str, DiagonalMetricFamily]]:
    """Closed-form families used by the identity check."""
    R = float(np.pi)
    return [
        ("sin", sin_family()),
        ("sin_n3", sin_family(1.0, 3)),
        ("const", const_family()),
        ("exp", DiagonalMetricFamily(1.0, (Block(1, Profile("exp", A=1.0, c=1.0)),))),
        ("exp_neg", DiagonalMetricFamily(2.0, (Block(3, Profile("exp", A=-0.7, c=2.0)),))),
        ("concave", concave_family()),
        ("reflected_sin", DiagonalMetricFamily(R, (Block(1, Profile("sin", A=1.0, reflect=True, R=R), "both"),))),
    ]
