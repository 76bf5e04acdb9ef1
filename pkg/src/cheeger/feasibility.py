"""Sign-pattern feasibility for prescribed curvature constants.

Given dimensions A_1..A_n, a codimension l and a finite set of tuples
(a_1, .., a_n) with sum a_i = l - 1, find lambda with

    sum_i a_i lambda_i >= 1   for every tuple, and
    sum_i A_i lambda_i < 0.

Decisions are made in exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import permutations
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    f = float(x)
    if not np.isfinite(f):
        raise ValueError(f"non-finite constraint entry {x!r}")
    return Fraction(f).limit_denominator(10 ** 12)


@dataclass(frozen=True)
class FeasibilityInstance:
    dims: tuple[int, ...]
    l: int
    constraints: tuple[tuple[Fraction, ...], ...]

    def __init__(self, dims: Sequence[int], l: int, constraints: Iterable[Sequence]):
        dims = tuple(int(d) for d in dims)
        cons = tuple(tuple(to_fraction(a) for a in c) for c in constraints)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "l", int(l))
        object.__setattr__(self, "constraints", cons)
        if len(dims) < 2:
            raise ValueError("at least two blocks are required")
        if any(d <= 0 for d in dims):
            raise ValueError("block dimensions must be positive")
        if self.l < 2:
            raise ValueError("l must be at least 2")
        if not cons:
            raise ValueError("constraint set is empty: the infimum is undefined")
        for c in cons:
            if len(c) != len(dims):
                raise ValueError(f"constraint {c} has {len(c)} entries, expected {len(dims)}")
            if any(a < 0 for a in c):
                raise ValueError(f"constraint {c} has negative entries")
            if sum(c) != self.l - 1:
                raise ValueError(f"constraint {tuple(map(str, c))} does not sum to l - 1 = {self.l - 1}")

    @classmethod
    def two(cls, A: int, B: int, l: int, constraints) -> "FeasibilityInstance":
        return cls((A, B), l, constraints)

    @property
    def n(self) -> int:
        return len(self.dims)

    def inf(self, j: int) -> Fraction:
        return min(c[j] for c in self.constraints)

    def swapped(self) -> "FeasibilityInstance":
        return FeasibilityInstance(self.dims[::-1], self.l, [c[::-1] for c in self.constraints])


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    side: int | None = None  # 1 or 2 for two blocks
    pair: tuple[int, int] | None = None  # (i0, j0), 0-based
    lambdas: tuple[Fraction, ...] | None = None
    slack: Fraction | None = None  # inf a - threshold on the witnessing side
    threshold: Fraction | None = None

    @property
    def lambdas_float(self) -> tuple[float, ...] | None:
        return None if self.lambdas is None else tuple(float(x) for x in self.lambdas)


def evaluate(inst: FeasibilityInstance, lambdas: Sequence) -> tuple[Fraction, Fraction]:
    """(min_a sum a_i lambda_i, sum A_i lambda_i), exactly."""
    lam = [to_fraction(x) for x in lambdas]
    lo = min(sum(a * x for a, x in zip(c, lam)) for c in inst.constraints)
    return lo, sum(d * x for d, x in zip(inst.dims, lam))


def is_solution(inst: FeasibilityInstance, lambdas: Sequence) -> bool:
    lo, tr = evaluate(inst, lambdas)
    return lo >= 1 and tr < 0


# ---------------------------------------------------------------------------
# two blocks


def _require_two(inst: FeasibilityInstance) -> None:
    if inst.n != 2:
        raise ValueError("two-block routine called on an instance with n != 2")


def is_feasible_2(inst: FeasibilityInstance) -> FeasibilityResult:
    """Feasible iff inf a > A(l-1)/(A+B) (side 1) or inf b > B(l-1)/(A+B) (side 2)."""
    _require_two(inst)
    A, B = inst.dims
    for side, j, d in ((1, 0, A), (2, 1, B)):
        tau = Fraction(d * (inst.l - 1), A + B)
        m = inst.inf(j)
        if m > tau:
            return FeasibilityResult(True, side=side, pair=(1 - j, j), slack=m - tau, threshold=tau)
    return FeasibilityResult(False)


def _solve_side1(inst: FeasibilityInstance) -> tuple[Fraction, Fraction]:
    A, B = inst.dims
    L = inst.l - 1
    m = inst.inf(0)
    tau = Fraction(A * L, A + B)
    eps = (m - tau) * (A + B) / (4 * B)
    b_max = L - m
    lo = Fraction(A, B)
    r = (lo + (m - eps) / b_max) / 2 if b_max > 0 else 2 * lo
    lam1 = 1 / min(a - r * b for a, b in inst.constraints)
    return lam1, -r * lam1


def solve_lambdas_2(inst: FeasibilityInstance) -> FeasibilityResult:
    """Constructive solution; verified by substitution before returning."""
    res = is_feasible_2(inst)
    if not res.feasible:
        return res
    if res.side == 1:
        lam = _solve_side1(inst)
    else:
        l2, l1 = _solve_side1(inst.swapped())
        lam = (l1, l2)
    if not is_solution(inst, lam):  # pragma: no cover - guarded by construction
        raise AssertionError(f"constructed lambdas {lam} fail substitution")
    return FeasibilityResult(True, res.side, res.pair, lam, res.slack, res.threshold)


# ---------------------------------------------------------------------------
# n blocks


def is_feasible_n(inst: FeasibilityInstance) -> FeasibilityResult:
    """Search ordered pairs i0 != j0 with inf a_{j0} > (l-1) sum_{j != i0} A_j / sum_k A_k."""
    total = sum(inst.dims)
    for i0, j0 in permutations(range(inst.n), 2):
        tau = Fraction((inst.l - 1) * (total - inst.dims[i0]), total)
        m = inst.inf(j0)
        if m > tau:
            side = None
            if inst.n == 2:
                side = j0 + 1
            return FeasibilityResult(True, side=side, pair=(i0, j0), slack=m - tau, threshold=tau)
    return FeasibilityResult(False)


def solve_lambdas_n(inst: FeasibilityInstance) -> FeasibilityResult:
    """Collapse to {j0} versus the rest, solve the two-block problem, expand."""
    res = is_feasible_n(inst)
    if not res.feasible:
        return res
    _, j0 = res.pair
    rest = [i for i in range(inst.n) if i != j0]
    collapsed = FeasibilityInstance((sum(inst.dims[i] for i in rest), inst.dims[j0]), inst.l,
                                    [(sum(c[i] for i in rest), c[j0]) for c in inst.constraints])
    sol = solve_lambdas_2(collapsed)
    if not sol.feasible:  # pragma: no cover - the criterion implies the collapsed one
        raise AssertionError("collapsed problem unexpectedly infeasible")
    lam_rest, lam_j0 = sol.lambdas
    lam = tuple(lam_j0 if i == j0 else lam_rest for i in range(inst.n))
    if not is_solution(inst, lam):  # pragma: no cover
        raise AssertionError(f"expanded lambdas {lam} fail substitution")
    return FeasibilityResult(True, res.side, res.pair, lam, res.slack, res.threshold)


# ---------------------------------------------------------------------------
# independent oracles (two blocks)


def _half(d) -> int:
    return 0 if (d[1] > 0 or (d[1] == 0 and d[0] > 0)) else 1


def _cmp_angle(u, v) -> int:
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return -1 if hu < hv else 1
    cross = u[0] * v[1] - u[1] * v[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


def direction_oracle(inst: FeasibilityInstance) -> tuple[bool, tuple[Fraction, Fraction] | None]:
    """Exact decision by enumerating the cells of the line arrangement through the origin.

    The problem is feasible iff some direction d has a.d > 0 for every
    constraint and (A, B).d < 0 (then scale d).  The open cone of such d is
    bounded by rays orthogonal to the constraint normals, so it is non-empty
    iff it contains the bisector d_i + d_{i+1} of two consecutive critical rays.
    """
    _require_two(inst)
    A, B = inst.dims
    normals = [tuple(c) for c in inst.constraints] + [(Fraction(-A), Fraction(-B))]
    rays = []
    for a, b in normals:
        if a == 0 and b == 0:
            continue
        rays.append((-b, a))
        rays.append((b, -a))
    rays.sort(key=cmp_to_key(_cmp_angle))
    uniq = [rays[0]]
    for r in rays[1:]:
        if _cmp_angle(uniq[-1], r) != 0:
            uniq.append(r)
    cands = []
    for i in range(len(uniq)):
        u, v = uniq[i], uniq[(i + 1) % len(uniq)]
        cross = u[0] * v[1] - u[1] * v[0]
        if cross > 0:
            cands.append((u[0] + v[0], u[1] + v[1]))
        else:  # a half-turn gap: use the rotation of u by a right angle
            cands.append((-u[1], u[0]))
    for d in cands:
        if all(a * d[0] + b * d[1] > 0 for a, b in normals):
            scale = 1 / min(a * d[0] + b * d[1] for a, b in inst.constraints)
            return True, (d[0] * scale, d[1] * scale)
    return False, None


def grid_oracle(inst: FeasibilityInstance, num: int = 1 << 16) -> tuple[bool, tuple[float, float] | None]:
    """Grid search over directions on the unit circle (floating point).

    Solutions form a cone up to scaling: lambda is a solution for some scale
    iff its direction d has a.d > 0 for every constraint and (A, B).d < 0.
    Searching directions therefore does not depend on a bounding box.
    """
    _require_two(inst)
    A, B = inst.dims
    th = np.linspace(0.0, 2 * np.pi, num, endpoint=False)
    d = np.stack([np.cos(th), np.sin(th)])
    ok = A * d[0] + B * d[1] < 0
    vals = np.full(num, np.inf)
    for a, b in inst.constraints:
        v = float(a) * d[0] + float(b) * d[1]
        ok &= v > 0
        vals = np.minimum(vals, v)
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        return False, None
    i = idx[np.argmax(vals[idx])]
    return True, (float(d[0, i] / vals[i]), float(d[1, i] / vals[i]))


def box_grid_oracle(inst: FeasibilityInstance, box: float = 20.0, num: int = 401) -> tuple[bool, tuple[float, float] | None]:
    """Dense grid search for a solution inside [-box, box]^2 (floating point).

    Sound but incomplete: solutions may all lie outside the box.
    """
    _require_two(inst)
    A, B = inst.dims
    g = np.linspace(-box, box, num)
    l1, l2 = np.meshgrid(g, g, indexing="ij")
    ok = A * l1 + B * l2 < 0
    for a, b in inst.constraints:
        ok &= float(a) * l1 + float(b) * l2 >= 1
    idx = np.argwhere(ok)
    if idx.size == 0:
        return False, None
    i, j = idx[0]
    return True, (float(l1[i, j]), float(l2[i, j]))


def random_instance(rng: np.random.Generator, max_dim: int = 10, max_l: int = 12, max_constraints: int = 8,
                    max_den: int = 6) -> FeasibilityInstance:
    A = int(rng.integers(1, max_dim + 1))
    B = int(rng.integers(1, max_dim + 1))
    l = int(rng.integers(2, max_l + 1))
    L = l - 1
    cons = []
    for _ in range(int(rng.integers(1, max_constraints + 1))):
        den = int(rng.integers(1, max_den + 1))
        a = Fraction(int(rng.integers(0, L * den + 1)), den)
        cons.append((a, L - a))
    return FeasibilityInstance((A, B), l, cons)
