"""Limiting horizontal spaces W = (d rho(g_p) Y)^perp and their block traces."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .feasibility import FeasibilityInstance, FeasibilityResult, solve_lambdas_2, solve_lambdas_n
from .group import DEFAULT_RANK_RTOL, IsotropyRep, fixed_axes, orbit_dimension, s_tilde, so_basis, structure_constants

logger = logging.getLogger(__name__)

DEFAULT_ALPHAS = tuple(2.0 ** k for k in range(21))


@dataclass(frozen=True)
class LimitingSpace:
    basis: np.ndarray  # (dim_H, dim W), orthonormal columns
    source_Y: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def _block_basis(rep: IsotropyRep, block) -> np.ndarray:
    if isinstance(block, (int, np.integer)):
        return rep.decomposition[int(block)]
    b = np.asarray(block, dtype=float)
    return b[:, None] if b.ndim == 1 else b


def limiting_space(rep: IsotropyRep, y, rtol: float = DEFAULT_RANK_RTOL) -> LimitingSpace:
    """Orthonormal basis of the orthogonal complement of span{d rho(u_a) Y}."""
    y = np.asarray(y, dtype=float).reshape(-1)
    s = s_tilde(rep, y)
    r = orbit_dimension(rep, y, rtol)
    if r == 0:
        return LimitingSpace(np.eye(rep.dim_H), y)
    u, _, _ = np.linalg.svd(s, full_matrices=True)
    return LimitingSpace(u[:, r:].copy(), y)


def trace_projection(space: LimitingSpace, block: np.ndarray) -> float:
    """tr(p_i restricted to W) = |B^T W|_F^2 for orthonormal bases B of H_i and W of the space."""
    b = np.asarray(block, dtype=float)
    b = b[:, None] if b.ndim == 1 else b
    m = b.T @ space.basis
    return float(np.sum(m * m))


def generic_orbit_dimension(rep: IsotropyRep, rng: np.random.Generator, samples: int = 50,
                            block: np.ndarray | None = None, rtol: float = DEFAULT_RANK_RTOL) -> int:
    """max orbit dimension over random vectors (of ``block`` when given)."""
    best = 0
    for _ in range(samples):
        z = rng.standard_normal(rep.dim_H)
        if block is not None:
            z = block @ (block.T @ z)
        best = max(best, orbit_dimension(rep, z, rtol))
    return best


def principal_codimension(rep: IsotropyRep, rng: np.random.Generator | None = None, samples: int = 50) -> int:
    """l = dim H_p - generic orbit dimension (dimension of a regular horizontal space)."""
    rng = rng or np.random.default_rng(0)
    return rep.dim_H - generic_orbit_dimension(rep, rng, samples)


@dataclass(frozen=True)
class InfTraceResult:
    closed_form: int
    alphas: np.ndarray
    traces: np.ndarray
    regular: bool
    block_dim: int

    @property
    def sweep_inf(self) -> float:
        return float(np.min(self.traces))

    @property
    def gap(self) -> float:
        return float(self.traces[-1] - self.closed_form)

    def monotone(self, tol: float = 1e-10) -> bool:
        return bool(np.all(np.diff(self.traces) <= tol))

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.alphas.tolist(), self.traces.tolist()))


def inf_trace(rep: IsotropyRep, block, y, alphas: Sequence[float] = DEFAULT_ALPHAS,
              rng: np.random.Generator | None = None, samples: int = 50,
              rtol: float = DEFAULT_RANK_RTOL) -> InfTraceResult:
    """Closed form dim H_1 - dim rho(G_p) Y_1 and the sweep over W^alpha = (d rho(g_p)(alpha Y_1 + Y_2))^perp."""
    b = _block_basis(rep, block)
    y = np.asarray(y, dtype=float).reshape(-1)
    y1 = b @ (b.T @ y)
    y2 = y - y1
    closed = b.shape[1] - orbit_dimension(rep, y1, rtol)
    rng = rng or np.random.default_rng(0)
    regular = orbit_dimension(rep, y, rtol) >= generic_orbit_dimension(rep, rng, samples, rtol=rtol)
    if not regular:
        logger.warning("sample vector is not rho-regular; the sweep need not reach the infimum")
    alphas = np.asarray(alphas, dtype=float)
    traces = []
    for a in alphas:
        v = y1 + y2 / a  # same line as a Y_1 + Y_2, better scaled
        traces.append(trace_projection(limiting_space(rep, v, rtol), b))
    return InfTraceResult(int(closed), alphas, np.asarray(traces), bool(regular), b.shape[1])


# ---------------------------------------------------------------------------
# effectiveness


@dataclass
class EffectivenessReport:
    effective: bool
    reason: str
    fixed_axis_dim: int
    l: int | None = None
    infima: list[int] = field(default_factory=list)
    block_dims: list[int] = field(default_factory=list)
    thresholds: list[float] = field(default_factory=list)
    instance: FeasibilityInstance | None = None
    feasibility: FeasibilityResult | None = None


def effectiveness_criterion(rep: IsotropyRep, decomposition: Sequence[np.ndarray] | None = None,
                            l: int | None = None, axis_first: bool = True,
                            rng: np.random.Generator | None = None, samples: int = 50) -> EffectivenessReport:
    """Decide whether curvature constants on the blocks can keep Ric_{g_t}(X) negative.

    The first declared block is the fixed axis X (when ``axis_first``); the
    remaining blocks H_1..H_n get infima inf_j = dim H_j - generic dim rho(G_p) Y_j.
    A constraint set with those coordinate infima is handed to the feasibility
    module; a feasible answer means a metric with Ric_{g_t}(X) < 0 for all t
    exists near p, i.e. the deformation is not effective.
    """
    rng = rng or np.random.default_rng(0)
    blocks = list(decomposition if decomposition is not None else rep.decomposition)
    fixed = fixed_axes(rep)
    if fixed.shape[1] == 0:
        return EffectivenessReport(True, "no fixed axis", 0)
    if axis_first:
        if not blocks or blocks[0].shape[1] != 1:
            raise ValueError("the first block must be a one-dimensional fixed axis")
        axis = blocks[0][:, 0]
        if max((np.linalg.norm(g @ axis) for g in rep.generators), default=0.0) > 1e-10:
            raise ValueError("the declared axis is not fixed by the isotropy representation")
        blocks = blocks[1:]
    if l is None:
        l = principal_codimension(rep, rng, samples)
    dims = [b.shape[1] for b in blocks]
    if len(blocks) < 2:
        return EffectivenessReport(True, "a single block cannot carry curvature constants of both signs",
                                   fixed.shape[1], l, block_dims=dims)
    infima = [d - generic_orbit_dimension(rep, rng, samples, block=b @ b.T) for d, b in zip(dims, blocks)]
    total = sum(dims)
    thresholds = [(l - 1) * d / total for d in dims]
    # extreme tuples realising each coordinate infimum; the residual mass sits on another block
    cons = []
    for j, m in enumerate(infima):
        k = (j + 1) % len(dims)
        t = [0] * len(dims)
        t[j] = m
        t[k] = (l - 1) - m
        if t[k] < 0:
            raise ValueError("block infimum exceeds l - 1; inconsistent representation data")
        cons.append(tuple(t))
    inst = FeasibilityInstance(dims, l, cons)
    res = solve_lambdas_2(inst) if len(dims) == 2 else solve_lambdas_n(inst)
    reason = "constants of mixed sign exist" if res.feasible else "no admissible curvature constants"
    return EffectivenessReport(not res.feasible, reason, fixed.shape[1], l, infima, dims, thresholds, inst, res)


# ---------------------------------------------------------------------------
# representation builders


def adjoint_matrices(m: int) -> list[np.ndarray]:
    """ad(E_a) on so(m) in the Q-orthonormal basis E."""
    c = structure_constants(so_basis(m))
    return [c[a].T.copy() for a in range(c.shape[0])]


def block_sum_rep(m: int, kinds: Sequence[str], rotation: np.ndarray | None = None,
                  axis: bool = True) -> IsotropyRep:
    """so(m) acting on [axis] + blocks of kinds 'triv', 'std', 'adj', 'std2' (two copies of std).

    ``rotation`` (orthogonal) conjugates the whole representation.
    """
    basis = so_basis(m)
    std = basis
    adj = adjoint_matrices(m)
    parts = []
    for kind in kinds:
        if kind == "triv":
            parts.append([np.zeros((1, 1)) for _ in basis])
        elif kind == "std":
            parts.append(std)
        elif kind == "adj":
            parts.append(adj)
        elif kind == "std2":
            parts.append([np.kron(np.eye(2), e) for e in std])
        else:
            raise ValueError(f"unknown block kind {kind!r}")
    sizes = ([1] if axis else []) + [p[0].shape[0] for p in parts]
    dim = sum(sizes)
    gens = []
    for a in range(len(basis)):
        g = np.zeros((dim, dim))
        off = 1 if axis else 0
        for p in parts:
            s = p[a].shape[0]
            g[off:off + s, off:off + s] = p[a]
            off += s
        gens.append(g)
    eye = np.eye(dim)
    blocks, off = [], 0
    for s in sizes:
        blocks.append(eye[:, off:off + s])
        off += s
    if rotation is not None:
        gens = [rotation @ g @ rotation.T for g in gens]
        blocks = [rotation @ b for b in blocks]
    return IsotropyRep(dim, tuple(gens), tuple(blocks), structure_constants(basis))


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_block_rep(rng: np.random.Generator) -> IsotropyRep:
    m = int(rng.integers(2, 5))
    kinds = ["triv", "std", "adj", "std2"]
    nblocks = int(rng.integers(2, 4))
    chosen = [kinds[int(rng.integers(0, 4))] for _ in range(nblocks)]
    if all(k == "triv" for k in chosen):
        chosen[0] = "std"
    tmp = block_sum_rep(m, chosen)
    return block_sum_rep(m, chosen, random_orthogonal(rng, tmp.dim_H))
