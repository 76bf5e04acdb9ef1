"""Lie algebra and isotropy representation data at a point of a G-manifold.

Everything is stored in a Q-orthonormal basis of the Lie algebra, so the
bi-invariant inner product is the identity form throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

DEFAULT_RANK_RTOL = 1e-9


def so_basis(m: int) -> list[np.ndarray]:
    """Q-orthonormal basis E_ij = e_i e_j^T - e_j e_i^T (i < j) of so(m).

    Q(A, B) = -tr(AB)/2, for which the E_ij are orthonormal.
    """
    basis = []
    for i, j in combinations(range(m), 2):
        e = np.zeros((m, m))
        e[i, j] = 1.0
        e[j, i] = -1.0
        basis.append(e)
    return basis


def structure_constants(mats: Sequence[np.ndarray]) -> np.ndarray:
    """c[i, j, k] = Q([M_i, M_j], M_k) for a Q-orthonormal family of skew matrices."""
    n = len(mats)
    c = np.zeros((n, n, n))
    for i in range(n):
        for j in range(i + 1, n):
            br = mats[i] @ mats[j] - mats[j] @ mats[i]
            for k in range(n):
                c[i, j, k] = -0.5 * np.trace(br @ mats[k])
            c[j, i] = -c[i, j]
    return c


@dataclass(frozen=True)
class LieAlgebraData:
    """Structure constants in a Q-orthonormal basis, split as g_p + m_p."""

    structure_constants: np.ndarray
    isotropy_indices: tuple[int, ...] = ()
    complement_indices: tuple[int, ...] | None = None

    def __post_init__(self):
        c = np.asarray(self.structure_constants, dtype=float)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise ValueError(f"structure constants must be a cube, got shape {c.shape}")
        object.__setattr__(self, "structure_constants", c)
        iso = tuple(int(i) for i in self.isotropy_indices)
        comp = self.complement_indices
        if comp is None:
            comp = tuple(i for i in range(c.shape[0]) if i not in iso)
        comp = tuple(int(i) for i in comp)
        if sorted(iso + comp) != list(range(c.shape[0])):
            raise ValueError("isotropy and complement indices must partition the basis")
        object.__setattr__(self, "isotropy_indices", iso)
        object.__setattr__(self, "complement_indices", comp)

    @property
    def dim(self) -> int:
        return self.structure_constants.shape[0]

    @classmethod
    def from_matrices(cls, mats: Sequence[np.ndarray], isotropy_indices=()) -> "LieAlgebraData":
        return cls(structure_constants(mats), tuple(isotropy_indices))

    @classmethod
    def so(cls, m: int) -> "LieAlgebraData":
        return cls.from_matrices(so_basis(m))

    def bracket(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", u, v, self.structure_constants)

    def change_basis(self, o: np.ndarray, isotropy_indices=()) -> "LieAlgebraData":
        """Re-express in the orthonormal basis given by the columns of ``o``."""
        c = np.einsum("ia,jb,kc,ijk->abc", o, o, o, self.structure_constants)
        return LieAlgebraData(c, tuple(isotropy_indices))

    def restrict(self, indices: Sequence[int]) -> np.ndarray:
        """Structure constants of the span of ``indices`` (assumed a subalgebra)."""
        idx = np.asarray(indices, dtype=int)
        return self.structure_constants[np.ix_(idx, idx, idx)]

    def check(self, tol: float = 1e-12) -> dict[str, float]:
        """Residuals of antisymmetry, Jacobi and ad-skewness (bi-invariance of Q)."""
        c = self.structure_constants
        anti = np.max(np.abs(c + c.transpose(1, 0, 2)), initial=0.0)
        # sum_m c_ijm c_mkl + cyclic(i, j, k)
        jac = (np.einsum("ijm,mkl->ijkl", c, c)
               + np.einsum("jkm,mil->ijkl", c, c)
               + np.einsum("kim,mjl->ijkl", c, c))
        jacobi = np.max(np.abs(jac), initial=0.0)
        # <[u, v], w> + <v, [u, w]> = c_ijk + c_ikj
        skew = np.max(np.abs(c + c.transpose(0, 2, 1)), initial=0.0)
        res = {"antisymmetry": anti, "jacobi": jacobi, "ad_skew": skew}
        bad = {k: v for k, v in res.items() if v > tol}
        if bad:
            raise ValueError(f"Lie algebra data violates invariants: {bad}")
        return res


@dataclass(frozen=True)
class IsotropyRep:
    """Infinitesimal isotropy representation d rho on the horizontal space H_p.

    ``generators[a]`` is d rho(u_a) for the a-th element of a Q-orthonormal
    basis of g_p. ``decomposition`` lists orthonormal bases (columns) of
    mutually orthogonal invariant subspaces, the fixed axis block first when
    there is one.
    """

    dim_H: int
    generators: tuple[np.ndarray, ...]
    decomposition: tuple[np.ndarray, ...] = ()
    structure_constants: np.ndarray | None = None
    tol: float = field(default=1e-10, compare=False)

    def __post_init__(self):
        gens = tuple(np.asarray(g, dtype=float) for g in self.generators)
        for g in gens:
            if g.shape != (self.dim_H, self.dim_H):
                raise ValueError(f"generator shape {g.shape} != ({self.dim_H}, {self.dim_H})")
            if np.max(np.abs(g + g.T), initial=0.0) > self.tol:
                raise ValueError("isotropy generators must be skew-symmetric")
        object.__setattr__(self, "generators", gens)
        blocks = []
        for b in self.decomposition:
            b = np.asarray(b, dtype=float)
            if b.ndim == 1:
                b = b[:, None]
            if b.shape[0] != self.dim_H:
                raise ValueError("decomposition block has wrong ambient dimension")
            blocks.append(b)
        object.__setattr__(self, "decomposition", tuple(blocks))
        if blocks:
            allb = np.hstack(blocks)
            if np.max(np.abs(allb.T @ allb - np.eye(allb.shape[1]))) > 1e-9:
                raise ValueError("decomposition blocks must be orthonormal and mutually orthogonal")
            for b in blocks:
                proj = np.eye(self.dim_H) - b @ b.T
                for g in gens:
                    if np.max(np.abs(proj @ g @ b), initial=0.0) > self.tol:
                        raise ValueError("decomposition block is not invariant")
        if self.structure_constants is not None:
            c = np.asarray(self.structure_constants, dtype=float)
            object.__setattr__(self, "structure_constants", c)
            if c.shape != (len(gens),) * 3:
                raise ValueError("structure constants do not match number of generators")
            for i in range(len(gens)):
                for j in range(len(gens)):
                    lhs = gens[i] @ gens[j] - gens[j] @ gens[i]
                    rhs = sum(c[i, j, k] * gens[k] for k in range(len(gens)))
                    if np.max(np.abs(lhs - rhs), initial=0.0) > self.tol:
                        raise ValueError("generators do not satisfy the commutation relations")

    @property
    def dim_gp(self) -> int:
        return len(self.generators)

    def _stack(self) -> np.ndarray:
        if not self.generators:
            return np.zeros((0, self.dim_H))
        return np.vstack(self.generators)

    def block_projector(self, j: int) -> np.ndarray:
        b = self.decomposition[j]
        return b @ b.T


def _as_vec(rep: IsotropyRep, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != rep.dim_H:
        raise ValueError(f"vector has {x.shape[0]} components, expected {rep.dim_H}")
    return x


def s_tilde(rep: IsotropyRep, x) -> np.ndarray:
    """The map U -> d rho(U) X on g_p, as a dim_H x dim g_p matrix."""
    x = _as_vec(rep, x)
    if not rep.generators:
        return np.zeros((rep.dim_H, 0))
    return np.column_stack([g @ x for g in rep.generators])


def _rank(m: np.ndarray, scale: float, rtol: float) -> int:
    if m.size == 0 or scale == 0.0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > rtol * scale))


def orbit_dimension(rep: IsotropyRep, y, rtol: float = DEFAULT_RANK_RTOL) -> int:
    """dim rho(G_p) Y, the rank of U -> d rho(U) Y.

    Singular values are compared against ``rtol * |Y| * max_a |d rho(u_a)|``
    so that vectors in the fixed space get rank 0 rather than a noise rank.
    """
    y = _as_vec(rep, y)
    if not rep.generators:
        return 0
    gnorm = max(np.linalg.norm(g, 2) for g in rep.generators)
    return _rank(s_tilde(rep, y), np.linalg.norm(y) * gnorm, rtol)


def null_space(m: np.ndarray, rtol: float = DEFAULT_RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (columns) of ker m."""
    n = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(m)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rtol * smax)) if smax > 0 else 0
    return vt[rank:].T.copy()


def fixed_axes(rep: IsotropyRep, rtol: float = DEFAULT_RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of {X : d rho(g_p) X = 0}; shape (dim_H, d)."""
    return null_space(rep._stack(), rtol)


def standard_block_rep(trivial: int, m: int) -> IsotropyRep:
    """so(m) acting by its standard representation on the last m of trivial + m coordinates.

    The decomposition lists each trivial line separately, then the R^m block.
    """
    dim = trivial + m
    gens = []
    for e in so_basis(m):
        g = np.zeros((dim, dim))
        g[trivial:, trivial:] = e
        gens.append(g)
    eye = np.eye(dim)
    blocks = [eye[:, [i]] for i in range(trivial)] + [eye[:, trivial:]]
    return IsotropyRep(dim, tuple(gens), tuple(blocks), structure_constants(so_basis(m)))
