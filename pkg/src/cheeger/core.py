"""Pointwise tensor calculus of the Cheeger deformation.

A point p of a G-manifold is described by a :class:`CurvatureModel`: a
g-orthonormal frame of T_pM, the horizontal space H_p inside it, the action
fields v_a* of a Q-orthonormal basis of the Lie algebra, the curvature tensor
of g, and the bilinear forms dw_{v_a}.  Tangent vectors are written as
``X + U*`` with X in H_p coordinates and U in Lie algebra coordinates
(:class:`TangentVector`).

The deformed metric g_t is described through its metric tensor
``g_t(A, B) = g(C_t A, B)`` and the reparametrised curvature
``kappa_t(A, B) = R_{g_t}(C_t^{-1}A, C_t^{-1}B, C_t^{-1}B, C_t^{-1}A)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .group import IsotropyRep, LieAlgebraData, s_tilde, null_space

ORTHO_TOL = 1e-10


def _check_t(t: float) -> float:
    t = float(t)
    if not t >= 0:
        raise ValueError(f"deformation parameter must be non-negative, got {t}")
    return t


@dataclass(frozen=True)
class OrbitTensor:
    """The orbit tensor P, g(U*, V*) = Q(PU, V), in a Q-orthonormal basis of g."""

    matrix: np.ndarray
    isotropy_indices: tuple[int, ...] = ()
    tol: float = field(default=1e-9, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("orbit tensor must be a square matrix")
        scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
        if np.max(np.abs(m - m.T), initial=0.0) > self.tol * scale:
            raise ValueError("orbit tensor must be symmetric")
        m = 0.5 * (m + m.T)
        iso = tuple(int(i) for i in self.isotropy_indices)
        if iso and np.max(np.abs(m[iso, :]), initial=0.0) > self.tol * scale:
            raise ValueError("orbit tensor must vanish on the isotropy block")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "isotropy_indices", iso)
        w = np.linalg.eigvalsh(self.block)
        if w.size and w[0] <= self.tol * scale:
            raise ValueError("orbit tensor must be positive definite on the complement block")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def complement_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.dim) if i not in self.isotropy_indices)

    @property
    def block(self) -> np.ndarray:
        c = list(self.complement_indices)
        return self.matrix[np.ix_(c, c)]

    def eigen(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending) and eigenvectors of P on m_p, embedded in g."""
        c = list(self.complement_indices)
        w, v = np.linalg.eigh(self.block)
        vecs = np.zeros((self.dim, len(c)))
        vecs[c, :] = v
        return w, vecs

    def function(self, f) -> np.ndarray:
        """f(P) on m_p, zero on g_p (f applied to the eigenvalues)."""
        w, v = self.eigen()
        return (v * f(w)) @ v.T

    def pinv(self) -> np.ndarray:
        return self.function(lambda w: 1.0 / w)


@dataclass(frozen=True)
class TangentVector:
    """X + U*: horizontal coordinates X and Lie algebra coordinates U (U in m_p)."""

    horizontal: np.ndarray
    vertical_gen: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "horizontal", np.asarray(self.horizontal, dtype=float).reshape(-1))
        object.__setattr__(self, "vertical_gen", np.asarray(self.vertical_gen, dtype=float).reshape(-1))

    def __add__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.horizontal + other.horizontal, self.vertical_gen + other.vertical_gen)

    def __mul__(self, c: float) -> "TangentVector":
        return TangentVector(c * self.horizontal, c * self.vertical_gen)

    __rmul__ = __mul__


@dataclass(frozen=True)
class ZtInput:
    """Linear functional Z -> dw_Z(A, B), and the bracket [PU, PV]."""

    dw: np.ndarray
    bracket: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dw", np.asarray(self.dw, dtype=float).reshape(-1))
        object.__setattr__(self, "bracket", np.asarray(self.bracket, dtype=float).reshape(-1))
        if self.dw.shape != self.bracket.shape:
            raise ValueError("dw and bracket must have the same length")


@dataclass(frozen=True)
class CurvatureModel:
    """Curvature data of a G-invariant metric g at one point p.

    Attributes
    ----------
    riemann:
        (n, n, n, n) array R(f_a, f_b, f_c, f_d) in a g-orthonormal frame f of T_pM.
    horizontal:
        (n, dim_H) orthonormal columns spanning H_p, in frame coordinates.
    killing:
        (n, dim_g) frame coordinates of the action fields v_a* at p.
    dw:
        (dim_g, n, n) array, dw_{v_a}(A, B) = A^T dw[a] B.
    lie:
        structure constants and the g_p / m_p split; isotropy indices must be
        exactly the basis elements whose action field vanishes at p.
    rep:
        the isotropy representation on H_p, if known.
    """

    riemann: np.ndarray
    horizontal: np.ndarray
    killing: np.ndarray
    dw: np.ndarray
    lie: LieAlgebraData
    rep: IsotropyRep | None = None

    def __post_init__(self):
        for name in ("riemann", "horizontal", "killing", "dw"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = self.riemann.shape[0]
        if self.riemann.shape != (n,) * 4:
            raise ValueError("riemann must be an (n, n, n, n) array")
        if self.horizontal.shape[0] != n or self.killing.shape != (n, self.lie.dim):
            raise ValueError("frame dimensions are inconsistent")
        if self.dw.shape != (self.lie.dim, n, n):
            raise ValueError("dw must have shape (dim_g, n, n)")
        h = self.horizontal
        if np.max(np.abs(h.T @ h - np.eye(h.shape[1])), initial=0.0) > 1e-9:
            raise ValueError("horizontal basis is not orthonormal")
        if np.max(np.abs(h.T @ self.killing), initial=0.0) > 1e-9 * max(1.0, np.abs(self.killing).max(initial=0)):
            raise ValueError("action fields must be vertical (orthogonal to H_p)")
        if self.rep is not None and self.rep.dim_H != h.shape[1]:
            raise ValueError("isotropy representation acts on a space of the wrong dimension")
        object.__setattr__(self, "_P", OrbitTensor(self.killing.T @ self.killing, self.lie.isotropy_indices))

    @property
    def n(self) -> int:
        return self.riemann.shape[0]

    @property
    def dim_H(self) -> int:
        return self.horizontal.shape[1]

    @property
    def P(self) -> OrbitTensor:
        return self._P  # type: ignore[attr-defined]

    def frame(self, v: TangentVector) -> np.ndarray:
        return self.horizontal @ v.horizontal + self.killing @ v.vertical_gen

    def R(self, a: TangentVector, b: TangentVector, c: TangentVector, d: TangentVector) -> float:
        return float(np.einsum("abcd,a,b,c,d->", self.riemann,
                               self.frame(a), self.frame(b), self.frame(c), self.frame(d)))

    def inner(self, a: TangentVector, b: TangentVector) -> float:
        return float(self.frame(a) @ self.frame(b))

    def zt_input(self, a: TangentVector, b: TangentVector) -> ZtInput:
        fa, fb = self.frame(a), self.frame(b)
        dw = np.einsum("kij,i,j->k", self.dw, fa, fb)
        pm = self.P.matrix
        return ZtInput(dw, self.lie.bracket(pm @ a.vertical_gen, pm @ b.vertical_gen))

    def check_symmetries(self, tol: float = 1e-8) -> float:
        """Largest violation of the algebraic curvature identities."""
        r = self.riemann
        scale = max(1.0, float(np.max(np.abs(r), initial=0.0)))
        res = max(
            np.max(np.abs(r + r.transpose(1, 0, 2, 3))),
            np.max(np.abs(r + r.transpose(0, 1, 3, 2))),
            np.max(np.abs(r - r.transpose(2, 3, 0, 1))),
            np.max(np.abs(r + r.transpose(1, 2, 0, 3) + r.transpose(2, 0, 1, 3))),
        ) / scale
        if res > tol:
            raise ValueError(f"curvature tensor violates algebraic symmetries (residual {res:.3g})")
        return float(res)


# ---------------------------------------------------------------------------
# P_t and C_t


def p_t(P: OrbitTensor, t: float) -> OrbitTensor:
    """P_t = P (1 + tP)^{-1}."""
    t = _check_t(t)
    return OrbitTensor(P.function(lambda w: w / (1.0 + t * w)), P.isotropy_indices)


def _resolvent(P: OrbitTensor, t: float, power: float = 1.0) -> np.ndarray:
    """(1 + tP)^{-power} restricted to m_p (identity there), zero on g_p."""
    return P.function(lambda w: (1.0 + t * w) ** (-power))


def c_t_apply(P: OrbitTensor, t: float, v: TangentVector, power: float = 1.0) -> TangentVector:
    """C_t^power (X + U*) = X + ((1 + tP)^{-power} U)*.

    The g_p components of U are discarded: their action fields vanish at p.
    """
    t = _check_t(t)
    return TangentVector(v.horizontal, _resolvent(P, t, power) @ v.vertical_gen)


# ---------------------------------------------------------------------------
# z_t and kappa_t


def z_t(P: OrbitTensor, data: ZtInput, t: float) -> float:
    """3t max_Z (c.Z)^2 / (t Q(PZ, Z) + 1), c = dw + (t/2)[PU, PV].

    The maximum of the generalised Rayleigh quotient is c^T (tP + 1)^{-1} c.
    """
    t = _check_t(t)
    if t == 0.0:
        return 0.0
    c = data.dw + 0.5 * t * data.bracket
    m = t * P.matrix + np.eye(P.dim)
    return float(3.0 * t * c @ np.linalg.solve(m, c))


def kappa_t(model: CurvatureModel, v: TangentVector, w: TangentVector, t: float) -> float:
    """R_g(v, w, w, v) + (t^3/4) |[PU, PV]|^2 + z_t(v, w)."""
    t = _check_t(t)
    data = model.zt_input(v, w)
    return model.R(v, w, w, v) + 0.25 * t ** 3 * float(data.bracket @ data.bracket) + z_t(model.P, data, t)


# ---------------------------------------------------------------------------
# adapted bases, Ricci and scalar curvature


@dataclass(frozen=True)
class AdaptedBasis:
    """g-orthonormal basis e_i = lambda_i^{-1/2} v_i* (i <= k), then horizontal e_i."""

    vectors: tuple[TangentVector, ...]
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def k(self) -> int:
        return len(self.eigenvalues)


def adapted_basis(model: CurvatureModel, horizontal: np.ndarray | None = None) -> AdaptedBasis:
    w, v = model.P.eigen()
    dim_g = model.lie.dim
    vecs = [TangentVector(np.zeros(model.dim_H), v[:, i] / np.sqrt(w[i])) for i in range(len(w))]
    hb = np.eye(model.dim_H) if horizontal is None else np.asarray(horizontal, dtype=float)
    vecs += [TangentVector(hb[:, j], np.zeros(dim_g)) for j in range(hb.shape[1])]
    basis = AdaptedBasis(tuple(vecs), w, v)
    check_adapted(model, basis)
    return basis


def check_adapted(model: CurvatureModel, basis: AdaptedBasis, tol: float = ORTHO_TOL) -> None:
    if len(basis.vectors) != model.n:
        raise ValueError(f"adapted basis has {len(basis.vectors)} vectors, expected {model.n}")
    f = np.column_stack([model.frame(e) for e in basis.vectors])
    if np.max(np.abs(f.T @ f - np.eye(model.n))) > tol:
        raise ValueError("basis is not g-orthonormal")
    for i, e in enumerate(basis.vectors):
        if i < basis.k:
            if np.any(e.horizontal != 0):
                raise ValueError("first k basis vectors must be vertical")
            target = basis.eigenvectors[:, i] / np.sqrt(basis.eigenvalues[i])
            if np.max(np.abs(e.vertical_gen - target)) > tol:
                raise ValueError("vertical basis vectors must be lambda_i^{-1/2} v_i*")
        elif np.any(e.vertical_gen != 0):
            raise ValueError("basis vectors after the first k must be horizontal")


def ricci_horizontal(model: CurvatureModel, v: TangentVector) -> float:
    """Ric^H(v) = sum over a horizontal orthonormal basis of R(e, v, v, e)."""
    zero = np.zeros(model.lie.dim)
    return sum(model.R(TangentVector(e, zero), v, v, TangentVector(e, zero)) for e in np.eye(model.dim_H))


def ricci_t(model: CurvatureModel, v: TangentVector, t: float, basis: AdaptedBasis | None = None) -> float:
    """Ric_{g_t}(v, v), assembled term by term.

    Ric^H(C_t v) + sum_i z_t(C_t^{1/2} e_i, C_t v)
      + sum_{i<=k} (kappa_0(e_i, C_t v) + (lambda_i t / 4)|[v_i, tP(1+tP)^{-1}U]|^2) / (1 + t lambda_i)
    """
    t = _check_t(t)
    basis = basis or adapted_basis(model)
    check_adapted(model, basis)
    P = model.P
    ctv = c_t_apply(P, t, v)
    total = ricci_horizontal(model, ctv)
    for e in basis.vectors:
        total += z_t(P, model.zt_input(c_t_apply(P, t, e, 0.5), ctv), t)
    tpu = t * p_t(P, t).matrix @ v.vertical_gen
    for i in range(basis.k):
        lam = basis.eigenvalues[i]
        e = basis.vectors[i]
        br = model.lie.bracket(basis.eigenvectors[:, i], tpu)
        total += (model.R(e, ctv, ctv, e) + 0.25 * lam * t * float(br @ br)) / (1.0 + t * lam)
    return float(total)


def ricci_direct(model: CurvatureModel, v: TangentVector, t: float, basis: AdaptedBasis | None = None) -> float:
    """Ric_{g_t}(v, v) = sum_i kappa_t(C_t^{1/2} e_i, C_t v)."""
    t = _check_t(t)
    basis = basis or adapted_basis(model)
    ctv = c_t_apply(model.P, t, v)
    return float(sum(kappa_t(model, c_t_apply(model.P, t, e, 0.5), ctv, t) for e in basis.vectors))


def scal_t(model: CurvatureModel, t: float, basis: AdaptedBasis | None = None) -> float:
    """scal_{g_t}(p) = sum_{i, j} kappa_t(C_t^{1/2} e_i, C_t^{1/2} e_j)."""
    t = _check_t(t)
    basis = basis or adapted_basis(model)
    check_adapted(model, basis)
    half = [c_t_apply(model.P, t, e, 0.5) for e in basis.vectors]
    total = 0.0
    for i in range(len(half)):
        for j in range(i + 1, len(half)):
            total += 2.0 * kappa_t(model, half[i], half[j], t)
    return float(total)


def scal_bracket_term(model: CurvatureModel, t: float) -> float:
    """sum_{i, j<=k} lambda_i lambda_j t^3 / ((1 + t lambda_i)(1 + t lambda_j)) |[v_i, v_j]|^2 / 4."""
    t = _check_t(t)
    w, v = model.P.eigen()
    total = 0.0
    for i in range(len(w)):
        for j in range(len(w)):
            br = model.lie.bracket(v[:, i], v[:, j])
            total += w[i] * w[j] * t ** 3 / ((1 + t * w[i]) * (1 + t * w[j])) * 0.25 * float(br @ br)
    return float(total)


def _z_limit(P: OrbitTensor, d: np.ndarray, iso_tol: float) -> float:
    """lim_{t -> oo} 3t d^T (tP + 1)^{-1} d for fixed d."""
    iso = list(P.isotropy_indices)
    if iso and np.linalg.norm(d[iso]) > iso_tol:
        return float("inf")
    return float(3.0 * d @ P.pinv() @ d)


def ricci_limit(model: CurvatureModel, v: TangentVector, basis: AdaptedBasis | None = None,
                iso_tol: float = 1e-12) -> float:
    """lim_{t -> oo} Ric_{g_t}(v, v).

    Ric^H(X) + sum_{i>k} z_oo(e_i, X) + sum_{i<=k} 3 |c_i restricted to g_p|^2 / lambda_i
      + (1/4) sum_j |[v_j, U]|^2,
    with c_i = dw(e_i, X) + (1/2) lambda_i^{1/2} [v_i, U]. The result is +inf when
    some horizontal e_i has dw(e_i, X) with a non-zero g_p component.
    """
    basis = basis or adapted_basis(model)
    P = model.P
    X = TangentVector(v.horizontal, np.zeros(model.lie.dim))
    U = v.vertical_gen.copy()
    iso = list(P.isotropy_indices)
    U[iso] = 0.0
    total = ricci_horizontal(model, X)
    for i, e in enumerate(basis.vectors):
        if i < basis.k:
            lam = basis.eigenvalues[i]
            c = model.zt_input(e, X).dw + 0.5 * np.sqrt(lam) * model.lie.bracket(basis.eigenvectors[:, i], U)
            total += 3.0 * float(c[iso] @ c[iso]) / lam
            br = model.lie.bracket(basis.eigenvectors[:, i], U)
            total += 0.25 * float(br @ br)
        else:
            total += _z_limit(P, model.zt_input(e, X).dw, iso_tol)
    return float(total)


# ---------------------------------------------------------------------------
# blow-up lower bound at singular points


def fake_horizontal_component(rep: IsotropyRep, x, y) -> np.ndarray:
    """Y_{p_X}: the element of g_p orthogonal to g_X with S_X(Y_{p_X}) the projection of Y onto S_X(g_p)."""
    s = s_tilde(rep, x)
    if s.size == 0:
        return np.zeros(rep.dim_gp)
    return np.linalg.lstsq(s, np.asarray(y, dtype=float), rcond=1e-12)[0]


def zt_lower_bound(rep: IsotropyRep, x, y, t: float) -> float:
    """3t |S_X Y_{p_X}|^4 / |Y_{p_X}|^2, and 0 when Y is orthogonal to S_X(g_p)."""
    t = _check_t(t)
    yp = fake_horizontal_component(rep, x, y)
    nrm2 = float(yp @ yp)
    if nrm2 == 0.0:
        return 0.0
    sy = s_tilde(rep, x) @ yp
    val = float(sy @ sy)
    scale = float(np.dot(y, y))
    if val <= 1e-24 * max(scale, 1e-300):
        return 0.0
    return 3.0 * t * val ** 2 / nrm2


def isotropy_split(killing: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    """Orthogonal matrix whose first columns span {Z : Z*(p) = 0}, the rest its complement."""
    iso = null_space(killing, rtol)
    comp = null_space(iso.T, rtol) if iso.shape[1] else np.eye(killing.shape[1])
    return np.hstack([iso, comp])


def sample_unit_sphere(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    z = rng.standard_normal((n, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def z_t_sampled(P: OrbitTensor, data: ZtInput, t: float, zs: np.ndarray) -> float:
    """Brute-force 3t max over the rows of ``zs`` of the Rayleigh quotient (test oracle)."""
    t = _check_t(t)
    c = data.dw + 0.5 * t * data.bracket
    num = (zs @ c) ** 2
    den = t * np.einsum("ni,ij,nj->n", zs, P.matrix, zs) + np.einsum("ni,ni->n", zs, zs)
    return float(3.0 * t * np.max(num / den))


def tangent(h: Sequence[float] | np.ndarray, u: Sequence[float] | np.ndarray) -> TangentVector:
    return TangentVector(np.asarray(h, dtype=float), np.asarray(u, dtype=float))


def z_t_refined(P: OrbitTensor, data: ZtInput, t: float, rng: np.random.Generator, n_samples: int = 10_000,
                rounds: int = 40, shrink: float = 0.5) -> float:
    """Sampled lower estimate of z_t refined around the best sample (test oracle).

    A first batch of unit vectors is uniform on the sphere; each later batch
    perturbs the current maximiser.  The perturbation radius is kept while a
    batch improves the estimate and multiplied by ``shrink`` otherwise.
    """
    t = _check_t(t)
    if t == 0.0:
        return 0.0
    k = P.dim
    c = data.dw + 0.5 * t * data.bracket
    m = t * P.matrix + np.eye(k)

    def quotient(zs):
        return 3.0 * t * (zs @ c) ** 2 / np.einsum("ni,ij,nj->n", zs, m, zs)

    per = max(n_samples // (2 * rounds), 1)
    zs = sample_unit_sphere(rng, n_samples - rounds * per, k)
    vals = quotient(zs)
    i = int(np.argmax(vals))
    best_val, best = float(vals[i]), zs[i]
    radius = 0.5
    for _ in range(rounds):
        zs = best + radius * rng.standard_normal((per, k)) / np.sqrt(k)
        zs /= np.linalg.norm(zs, axis=1, keepdims=True)
        vals = quotient(zs)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best = float(vals[i]), zs[i]
        else:
            radius *= shrink
    return best_val


def model_from_isotropy(rep: IsotropyRep, riemann: np.ndarray | None = None) -> CurvatureModel:
    """Point data at a fixed point: T_pM = H_p, every action field vanishes, d rho(Z) = dw_Z^T."""
    if rep.structure_constants is None:
        raise ValueError("the isotropy representation needs structure constants")
    n = rep.dim_H
    k = rep.dim_gp
    lie = LieAlgebraData(rep.structure_constants, tuple(range(k)))
    dw = np.stack([g.T for g in rep.generators]) if k else np.zeros((0, n, n))
    r = np.zeros((n,) * 4) if riemann is None else riemann
    return CurvatureModel(r, np.eye(n), np.zeros((n, k)), dw, lie, rep)
