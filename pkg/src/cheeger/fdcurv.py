"""Finite-difference Riemann tensor of a metric given in a coordinate chart.

This is a verification oracle: Christoffel symbols come from central
differences of the metric components, and the curvature from central
differences of the Christoffel symbols. It knows nothing about warped
products or group actions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

MetricFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class FDOracleConfig:
    step: float = 1e-4
    richardson: bool = False

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("finite-difference step must be positive")
        if self.step < 1e-8:
            raise ValueError(f"finite-difference step {self.step} underflows the metric resolution")


def metric_derivative(metric: MetricFn, u: np.ndarray, h: float) -> np.ndarray:
    """dg[c, a, b] = d g_ab / d u^c, fourth-order central differences."""
    u = np.asarray(u, dtype=float)
    n = u.size
    out = np.empty((n, n, n))
    for c in range(n):
        e = np.zeros(n)
        e[c] = h
        out[c] = (-metric(u + 2 * e) + 8 * metric(u + e) - 8 * metric(u - e) + metric(u - 2 * e)) / (12 * h)
    return out


def christoffel(metric: MetricFn, u: np.ndarray, h: float) -> np.ndarray:
    """gamma[d, a, b] = Gamma^d_{ab}."""
    g = metric(u)
    dg = metric_derivative(metric, u, h)
    # Gamma_{c,ab} = (d_a g_bc + d_b g_ac - d_c g_ab) / 2
    low = 0.5 * (dg.transpose(1, 2, 0) + dg.transpose(2, 0, 1) - dg)
    # transpose(1, 2, 0)[c, a, b] = dg[b, c, a]; transpose(2, 0, 1)[c, a, b] = dg[a, b, c]
    return np.einsum("dc,cab->dab", np.linalg.inv(g), low)


def _riemann_once(metric: MetricFn, u: np.ndarray, h: float) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    n = u.size
    gam = christoffel(metric, u, h)
    dgam = np.empty((n, n, n, n))  # dgam[a, d, b, c] = d_a Gamma^d_{bc}
    for a in range(n):
        e = np.zeros(n)
        e[a] = h
        dgam[a] = (-christoffel(metric, u + 2 * e, h) + 8 * christoffel(metric, u + e, h)
                   - 8 * christoffel(metric, u - e, h) + christoffel(metric, u - 2 * e, h)) / (12 * h)
    # R^d_{cab} = d_a G^d_{bc} - d_b G^d_{ac} + G^d_{ae} G^e_{bc} - G^d_{be} G^e_{ac}
    r_up = (np.einsum("adbc->dcab", dgam) - np.einsum("bdac->dcab", dgam)
            + np.einsum("dae,ebc->dcab", gam, gam) - np.einsum("dbe,eac->dcab", gam, gam))
    g = metric(u)
    # R(X_a, X_b, X_c, X_d) = g(R(X_a, X_b) X_c, X_d) with R(a,b)c = R^d_{cab} X_d
    return np.einsum("ecab,ed->abcd", r_up, g)


def fd_riemann(metric: MetricFn, u, config: FDOracleConfig | None = None) -> np.ndarray:
    """(4,0) curvature tensor R[a, b, c, d] = g(R(d_a, d_b) d_c, d_d) at chart point ``u``.

    Convention R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z, so
    sectional curvature of an orthonormal pair is R(X, Y, Y, X).
    """
    config = config or FDOracleConfig()
    u = np.asarray(u, dtype=float)
    r = _riemann_once(metric, u, config.step)
    if config.richardson:
        r2 = _riemann_once(metric, u, config.step / 2)
        r = r2 + (r2 - r) / 15.0
    return r


def fd_ricci(metric: MetricFn, u, config: FDOracleConfig | None = None) -> np.ndarray:
    """Ricci tensor Ric_ab = sum_cd g^cd R(d_c, d_a, d_b, d_d)."""
    r = fd_riemann(metric, u, config)
    ginv = np.linalg.inv(metric(np.asarray(u, dtype=float)))
    return np.einsum("cd,cabd->ab", ginv, r)


def fd_scalar(metric: MetricFn, u, config: FDOracleConfig | None = None) -> float:
    ric = fd_ricci(metric, u, config)
    return float(np.einsum("ab,ab->", np.linalg.inv(metric(np.asarray(u, dtype=float))), ric))


def killing_residual(metric: MetricFn, field: Callable[[np.ndarray], np.ndarray], u,
                     h: float = 1e-5) -> float:
    """max |L_K g| at ``u`` for a vector field K given in chart components."""
    u = np.asarray(u, dtype=float)
    n = u.size
    g = metric(u)
    k = field(u)
    dg = metric_derivative(metric, u, h)
    dk = np.empty((n, n))  # dk[a, c] = d_a K^c
    for a in range(n):
        e = np.zeros(n)
        e[a] = h
        dk[a] = (-field(u + 2 * e) + 8 * field(u + e) - 8 * field(u - e) + field(u - 2 * e)) / (12 * h)
    lie = np.einsum("c,cab->ab", k, dg) + np.einsum("cb,ac->ab", g, dk) + np.einsum("ac,bc->ab", g, dk)
    return float(np.max(np.abs(lie)))


def sectional(r: np.ndarray, g: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    """Sectional curvature of span{x, y} from a (4,0) tensor and metric matrix."""
    num = np.einsum("abcd,a,b,c,d->", r, x, y, y, x)
    den = (x @ g @ x) * (y @ g @ y) - (x @ g @ y) ** 2
    return float(num / den)
