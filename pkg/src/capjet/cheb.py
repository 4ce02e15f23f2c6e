"""Chebyshev collocation helpers for the radial coordinate.

All radial fields are even functions of s (4D-radial regularity at the
axis after the stream-function substitution), so differentiation matrices
on [0, 1] are obtained by folding the full Lobatto matrices on [-1, 1]
over the even extension. With an odd number of full-grid panels the half
grid avoids s=0 entirely; with an even number it includes s=0 as a node.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def lobatto_nodes(m: int) -> np.ndarray:
    return np.cos(np.arange(m + 1) * np.pi / m)


def diff_matrix(m: int) -> np.ndarray:
    # Trefethen's cheb.m
    x = lobatto_nodes(m)
    c = np.ones(m + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(m + 1)
    dx = x[:, None] - x[None, :]
    d = np.outer(c, 1.0 / c) / (dx + np.eye(m + 1))
    d -= np.diag(d.sum(axis=1))
    return d


def clenshaw_curtis_weights(m: int) -> np.ndarray:
    # weights for int_{-1}^{1} on the m+1 Lobatto nodes
    j = np.arange(m + 1)
    w = np.ones(m + 1)
    ks = np.arange(1, m // 2 + 1)
    b = np.where(ks == m / 2.0, 1.0, 2.0)
    s = np.zeros(m + 1)
    for k, bk in zip(ks, b):
        s += bk * np.cos(2.0 * k * j * np.pi / m) / (4.0 * k * k - 1.0)
    w = (1.0 - s) / m
    w[1:-1] *= 2.0
    return w


@dataclass(frozen=True)
class RadialGrid:
    """Even-parity collocation grid on (0, 1] or [0, 1], descending from s=1."""

    s: np.ndarray
    d1: np.ndarray  # d/ds on even functions (result sampled on the same nodes)
    d2: np.ndarray  # d^2/ds^2 on even functions
    wq: np.ndarray  # quadrature weights for int_0^1 f(s) ds, f even
    wq3: np.ndarray  # weights for int_0^1 s^3 f(s) ds, f even (measure-exact)
    has_zero: bool

    @property
    def n(self) -> int:
        return self.s.size


def _weighted_moment_weights(s: np.ndarray) -> np.ndarray:
    # Weights w with sum_j w_j f(s_j) = int_0^1 s^3 f(s) ds exact for every f
    # in the even interpolation space span{T_0(s), T_2(s), ..., T_{2(n-1)}(s)}.
    # The s^3 weight has odd parity, so the plain folded Clenshaw-Curtis rule
    # (even extension) would see a |s|^3 kink and lose spectral accuracy.
    from numpy.polynomial import chebyshev as C

    n = s.size
    s3 = np.zeros(4)
    s3[1] = 0.75  # s^3 = (3 T_1 + T_3)/4 on [-1, 1]
    s3[3] = 0.25
    van = np.empty((n, n))
    moments = np.empty(n)
    for k in range(n):
        tk = np.zeros(2 * k + 1)
        tk[-1] = 1.0
        van[:, k] = C.chebval(s, tk)
        prim = C.chebint(C.chebmul(s3, tk))
        moments[k] = C.chebval(1.0, prim) - C.chebval(0.0, prim)
    return np.linalg.solve(van.T, moments)


def radial_grid(n: int, include_zero: bool = False) -> RadialGrid:
    """n nodes; s[0] = 1 always, s[-1] = 0 exactly when include_zero."""
    if n < 3:
        raise ValueError("need at least 3 radial nodes")
    m = 2 * (n - 1) if include_zero else 2 * n - 1
    x = lobatto_nodes(m)
    d = diff_matrix(m)
    d2 = d @ d
    w = clenshaw_curtis_weights(m)
    half = np.arange(n)
    s = x[half].copy()
    if include_zero:
        s[-1] = 0.0  # cos(pi/2) up to roundoff

    def fold(mat: np.ndarray) -> np.ndarray:
        out = np.empty((n, n))
        for jcol in range(n):
            mirror = m - jcol
            if mirror == jcol:
                out[:, jcol] = mat[half, jcol]
            else:
                out[:, jcol] = mat[half, jcol] + mat[half, mirror]
        return out

    wq = w[half].copy()
    if include_zero:
        wq[-1] *= 0.5
    return RadialGrid(s, fold(d), fold(d2), wq, _weighted_moment_weights(s), include_zero)
