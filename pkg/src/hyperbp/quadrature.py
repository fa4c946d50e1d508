"""Quadrature rules shared by the volume, section and harmonic code.

Everything here is a thin layer over Gauss rules from numpy/scipy: composite
Gauss-Legendre on intervals with breakpoints, and product rules on spheres
(Gauss-Jacobi in each polar coordinate, trapezoid in the last angle).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln, roots_jacobi


@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts for a quadrature evaluation.

    ``radial_nodes`` is the Gauss-Legendre order per panel for radial and
    other one-dimensional integrals, ``sphere_nodes`` the number of latitude
    nodes per polar coordinate (or per profile segment for bodies of
    revolution). ``seed`` only matters for randomized grids.
    """

    radial_nodes: int = 48
    sphere_nodes: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.radial_nodes < 8 or self.sphere_nodes < 8:
            raise ValueError("quadrature node counts must be >= 8")

    def refined(self) -> "QuadratureSpec":
        return QuadratureSpec(2 * self.radial_nodes, 2 * self.sphere_nodes, self.seed)


@lru_cache(maxsize=64)
def _gl(n: int):
    x, w = leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gauss_legendre(a: float, b: float, n: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = _gl(n)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def piecewise_gauss(points, n: int):
    """Composite Gauss-Legendre rule on consecutive intervals of ``points``.

    Zero-length intervals are skipped. Returns flat node and weight arrays.
    """
    pts = np.unique(np.asarray(points, dtype=float))
    xs, ws = [], []
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a <= 0.0:
            continue
        x, w = gauss_legendre(a, b, n)
        xs.append(x)
        ws.append(w)
    if not xs:
        return np.zeros(0), np.zeros(0)
    return np.concatenate(xs), np.concatenate(ws)


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^{d-1} in R^d (d >= 1; |S^0| = 2)."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d."""
    return math.exp((d / 2.0) * math.log(math.pi) - gammaln(d / 2.0 + 1.0))


@lru_cache(maxsize=32)
def _sphere_rule(d: int, n: int):
    if d == 1:
        pts = np.array([[1.0], [-1.0]])
        return pts, np.ones(2)
    if d == 2:
        m = 2 * n
        t = 2.0 * np.pi * np.arange(m) / m
        pts = np.stack([np.cos(t), np.sin(t)], axis=-1)
        return pts, np.full(m, 2.0 * np.pi / m)
    alpha = (d - 3) / 2.0
    t, wt = roots_jacobi(n, alpha, alpha)
    sub, wsub = _sphere_rule(d - 1, n)
    s = np.sqrt(1.0 - t * t)
    pts = np.concatenate(
        [t[:, None, None] * np.ones((1, len(wsub), 1)), s[:, None, None] * sub[None, :, :]],
        axis=-1,
    ).reshape(-1, d)
    w = (wt[:, None] * wsub[None, :]).reshape(-1)
    return pts, w


def sphere_rule(d: int, n: int):
    """Product rule on S^{d-1}: returns (points of shape (N, d), weights).

    Exact for polynomials of degree < 2n restricted to the sphere.
    """
    if d < 1:
        raise ValueError("sphere dimension must be >= 1")
    pts, w = _sphere_rule(d, n)
    return pts.copy(), w.copy()


class PiecewiseChebyshev:
    """Adaptive piecewise Chebyshev interpolant of a vectorized function.

    Intervals between consecutive ``breaks`` are bisected until a
    degree-``deg`` interpolant matches the function at Gauss-Legendre check
    points within ``atol``. Evaluation is vectorized (Clenshaw on gathered
    coefficients).
    """

    def __init__(self, fun, breaks, deg: int = 24, atol: float = 1e-15, min_width: float = 1e-8):
        from numpy.polynomial import Chebyshev

        stack = [(float(a), float(b), np.inf) for a, b in zip(breaks[:-1], breaks[1:]) if b > a]
        xc, _ = _gl(deg + 7)
        pieces = []
        self.max_error = 0.0
        while stack:
            a, b, parent = stack.pop()
            p = Chebyshev.interpolate(fun, deg, domain=[a, b])
            xs = 0.5 * (a + b) + 0.5 * (b - a) * xc
            err = float(np.max(np.abs(p(xs) - fun(xs))))
            # a split that no longer halves the error is chasing roundoff
            stalled = err < 100.0 * atol and err > 0.5 * parent
            if err > atol and b - a > min_width and not stalled:
                m = 0.5 * (a + b)
                stack.extend([(a, m, err), (m, b, err)])
            else:
                pieces.append((a, b, p.coef, err))
        pieces.sort(key=lambda t: t[0])
        self.edges = np.array([p[0] for p in pieces] + [pieces[-1][1]])
        self.coef = np.array([np.pad(p[2], (0, deg + 1 - len(p[2]))) for p in pieces])
        self.errors = np.array([p[3] for p in pieces])
        self.max_error = float(np.max(self.errors))

    def __len__(self):
        return len(self.coef)

    def piece_index(self, x):
        return np.clip(np.searchsorted(self.edges, x, side="right") - 1, 0, len(self.coef) - 1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = self.piece_index(x)
        a, b = self.edges[idx], self.edges[idx + 1]
        t = (2.0 * x - a - b) / (b - a)
        c = self.coef[idx]
        b1 = np.zeros_like(t)
        b2 = np.zeros_like(t)
        for j in range(c.shape[-1] - 1, 0, -1):
            b1, b2 = 2.0 * t * b1 - b2 + c[..., j], b1
        return t * b1 - b2 + c[..., 0]
