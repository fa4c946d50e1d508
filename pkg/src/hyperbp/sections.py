"""Parallel section functions and Fourier transforms of norm powers.

For an origin-symmetric star body K with smooth boundary and 1 <= q <= n-2,
put k = n - 1 - q. The Fourier transform of ||x||_K^{-q} at a unit vector xi
is read off from the parallel section function A(z) = vol_{n-1}(K cap {<x, xi> = z}):

    k even:  (-1)^{k/2} pi (n-k-1) A^{(k)}(0)
    k odd:   (-1)^{(k+1)/2} 2 (n-1-k) k! int_0^inf (A(z) - Taylor_{k-1}A(z)) / z^{k+1} dz

A vanishes beyond the support value z_max, so the improper integral is split
there and the tail of the Taylor polynomial is integrated exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Optional

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from scipy.optimize import minimize_scalar

from .geometry import (
    HALF_PI,
    DomainError,
    RevolutionBody,
    StarBody,
    normalize,
)
from .quadrature import PiecewiseChebyshev, QuadratureSpec, _gl, ball_volume, gauss_legendre, sphere_rule
from .roots import bracket_root


class ConvergenceError(RuntimeError):
    """A numerical scheme did not reach its requested accuracy."""


def axis_direction(n: int, angle: float):
    """Unit vector at ``angle`` from the x_n axis inside the (x_1, x_n) plane."""
    xi = np.zeros(n)
    xi[0] = math.sin(angle)
    xi[-1] = math.cos(angle)
    return xi


# ---------------------------------------------------------------------------
# geometry of bodies of revolution
# ---------------------------------------------------------------------------

def _max_radius(body: StarBody) -> float:
    if isinstance(body, RevolutionBody):
        grid = np.linspace(0.0, HALF_PI, 4001)
        r = body.profile(grid)
        i = int(np.argmax(r))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
        res = minimize_scalar(lambda p: -float(body.profile(np.array([p]))[0]), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-12})
        return max(float(r[i]), -float(res.fun))
    pts, _ = sphere_rule(body.dim, 48)
    return float(np.max(body.radial(pts))) * (1.0 + 1e-3)


def support_value(body: StarBody, xi) -> float:
    """max_{x in K} <x, xi>."""
    return support_point(body, xi)[0]


def support_point(body: StarBody, xi):
    """(h_K(xi), a boundary point x of K with <x, xi> = h_K(xi))."""
    xi = normalize(xi)
    if isinstance(body, RevolutionBody):
        alpha = math.atan2(float(np.linalg.norm(xi[:-1])), float(xi[-1]))
        phi = np.linspace(0.0, math.pi, 20001)
        h = body.profile(phi) * np.cos(phi - alpha)
        i = int(np.argmax(h))
        lo, hi = phi[max(i - 1, 0)], phi[min(i + 1, len(phi) - 1)]
        res = minimize_scalar(lambda p: -float(body.profile(np.array([p]))[0] * math.cos(p - alpha)),
                              bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
        p = float(res.x) if -res.fun > h[i] else float(phi[i])
        perp = xi[:-1] / np.linalg.norm(xi[:-1]) if np.linalg.norm(xi[:-1]) > 0.0 else np.eye(body.dim - 1)[0]
        r = float(body.profile(np.array([p]))[0])
        return max(float(h[i]), -float(res.fun)), np.concatenate([r * math.sin(p) * perp, [r * math.cos(p)]])
    rng = np.random.default_rng(12345)
    th = normalize(np.vstack([rng.standard_normal((20000, body.dim)), xi[None, :]]))
    vals = body.radial(th) * (th @ xi)
    best = th[int(np.argmax(vals))]
    # local refinement by shrinking random perturbations
    val = float(np.max(vals))
    for scale in (0.05, 0.01, 2e-3, 4e-4, 8e-5, 1.6e-5):
        cand = normalize(best[None, :] + scale * rng.standard_normal((400, body.dim)))
        v = body.radial(cand) * (cand @ xi)
        j = int(np.argmax(v))
        if v[j] > val:
            val, best = float(v[j]), cand[j]
    return val, best * float(body.radial(best[None, :])[0])


class AxialSlices:
    """Radius R(s) of the disk K cap {x_n = s} for a body of revolution."""

    def __init__(self, body: RevolutionBody):
        self.body = body
        self.r_max = _max_radius(body) * (1.0 + 1e-12) + 1e-300
        self.pole = float(body.profile(np.array([0.0]))[0])
        self.s_max = support_value(body, axis_direction(body.dim, 0.0))

    def _excess(self, r, s):
        return np.hypot(r, s) - self.body.profile(np.arctan2(r, np.abs(s)))

    def radius(self, s):
        s = np.abs(np.asarray(s, dtype=float))
        out = np.zeros_like(s)
        inside = s < self.pole
        if np.any(inside):
            ss = s[inside]
            lo = np.zeros_like(ss)
            hi = np.full_like(ss, self.r_max)
            out[inside] = bracket_root(lambda r: self._excess(r, ss), lo, hi)
        return out

    def radius_sq(self, s):
        """R(s)^2 from a piecewise Chebyshev table (built on first use).

        R^2 rather than R is tabulated because it stays smooth at the poles
        where R itself has a square-root edge.
        """
        if not hasattr(self, "_table"):
            breaks = self._s_breaks()
            scale = float(np.max(self._radius_sq_direct(np.linspace(0.0, self.pole, 65))))
            self._table = PiecewiseChebyshev(self._radius_sq_direct, breaks, atol=1e-12 * scale,
                                             min_width=1e-7 * self.pole)
        s = np.abs(np.asarray(s, dtype=float))
        out = np.zeros_like(s)
        inside = s < self.pole
        # pieces stopped by the width floor sit where the boundary is nearly
        # horizontal (a rounded rim leaving a flat cap); there R is
        # ill-conditioned in s anyway and the affected u-range is negligible
        vals = self._table(s[inside])
        out[inside] = np.maximum(vals, 0.0)
        return out

    def _radius_sq_direct(self, s):
        return self.radius(s) ** 2

    def _s_breaks(self):
        phis = np.asarray([b for b in self.body.breakpoints if 0.0 < b < HALF_PI], dtype=float)
        sb = self.body.profile(phis) * np.cos(phis) if len(phis) else np.zeros(0)
        return np.unique(np.concatenate([[0.0, self.pole], sb[(sb > 0.0) & (sb < self.pole)]]))

    def check_disks(self, count: int = 64, grid: int = 48):
        """Verify on sample heights that every horizontal slice is a disk."""
        s = np.linspace(0.0, self.s_max, count, endpoint=False)
        r = np.linspace(0.0, self.r_max, grid)
        exc = self._excess(r[None, :], s[:, None])
        sign_changes = np.sum(np.diff(np.sign(exc), axis=1) != 0, axis=1)
        bad = (sign_changes > 1) | ((exc[:, 0] > 0) & np.any(exc < 0, axis=1))
        if np.any(bad):
            raise DomainError(f"slice at height {s[np.argmax(bad)]:.6g} is not a disk about the axis")


# ---------------------------------------------------------------------------
# parallel section function
# ---------------------------------------------------------------------------

@dataclass
class ParallelSectionFn:
    """z -> vol_{n-1}(K cap {<x, xi> = z}) for a fixed body and direction."""

    body: StarBody
    xi: np.ndarray
    z_max: float = field(init=False)
    u_nodes: int = 48
    grid: int = 200

    def __post_init__(self):
        self.xi = normalize(np.asarray(self.xi, dtype=float))
        n = self.body.dim
        if self.xi.shape != (n,):
            raise DomainError("direction dimension does not match the body")
        self.z_max = support_value(self.body, self.xi)
        if isinstance(self.body, RevolutionBody):
            self._slices = AxialSlices(self.body)
            self._cos = float(self.xi[-1])
            self._sin = float(np.linalg.norm(self.xi[:-1]))
        else:
            self._slices = None
            self.r_max = _max_radius(self.body)
            self._x_sup = support_point(self.body, self.xi)[1]

    def feature_heights(self):
        """Values of z in (0, z_max) where the plane meets a profile breakpoint circle.

        A changes quickly near these heights (rounded rims), so quadratures
        over z use them as panel edges.
        """
        if self._slices is None:
            return np.zeros(0)
        if getattr(self, "_features", None) is not None:
            return self._features
        out = []
        for phi in self.body.breakpoints:
            if not 0.0 < phi < HALF_PI:
                continue
            rho = float(self.body.profile(np.array([phi]))[0])
            h, r = rho * math.cos(phi), rho * math.sin(phi)
            for hh in (h, -h):
                out.extend([hh * self._cos - r * self._sin, hh * self._cos + r * self._sin])
        # critical values of the height <x, xi> on the boundary (saddles
        # where a slice changes topology) lie in the plane of the axis and xi
        alpha = math.atan2(self._sin, self._cos)
        phi = np.linspace(0.0, math.pi, 8001)
        rho = self.body.profile(phi)
        for sign in (1.0, -1.0):
            g = rho * np.cos(phi - sign * alpha)
            d = np.diff(g)
            # flat stretches (e.g. a flat cap seen along the axis) are roundoff
            # noise, not extrema
            nz = np.nonzero(np.abs(d) > 1e-12 * float(np.max(np.abs(g))))[0]
            for i0, i1 in zip(nz[:-1], nz[1:]):
                if d[i0] * d[i1] >= 0.0:
                    continue
                sgn = np.sign(d[i0])
                res = minimize_scalar(
                    lambda p: -sgn * float(self.body.profile(np.array([p]))[0]) * math.cos(p - sign * alpha),
                    bounds=(phi[i0], phi[i1 + 1]), method="bounded", options={"xatol": 1e-12})
                out.append(-sgn * res.fun)
        out = np.abs(np.asarray(out))
        self._features = np.unique(out[(out > 1e-12) & (out < self.z_max * (1.0 - 1e-12))])
        return self._features

    def __call__(self, z):
        z = np.abs(np.asarray(z, dtype=float))
        out = np.zeros_like(z)
        live = z < self.z_max
        if np.any(live):
            if self._slices is None:
                out[live] = self._general(z[live])
            elif self._sin < 1e-14:
                out[live] = ball_volume(self.body.dim - 1) * self._slices.radius_sq(z[live]) ** (0.5 * (self.body.dim - 1))
            else:
                out[live] = self._oblique(z[live])
        return out

    # oblique slices of a body of revolution -----------------------------
    def _q(self, zz, u):
        c, sn = self._cos, self._sin
        s = zz * c + u * sn
        R2 = np.where(np.abs(s) <= self._slices.s_max, self._slices.radius_sq(s), 0.0)
        return R2 + s * s - zz * zz - u * u

    def _oblique(self, z):
        n = self.body.dim
        c, sn = self._cos, self._sin
        sl = self._slices
        umax = np.sqrt(np.maximum(sl.r_max ** 2 - z * z, 0.0))
        ulo = np.maximum(-umax, (-sl.s_max - z * c) / sn)
        uhi = np.minimum(umax, (sl.s_max - z * c) / sn)
        G = self.grid
        t = np.linspace(0.0, 1.0, G)
        U = ulo[:, None] + (uhi - ulo)[:, None] * t[None, :]
        Z = np.broadcast_to(z[:, None], U.shape)
        Q = self._q(Z, U)
        pos = Q > 0.0
        # intervals of positivity: starts and ends of runs of True
        starts = pos & ~np.concatenate([np.zeros((len(z), 1), bool), pos[:, :-1]], axis=1)
        ends = pos & ~np.concatenate([pos[:, 1:], np.zeros((len(z), 1), bool)], axis=1)
        zi_s, j_s = np.nonzero(starts)
        zi_e, j_e = np.nonzero(ends)
        if len(zi_s) == 0:
            return np.zeros_like(z)
        a = U[zi_s, j_s].copy()
        b = U[zi_e, j_e].copy()
        need = j_s > 0
        if np.any(need):
            zz = z[zi_s[need]]
            a[need] = bracket_root(lambda u: self._q(zz, u), U[zi_s[need], j_s[need] - 1], U[zi_s[need], j_s[need]])
        need = j_e < G - 1
        if np.any(need):
            zz = z[zi_e[need]]
            b[need] = bracket_root(lambda u: self._q(zz, u), U[zi_e[need], j_e[need]], U[zi_e[need], j_e[need] + 1])
        x, w = _gl(self.u_nodes)
        ang = 0.5 * math.pi * x
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        uu = mid[:, None] + half[:, None] * np.sin(ang)[None, :]
        wu = half[:, None] * (0.5 * math.pi * w * np.cos(ang))[None, :]
        qq = np.maximum(self._q(np.broadcast_to(z[zi_s][:, None], uu.shape), uu), 0.0)
        piece = ball_volume(n - 2) * np.sum(wu * qq ** (0.5 * (n - 2)), axis=1)
        out = np.zeros_like(z)
        np.add.at(out, zi_s, piece)
        return out

    # general star bodies: rays from the slice centre --------------------
    def _general(self, z):
        n = self.body.dim
        # orthonormal basis of xi-perp
        full = np.linalg.svd(np.eye(n) - np.outer(self.xi, self.xi))[0][:, : n - 1].T
        pts, w = sphere_rule(n - 1, 32)
        dirs = pts @ full
        out = np.empty_like(z)
        rmax = self.r_max * 1.001
        for i, zz in enumerate(z):
            # a point of the slice: K is star-shaped, so the segment from the
            # origin to the support point lies in K
            centre = (zz / self.z_max) * self._x_sup

            def excess(s):
                x = centre[None, :] + s[:, None] * dirs
                r = np.linalg.norm(x, axis=1)
                out = np.full_like(r, -1.0)
                pos = r > 0.0
                out[pos] = r[pos] - self.body.radial(x[pos] / r[pos, None])
                return out

            if float(excess(np.array([0.0]))[0]) >= 0.0:
                raise DomainError("slice is not star-shaped about its centre")
            probe = np.linspace(0.0, rmax, 24)
            ex = np.array([excess(np.full(len(dirs), p)) for p in probe])
            if np.any(np.sum(np.diff(np.sign(ex), axis=0) != 0, axis=0) > 1):
                raise DomainError("slice is not star-shaped about its centre")
            s = bracket_root(excess, np.zeros(len(dirs)), np.full(len(dirs), rmax))
            out[i] = float(np.sum(w * s ** (n - 1))) / (n - 1)
        return out


def parallel_section(body: StarBody, xi, z: float) -> float:
    """Euclidean (n-1)-volume of K cap {<x, xi> = z}."""
    return float(ParallelSectionFn(body, xi)(np.array([z]))[0])


# ---------------------------------------------------------------------------
# derivatives at zero
# ---------------------------------------------------------------------------

def _central_stencil(order: int):
    j = np.arange(order + 1)
    coef = np.array([(-1) ** int(i) * math.comb(order, int(i)) for i in j], dtype=float)
    offsets = order / 2.0 - j
    return offsets, coef


def a_derivative_at_zero(A: ParallelSectionFn, order: int, h: Optional[float] = None,
                         levels: int = 3, rtol: float = 1e-9, return_error: bool = False):
    """Even-order derivative of a parallel section function at z = 0.

    Central differences on the step sequence h, h/2, h/4, ... combined by
    Richardson extrapolation. The step is halved (up to four times) while
    the extrapolation error estimate exceeds ``rtol`` in relative terms.
    """
    if order < 0:
        raise DomainError("order must be >= 0")
    if order % 2 == 1:
        return (0.0, 0.0) if return_error else 0.0
    if order == 0:
        v = float(A(np.array([0.0]))[0])
        return (v, 0.0) if return_error else v
    h = A.z_max / 64.0 if h is None else float(h)
    if h <= 0.0 or h * order / 2.0 >= A.z_max:
        raise DomainError("step h must be positive and small relative to z_max")
    offsets, coef = _central_stencil(order)
    best = None
    for _ in range(5):
        steps = h / 2.0 ** np.arange(levels)
        zs = np.concatenate([offsets * s for s in steps])
        vals = A(zs).reshape(levels, -1)
        D = [float(np.dot(coef, v)) / s ** order for v, s in zip(vals, steps)]
        T = [D]
        for lvl in range(1, levels):
            prev = T[-1]
            f = 4.0 ** lvl
            T.append([(f * prev[i + 1] - prev[i]) / (f - 1.0) for i in range(len(prev) - 1)])
        value = T[-1][0]
        err = abs(T[-1][0] - T[-2][-1]) if levels > 1 else float("inf")
        if best is None or err < best[1]:
            best = (value, err)
        if err <= rtol * max(abs(value), 1e-300):
            break
        h *= 0.25
    else:
        if best[1] > 1e3 * rtol * max(abs(best[0]), 1e-300):
            raise ConvergenceError(f"derivative extrapolation did not converge (error {best[1]:.3g})")
    return best if return_error else best[0]


# ---------------------------------------------------------------------------
# Fourier transform of ||x||^{-q}
# ---------------------------------------------------------------------------

@dataclass
class FtValue:
    value: float
    error: float
    branch: str
    k: int


@dataclass
class EvenTaylorFit:
    """A(z) = P(z^2) on |z| <= z_c, with P a Chebyshev series in w = z^2.

    A is even and analytic near 0 for smooth bodies, so A(sqrt(w)) is
    analytic in w and the fit converges geometrically. It yields Taylor
    coefficients at 0 and lets (A - Taylor)/z^{k+1} be evaluated near 0 as
    an exact polynomial quotient instead of a cancelling difference.
    """

    poly: Chebyshev
    z_c: float
    degree: int
    tail: float

    def coeff(self, j: int) -> float:
        """Coefficient of w^j, i.e. A^{(2j)}(0) / (2j)!."""
        return float(self.poly.deriv(j)(0.0)) / math.factorial(j) if j else float(self.poly(0.0))

    def derivative(self, order: int) -> float:
        if order % 2:
            return 0.0
        return math.factorial(order) * self.coeff(order // 2)

    def quotient(self, m: int) -> Chebyshev:
        """(P(w) - sum_{j<m} c_j w^j) / w^m as a Chebyshev series."""
        taylor = Polynomial([self.coeff(j) for j in range(m)] or [0.0]).convert(
            kind=Chebyshev, domain=self.poly.domain, window=self.poly.window)
        w = Chebyshev.identity(domain=self.poly.domain, window=self.poly.window)
        q, _ = divmod(self.poly - taylor, w ** m)
        return q


def fit_even_taylor(A: ParallelSectionFn, z_c: Optional[float] = None, tol: float = 1e-13) -> EvenTaylorFit:
    """Chebyshev fit of A(sqrt(w)) on [0, z_c^2], shrinking z_c until it converges."""
    feats = A.feature_heights()
    if z_c is None:
        z_c = 0.5 * min([A.z_max] + list(feats))
    for _ in range(4):
        W = z_c * z_c

        def f(w):
            return A(np.sqrt(np.maximum(w, 0.0)))

        for deg in (16, 24, 32, 48, 64):
            P = Chebyshev.interpolate(f, deg, domain=[0.0, W])
            scale = float(np.max(np.abs(P.coef)))
            tail = float(np.max(np.abs(P.coef[-4:]))) / scale if scale > 0.0 else 0.0
            if tail <= tol:
                return EvenTaylorFit(P, z_c, deg, tail)
        z_c *= 0.5
    raise ConvergenceError("parallel section function is not resolved by a polynomial in z^2 near 0")


def _graded_panels(cuts, panels: int, levels: int, grade_left: bool = True, grade_right: bool = True):
    edges = [cuts]
    grade = 0.15 ** np.arange(1, levels + 1)
    for i, (a, b) in enumerate(zip(cuts[:-1], cuts[1:])):
        edges.append(np.linspace(a, b, max(1, int(np.ceil(panels * (b - a)))) + 1))
        # geometric grading toward feature heights absorbs weak singularities
        if i > 0 or grade_left:
            edges.append(a + 0.5 * (b - a) * grade)
        if i < len(cuts) - 2 or grade_right:
            edges.append(b - 0.5 * (b - a) * grade)
    return np.unique(np.concatenate(edges))


def _odd_integral(A: ParallelSectionFn, k: int, fit: EvenTaylorFit, panels: int, nodes: int, levels: int) -> float:
    """int_0^inf (A(z) - Taylor_{k-1}A(z)) / z^{k+1} dz for odd k."""
    zmax, zc = A.z_max, fit.z_c
    m = (k + 1) // 2
    c = [fit.coeff(j) for j in range(m)]
    x, w = _gl(nodes)
    # [0, z_c]: the integrand is exactly the quotient polynomial S(z^2)
    S = fit.quotient(m)
    zn, wn = gauss_legendre(0.0, zc, fit.degree + 8)
    near = float(np.sum(wn * S(zn * zn)))
    # [z_c, z_max]: z = z_max - (z_max - z_c) tau^2 clusters nodes at the
    # support end, where A may behave like (z_max - z)^{(n-1)/2}
    span = zmax - zc
    feats = A.feature_heights()
    feats = feats[(feats > zc) & (feats < zmax)]
    cuts = np.unique(np.concatenate([[0.0, 1.0], np.sqrt((zmax - feats) / span)]))
    edges = _graded_panels(cuts, panels, levels, grade_left=True, grade_right=False)
    tau = (0.5 * (edges[:-1, None] + edges[1:, None]) + 0.5 * np.diff(edges)[:, None] * x[None, :]).ravel()
    wt = (0.5 * np.diff(edges)[:, None] * w[None, :]).ravel()
    z = zmax - span * tau * tau
    jac = 2.0 * span * tau
    taylor = sum(cj * z ** (2 * j) for j, cj in enumerate(c))
    far = float(np.sum(wt * jac * (A(z) - taylor) / z ** (k + 1)))
    # beyond z_max only the subtracted polynomial remains
    tail = sum(cj * zmax ** (2 * j - k) / (k - 2 * j) for j, cj in enumerate(c))
    return near + far - tail


def ft_norm_power_detail(body: StarBody, q: int, xi, quad: Optional[QuadratureSpec] = None,
                         A: Optional[ParallelSectionFn] = None) -> FtValue:
    n = body.dim
    if not 1 <= q <= n - 2:
        raise DomainError(f"q must satisfy 1 <= q <= n-2 (got q={q}, n={n})")
    if body.smoothness == "C0":
        raise DomainError("Fourier formulas need a body with at least C2 boundary")
    quad = quad or QuadratureSpec()
    k = n - 1 - q
    A = A or ParallelSectionFn(body, xi)
    fit = fit_even_taylor(A)
    if k % 2 == 0:
        # Taylor coefficients of the fit in z^2 stay accurate for k >= 4,
        # where difference quotients lose digits to h^-k; a second fit on
        # half the window gives the error estimate
        d = fit.derivative(k)
        check = fit_even_taylor(A, z_c=0.5 * fit.z_c).derivative(k)
        c = (-1) ** (k // 2) * math.pi * (n - k - 1)
        return FtValue(c * d, abs(c) * abs(d - check), "even", k)
    c = (-1) ** ((k + 1) // 2) * 2.0 * (n - 1 - k) * math.factorial(k)
    panels = max(4, quad.radial_nodes // 4)
    coarse = _odd_integral(A, k, fit, panels, 32, 10)
    fine = _odd_integral(A, k, fit, 2 * panels, 48, 14)
    fit_err = fit.tail * abs(fit.coeff(0)) * fit.z_c ** (-k)
    return FtValue(c * fine, abs(c) * (abs(fine - coarse) + fit_err), "odd", k)


def ft_norm_power(body: StarBody, q: int, xi, quad: Optional[QuadratureSpec] = None,
                  rtol: float = 1e-4) -> float:
    """(||x||_K^{-q})^(xi) via the parallel section function of K at xi."""
    r = ft_norm_power_detail(body, q, xi, quad)
    if r.error > rtol * abs(r.value) + 1e-12:
        raise ConvergenceError(f"Fourier evaluation error {r.error:.3g} exceeds tolerance for value {r.value:.6g}")
    return r.value


# ---------------------------------------------------------------------------
# positive-definiteness scan
# ---------------------------------------------------------------------------

@dataclass
class FtProfile:
    n: int
    q: int
    angles: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    body_name: str = ""

    @property
    def min_value(self) -> float:
        return float(np.min(self.values))

    @property
    def argmin_angle(self) -> float:
        return float(self.angles[int(np.argmin(self.values))])

    def negative_intervals(self):
        """Angle intervals (grid resolution) where the values are negative."""
        neg = self.values < 0.0
        out, start = [], None
        for i, flag in enumerate(neg):
            if flag and start is None:
                start = i
            if not flag and start is not None:
                out.append((float(self.angles[start]), float(self.angles[i - 1])))
                start = None
        if start is not None:
            out.append((float(self.angles[start]), float(self.angles[-1])))
        return out

    def to_dict(self):
        return {
            "n": self.n,
            "q": self.q,
            "body": self.body_name,
            "min_value": self.min_value,
            "argmin_angle": self.argmin_angle,
            "negative_intervals": self.negative_intervals(),
            "angles": self.angles.tolist(),
            "values": self.values.tolist(),
            "errors": self.errors.tolist(),
        }


def pd_scan(body: RevolutionBody, q: int, angle_count: int = 31, quad: Optional[QuadratureSpec] = None,
            angles=None) -> FtProfile:
    """Fourier transform of ||x||^{-q} on a grid of angles from the axis.

    By axial and origin symmetry the angles [0, pi/2] cover the whole sphere.
    """
    if not isinstance(body, RevolutionBody):
        raise DomainError("pd_scan needs a body of revolution")
    angles = np.linspace(0.0, HALF_PI, angle_count) if angles is None else np.asarray(angles, dtype=float)
    vals, errs = [], []
    for a in angles:
        r = ft_norm_power_detail(body, q, axis_direction(body.dim, float(a)), quad)
        vals.append(r.value)
        errs.append(r.error)
    return FtProfile(body.dim, q, angles, np.array(vals), np.array(errs), body.name)
