"""Axisymmetric (zonal) harmonic analysis on S^{n-1}.

Even functions of the angle phi to the x_n axis are expanded in Gegenbauer
polynomials C_m^{(n-2)/2}(cos phi) normalized to unit L^2(S^{n-1}) norm.
Homogeneous extensions h(x/|x|)|x|^{-p} of a degree-m harmonic h have Fourier
transform c(n, m, p) h(x/|x|)|x|^{-(n-p)}, so Fourier transforms of such
functions act coefficient-wise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import gammaln

from .geometry import (
    HALF_PI,
    DomainError,
    RevolutionBody,
    Subspace,
    axisymmetric_section_integral,
)
from .quadrature import QuadratureSpec, piecewise_gauss, sphere_area


def _lam(n: int) -> float:
    if n < 3:
        raise DomainError("zonal expansions need n >= 3")
    return 0.5 * (n - 2)


def gegenbauer_table(n: int, max_degree: int, t):
    """C_m^{(n-2)/2}(t) for m = 0..max_degree by the three-term recurrence."""
    lam = _lam(n)
    t = np.asarray(t, dtype=float)
    out = np.empty((max_degree + 1,) + t.shape)
    out[0] = 1.0
    if max_degree >= 1:
        out[1] = 2.0 * lam * t
    for m in range(2, max_degree + 1):
        out[m] = (2.0 * (m + lam - 1.0) * t * out[m - 1] - (m + 2.0 * lam - 2.0) * out[m - 2]) / m
    return out


def _log_norm_sq(n: int, m: int) -> float:
    """log of |S^{n-2}| * int_{-1}^1 C_m(t)^2 (1 - t^2)^{lam - 1/2} dt."""
    lam = _lam(n)
    log_h = (math.log(math.pi) + (1.0 - 2.0 * lam) * math.log(2.0) + gammaln(m + 2.0 * lam)
             - gammaln(m + 1.0) - math.log(m + lam) - 2.0 * gammaln(lam))
    return math.log(sphere_area(n - 1)) + log_h


def zonal_basis(n: int, degrees: Sequence[int], t):
    """Rows Y_m(t), unit-norm zonal harmonics as functions of t = cos(phi)."""
    degrees = list(degrees)
    if not degrees:
        return np.zeros((0,) + np.shape(t))
    table = gegenbauer_table(n, max(degrees), t)
    scale = np.array([math.exp(-0.5 * _log_norm_sq(n, m)) for m in degrees])
    return table[degrees] * scale.reshape((-1,) + (1,) * np.ndim(t))


@dataclass
class HarmonicExpansion:
    """Even zonal function sum_m coeffs[m] Y_m(cos phi) on S^{n-1}."""

    n: int
    coeffs: dict
    tolerance: float = 0.0
    tail_ratio: float = 0.0
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        bad = [m for m in self.coeffs if m % 2 or m < 0]
        if bad:
            raise DomainError(f"only even degrees are allowed (got {bad})")

    @property
    def degrees(self):
        return sorted(self.coeffs)

    @property
    def max_degree(self) -> int:
        return max(self.coeffs) if self.coeffs else 0

    def evaluate_cos(self, t):
        degs = self.degrees
        if not degs:
            return np.zeros_like(np.asarray(t, dtype=float))
        c = np.array([self.coeffs[m] for m in degs])
        return np.tensordot(c, zonal_basis(self.n, degs, t), axes=1)

    def __call__(self, phi):
        return self.evaluate_cos(np.cos(np.asarray(phi, dtype=float)))

    def scaled(self, factor: float) -> "HarmonicExpansion":
        return HarmonicExpansion(self.n, {m: factor * c for m, c in self.coeffs.items()},
                                 abs(factor) * self.tolerance, self.tail_ratio, list(self.warnings))

    def inner(self, other: "HarmonicExpansion") -> float:
        """L^2(S^{n-1}) inner product, exact for the truncated series."""
        if other.n != self.n:
            raise DomainError("expansions live on different spheres")
        return float(sum(c * other.coeffs.get(m, 0.0) for m, c in self.coeffs.items()))

    def to_dict(self):
        return {
            "n": self.n,
            "coeffs": {str(m): self.coeffs[m] for m in self.degrees},
            "tolerance": self.tolerance,
            "tail_ratio": self.tail_ratio,
            "warnings": list(self.warnings),
        }


def _angle_rule(max_degree: int, quad: QuadratureSpec, breakpoints=()):
    cuts = [0.0, HALF_PI] + [float(b) for b in breakpoints if 0.0 < b < HALF_PI]
    cuts = np.unique(cuts)
    panels_per_quarter = max(2, math.ceil(max_degree / 16))
    pts = [cuts]
    for a, b in zip(cuts[:-1], cuts[1:]):
        cnt = max(1, math.ceil(panels_per_quarter * (b - a) / HALF_PI))
        pts.append(np.linspace(a, b, cnt + 1))
    return piecewise_gauss(np.unique(np.concatenate(pts)), quad.radial_nodes)


def gegenbauer_expand(f: Callable, n: int, max_degree: int, quad: Optional[QuadratureSpec] = None,
                      breakpoints=(), tail_tol: float = 1e-8) -> HarmonicExpansion:
    """Expand an even axisymmetric function f(phi) up to degree max_degree.

    ``breakpoints`` are angles in (0, pi/2) where f is not analytic (the
    edge of a bump's support, say); they become panel edges of the
    quadrature. The reconstruction error on the quadrature nodes is stored
    as the expansion's tolerance. A warning is recorded when the last
    coefficients exceed ``tail_tol`` times the largest one.
    """
    if max_degree < 0 or max_degree % 2:
        raise DomainError("max_degree must be even and >= 0")
    quad = quad or QuadratureSpec()
    phi, w = _angle_rule(max_degree, quad, breakpoints)
    vals = np.asarray(f(phi), dtype=float)
    degs = list(range(0, max_degree + 1, 2))
    Y = zonal_basis(n, degs, np.cos(phi))
    # f and Y_m are even about phi = pi/2, so integrate over half the range
    weight = 2.0 * sphere_area(n - 1) * w * np.sin(phi) ** (n - 2)
    c = Y @ (weight * vals)
    coeffs = {m: float(cm) for m, cm in zip(degs, c)}
    recon = c @ Y
    scale = max(float(np.max(np.abs(vals))), 1e-300)
    head = float(np.max(np.abs(c))) if len(c) else 0.0
    tail = float(np.max(np.abs(c[-2:]))) / head if head > 0.0 else 0.0
    warnings = []
    if tail > tail_tol:
        warnings.append(f"truncation tail {tail:.3g} exceeds {tail_tol:g} of the leading coefficient; "
                        f"raise max_degree above {max_degree}")
    err = float(np.max(np.abs(recon - vals))) if len(vals) else 0.0
    return HarmonicExpansion(n, coeffs, tolerance=max(err, 16.0 * np.finfo(float).eps * scale),
                             tail_ratio=tail, warnings=warnings)


def auto_expand(f: Callable, n: int, quad: Optional[QuadratureSpec] = None, breakpoints=(),
                tail_tol: float = 1e-13, start: int = 16, limit: int = 1024) -> HarmonicExpansion:
    """gegenbauer_expand with max_degree doubled until the tail test passes."""
    deg = start
    while True:
        e = gegenbauer_expand(f, n, deg, quad, breakpoints, tail_tol)
        if not e.warnings or deg >= limit:
            return e
        deg *= 2


def harmonic_multiplier(n: int, m: int, p: float) -> float:
    """c(n, m, p) with (h_m(x/|x|)|x|^{-p})^ = c(n, m, p) h_m(x/|x|)|x|^{-(n-p)}.

    c = 2^{n-p} pi^{n/2} (-1)^{m/2} Gamma((m+n-p)/2) / Gamma((m+p)/2) for
    even m; the m = 0 case is the Riesz constant.
    """
    if not 0.0 < p < n:
        raise DomainError(f"p must lie in (0, n) (got p={p}, n={n})")
    if m < 0 or m % 2:
        raise DomainError("m must be an even nonnegative integer")
    sign = -1.0 if (m // 2) % 2 else 1.0
    return sign * math.exp((n - p) * math.log(2.0) + 0.5 * n * math.log(math.pi)
                           + gammaln(0.5 * (m + n - p)) - gammaln(0.5 * (m + p)))


def ft_homogeneous(exp: HarmonicExpansion, p: float) -> HarmonicExpansion:
    """Fourier transform of sum_m a_m Y_m(x/|x|)|x|^{-p}, restricted to the sphere.

    The result is the sphere part of a function homogeneous of degree -(n-p).
    """
    n = exp.n
    coeffs = {m: harmonic_multiplier(n, m, p) * c for m, c in exp.coeffs.items()}
    mult = max((abs(harmonic_multiplier(n, m, p)) for m in exp.coeffs), default=0.0)
    return HarmonicExpansion(n, coeffs, tolerance=mult * exp.tolerance, tail_ratio=exp.tail_ratio,
                             warnings=list(exp.warnings))


def riesz_constant(n: int, p: float) -> float:
    """(|x|^{-p})^ = riesz_constant(n, p) |xi|^{-(n-p)}."""
    return harmonic_multiplier(n, 0, p)


# ---------------------------------------------------------------------------
# test bodies and lemma residuals
# ---------------------------------------------------------------------------

def perturbed_ball(n: int, radius: float, m: int, delta: float, q: float = 1.0, name: str = "") -> RevolutionBody:
    """Body with rho^q = radius^q (1 + delta P_m(cos phi)), P_m = C_m / C_m(1).

    ||x||^{-q} is then a Riesz term plus a single degree-m harmonic term, so
    its Fourier transform is known exactly through harmonic_multiplier.
    """
    if m % 2 or m < 0:
        raise DomainError("m must be even")
    if abs(delta) >= 1.0:
        raise DomainError("|delta| must be < 1 to keep the radial function positive")
    norm = float(gegenbauer_table(n, m, np.array([1.0]))[m][0])

    def profile(phi):
        t = np.cos(np.asarray(phi, dtype=float))
        return radius * (1.0 + delta * gegenbauer_table(n, m, t)[m] / norm) ** (1.0 / q)

    return RevolutionBody(n, profile, [], smoothness="Cinf",
                          name=name or f"perturbed_ball(r={radius:g},m={m},delta={delta:g},q={q:g})")


def perturbed_ball_ft(n: int, radius: float, m: int, delta: float, q: float, phi):
    """Exact (||x||^{-q})^ on the sphere for perturbed_ball(n, radius, m, delta, q)."""
    lam_norm = float(gegenbauer_table(n, m, np.array([1.0]))[m][0])
    t = np.cos(np.asarray(phi, dtype=float))
    Pm = gegenbauer_table(n, m, t)[m] / lam_norm
    return radius ** q * (harmonic_multiplier(n, 0, q) + delta * harmonic_multiplier(n, m, q) * Pm)


def _profile_power_expansion(body: RevolutionBody, power: float, quad: QuadratureSpec):
    return auto_expand(lambda phi: body.profile(phi) ** power, body.dim, quad, body.breakpoints)


def _axisymmetric_sphere_integral(fun, n: int, nodes: int, breakpoints=()) -> float:
    cuts = [0.0, HALF_PI] + [b for b in breakpoints if 0.0 < b < HALF_PI]
    phi, w = piecewise_gauss(cuts, nodes)
    return 2.0 * sphere_area(n - 1) * float(np.sum(w * fun(phi) * np.sin(phi) ** (n - 2)))


def parseval_residual(K: RevolutionBody, L: RevolutionBody, p: float, quad: Optional[QuadratureSpec] = None,
                      ft_source: str = "expansion", nodes: int = 24) -> float:
    """Relative residual of the spherical Parseval identity

        int (||x||_K^{-p})^ (||x||_L^{-n+p})^ = (2 pi)^n int ||x||_K^{-p} ||x||_L^{-n+p}.

    The Fourier transforms come from zonal expansions; the left side is then
    integrated pointwise on an angle grid and the right side directly from
    the radial functions, so the two sides share no quadrature. With
    ``ft_source="sections"`` the transform of ||x||_K^{-p} (p an integer in
    [1, n-2]) is instead evaluated through parallel sections at ``nodes``
    Gauss nodes per quarter circle, independently of the multipliers.
    """
    quad = quad or QuadratureSpec()
    n = K.dim
    if L.dim != n:
        raise DomainError("bodies live in different dimensions")
    if not 0.0 < p < n:
        raise DomainError("p must lie in (0, n)")
    fk = ft_homogeneous(_profile_power_expansion(K, p, quad), p)
    fl = ft_homogeneous(_profile_power_expansion(L, n - p, quad), n - p)
    deg = max(fk.max_degree, fl.max_degree)
    if ft_source == "sections":
        from .sections import axis_direction, ft_norm_power

        if float(p) != int(p) or not 1 <= int(p) <= n - 2:
            raise DomainError("ft_source='sections' needs an integer p in [1, n-2]")

        def fk_sections(phi):
            return np.array([ft_norm_power(K, int(p), axis_direction(n, float(a))) for a in phi])

        lhs = _axisymmetric_sphere_integral(lambda phi: fk_sections(phi) * fl(phi), n, nodes)
    elif ft_source == "expansion":
        lhs = _axisymmetric_sphere_integral(lambda phi: fk(phi) * fl(phi), n, max(quad.sphere_nodes, deg + 8))
    else:
        raise DomainError(f"unknown ft_source {ft_source!r}")
    breaks = list(K.breakpoints) + list(L.breakpoints)
    rhs = (2.0 * math.pi) ** n * _axisymmetric_sphere_integral(
        lambda phi: K.profile(phi) ** p * L.profile(phi) ** (n - p), n, quad.sphere_nodes, breaks)
    return abs(lhs - rhs) / abs(rhs)


def subspace_ft_residual(L: RevolutionBody, k: int, H: Subspace, quad: Optional[QuadratureSpec] = None) -> float:
    """Relative residual of

        (2 pi)^k int_{S cap H} ||theta||_L^{-n+k} = int_{S cap H^perp} (||x||_L^{-n+k})^

    for an (n-k)-dimensional subspace H; the right side uses the zonal
    expansion of rho_L^{n-k}.
    """
    quad = quad or QuadratureSpec()
    n = L.dim
    if not 1 <= k <= n - 1:
        raise DomainError("k must satisfy 1 <= k <= n-1")
    if H.dim != n - k or H.ambient_dim != n:
        raise DomainError("H must have dimension n-k")
    lhs = (2.0 * math.pi) ** k * axisymmetric_section_integral(
        lambda phi: L.profile(phi) ** (n - k), H, quad.sphere_nodes, L.breakpoints)
    ft = ft_homogeneous(_profile_power_expansion(L, n - k, quad), n - k)
    rhs = axisymmetric_section_integral(ft, H.complement(), max(quad.sphere_nodes, ft.max_degree + 8))
    return abs(lhs - rhs) / abs(lhs)
