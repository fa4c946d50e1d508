"""From a negative Fourier transform to a pair of bodies violating the
section-comparison implication in the Poincare ball.

Pipeline: the angles where (||x||_M^{-k})^ < 0 form Omega; a smooth bump
v <= 0 supported in Omega gives g = (|x|^{-k} v)^ on the sphere, whose
integrals over great (n-k)-spheres are multiples of v and hence <= 0, while
int f g > 0 for f = rho_M^k. The body K is then defined through

    int_0^{rho_K} r^{n-k-1}/(1-r^2)^{n-k} dr = int_0^{rho_L} (same) dr + eps g

so every (n-k)-section of K has hyperbolic volume at most that of L while
vol_n(K) > vol_n(L).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import (
    EPS,
    HALF_PI,
    DomainError,
    RevolutionBody,
    StarBody,
    Subspace,
    axis_subspaces,
    axisymmetric_section_integral,
    e_convexity_check,
    hyperbolic_volume,
    map_forward,
    polar_angle,
    radial_kernel_density,
    radial_kernel_integral,
    radial_kernel_inverse,
    section_volume,
    subspace_sample,
)
from .harmonics import HarmonicExpansion, ft_homogeneous, gegenbauer_expand
from .quadrature import QuadratureSpec, gauss_legendre, piecewise_gauss, sphere_area
from .sections import ConvergenceError, FtProfile, axis_direction, ft_norm_power

SECTION_SLACK = 1e-8
VOLUME_SAFETY = 5.0
ZHANG_TOL = 1e-9


# ---------------------------------------------------------------------------
# the negative set Omega
# ---------------------------------------------------------------------------

@dataclass
class NegativeSet:
    """Angle intervals (from the axis, within [0, pi/2]) where the FT is < 0."""

    intervals: list
    profile: FtProfile
    q: int
    midpoint_values: list = field(default_factory=list)

    def contains(self, a: float, b: float) -> bool:
        return any(lo <= a and b <= hi for lo, hi in self.intervals)

    def to_dict(self):
        return {
            "q": self.q,
            "intervals": [list(iv) for iv in self.intervals],
            "midpoint_values": list(self.midpoint_values),
            "profile_min": self.profile.min_value,
        }


def _ft_at(body: RevolutionBody, q: int, angle: float, quad, rtol: float = 1e-4) -> float:
    return ft_norm_power(body, q, axis_direction(body.dim, angle), quad, rtol)


def find_negative_set(profile: FtProfile, body: RevolutionBody, quad: Optional[QuadratureSpec] = None,
                      xtol: float = 1e-4, rtol: float = 1e-4) -> NegativeSet:
    """Maximal negative intervals of a scanned FT profile.

    Interval ends inside (0, pi/2) are refined by bisection on the sign of
    the transform of ||x||_body^{-q} to ``xtol`` radians; ends at 0 or pi/2
    are boundaries of the angle range, not sign changes.
    """
    if profile.min_value >= 0.0:
        raise DomainError("not applicable: distribution appears positive definite on the grid")
    q = profile.q
    ang = np.asarray(profile.angles, dtype=float)
    neg = np.asarray(profile.values) < 0.0

    def refine(a_neg: float, a_pos: float) -> float:
        # keeps the invariant: FT(a_neg) < 0 <= FT(a_pos)
        while abs(a_pos - a_neg) > xtol:
            mid = 0.5 * (a_neg + a_pos)
            if _ft_at(body, q, mid, quad, rtol) < 0.0:
                a_neg = mid
            else:
                a_pos = mid
        return a_neg

    intervals = []
    i = 0
    while i < len(ang):
        if not neg[i]:
            i += 1
            continue
        j = i
        while j + 1 < len(ang) and neg[j + 1]:
            j += 1
        lo = float(ang[i]) if i == 0 else refine(float(ang[i]), float(ang[i - 1]))
        hi = float(ang[j]) if j == len(ang) - 1 else refine(float(ang[j]), float(ang[j + 1]))
        intervals.append((lo, hi))
        i = j + 1
    mids = [_ft_at(body, q, 0.5 * (lo + hi), quad, rtol) for lo, hi in intervals]
    if any(m >= 0.0 for m in mids):
        raise ConvergenceError(f"interval midpoint values {mids} are not all negative; scan grid too coarse")
    return NegativeSet(intervals, profile, q, mids)


# ---------------------------------------------------------------------------
# bump v and perturbation g
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BumpSpec:
    center_angle: float
    half_width: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.half_width <= 0.0 or self.amplitude <= 0.0:
            raise DomainError("bump half_width and amplitude must be positive")


@dataclass
class Bump:
    """v(phi) = -amplitude exp(-1/(1-s^2)), s = (phi - center)/half_width,
    folded so v is even on the sphere (phi -> pi - phi)."""

    spec: BumpSpec

    @property
    def support(self):
        c, w = self.spec.center_angle, self.spec.half_width
        return c - w, c + w

    @property
    def breakpoints(self):
        lo, hi = self.support
        return tuple(b for b in (abs(lo), hi) if 0.0 < b < HALF_PI)

    def _one(self, phi):
        s = (phi - self.spec.center_angle) / self.spec.half_width
        inside = np.abs(s) < 1.0
        out = np.zeros_like(phi)
        out[inside] = -self.spec.amplitude * np.exp(-1.0 / (1.0 - s[inside] ** 2))
        return out

    def __call__(self, phi):
        phi = np.abs(np.asarray(phi, dtype=float)) % math.pi
        # fold onto [0, pi/2]; a bump centred on the axis or the equator is
        # even in phi there, so the folded function is smooth on the sphere
        return self._one(np.minimum(phi, math.pi - phi))


def build_bump(omega: NegativeSet, spec: BumpSpec) -> Bump:
    lo, hi = spec.center_angle - spec.half_width, spec.center_angle + spec.half_width
    if spec.center_angle < 0.0 or spec.center_angle > HALF_PI:
        raise DomainError("bump centre must lie in [0, pi/2]")
    lo_ok = lo >= 0.0 or spec.center_angle == 0.0
    hi_ok = hi <= HALF_PI or spec.center_angle == HALF_PI
    if not (lo_ok and hi_ok):
        raise DomainError("a bump crossing the axis or the equator must be centred on it")
    if not omega.contains(max(lo, 0.0), min(hi, HALF_PI)):
        raise DomainError(f"bump support [{lo:.6g}, {hi:.6g}] is not inside the negative set {omega.intervals}")
    return Bump(spec)


@dataclass
class PerturbationG:
    """g = (|x|^{-k} v)^ restricted to the sphere, scaled so max|g| = 1."""

    expansion: HarmonicExpansion
    k: int
    v_expansion: HarmonicExpansion
    scale: float
    max_abs: float

    @property
    def n(self) -> int:
        return self.expansion.n

    def __call__(self, phi):
        return self.expansion(phi)

    def on_directions(self, theta):
        return self.expansion(polar_angle(theta))

    def to_dict(self):
        return {
            "k": self.k,
            "max_degree": self.expansion.max_degree,
            "scale": self.scale,
            "tail_ratio": self.expansion.tail_ratio,
            "coeffs": self.expansion.to_dict()["coeffs"],
        }


def _gmax(exp: HarmonicExpansion, breakpoints=()) -> float:
    grid = np.linspace(0.0, HALF_PI, max(2001, 8 * exp.max_degree + 1))
    grid = np.unique(np.concatenate([grid, np.asarray(breakpoints, dtype=float)]))
    return float(np.max(np.abs(exp(grid))))


def build_g(v: Callable, n: int, k: int, max_degree: int, quad: Optional[QuadratureSpec] = None,
            breakpoints=(), tail_tol: float = 1e-8, normalize: bool = True) -> PerturbationG:
    """Zonal expansion of g with (|x|^{-k} v(x/|x|))^ = g(x/|x|) |x|^{-n+k}.

    The homogeneity -k (not -n+k) is the one for which integrals of g over
    (n-k)-dimensional great spheres reduce to integrals of v over the
    orthogonal k-spheres. With ``normalize`` the result is rescaled so that
    max|g| = 1 (the amplitude of v is then immaterial).
    """
    if max_degree < 0 or max_degree % 2:
        raise DomainError("max_degree must be even")
    if not 1 <= k <= n - 1:
        raise DomainError("k must satisfy 1 <= k <= n-1")
    if isinstance(v, Bump):
        breakpoints = tuple(breakpoints) + v.breakpoints
    vexp = gegenbauer_expand(v, n, max_degree, quad, breakpoints, tail_tol=np.inf)
    gexp = ft_homogeneous(vexp, k)
    c = np.array([abs(gexp.coeffs[m]) for m in gexp.degrees])
    head = float(np.max(c))
    if head == 0.0:
        zero = HarmonicExpansion(n, dict(gexp.coeffs))
        return PerturbationG(zero, k, vexp, 1.0, 0.0)
    tail = float(np.max(c[-2:])) / head
    if tail > tail_tol:
        raise ConvergenceError(f"truncation tail of g is {tail:.3g} of the leading coefficient "
                               f"(limit {tail_tol:g}); raise max_degree above {max_degree}")
    gexp.tail_ratio = tail
    gmax = _gmax(gexp, breakpoints)
    scale = 1.0 / gmax if normalize else 1.0
    return PerturbationG(gexp.scaled(scale), k, vexp.scaled(scale), scale, gmax * scale)


# ---------------------------------------------------------------------------
# density f and the Zhang conditions
# ---------------------------------------------------------------------------

@dataclass
class DensityF:
    """f = rho_L^k / (1 - rho_L^2)^k = rho_M^k for M the image of L."""

    L: RevolutionBody
    k: int

    def __call__(self, phi):
        return map_forward(self.L.profile(phi)) ** self.k

    def on_directions(self, theta):
        return map_forward(self.L.radial(theta)) ** self.k


def _sphere_nodes_for(g: PerturbationG, quad: QuadratureSpec) -> int:
    return max(quad.sphere_nodes, g.expansion.max_degree + 16)


def zhang_check(g: PerturbationG, f: DensityF, planes: Sequence[Subspace], quad: Optional[QuadratureSpec] = None,
                tol: float = ZHANG_TOL) -> dict:
    """int f g over the sphere and the largest int_{S cap H} g over planes."""
    quad = quad or QuadratureSpec()
    n = g.n
    bad = [H.dim for H in planes if H.dim != n - g.k or H.ambient_dim != n]
    if bad:
        raise DomainError(f"planes must have dimension n-k = {n - g.k}")
    nodes = _sphere_nodes_for(g, quad)
    breaks = list(f.L.breakpoints)
    phi, w = piecewise_gauss(np.unique([0.0, HALF_PI] + breaks), nodes)
    pairing = 2.0 * sphere_area(n - 1) * float(np.sum(w * f(phi) * g(phi) * np.sin(phi) ** (n - 2)))
    sec = [axisymmetric_section_integral(g, H, nodes) for H in planes]
    worst = float(max(sec)) if sec else -math.inf
    return {
        "pairing": pairing,
        "max_section_integral": worst,
        "zhang1": pairing > 0.0,
        "zhang2": worst <= tol,
        "passed": bool(pairing > 0.0 and worst <= tol),
        "planes": len(planes),
    }


# ---------------------------------------------------------------------------
# the body K
# ---------------------------------------------------------------------------

def _k_profile(L: RevolutionBody, g: Callable, eps: float, k: int, phi):
    m = L.dim - k
    rl = L.profile(phi)
    rhs = radial_kernel_integral(rl, m) + eps * g(phi)
    rhs = np.atleast_1d(rhs)
    if np.any(rhs <= 0.0):
        raise DomainError("epsilon too large for this direction: right-hand side is not positive")
    rk = np.atleast_1d(radial_kernel_inverse(rhs, m))
    resid = np.abs(radial_kernel_integral(rk, m) - rhs)
    if np.any(resid > 1e-12 * np.maximum(1.0, np.abs(rhs))):
        raise ConvergenceError(f"defining equation residual {float(np.max(resid)):.3g} exceeds 1e-12")
    return rk.reshape(np.shape(phi))


def solve_k_radial(L: RevolutionBody, g: PerturbationG, eps: float, theta):
    """rho_K in direction(s) theta from the defining equation of K."""
    theta = np.asarray(theta, dtype=float)
    out = _k_profile(L, g, eps, g.k, polar_angle(theta))
    return float(out) if out.ndim == 0 else out


def _k_breakpoints(L: RevolutionBody, g: PerturbationG):
    """Panel edges for K: those of L plus a uniform grid that resolves g."""
    per_quarter = max(1, math.ceil(g.expansion.max_degree / 24))
    grid = np.linspace(0.0, HALF_PI, per_quarter + 1)[1:-1]
    return tuple(sorted(set(L.breakpoints) | set(float(x) for x in grid)))


def build_K(L: RevolutionBody, g: PerturbationG, eps: float, name: str = "K") -> RevolutionBody:
    k = g.k
    return RevolutionBody(L.dim, lambda phi: _k_profile(L, g, eps, k, phi), _k_breakpoints(L, g),
                          smoothness=L.smoothness, name=name)


@dataclass
class EpsilonChoice:
    eps: float
    trace: list

    def to_dict(self):
        return {"eps": self.eps, "trace": self.trace}


def choose_epsilon(L: RevolutionBody, g: PerturbationG, eps_max: float, grid: int = 2001,
                   convexity_samples: int = 4000, seed: int = 0, max_halvings: int = 20) -> EpsilonChoice:
    """Largest eps = eps_max 2^-j for which K is e-convex and the defining
    equation has a positive right-hand side on the direction grid.

    Each trace entry records eps, sup|rho_K - rho_L| on the grid and the
    reason for rejection (if any).
    """
    if eps_max <= 0.0:
        raise DomainError("eps_max must be positive")
    phi = np.linspace(0.0, HALF_PI, grid)
    rl = L.profile(phi)
    trace = []
    eps = eps_max
    for _ in range(max_halvings + 1):
        entry = {"eps": eps, "sup_alpha": None, "ok": False, "reason": ""}
        try:
            K = build_K(L, g, eps)
            entry["sup_alpha"] = float(np.max(np.abs(K.profile(phi) - rl)))
            rep = e_convexity_check(K, samples=convexity_samples, seed=seed)
            entry["ok"] = bool(rep.convex)
            entry["reason"] = "" if rep.convex else "K not e-convex"
        except DomainError as exc:
            entry["reason"] = str(exc)
        trace.append(entry)
        if entry["ok"]:
            return EpsilonChoice(eps, trace)
        eps *= 0.5
    raise ConvergenceError(f"no admissible epsilon down to {eps_max * 2.0 ** -max_halvings:.3g}")


# ---------------------------------------------------------------------------
# the certificate
# ---------------------------------------------------------------------------

@dataclass
class PlaneResult:
    basis: list
    vol_K: float
    vol_L: float
    error: float
    margin: float
    predicted: Optional[float] = None

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class CertificateReport:
    n: int
    k: int
    planes: list
    vol_K: float
    vol_L: float
    volume_gap: float
    volume_gap_error: float
    convex_K: bool
    convex_L: bool
    eps: Optional[float]
    verdict: str
    reason: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"

    def to_dict(self):
        return {
            "n": self.n,
            "k": self.k,
            "section_dim": self.n - self.k,
            "eps": self.eps,
            "verdict": self.verdict,
            "reason": self.reason,
            "vol_K": self.vol_K,
            "vol_L": self.vol_L,
            "volume_gap": self.volume_gap,
            "volume_gap_error": self.volume_gap_error,
            "convex_K": self.convex_K,
            "convex_L": self.convex_L,
            "planes": [p.to_dict() for p in self.planes],
            "extras": self.extras,
        }


def _volume_gap(K: RevolutionBody, L: RevolutionBody, quad: QuadratureSpec) -> tuple:
    """vol_n(K) - vol_n(L) as one integral of the kernel density between the
    two radial functions (no cancellation of two large volumes)."""
    n = K.dim
    breaks = np.unique([0.0, HALF_PI] + list(K.breakpoints) + list(L.breakpoints))

    def compute(nodes):
        phi, w = piecewise_gauss(breaks, nodes)
        a, b = L.profile(phi), K.profile(phi)
        x, wx = gauss_legendre(0.0, 1.0, quad.radial_nodes)
        r = a[:, None] + (b - a)[:, None] * x[None, :]
        inner = (b - a) * np.sum(wx * radial_kernel_density(r, n), axis=1)
        return 2.0 ** n * 2.0 * sphere_area(n - 1) * float(np.sum(w * inner * np.sin(phi) ** (n - 2)))

    coarse = compute(quad.sphere_nodes)
    fine = compute(2 * quad.sphere_nodes)
    return fine, abs(fine - coarse) + 16.0 * EPS * abs(fine)


def _plane_task(args):
    K, L, H, quad, g, eps, k = args
    vk = section_volume(K, H, quad)
    vl = section_volume(L, H, quad)
    err = vk.error_estimate + vl.error_estimate
    pred = None
    if g is not None:
        d = H.dim
        nodes = max(quad.sphere_nodes, g.expansion.max_degree + 16)
        pred = 2.0 ** d * eps * axisymmetric_section_integral(g, H, nodes)
    return PlaneResult(H.to_list(), vk.value, vl.value, err, vl.value - vk.value, pred)


def certify(K: RevolutionBody, L: RevolutionBody, k: int, plane_count: int, quad: Optional[QuadratureSpec] = None,
            seed: int = 0, g: Optional[PerturbationG] = None, eps: Optional[float] = None,
            f: Optional[DensityF] = None, workers: int = 1, convexity_samples: int = 4000) -> CertificateReport:
    """Compare sections and volumes of K and L.

    Planes are the axis-containing and equatorial coordinate subspaces of
    dimension n-k plus ``plane_count`` seeded random ones. A plane passes
    when vol(K cap H) <= vol(L cap H) + 1e-8 + its quadrature error; the
    volume gap must exceed 5 times its error estimate. With g, eps and f
    the report also carries the predicted section differences and the
    pairing lower bound for the volume gap.
    """
    quad = quad or QuadratureSpec()
    n = L.dim
    if K.dim != n:
        raise DomainError("bodies live in different dimensions")
    if not 1 <= k < n - 1:
        raise DomainError(f"k must satisfy 1 <= k < n-1 = {n - 1}")
    d = n - k
    planes = axis_subspaces(n, d) + subspace_sample(n, d, plane_count, seed)
    tasks = [(K, L, H, quad, g, eps, k) for H in planes]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(_plane_task, tasks))
    else:
        results = [_plane_task(t) for t in tasks]

    gap, gap_err = _volume_gap(K, L, quad)
    vk = hyperbolic_volume(K, quad)
    vl = hyperbolic_volume(L, quad)
    ck = e_convexity_check(K, samples=convexity_samples, seed=seed)
    cl = e_convexity_check(L, samples=convexity_samples, seed=seed)

    extras = {"plane_seed": seed, "plane_count": plane_count, "quadrature": quad.__dict__.copy(),
              "vol_K_error": vk.error_estimate, "vol_L_error": vl.error_estimate,
              "min_curvature_K": ck.min_curvature, "min_curvature_L": cl.min_curvature}
    if g is not None and eps is not None and f is not None:
        z = zhang_check(g, f, [], quad)
        extras["pairing"] = z["pairing"]
        extras["gap_lower_bound"] = 2.0 ** n * eps * z["pairing"]
        extras["max_prediction_mismatch"] = max(
            abs((p.vol_K - p.vol_L) - p.predicted) for p in results)

    failures = []
    bad = [i for i, p in enumerate(results) if p.margin < -(SECTION_SLACK + p.error)]
    if bad:
        failures.append(f"{len(bad)} plane(s) with a larger K-section (first: #{bad[0]})")
    if gap <= 0.0:
        failures.append("not a counterexample: vol_n(K) <= vol_n(L)")
    elif gap <= VOLUME_SAFETY * gap_err:
        failures.append(f"volume gap {gap:.3g} within {VOLUME_SAFETY:g}x its error {gap_err:.3g}")
    if not ck.convex:
        failures.append("K is not e-convex")
    if not cl.convex:
        failures.append("L is not e-convex")
    verdict = "failed" if failures else "certified"
    return CertificateReport(n, k, results, vk.value, vl.value, gap, gap_err, ck.convex, cl.convex, eps,
                             verdict, "; ".join(failures), extras)


# ---------------------------------------------------------------------------
# the elementary inequality
# ---------------------------------------------------------------------------

def elementary_inequality_check(a: float, b: float, n: int, k: int, nodes: int = 64) -> float:
    """int_a^b r^{n-1}/(1-r^2)^n dr - a^k/(1-a^2)^k int_a^b r^{n-k-1}/(1-r^2)^{n-k} dr.

    Both integrals are oriented (negative for b < a), and the residual is
    nonnegative in either orientation because r^k/(1-r^2)^k is increasing.
    It is evaluated as one integral of (phi(r) - phi(a)) r^{n-k-1}/(1-r^2)^{n-k}
    with phi(r) = r^k/(1-r^2)^k, which avoids cancellation.
    """
    if not (0.0 < a < 1.0 and 0.0 < b < 1.0):
        raise DomainError("a and b must lie in (0, 1)")
    if not 1 <= k < n:
        raise DomainError("need 1 <= k < n")
    if a == b:
        return 0.0
    ua, ub = np.log1p(2.0 * a / (1.0 - a)), np.log1p(2.0 * b / (1.0 - b))
    # geodesic radius u = 2 atanh r keeps the integrand bounded near r = 1
    u, w = gauss_legendre(min(ua, ub), max(ua, ub), nodes)
    r = np.tanh(0.5 * u)
    dr = 0.5 * (1.0 - r * r)
    phi_a = (a / ((1.0 - a) * (1.0 + a))) ** k
    phi_r = (r / ((1.0 - r) * (1.0 + r))) ** k
    val = float(np.sum(w * (phi_r - phi_a) * radial_kernel_density(r, n - k) * dr))
    return val if b > a else -val
