"""Poincare-ball primitives: star bodies, hyperbolic volumes, the radial map.

Bodies live in the open unit ball of R^n and are described by their radial
function on the unit sphere. Hyperbolic n-volume in polar coordinates is

    vol_n(K) = 2^n * int_{S^{n-1}} int_0^{rho_K(theta)} r^{n-1} / (1 - r^2)^n dr dtheta

and the same formula with n replaced by d, integrated over the unit sphere of
a d-dimensional subspace H, gives the volume of the section K cap H.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Callable, Optional, Sequence

import numpy as np

from .quadrature import (
    QuadratureSpec,
    _gl,
    piecewise_gauss,
    sphere_area,
    sphere_rule,
)

HALF_PI = 0.5 * math.pi
EPS = np.finfo(float).eps


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


# ---------------------------------------------------------------------------
# radial kernel  int_0^rho r^{m-1} / (1 - r^2)^m dr
# ---------------------------------------------------------------------------

def _sinh_power_integral(U, p: int, order: int = 24):
    """int_0^U sinh(u)^p du for an array of U >= 0 (composite Gauss-Legendre).

    Panels are sized so that p * panel_length <= 6, which keeps the rule at
    full double precision relative accuracy for the exponential-like growth.
    """
    U = np.asarray(U, dtype=float)
    if p == 0:
        return U.copy()
    if U.size == 0:
        return U.copy()
    umax = float(np.max(U))
    panels = max(1, int(math.ceil(umax * p / 6.0)), int(math.ceil(umax / 2.0)))
    x, w = _gl(order)
    s = ((np.arange(panels)[:, None] + 0.5 * (x[None, :] + 1.0)) / panels).ravel()
    ws = np.tile(0.5 * w / panels, panels)
    u = U[..., None] * s
    return U * np.sum(ws * np.sinh(u) ** p, axis=-1)


def _geodesic_radius(rho):
    """Hyperbolic distance 2 atanh(rho) from the origin, computed stably."""
    rho = np.asarray(rho, dtype=float)
    return np.log1p(2.0 * rho / (1.0 - rho))


def _check_rho(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(~np.isfinite(rho)) or np.any(rho < 0.0) or np.any(rho >= 1.0):
        raise DomainError("radial kernel needs 0 <= rho < 1")
    return rho


def radial_kernel_integral(rho, m: int):
    """int_0^rho r^(m-1) / (1 - r^2)^m dr.

    Evaluated through the geodesic radius u = 2 atanh(r), where the integral
    becomes 2^-m int_0^u sinh(t)^(m-1) dt; the integrand is then smooth all
    the way up to the boundary of the ball.
    """
    if m < 1:
        raise DomainError("kernel order m must be >= 1")
    rho = _check_rho(rho)
    val = _sinh_power_integral(_geodesic_radius(rho), m - 1) / 2.0 ** m
    return float(val) if val.ndim == 0 else val


def radial_kernel_density(rho, m: int):
    """Derivative of :func:`radial_kernel_integral` with respect to rho."""
    rho = np.asarray(rho, dtype=float)
    return rho ** (m - 1) / ((1.0 - rho) * (1.0 + rho)) ** m


def radial_kernel_inverse(value, m: int, max_iter: int = 200):
    """Solve radial_kernel_integral(rho, m) = value for rho in [0, 1).

    Safeguarded Newton in the geodesic radius; the kernel is strictly
    increasing so the root is unique.
    """
    y = np.asarray(value, dtype=float)
    if np.any(y < 0.0) or np.any(~np.isfinite(y)):
        raise DomainError("kernel value must be finite and >= 0")
    p = m - 1
    target = y * 2.0 ** m
    if p == 0:
        out = np.tanh(0.5 * target)
        return float(out) if out.ndim == 0 else out
    t = np.atleast_1d(target)
    small = (m * t) ** (1.0 / m)
    large = np.log(np.maximum(t, 1e-300) * 2.0 ** p * p) / p
    u = np.where(t > 1.0, np.maximum(large, 0.0), small)
    lo = np.zeros_like(t)
    hi = np.maximum(2.0 * u + 1.0, 1.0)
    while True:
        short = _sinh_power_integral(hi, p) < t
        if not np.any(short):
            break
        hi = np.where(short, 2.0 * hi, hi)
    u = np.clip(u, lo, hi)
    for _ in range(max_iter):
        f = _sinh_power_integral(u, p) - t
        lo = np.where(f < 0.0, u, lo)
        hi = np.where(f > 0.0, u, hi)
        d = np.sinh(u) ** p
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(d > 0.0, f / d, np.inf)
        nu = u - step
        bad = ~np.isfinite(nu) | (nu <= lo) | (nu >= hi)
        nu = np.where(bad, 0.5 * (lo + hi), nu)
        done = np.abs(nu - u) <= 4.0 * EPS * np.maximum(np.abs(u), 1e-300)
        u = nu
        if np.all(done | (hi - lo <= 4.0 * EPS * hi)):
            break
    out = np.tanh(0.5 * u).reshape(np.shape(target))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# the map r -> r / (1 - r^2)
# ---------------------------------------------------------------------------

def map_forward(rho):
    """r -> r / (1 - r^2): sends s-geodesics of the ball onto straight lines."""
    r = np.asarray(rho, dtype=float)
    if np.any(r <= 0.0) or np.any(r >= 1.0):
        raise DomainError("map_forward needs 0 < rho < 1")
    out = r / ((1.0 - r) * (1.0 + r))
    return float(out) if out.ndim == 0 else out


def map_inverse(rho_m):
    """Inverse of :func:`map_forward`, written without cancellation."""
    y = np.asarray(rho_m, dtype=float)
    if np.any(y <= 0.0) or np.any(~np.isfinite(y)):
        raise DomainError("map_inverse needs a finite rho > 0")
    out = 2.0 * y / (1.0 + np.sqrt(1.0 + 4.0 * y * y))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# bodies
# ---------------------------------------------------------------------------

SMOOTHNESS = ("C0", "C2", "Cinf")


def normalize(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def polar_angle(theta):
    """Angle between each direction and the last coordinate axis."""
    theta = np.asarray(theta, dtype=float)
    perp = np.linalg.norm(theta[..., :-1], axis=-1)
    return np.arctan2(perp, theta[..., -1])


class StarBody:
    """Origin-symmetric star body given by a radial function on S^{n-1}.

    ``radial`` maps an array of unit vectors of shape (..., n) to radii of
    shape (...). The body is assumed to lie in the open unit ball; use
    :meth:`validate` to spot-check this.
    """

    def __init__(self, dim: int, radial: Callable, smoothness: str = "Cinf", name: str = "body"):
        if dim < 2:
            raise DomainError("dimension must be >= 2")
        if smoothness not in SMOOTHNESS:
            raise DomainError(f"smoothness must be one of {SMOOTHNESS}")
        self.dim = int(dim)
        self._radial = radial
        self.smoothness = smoothness
        self.name = name

    def radial(self, theta):
        theta = np.asarray(theta, dtype=float)
        if theta.shape[-1] != self.dim:
            raise DomainError(f"direction has {theta.shape[-1]} coordinates, body lives in R^{self.dim}")
        return np.asarray(self._radial(theta), dtype=float)

    __call__ = radial

    def validate(self, samples: int = 2000, seed: int = 0, inside_ball: bool = True):
        rng = np.random.default_rng(seed)
        th = normalize(rng.standard_normal((samples, self.dim)))
        r = self.radial(th)
        if np.any(~np.isfinite(r)) or np.any(r <= 0.0):
            raise DomainError(f"{self.name}: radial function must be positive")
        if inside_ball and np.any(r >= 1.0):
            raise DomainError(f"{self.name}: body leaves the open unit ball")
        if np.max(np.abs(r - self.radial(-th))) > 1e-12 * np.max(r):
            raise DomainError(f"{self.name}: body is not origin symmetric")
        return self

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, name={self.name!r})"


class RevolutionBody(StarBody):
    """Body of revolution about the x_n axis given by a planar profile.

    ``profile`` is evaluated on angles phi in [0, pi/2] measured from the
    axis; other angles are folded back using origin symmetry. ``breakpoints``
    lists the angles in (0, pi/2) where the profile is not analytic (piece
    boundaries, ends of blending zones); quadrature splits there.
    """

    def __init__(
        self,
        dim: int,
        profile: Callable,
        breakpoints: Sequence[float] = (),
        pieces: Optional[list] = None,
        smoothness: str = "Cinf",
        name: str = "revolution body",
    ):
        super().__init__(dim, self._radial_from_profile, smoothness, name)
        self._profile = profile
        self.breakpoints = tuple(sorted(float(b) for b in breakpoints if 0.0 < b < HALF_PI))
        self.pieces = list(pieces or [])

    def profile(self, phi):
        phi = np.abs(np.asarray(phi, dtype=float)) % math.pi
        phi = np.minimum(phi, math.pi - phi)
        return np.asarray(self._profile(phi), dtype=float)

    def _radial_from_profile(self, theta):
        return self.profile(polar_angle(theta))

    def segments(self):
        """Breakpoints of [0, pi/2] used to split one-dimensional rules."""
        return np.array((0.0,) + self.breakpoints + (HALF_PI,))

    def describe(self) -> dict:
        return {
            "n": self.dim,
            "smoothness_class": self.smoothness,
            "name": self.name,
            "breakpoints": list(self.breakpoints),
            "pieces": self.pieces,
        }


def ball(dim: int, radius: float) -> RevolutionBody:
    if not 0.0 < radius:
        raise DomainError("ball radius must be positive")
    return RevolutionBody(
        dim,
        lambda phi: np.full(np.shape(phi), float(radius)),
        pieces=[{"kind": "sphere", "radius": float(radius)}],
        name=f"ball({radius:g})",
    )


def push_body(body: StarBody) -> StarBody:
    """Image of a body under r -> r/(1-r^2) applied ray by ray."""
    if isinstance(body, RevolutionBody):
        return RevolutionBody(
            body.dim,
            lambda phi: map_forward(body.profile(phi)),
            body.breakpoints,
            pieces=[{"kind": "push", "of": body.name}] + body.pieces,
            smoothness=body.smoothness,
            name=f"push({body.name})",
        )
    return StarBody(body.dim, lambda th: map_forward(body.radial(th)), body.smoothness, f"push({body.name})")


def pull_body(body: StarBody) -> StarBody:
    """Inverse of :func:`push_body`; the result always lies in the unit ball."""
    if isinstance(body, RevolutionBody):
        return RevolutionBody(
            body.dim,
            lambda phi: map_inverse(body.profile(phi)),
            body.breakpoints,
            pieces=[{"kind": "pull", "of": body.name}] + body.pieces,
            smoothness=body.smoothness,
            name=f"pull({body.name})",
        )
    return StarBody(body.dim, lambda th: map_inverse(body.radial(th)), body.smoothness, f"pull({body.name})")


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """Linear subspace through the origin; ``basis`` rows are orthonormal."""

    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.atleast_2d(np.asarray(self.basis, dtype=float))
        d, n = b.shape
        if not 1 <= d <= n - 1:
            raise DomainError("subspace dimension must satisfy 1 <= d <= n-1")
        if np.max(np.abs(b @ b.T - np.eye(d))) > 1e-12:
            raise DomainError("subspace basis is not orthonormal")
        b.flags.writeable = False
        object.__setattr__(self, "basis", b)

    @classmethod
    def from_vectors(cls, vectors) -> "Subspace":
        v = np.atleast_2d(np.asarray(vectors, dtype=float))
        q, r = np.linalg.qr(v.T)
        q = q * np.where(np.diag(r) < 0.0, -1.0, 1.0)
        return cls(q.T.copy())

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[1]

    def complement(self) -> "Subspace":
        n = self.ambient_dim
        proj = np.eye(n) - self.basis.T @ self.basis
        u, s, _ = np.linalg.svd(proj)
        return Subspace(u[:, : n - self.dim].T.copy())

    def to_list(self):
        return self.basis.tolist()


def subspace_sample(n: int, d: int, count: int, seed: int = 0) -> list:
    """Uniformly distributed d-dimensional subspaces of R^n (seeded)."""
    if not 1 <= d <= n - 1 or count < 1:
        raise DomainError("need 1 <= d <= n-1 and count >= 1")
    rng = np.random.default_rng(seed)
    out = []
    for g in rng.standard_normal((count, n, d)):
        q, r = np.linalg.qr(g)
        q = q * np.where(np.diag(r) < 0.0, -1.0, 1.0)
        out.append(Subspace(q.T.copy()))
    return out


def axis_subspaces(n: int, d: int) -> list:
    """Coordinate subspaces containing the symmetry axis and lying in the
    equatorial hyperplane (when they exist)."""
    eye = np.eye(n)
    out = []
    if d >= 1:
        out.append(Subspace(np.vstack([eye[n - 1], eye[: d - 1]]).copy()))
    if d <= n - 1:
        out.append(Subspace(eye[:d].copy()))
    return out


# ---------------------------------------------------------------------------
# volumes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VolumeResult:
    value: float
    error_estimate: float
    converged: bool = True

    def to_dict(self):
        return {"value": self.value, "error_estimate": self.error_estimate, "converged": self.converged}


def _revolution_sphere_integral(fun, body: RevolutionBody, n_nodes: int) -> float:
    """int_{S^{n-1}} fun(phi(theta)) dtheta for an axially symmetric integrand."""
    n = body.dim
    phi, w = piecewise_gauss(body.segments(), n_nodes)
    return 2.0 * sphere_area(n - 1) * float(np.sum(w * fun(phi) * np.sin(phi) ** (n - 2)))


def _sphere_integral(fun, n: int, n_nodes: int) -> float:
    pts, w = sphere_rule(n, n_nodes)
    return float(np.sum(w * fun(pts)))


def _with_refinement(compute, quad: QuadratureSpec, tol: Optional[float]) -> VolumeResult:
    coarse = compute(quad)
    fine = compute(quad.refined())
    err = float(abs(fine - coarse) + 16.0 * EPS * abs(fine))
    return VolumeResult(fine, err, True if tol is None else err <= tol)


def hyperbolic_volume(body: StarBody, quad: Optional[QuadratureSpec] = None, tol: Optional[float] = None) -> VolumeResult:
    """Hyperbolic n-volume of a star body in the Poincare ball."""
    quad = quad or QuadratureSpec()
    n = body.dim
    scale = 2.0 ** n

    if isinstance(body, RevolutionBody):
        def compute(q):
            return scale * _revolution_sphere_integral(
                lambda phi: radial_kernel_integral(body.profile(phi), n), body, q.sphere_nodes
            )
    else:
        def compute(q):
            return scale * _sphere_integral(lambda th: radial_kernel_integral(body.radial(th), n), n, q.sphere_nodes)

    return _with_refinement(compute, quad, tol)


def axisymmetric_section_integral(fun_of_phi, H: Subspace, n_nodes: int, breakpoints=()) -> float:
    """int_{S^{n-1} cap H} F(phi(theta)) dtheta for F depending only on the angle
    phi to the x_n axis and even under phi -> pi - phi.

    With A = |P_H e_n| the integral reduces to one dimension,
    |S^{d-2}| int_0^pi F(phi(psi)) sin^{d-2} psi dpsi with cos phi = A cos psi.
    ``breakpoints`` (angles in [0, pi/2]) where F is not smooth become panel
    edges.
    """
    d = H.dim
    a = H.basis[:, -1]
    A = min(float(np.linalg.norm(a)), 1.0)

    def along(psi):
        c = A * np.cos(psi)
        s = np.sqrt((1.0 - A * A) + (A * np.sin(psi)) ** 2)
        return fun_of_phi(np.arctan2(s, c))

    if d == 1:
        return 2.0 * float(along(np.array([0.0]))[0])
    cuts = [0.0, HALF_PI]
    if A > 0.0:
        for b in breakpoints:
            cb = math.cos(b) / A
            if cb < 1.0:
                cuts.append(math.acos(cb))
    psi, w = piecewise_gauss(cuts, n_nodes)
    return 2.0 * sphere_area(d - 1) * float(np.sum(w * along(psi) * np.sin(psi) ** (d - 2)))


def _section_integral(fun_of_rho, body: StarBody, H: Subspace, n_nodes: int) -> float:
    """int_{S^{n-1} cap H} fun_of_rho(rho_body(theta)) dtheta."""
    if isinstance(body, RevolutionBody):
        return axisymmetric_section_integral(lambda phi: fun_of_rho(body.profile(phi)), H, n_nodes,
                                             body.breakpoints)
    pts, w = sphere_rule(H.dim, n_nodes)
    theta = pts @ H.basis
    return float(np.sum(w * fun_of_rho(body.radial(theta))))


def section_volume(body: StarBody, H: Subspace, quad: Optional[QuadratureSpec] = None, tol: Optional[float] = None) -> VolumeResult:
    """Hyperbolic d-volume of the section of a body by the subspace H."""
    quad = quad or QuadratureSpec()
    if H.ambient_dim != body.dim:
        raise DomainError("subspace and body live in different dimensions")
    d = H.dim
    scale = 2.0 ** d
    return _with_refinement(
        lambda q: scale * _section_integral(lambda r: radial_kernel_integral(r, d), body, H, q.sphere_nodes),
        quad,
        tol,
    )


# ---------------------------------------------------------------------------
# convexity
# ---------------------------------------------------------------------------

@dataclass
class ConvexityReport:
    convex: bool
    witness: Optional[tuple] = None
    min_curvature: Optional[float] = None
    worst_midpoint_excess: Optional[float] = None
    method: str = "sampled"

    def to_dict(self):
        return {
            "convex": self.convex,
            "witness": None if self.witness is None else [list(map(float, p)) for p in self.witness],
            "min_curvature": self.min_curvature,
            "worst_midpoint_excess": self.worst_midpoint_excess,
            "method": self.method,
        }


def profile_curvature(body: RevolutionBody, phi, h: float = 2e-3):
    """rho^2 + 2 rho'^2 - rho rho'' along the profile (fourth-order differences).

    Nonnegative exactly where the planar profile curve turns convexly.
    """
    phi = np.asarray(phi, dtype=float)
    f = body.profile
    r0 = f(phi)
    rp1, rm1, rp2, rm2 = f(phi + h), f(phi - h), f(phi + 2 * h), f(phi - 2 * h)
    d1 = (8.0 * (rp1 - rm1) - (rp2 - rm2)) / (12.0 * h)
    d2 = (16.0 * (rp1 + rm1) - (rp2 + rm2) - 30.0 * r0) / (12.0 * h * h)
    return r0 * r0 + 2.0 * d1 * d1 - r0 * d2


def profile_turning(body: RevolutionBody, count: int = 4000):
    """Discrete curvature of the profile curve from an inscribed polygon.

    Returns (phi, E) where E approximates rho^2 + 2 rho'^2 - rho rho'' at the
    polygon vertices. The sign is exact up to roundoff: a polygon inscribed
    in a convex curve turns the same way at every vertex, so no truncation
    error can create spurious negative values.
    """
    dphi = HALF_PI / count
    phi = (np.arange(-1, count + 2)) * dphi
    r = body.profile(phi)
    x, z = r * np.sin(phi), r * np.cos(phi)
    ax, az = np.diff(x), np.diff(z)
    cross = ax[:-1] * az[1:] - az[:-1] * ax[1:]
    la = np.hypot(ax[:-1], az[:-1])
    lb = np.hypot(ax[1:], az[1:])
    turn = -cross / (la * lb)
    ell = 0.5 * (la + lb)
    # curvature turn/ell, rescaled by (ell/dphi)^3 ~ (rho^2 + rho'^2)^(3/2)
    return phi[1:-1], turn / ell * (ell / dphi) ** 3


def _profile_point(body: RevolutionBody, phi: float):
    r = float(body.profile(np.array([phi]))[0])
    p = np.zeros(body.dim)
    p[0] = r * math.sin(phi)
    p[-1] = r * math.cos(phi)
    return p


def e_convexity_check(body: StarBody, samples: int = 2000, tol: float = 1e-9, seed: int = 0,
                      curvature_grid: int = 1000) -> ConvexityReport:
    """Test Euclidean convexity of a star body.

    Boundary point pairs (random and nearby) are sampled and their midpoints
    compared against the radial function. Smooth bodies of revolution also
    get the sign test of the profile curvature on a grid of
    ``curvature_grid`` angles in [0, pi/2]; the threshold is ``tol`` plus
    the roundoff level of the discrete curvature, so flat faces pass.
    """
    if samples < 100:
        raise DomainError("e_convexity_check needs at least 100 samples")
    n = body.dim
    rng = np.random.default_rng(seed)
    half = samples // 2
    t1 = normalize(rng.standard_normal((samples, n)))
    t2 = np.empty_like(t1)
    t2[:half] = normalize(rng.standard_normal((half, n)))
    spread = np.where(np.arange(samples - half) % 2 == 0, 0.05, 0.3)[:, None]
    t2[half:] = normalize(t1[half:] + spread * rng.standard_normal((samples - half, n)))
    p = body.radial(t1)[:, None] * t1
    q = body.radial(t2)[:, None] * t2
    mid = 0.5 * (p + q)
    r = np.linalg.norm(mid, axis=-1)
    ok = r > 1e-14
    excess = np.full(samples, -np.inf)
    excess[ok] = r[ok] - body.radial(mid[ok] / r[ok, None])
    worst = int(np.argmax(excess))
    report = ConvexityReport(True, None, None, float(excess[worst]), "sampled")
    if excess[worst] > tol:
        report.convex = False
        report.witness = (p[worst], q[worst])
        return report

    if isinstance(body, RevolutionBody) and body.smoothness != "C0":
        grid, curv = profile_turning(body, curvature_grid)
        i = int(np.argmin(curv))
        report.min_curvature = float(curv[i])
        report.method = "sampled+curvature"
        dphi = HALF_PI / curvature_grid
        floor = 64.0 * EPS * float(np.max(body.profile(grid))) ** 2 / dphi ** 2
        if curv[i] < -(tol + floor):
            report.convex = False
            phi = float(grid[i])
            pair = None
            for delta in (0.2, 0.1, 0.05, 0.02, 0.01):
                a, b = _profile_point(body, phi - delta), _profile_point(body, phi + delta)
                m = 0.5 * (a + b)
                rm = np.linalg.norm(m)
                if rm > float(body.radial(m / rm)) + tol:
                    pair = (a, b)
                    break
            report.witness = pair or (_profile_point(body, phi - 0.01), _profile_point(body, phi + 0.01))
    return report
