"""Concrete bodies: the cylinder with s-geodesic caps, its smoothing and
strictification, l^q balls and the body M obtained by pushing L forward.
"""
from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .geometry import (
    HALF_PI,
    DomainError,
    RevolutionBody,
    StarBody,
    push_body,
)
from .quadrature import PiecewiseChebyshev, _gl

CYLINDER_RADIUS = math.sqrt(2.0) / 2.0


# ---------------------------------------------------------------------------
# smooth convex |s| and the smooth maximum built from it
# ---------------------------------------------------------------------------

def _expo(x):
    out = np.zeros_like(x)
    pos = x > 0.0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smoothstep(s):
    """C-infinity step: 0 for s <= 0, 1 for s >= 1, built from exp(-1/x)."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    a = _expo(s)
    b = _expo(1.0 - s)
    return a / (a + b)


def _abs_correction_direct(x):
    # int_x^1 2 (1 - smoothstep((y + 1) / 2)) dy, for x in [0, 1]
    t, w = _gl(200)
    half = 0.5 * (1.0 - x)
    y = x[..., None] + half[..., None] * (t + 1.0)
    return np.sum(half[..., None] * w * 2.0 * (1.0 - smoothstep(0.5 * (y + 1.0))), axis=-1)


_ABS_TABLE = None


def _abs_correction(x):
    global _ABS_TABLE
    if _ABS_TABLE is None:
        _ABS_TABLE = PiecewiseChebyshev(_abs_correction_direct, [0.0, 0.5, 1.0], atol=1e-15, min_width=1e-5)
    return _ABS_TABLE(x)


def smooth_abs(s, delta: float):
    """Convex C-infinity function equal to |s| for |s| >= delta.

    Its second derivative is a bump supported on [-delta, delta]. The
    normalized integral is tabulated once to within 1e-15.
    """
    s = np.asarray(s, dtype=float)
    x = np.minimum(np.abs(s) / delta, 1.0)
    out = delta * (x + _abs_correction(x))
    return np.where(np.abs(s) >= delta, np.abs(s), out)


def _smooth_abs_prime(s, delta: float):
    s = np.asarray(s, dtype=float)
    return 2.0 * smoothstep(0.5 * (np.clip(s / delta, -1.0, 1.0) + 1.0)) - 1.0


def smooth_min_radius(r1, r2, delta: float, iters: int = 60):
    """Radius t solving smax(t/r1, t/r2) = 1 with smax(a, b) = (a + b + |a-b|_delta)/2.

    smax is a convex, coordinatewise increasing smoothing of max, so blending
    two gauges this way keeps the body convex. Where the gauges differ by
    more than delta the result is exactly min(r1, r2).
    """
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    a1, a2 = 1.0 / r1, 1.0 / r2
    diff = a1 - a2
    t = np.minimum(r1, r2)
    active = np.abs(t * diff) < delta
    if not np.any(active):
        return t
    ta = t[active]
    s1, s2, dd = a1[active], a2[active], diff[active]
    for _ in range(iters):
        g = 0.5 * (ta * (s1 + s2) + smooth_abs(ta * dd, delta)) - 1.0
        dg = 0.5 * (s1 + s2 + dd * _smooth_abs_prime(ta * dd, delta))
        step = g / dg
        ta = ta - step
        # quadratic convergence: once steps reach roundoff one more is enough
        if np.all(np.abs(step) <= 1e-8 * ta):
            g = 0.5 * (ta * (s1 + s2) + smooth_abs(ta * dd, delta)) - 1.0
            ta = ta - g / (0.5 * (s1 + s2 + dd * _smooth_abs_prime(ta * dd, delta)))
            break
    t = t.copy()
    t[active] = ta
    return t


# ---------------------------------------------------------------------------
# piecewise profiles
# ---------------------------------------------------------------------------

class PiecewiseBody(RevolutionBody):
    """Body of revolution whose profile is the minimum of analytic pieces.

    ``pieces`` are callables defined on all of [0, pi/2]; on the interval
    between consecutive ``cuts`` only the corresponding piece is active.
    Convex corners (the case for intersections of convex bodies) are
    exactly the places where the active piece is the pointwise minimum.
    """

    def __init__(self, dim, piece_funcs: Sequence[Callable], cuts: Sequence[float], info: list, name: str):
        self.piece_funcs = list(piece_funcs)
        self.cuts = [float(c) for c in cuts]
        if len(self.cuts) != len(self.piece_funcs) - 1:
            raise DomainError("need one cut between each pair of pieces")
        super().__init__(dim, self._eval, self.cuts, pieces=info, smoothness="C0", name=name)

    def _eval(self, phi):
        phi = np.asarray(phi, dtype=float)
        out = np.empty_like(phi)
        edges = [-np.inf] + self.cuts + [np.inf]
        for f, lo, hi in zip(self.piece_funcs, edges[:-1], edges[1:]):
            m = (phi >= lo) & (phi < hi) if hi < np.inf else (phi >= lo)
            if np.any(m):
                out[m] = f(phi[m])
        return out


@dataclass(frozen=True)
class CylinderCapsParams:
    n: int
    lam: float

    def __post_init__(self):
        if self.n < 3:
            raise DomainError("dimension must be >= 3")
        if not 0.0 < self.lam < CYLINDER_RADIUS:
            raise DomainError("lambda must lie in (0, sqrt(2)/2)")

    @property
    def half_height(self) -> float:
        return CYLINDER_RADIUS - self.lam

    @property
    def rim_radius(self) -> float:
        return math.sqrt(0.5 + self.half_height ** 2)

    @property
    def rim_angle(self) -> float:
        return math.atan2(CYLINDER_RADIUS, self.half_height)

    @property
    def cap_parameter(self) -> float:
        """a in r^2 + a r cos(phi) = 1, fixed by passing through the rim."""
        r0 = self.rim_radius
        return (1.0 - r0) * (1.0 + r0) / self.half_height


@dataclass(frozen=True)
class SmoothingParams:
    blend_width: float = 0.05
    eps_strict: float = 0.0

    def __post_init__(self):
        if self.blend_width <= 0.0:
            raise DomainError("blend_width must be positive")
        if self.eps_strict < 0.0:
            raise DomainError("eps_strict must be >= 0")


def cap_radius(phi, a: float):
    """Root in (0, 1) of r^2 + a r cos(phi) = 1 (an s-geodesic sphere)."""
    c = a * np.cos(phi)
    return 2.0 / (c + np.sqrt(c * c + 4.0))


def wall_radius(phi, radius: float = CYLINDER_RADIUS):
    with np.errstate(divide="ignore"):
        return radius / np.sin(phi)


def make_cylinder_caps(params: CylinderCapsParams) -> PiecewiseBody:
    """Cylinder of radius sqrt(2)/2 about x_n closed by two s-geodesic caps."""
    a = params.cap_parameter
    phi0 = params.rim_angle
    info = [
        {"kind": "cap", "a": a, "range": [0.0, phi0]},
        {"kind": "wall", "radius": CYLINDER_RADIUS, "range": [phi0, HALF_PI]},
    ]
    return PiecewiseBody(
        params.n,
        [lambda phi: cap_radius(phi, a), wall_radius],
        [phi0],
        info,
        name=f"cylinder_caps(lambda={params.lam:g})",
    )


def smooth_edges(body: PiecewiseBody, params: SmoothingParams) -> RevolutionBody:
    """Round every corner of a piecewise profile inside a small angular window.

    At each cut the two adjacent pieces are merged by a smooth maximum of
    their gauges (Minkowski functionals), whose blending zone spans roughly
    ``blend_width`` radians on each side of the cut. Away from the zones the
    profile is untouched.
    """
    w = params.blend_width
    cuts = body.cuts
    ends = [0.0] + cuts + [HALF_PI]
    gaps = np.diff(ends)
    if w >= 0.5 * float(np.min(gaps)):
        raise DomainError("blend_width must be below half the distance between breakpoints")
    funcs = body.piece_funcs
    deltas, zones = [], []
    for i, c in enumerate(cuts):
        f1, f2 = funcs[i], funcs[i + 1]
        r1 = float(f1(np.array([c]))[0])
        r2 = float(f2(np.array([c]))[0])
        if abs(r1 - r2) > 1e-9 * max(r1, r2):
            raise DomainError(f"profile is discontinuous at phi={c:.6g}")
        # reflex corners cannot be rounded by a smooth maximum of gauges
        if not (float(f1(np.array([c + 0.5 * w]))[0]) >= float(f2(np.array([c + 0.5 * w]))[0])
                and float(f1(np.array([c - 0.5 * w]))[0]) <= float(f2(np.array([c - 0.5 * w]))[0])):
            raise DomainError(f"corner at phi={c:.6g} is not convex; smoothing would break convexity")

        def gap(phi, f1=f1, f2=f2):
            return 1.0 / f1(phi) - 1.0 / f2(phi)

        hstep = 1e-6
        slope = (gap(np.array([c + hstep]))[0] - gap(np.array([c - hstep]))[0]) / (2 * hstep)
        delta = abs(slope) * r1 * w
        deltas.append(delta)

        def edge(phi, f1=f1, f2=f2, delta=delta):
            t = min(float(f1(np.array([phi]))[0]), float(f2(np.array([phi]))[0]))
            return abs(t * float(gap(np.array([phi]))[0])) - delta

        lo = brentq(edge, ends[i], c)
        hi = brentq(edge, c, ends[i + 2])
        zones.append((lo, hi))

    def profile(phi):
        phi = np.asarray(phi, dtype=float)
        out = body.profile(phi)
        for i, (lo, hi) in enumerate(zones):
            m = (phi > lo) & (phi < hi)
            if np.any(m):
                out[m] = smooth_min_radius(funcs[i](phi[m]), funcs[i + 1](phi[m]), deltas[i])
        return out

    breaks = [z for pair in zones for z in pair]
    info = [{"kind": "smoothed", "of": body.name, "blend_width": w,
             "zones": [list(z) for z in zones], "deltas": deltas}] + body.pieces
    out = RevolutionBody(body.dim, profile, breaks, pieces=info, smoothness="Cinf",
                         name=f"smooth({body.name})")
    out.blend_zones = zones
    return out


def strictify(body: StarBody, eps_strict: float, mode: str = "radial") -> StarBody:
    """Enlarge a body slightly.

    ``mode="radial"`` adds eps to the radial function (rho + eps).
    ``mode="gauge"`` adds eps |x| to the Minkowski functional instead, i.e.
    rho -> rho / (1 + eps rho); the gauge of the result is a sum of a norm
    and a strictly convex norm, so it is strictly convex whenever the input
    is convex.
    """
    if eps_strict < 0.0:
        raise DomainError("eps_strict must be >= 0")
    if mode == "radial":
        def f(r):
            return r + eps_strict
    elif mode == "gauge":
        def f(r):
            return r / (1.0 + eps_strict * r)
    else:
        raise DomainError(f"unknown strictify mode {mode!r}")

    if isinstance(body, RevolutionBody):
        out = RevolutionBody(body.dim, lambda phi: f(body.profile(phi)), body.breakpoints,
                             pieces=[{"kind": "strictify", "mode": mode, "eps": eps_strict}] + body.pieces,
                             smoothness=body.smoothness, name=f"strict({body.name})")
        if hasattr(body, "blend_zones"):
            out.blend_zones = body.blend_zones
        grid = np.linspace(0.0, HALF_PI, 2001)
        if np.max(out.profile(grid)) >= 1.0:
            raise DomainError("strictified body leaves the unit ball")
        return out
    out = StarBody(body.dim, lambda th: f(body.radial(th)), body.smoothness, f"strict({body.name})")
    out.validate()
    return out


def make_lq_ball(n: int, q: float, dilation: float) -> StarBody:
    """dilation times the unit ball of l^q_n, radial function dilation / ||theta||_q."""
    if q < 2.0:
        raise DomainError("q must be >= 2")
    if dilation <= 0.0:
        raise DomainError("dilation must be positive")
    # ||theta||_q is smallest on the diagonal: n^(1/q - 1/2)
    if dilation * n ** (0.5 - 1.0 / q) >= 1.0:
        raise DomainError("dilated l^q ball leaves the unit ball")
    even_int = float(q).is_integer() and int(q) % 2 == 0

    def radial(theta):
        return dilation / np.sum(np.abs(theta) ** q, axis=-1) ** (1.0 / q)

    return StarBody(n, radial, "Cinf" if even_int else "C2", name=f"l{q:g}_ball({dilation:g})")


@dataclass
class MBody:
    M: RevolutionBody
    N: float
    L: RevolutionBody


def build_M_for_FT(params: CylinderCapsParams, smoothing: SmoothingParams) -> MBody:
    """Smooth the cylinder-caps body, optionally strictify it (gauge form) and
    push it forward. N is the half-height of M along the axis."""
    L = smooth_edges(make_cylinder_caps(params), smoothing)
    if smoothing.eps_strict > 0.0:
        L = strictify(L, smoothing.eps_strict, mode="gauge")
    M = push_body(L)
    N = float(M.profile(np.array([0.0]))[0])
    return MBody(M, N, L)


def hyperbola_radius(z):
    """x_1 = (sqrt 2 + sqrt(2 + 4 z^2)) / 2: image of the cylinder wall."""
    z = np.asarray(z, dtype=float)
    return 0.5 * (math.sqrt(2.0) + np.sqrt(2.0 + 4.0 * z * z))
