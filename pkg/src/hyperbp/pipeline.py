"""Pipeline stages shared by the command line and the acceptance suite.

Every stage takes a validated RunConfig and returns plain data plus the
objects the next stage needs. Stage timings go to the logger only, so the
returned payloads are deterministic for a fixed config.
"""
from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
import logging
import math
import time

import numpy as np

from . import __version__
from .bodies import CylinderCapsParams, MBody, SmoothingParams, build_M_for_FT, hyperbola_radius, cap_radius
from .config import RunConfig
from .counterexample import (
    Bump,
    BumpSpec,
    CertificateReport,
    DensityF,
    EpsilonChoice,
    NegativeSet,
    PerturbationG,
    build_bump,
    build_g,
    build_K,
    certify,
    choose_epsilon,
    elementary_inequality_check,
    find_negative_set,
    zhang_check,
)
from .geometry import HALF_PI, RevolutionBody, ball, e_convexity_check, map_forward, subspace_sample
from .harmonics import parseval_residual, perturbed_ball, subspace_ft_residual
from .quadrature import QuadratureSpec
from .sections import FtProfile, pd_scan

log = logging.getLogger("hyperbp")


@contextmanager
def stage(name: str, timings: dict):
    t0 = time.perf_counter()
    log.info("%s: start", name)
    yield
    dt = time.perf_counter() - t0
    timings[name] = dt
    log.info("%s: done in %.2f s", name, dt)


def quad_of(cfg: RunConfig) -> QuadratureSpec:
    return QuadratureSpec(cfg.quadrature.radial_nodes, cfg.quadrature.sphere_nodes)


def build_bodies(cfg: RunConfig) -> MBody:
    b = cfg.body
    return build_M_for_FT(CylinderCapsParams(b.n, b.lam), SmoothingParams(b.blend_width, b.eps_strict))


def scan_body(cfg: RunConfig, bodies: MBody = None) -> RevolutionBody:
    if cfg.scan.body == "ball":
        return ball(cfg.n, cfg.scan.ball_radius)
    return (bodies or build_bodies(cfg)).M


def run_scan(cfg: RunConfig, body: RevolutionBody) -> FtProfile:
    return pd_scan(body, cfg.k, angle_count=cfg.scan.angle_count, quad=quad_of(cfg))


def bump_spec(cfg: RunConfig, omega: NegativeSet) -> BumpSpec:
    u = cfg.bump
    c = u.center
    if u.half_width is not None:
        return BumpSpec(c, u.half_width, u.amplitude)
    for lo, hi in omega.intervals:
        if lo <= c <= hi:
            if c == 0.0:
                room = hi
            elif c == HALF_PI:
                room = HALF_PI - lo
            else:
                room = min(c - lo, hi - c)
            if room <= 0.0:
                break
            return BumpSpec(c, u.half_width_fraction * room, u.amplitude)
    raise ValueError(f"bump centre {c} does not lie inside the negative set {omega.intervals}")


@dataclass
class Perturbation:
    omega: NegativeSet
    bump: Bump
    g: PerturbationG
    f: DensityF
    zhang: dict


def run_perturb(cfg: RunConfig, bodies: MBody, profile: FtProfile, timings: dict) -> Perturbation:
    quad = quad_of(cfg)
    with stage("negative set", timings):
        omega = find_negative_set(profile, bodies.M, quad, cfg.scan.xtol, cfg.scan.ft_rtol)
        log.info("negative set %s", omega.intervals)
    with stage("perturbation g", timings):
        bump = build_bump(omega, bump_spec(cfg, omega))
        g = build_g(bump, cfg.n, cfg.k, cfg.perturb.max_degree, quad, tail_tol=cfg.perturb.tail_tol)
        log.info("g: degree %d, tail %.3g", g.expansion.max_degree, g.expansion.tail_ratio)
    with stage("zhang check", timings):
        f = DensityF(bodies.L, cfg.k)
        planes = subspace_sample(cfg.n, cfg.n - cfg.k, cfg.perturb.zhang_planes, cfg.certify.seed)
        z = zhang_check(g, f, planes, quad, cfg.perturb.zhang_tol)
        log.info("pairing %.6g, max section integral %.3g", z["pairing"], z["max_section_integral"])
    return Perturbation(omega, bump, g, f, z)


@dataclass
class CounterexampleRun:
    bodies: MBody
    profile: FtProfile
    perturbation: Perturbation
    choice: EpsilonChoice
    K: RevolutionBody
    report: CertificateReport
    timings: dict

    def payload(self, cfg: RunConfig) -> dict:
        p = self.perturbation
        return {
            "config": cfg.to_dict(),
            "version": __version__,
            "scan": self.profile.to_dict(),
            "negative_set": p.omega.to_dict(),
            "bump": {"center": p.bump.spec.center_angle, "half_width": p.bump.spec.half_width,
                     "amplitude": p.bump.spec.amplitude},
            "g": {"max_degree": p.g.expansion.max_degree, "tail_ratio": p.g.expansion.tail_ratio,
                  "scale": p.g.scale},
            "zhang": p.zhang,
            "epsilon": self.choice.to_dict(),
            "certificate": self.report.to_dict(),
        }


def run_counterexample(cfg: RunConfig) -> CounterexampleRun:
    timings: dict = {}
    quad = quad_of(cfg)
    with stage("construct", timings):
        bodies = build_bodies(cfg)
    with stage("scan", timings):
        profile = run_scan(cfg, bodies.M)
    pert = run_perturb(cfg, bodies, profile, timings)
    with stage("choose epsilon", timings):
        choice = choose_epsilon(bodies.L, pert.g, cfg.perturb.eps_max,
                                convexity_samples=cfg.certify.convexity_samples, seed=cfg.certify.seed)
        log.info("epsilon %.6g after %d trial(s)", choice.eps, len(choice.trace))
    with stage("certify", timings):
        K = build_K(bodies.L, pert.g, choice.eps)
        report = certify(K, bodies.L, cfg.k, cfg.certify.plane_count, quad, cfg.certify.seed, g=pert.g,
                         eps=choice.eps, f=pert.f, workers=cfg.certify.workers,
                         convexity_samples=cfg.certify.convexity_samples)
        log.info("verdict %s %s", report.verdict, report.reason)
    return CounterexampleRun(bodies, profile, pert, choice, K, report, timings)


# ---------------------------------------------------------------------------
# lemma residual suite
# ---------------------------------------------------------------------------

def map_residuals() -> dict:
    """The map r -> r/(1-r^2) sends r^2 + a r cos(phi) = 1 onto r = 1/(a cos(phi))
    and the cylinder of radius sqrt(2)/2 onto a rotated hyperbola."""
    phi = np.linspace(0.0, 1.4, 401)
    curves = 0.0
    for a in (2.5, 3.0, 5.0):
        r = map_forward(cap_radius(phi, a))
        curves = max(curves, float(np.max(np.abs(r - 1.0 / (a * np.cos(phi))))))
    # the wall is inside the unit ball only for phi > pi/4
    phi = np.linspace(0.25 * math.pi + 1e-3, HALF_PI, 401)
    rw = map_forward(math.sqrt(0.5) / np.sin(phi))
    x1, xn = rw * np.sin(phi), rw * np.cos(phi)
    hyper = float(np.max(np.abs(x1 - hyperbola_radius(xn))))
    return {"s_geodesic_lines": curves, "wall_hyperbola": hyper}


def elementary_fuzz(samples: int = 10_000, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(samples):
        n = int(rng.integers(3, 6))
        k = int(rng.integers(1, n - 1))
        a, b = rng.uniform(1e-6, 1.0 - 1e-6, 2)
        worst = min(worst, elementary_inequality_check(float(a), float(b), n, k))
    return worst


def run_checks(cfg: RunConfig, dims=(3, 4, 5), fuzz_samples: int = 10_000) -> dict:
    quad = quad_of(cfg)
    out = {"parseval": [], "subspace": []}
    for n in dims:
        bodies = [("ball", ball(n, 0.5)), ("perturbed_m2", perturbed_ball(n, 0.6, 2, 0.2, 1.0)),
                  ("perturbed_m4", perturbed_ball(n, 0.5, 4, -0.1, 2.0))]
        for name, K in bodies:
            for lname, L in bodies:
                r = parseval_residual(K, L, 1.0, quad)
                out["parseval"].append({"n": n, "K": name, "L": lname, "p": 1.0, "residual": r})
            for k in range(1, n - 1):
                H = subspace_sample(n, n - k, 1, seed=cfg.certify.seed + k)[0]
                r = subspace_ft_residual(K, k, H, quad)
                out["subspace"].append({"n": n, "body": name, "k": k, "residual": r})
    out["elementary_min_residual"] = elementary_fuzz(fuzz_samples, cfg.certify.seed)
    out["maps"] = map_residuals()
    worst_p = max(e["residual"] for e in out["parseval"])
    worst_s = max(e["residual"] for e in out["subspace"])
    out["passed"] = bool(worst_p < 1e-6 and worst_s < 1e-6 and out["elementary_min_residual"] >= -1e-12
                         and out["maps"]["s_geodesic_lines"] < 1e-12 and out["maps"]["wall_hyperbola"] < 1e-10)
    return out


def convexity_summary(body: RevolutionBody, seed: int) -> dict:
    return e_convexity_check(body, seed=seed).to_dict()
