"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in
the "acceptance criteria" section of the summary) or as a script.
"""
from contextlib import contextmanager
import math
import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from hyperbp import cli
from hyperbp.bodies import CylinderCapsParams, SmoothingParams, build_M_for_FT
from hyperbp.geometry import ball, hyperbolic_volume, section_volume, subspace_sample, axis_subspaces
from hyperbp.harmonics import perturbed_ball, perturbed_ball_ft
from hyperbp.pipeline import map_residuals, run_checks, run_counterexample
from hyperbp.quadrature import ball_volume
from hyperbp.sections import (
    ParallelSectionFn,
    a_derivative_at_zero,
    axis_direction,
    ft_norm_power,
    ft_norm_power_detail,
)


@contextmanager
def criterion(num: int, title: str):
    info = {"detail": ""}
    try:
        yield info
    except BaseException:
        line = f"[FAIL] criterion {num}: {title} {info['detail']}".rstrip()
        ACCEPTANCE_LINES[num] = line
        print(line)
        raise
    line = f"[PASS] criterion {num}: {title} {info['detail']}".rstrip()
    ACCEPTANCE_LINES[num] = line
    print(line)


def test_criterion_1_volume_oracle():
    with criterion(1, "closed-form ball volumes and sections") as info:
        t0 = time.perf_counter()
        worst = 0.0
        for R in (0.5, 1.0, 2.0):
            rho = math.tanh(R / 2)
            b = ball(3, rho)
            v = hyperbolic_volume(b).value
            worst = max(worst, abs(v / (math.pi * (math.sinh(2 * R) - 2 * R)) - 1))
            exact = 4 * math.pi * rho ** 2 / (1 - rho ** 2)
            for H in axis_subspaces(3, 2) + subspace_sample(3, 2, 3, seed=0):
                worst = max(worst, abs(section_volume(b, H).value / exact - 1))
        dt = time.perf_counter() - t0
        info["detail"] = f"(max rel err {worst:.2e}, {dt:.2f} s)"
        assert worst < 1e-8
        assert dt < 1.0


def test_criterion_2_map_fidelity():
    with criterion(2, "map sends s-geodesic lines to lines and the wall to the hyperbola") as info:
        r = map_residuals()
        info["detail"] = f"(lines {r['s_geodesic_lines']:.2e}, wall {r['wall_hyperbola']:.2e})"
        assert r["s_geodesic_lines"] < 1e-12
        assert r["wall_hyperbola"] < 1e-10


def test_criterion_3_second_derivative():
    with criterion(3, "A''(0) of M equals C_n (n-1) (2 sqrt 2)^(n-1)") as info:
        worst = 0.0
        for n in (3, 4, 5):
            M = build_M_for_FT(CylinderCapsParams(n, 0.05), SmoothingParams()).M
            A = ParallelSectionFn(M, axis_direction(n, 0.0))
            exact = ball_volume(n - 1) / 2 ** (n - 1) * (n - 1) * (2 * math.sqrt(2)) ** (n - 1)
            worst = max(worst, abs(a_derivative_at_zero(A, 2) / exact - 1))
        info["detail"] = f"(max rel err {worst:.2e})"
        assert worst < 1e-6


def test_criterion_4_riesz_cross_validation():
    with criterion(4, "Fourier transform matches Riesz constant and harmonic multipliers") as info:
        r = ft_norm_power_detail(ball(3, 1.0), 1, axis_direction(3, 0.4))
        odd_err = abs(r.value / (4 * math.pi) - 1)
        even_err = 0.0
        # the even branch handles n - 1 - q even
        for n, q, m, delta in ((4, 1, 2, 0.2), (5, 2, 2, -0.15), (5, 2, 4, 0.1), (6, 1, 2, 0.1), (6, 3, 2, 0.1)):
            body = perturbed_ball(n, 0.6, m, delta, float(q))
            for angle in (0.0, 0.7):
                d = ft_norm_power_detail(body, q, axis_direction(n, angle))
                assert d.branch == "even"
                exact = float(perturbed_ball_ft(n, 0.6, m, delta, q, angle))
                even_err = max(even_err, abs(d.value / exact - 1))
        info["detail"] = f"(odd branch {odd_err:.2e}, even branch {even_err:.2e})"
        assert r.branch == "odd"
        assert odd_err < 1e-6 and even_err < 1e-6


def test_criterion_5_negativity(m_bodies):
    with criterion(5, "FT of ||x||_M^{-k} negative on the axis") as info:
        lams = (0.2, 0.1, 0.05, 0.02)
        vals = [ft_norm_power(m_bodies[lam].M, 1, axis_direction(3, 0.0)) for lam in lams]
        Ns = [m_bodies[lam].N for lam in lams]
        M5 = build_M_for_FT(CylinderCapsParams(5, 0.05), SmoothingParams()).M
        d = ft_norm_power_detail(M5, 2, axis_direction(5, 0.0))
        a2 = a_derivative_at_zero(ParallelSectionFn(M5, axis_direction(5, 0.0)), 2)
        err5 = abs(d.value / (-16 * math.pi ** 3) - 1)
        info["detail"] = (f"(n=3: N={[round(x, 2) for x in Ns]} -> FT={[round(v, 2) for v in vals]}; "
                          f"n=5: {d.value:.6f} vs -16 pi^3, rel err {err5:.2e})")
        assert vals[2] < 0 and vals[3] < 0
        assert all(b > a for a, b in zip(Ns, Ns[1:]))
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert d.branch == "even" and d.value < 0
        assert d.value == pytest.approx(-2 * math.pi * a2, rel=1e-6)
        assert err5 < 1e-6


def test_criterion_6_lemma_residuals(pipeline_cfg):
    with criterion(6, "Parseval, subspace identity and elementary inequality") as info:
        res = run_checks(pipeline_cfg, dims=(3, 4, 5), fuzz_samples=10_000)
        wp = max(e["residual"] for e in res["parseval"])
        ws = max(e["residual"] for e in res["subspace"])
        info["detail"] = (f"(parseval {wp:.2e}, subspace {ws:.2e}, "
                          f"elementary min {res['elementary_min_residual']:.2e})")
        assert wp < 1e-6 and ws < 1e-6
        assert res["elementary_min_residual"] >= -1e-12


def test_criterion_7_zhang(ce_run):
    with criterion(7, "Zhang conditions for g built from the negative set") as info:
        z = ce_run.perturbation.zhang
        info["detail"] = (f"(pairing {z['pairing']:.4g}, max section integral "
                          f"{z['max_section_integral']:.2e} over {z['planes']} planes)")
        assert z["planes"] == 500
        assert z["pairing"] > 0
        assert z["max_section_integral"] <= 1e-9


def test_criterion_8_end_to_end(ce_run):
    with criterion(8, "n=3, k=1 counterexample certified") as info:
        rep = ce_run.report
        worst = min(p.margin + 1e-8 + p.error for p in rep.planes)
        info["detail"] = (f"(verdict {rep.verdict}, {len(rep.planes)} planes, min slack {worst:.2e}, "
                          f"gap {rep.volume_gap:.3e} +- {rep.volume_gap_error:.1e}, "
                          f"eps {ce_run.choice.eps:.3g}, {ce_run.elapsed:.0f} s)")
        assert rep.certified, rep.reason
        assert all(p.vol_K <= p.vol_L + 1e-8 + p.error for p in rep.planes)
        assert rep.volume_gap > 5 * rep.volume_gap_error
        assert rep.convex_K and rep.convex_L
        assert ce_run.elapsed < 600


def test_criterion_9_determinism(ce_run, pipeline_cfg):
    with criterion(9, "repeated run gives a byte-identical certificate payload") as info:
        again = run_counterexample(pipeline_cfg)
        a = cli.dumps(ce_run.payload(pipeline_cfg))
        b = cli.dumps(again.payload(pipeline_cfg))
        info["detail"] = f"({len(a)} bytes)"
        assert a.encode() == b.encode()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
