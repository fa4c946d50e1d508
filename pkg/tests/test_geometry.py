import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperbp.geometry import (
    DomainError,
    RevolutionBody,
    StarBody,
    Subspace,
    axis_subspaces,
    ball,
    e_convexity_check,
    hyperbolic_volume,
    map_forward,
    map_inverse,
    normalize,
    pull_body,
    push_body,
    radial_kernel_integral,
    radial_kernel_inverse,
    section_volume,
    subspace_sample,
)
from hyperbp.quadrature import QuadratureSpec, sphere_area, sphere_rule
from hyperbp.bodies import CylinderCapsParams, make_cylinder_caps


# ---------------------------------------------------------------------------
# radial kernel
# ---------------------------------------------------------------------------

def test_kernel_examples():
    assert radial_kernel_integral(0.0, 5) == 0.0
    assert radial_kernel_integral(1 / math.sqrt(2), 2) == pytest.approx(0.5, abs=1e-12)
    assert radial_kernel_integral(0.5, 1) == pytest.approx(math.atanh(0.5), abs=1e-12)


@pytest.mark.parametrize("rho", [-0.1, 1.0, 1.5, float("nan")])
def test_kernel_domain(rho):
    with pytest.raises(DomainError):
        radial_kernel_integral(rho, 2)


def _m3(rho):
    # int_0^rho r^2/(1-r^2)^3 dr = rho(1+rho^2)/(8(1-rho^2)^2) - atanh(rho)/8
    return rho * (1 + rho * rho) / (8 * (1 - rho * rho) ** 2) - 0.125 * math.atanh(rho)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 0.999), st.sampled_from([1, 2, 3]))
def test_kernel_matches_antiderivative(rho, m):
    exact = {1: math.atanh(rho), 2: 0.5 / (1 - rho * rho) - 0.5, 3: _m3(rho)}[m]
    assert radial_kernel_integral(rho, m) == pytest.approx(exact, rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-6, 0.998), st.floats(1e-6, 0.998), st.integers(1, 6))
def test_kernel_strictly_increasing(a, b, m):
    if a == b:
        return
    lo, hi = min(a, b), max(a, b)
    assert radial_kernel_integral(lo, m) < radial_kernel_integral(hi, m)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-4, 0.995), st.integers(1, 6))
def test_kernel_inverse_roundtrip(rho, m):
    v = radial_kernel_integral(rho, m)
    assert radial_kernel_inverse(v, m) == pytest.approx(rho, rel=1e-13)


# ---------------------------------------------------------------------------
# volumes
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("R", [0.5, 1.0, 2.0])
def test_ball_volume_closed_form(R):
    r = hyperbolic_volume(ball(3, math.tanh(R / 2)))
    exact = math.pi * (math.sinh(2 * R) - 2 * R)
    assert r.value == pytest.approx(exact, rel=1e-10)
    assert abs(r.value - exact) <= max(r.error_estimate, 1e-12 * exact)


def test_tiny_ball_volume():
    assert hyperbolic_volume(ball(3, 1e-6)).value < 1e-15


def test_volume_self_convergence():
    q = QuadratureSpec()
    coarse = hyperbolic_volume(ball(3, 0.9), q)
    fine = hyperbolic_volume(ball(3, 0.9), q.refined())
    assert abs(fine.value - coarse.value) <= coarse.error_estimate + 1e-12 * coarse.value


def test_general_star_body_path_matches_revolution_path():
    b = ball(3, 0.6)
    plain = StarBody(3, lambda th: np.full(th.shape[:-1], 0.6))
    assert hyperbolic_volume(plain).value == pytest.approx(hyperbolic_volume(b).value, rel=1e-12)


def test_section_volume_examples():
    b = ball(3, 0.5)
    for H in subspace_sample(3, 2, 3, seed=1) + axis_subspaces(3, 2):
        assert section_volume(b, H).value == pytest.approx(4 * math.pi / 3, rel=1e-12)
    H1 = subspace_sample(3, 1, 1, seed=2)[0]
    assert section_volume(b, H1).value == pytest.approx(4 * math.atanh(0.5), rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 5), st.floats(0.05, 0.97), st.integers(0, 10_000))
def test_section_kernel_consistency(n, rho, seed):
    d = 1 + seed % (n - 1)
    H = subspace_sample(n, d, 1, seed)[0]
    r = section_volume(ball(n, rho), H)
    exact = sphere_area(d) * 2 ** d * radial_kernel_integral(rho, d)
    assert abs(r.value - exact) <= max(r.error_estimate, 1e-11 * exact)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 0.8), st.floats(0.0, 0.15), st.integers(0, 1000))
def test_volume_monotone(r0, dr, seed):
    small = RevolutionBody(3, lambda phi: r0 * (1 + 0.1 * np.cos(phi) ** 2))
    big = RevolutionBody(3, lambda phi: (r0 + dr) * (1 + 0.1 * np.cos(phi) ** 2))
    vs, vb = hyperbolic_volume(small), hyperbolic_volume(big)
    assert vs.value <= vb.value + vs.error_estimate + vb.error_estimate
    H = subspace_sample(3, 2, 1, seed)[0]
    ss, sb = section_volume(small, H), section_volume(big, H)
    assert ss.value <= sb.value + ss.error_estimate + sb.error_estimate


def test_quadrature_weights():
    for d in (2, 3, 4):
        pts, w = sphere_rule(d, 16)
        assert np.all(w > 0)
        assert w.sum() == pytest.approx(sphere_area(d), rel=1e-10)
        assert np.allclose(np.linalg.norm(pts, axis=-1), 1.0, atol=1e-12)
    with pytest.raises(ValueError):
        QuadratureSpec(radial_nodes=4)


# ---------------------------------------------------------------------------
# the map
# ---------------------------------------------------------------------------

def test_map_examples():
    assert map_forward(0.5) == pytest.approx(2 / 3, rel=1e-15)
    assert map_inverse(2 / 3) == pytest.approx(0.5, rel=1e-15)
    assert map_forward((math.sqrt(5) - 1) / 2) == pytest.approx(1.0, rel=1e-14)
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(DomainError):
            map_forward(bad)
    with pytest.raises(DomainError):
        map_inverse(0.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-8, 1 - 1e-8))
def test_map_roundtrip(x):
    assert map_inverse(map_forward(x)) == pytest.approx(x, rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-6, 0.999), st.floats(1e-6, 0.999))
def test_map_increasing(a, b):
    if a < b:
        assert map_forward(a) < map_forward(b)


def test_push_pull():
    b = ball(3, 0.5)
    pb = push_body(b)
    assert float(pb.profile(np.array([0.3]))[0]) == pytest.approx(2 / 3, rel=1e-15)
    body = make_cylinder_caps(CylinderCapsParams(3, 0.1))
    th = normalize(np.random.default_rng(0).standard_normal((500, 3)))
    assert np.array_equal(push_body(body).radial(th), map_forward(body.radial(th)))
    assert np.allclose(pull_body(push_body(body)).radial(th), body.radial(th), rtol=1e-14, atol=0)


def test_s_geodesic_lines_map_to_lines():
    from hyperbp.bodies import cap_radius

    phi = np.linspace(0.0, 1.45, 500)
    for a in (2.5, 3.0, 5.0):
        r = cap_radius(phi, a)
        assert np.max(np.abs(r * r + a * r * np.cos(phi) - 1)) < 1e-14
        assert np.max(np.abs(map_forward(r) - 1 / (a * np.cos(phi)))) < 1e-12


# ---------------------------------------------------------------------------
# subspaces and bodies
# ---------------------------------------------------------------------------

def test_subspace_sample():
    a = subspace_sample(5, 2, 7, seed=3)
    b = subspace_sample(5, 2, 7, seed=3)
    assert len(a) == 7
    for H, K in zip(a, b):
        assert np.array_equal(H.basis, K.basis)
        assert np.allclose(H.basis @ H.basis.T, np.eye(2), atol=1e-12)
        C = H.complement()
        assert C.dim == 3
        assert np.allclose(H.basis @ C.basis.T, 0, atol=1e-12)
    with pytest.raises(DomainError):
        subspace_sample(3, 3, 1)
    with pytest.raises(DomainError):
        subspace_sample(3, 1, 0)


def test_subspace_rejects_non_orthonormal():
    with pytest.raises(DomainError):
        Subspace(np.array([[1.0, 0, 0], [1.0, 1.0, 0]]))


def test_star_body_validation():
    with pytest.raises(DomainError):
        StarBody(3, lambda th: np.full(th.shape[:-1], 1.2)).validate()
    with pytest.raises(DomainError):
        StarBody(3, lambda th: 0.5 + 0.1 * th[..., 0]).validate()
    ball(3, 0.5).validate()


# ---------------------------------------------------------------------------
# convexity
# ---------------------------------------------------------------------------

def test_convexity_examples():
    assert e_convexity_check(ball(3, 0.5)).convex
    L = make_cylinder_caps(CylinderCapsParams(3, 0.1))
    assert e_convexity_check(L, samples=2000).convex
    wavy = RevolutionBody(3, lambda phi: 0.5 + 0.2 * np.cos(4 * phi))
    rep = e_convexity_check(wavy)
    assert not rep.convex
    p, q = rep.witness
    mid = 0.5 * (np.asarray(p) + np.asarray(q))
    r = np.linalg.norm(mid)
    assert r > float(wavy.radial(mid / r))


def test_convexity_needs_samples():
    with pytest.raises(DomainError):
        e_convexity_check(ball(3, 0.5), samples=10)
