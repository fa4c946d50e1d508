import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperbp.geometry import DomainError, ball, subspace_sample
from hyperbp.harmonics import (
    HarmonicExpansion,
    auto_expand,
    ft_homogeneous,
    gegenbauer_expand,
    harmonic_multiplier,
    parseval_residual,
    perturbed_ball,
    riesz_constant,
    subspace_ft_residual,
    zonal_basis,
)
from hyperbp.quadrature import sphere_area
from hyperbp.counterexample import Bump, BumpSpec


# ---------------------------------------------------------------------------
# multipliers
# ---------------------------------------------------------------------------

def test_multiplier_examples():
    assert harmonic_multiplier(3, 0, 1.0) == pytest.approx(4 * math.pi, rel=1e-14)
    assert harmonic_multiplier(3, 0, 2.0) == pytest.approx(2 * math.pi ** 2, rel=1e-14)
    assert riesz_constant(3, 1.0) == harmonic_multiplier(3, 0, 1.0)
    for bad in (0.0, 3.0, -1.0):
        with pytest.raises(DomainError):
            harmonic_multiplier(3, 0, bad)
    with pytest.raises(DomainError):
        harmonic_multiplier(3, 1, 1.0)


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 8), st.integers(0, 20), st.floats(0.05, 0.95))
def test_multiplier_sign_and_inversion(n, half_m, t):
    m, p = 2 * half_m, t * n
    c = harmonic_multiplier(n, m, p)
    assert math.copysign(1, c) == (-1) ** half_m
    # applying the transform twice gives (2 pi)^n
    assert c * harmonic_multiplier(n, m, n - p) == pytest.approx((2 * math.pi) ** n, rel=1e-11)


# ---------------------------------------------------------------------------
# zonal expansions
# ---------------------------------------------------------------------------

def test_zonal_basis_orthonormal():
    from hyperbp.quadrature import piecewise_gauss

    for n in (3, 4, 5):
        phi, w = piecewise_gauss([0.0, math.pi / 2], 64)
        Y = zonal_basis(n, [0, 2, 4, 6], np.cos(phi))
        G = (2 * sphere_area(n - 1) * w * np.sin(phi) ** (n - 2) * Y) @ Y.T
        assert np.allclose(G, np.eye(4), atol=1e-12)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_expand_constant(n):
    e = gegenbauer_expand(lambda phi: np.ones_like(phi), n, 8)
    assert e.coeffs[0] == pytest.approx(math.sqrt(sphere_area(n)), rel=1e-13)
    assert max(abs(e.coeffs[m]) for m in (2, 4, 6, 8)) < 1e-13
    phi = np.linspace(0, math.pi, 50)
    assert np.allclose(e(phi), 1.0, atol=1e-13)


def test_expand_recovers_single_harmonic():
    n = 4
    target = lambda phi: 3.0 * zonal_basis(n, [2], np.cos(phi))[0]
    e = gegenbauer_expand(target, n, 10)
    assert e.coeffs[2] == pytest.approx(3.0, rel=1e-13)
    assert abs(e.coeffs[0]) < 1e-13 and abs(e.coeffs[4]) < 1e-13
    assert not e.warnings


def test_expand_rejects_odd_degree():
    with pytest.raises(DomainError):
        gegenbauer_expand(np.cos, 3, 5)
    with pytest.raises(DomainError):
        HarmonicExpansion(3, {1: 1.0})


def test_bump_round_trip():
    bump = Bump(BumpSpec(0.0, 0.7))
    e = gegenbauer_expand(bump, 3, 768, breakpoints=bump.breakpoints, tail_tol=1e-8)
    phi = np.linspace(0, math.pi, 3001)
    assert np.max(np.abs(e(phi) - bump(phi))) < 1e-9
    assert e.tolerance < 1e-9


def test_truncation_warning():
    bump = Bump(BumpSpec(0.0, 0.7))
    e = gegenbauer_expand(bump, 3, 32, breakpoints=bump.breakpoints, tail_tol=1e-8)
    assert e.warnings and "raise max_degree" in e.warnings[0]
    assert auto_expand(lambda p: 1 + np.cos(p) ** 2, 3).max_degree <= 32


def test_expansion_inner_matches_quadrature():
    n = 3
    a = gegenbauer_expand(lambda p: np.cos(p) ** 2, n, 8)
    b = gegenbauer_expand(lambda p: 1 + np.cos(p) ** 4, n, 8)
    # int_{S^2} cos^2 (1 + cos^4) = 2 pi (2/3 + 2/7)
    assert a.inner(b) == pytest.approx(2 * math.pi * (2 / 3 + 2 / 7), rel=1e-12)


def test_ft_homogeneous_scales_degrees():
    e = HarmonicExpansion(5, {0: 1.0, 2: 2.0})
    f = ft_homogeneous(e, 2.0)
    assert f.coeffs[0] == pytest.approx(harmonic_multiplier(5, 0, 2.0))
    assert f.coeffs[2] == pytest.approx(2 * harmonic_multiplier(5, 2, 2.0))


# ---------------------------------------------------------------------------
# Parseval and the subspace identity
# ---------------------------------------------------------------------------

def _bodies(n):
    return [ball(n, 0.5), perturbed_ball(n, 0.6, 2, 0.2, 1.0), perturbed_ball(n, 0.5, 4, -0.1, 2.0)]


@pytest.mark.parametrize("n", [3, 4, 5])
def test_parseval_residuals(n):
    bodies = _bodies(n)
    for K in bodies:
        for L in bodies:
            for p in (1.0, n / 2):
                assert parseval_residual(K, L, p) < 1e-10


def test_parseval_swap_symmetry():
    K, L = _bodies(4)[1:]
    a = parseval_residual(K, L, 1.0)
    b = parseval_residual(L, K, 3.0)
    assert a < 1e-10 and b < 1e-10


def test_parseval_through_sections():
    K = perturbed_ball(3, 0.6, 2, 0.2, 1.0)
    L = ball(3, 0.5)
    assert parseval_residual(K, L, 1.0, ft_source="sections", nodes=12) < 1e-6
    with pytest.raises(DomainError):
        parseval_residual(K, L, 1.5, ft_source="sections")


@pytest.mark.parametrize("n", [3, 4, 5])
def test_subspace_residuals(n):
    for L in _bodies(n):
        for k in range(1, n - 1):
            for H in subspace_sample(n, n - k, 3, seed=k):
                assert subspace_ft_residual(L, k, H) < 1e-10


def test_subspace_dimension_checked():
    H = subspace_sample(4, 2, 1, seed=0)[0]
    with pytest.raises(DomainError):
        subspace_ft_residual(ball(4, 0.5), 1, H)
