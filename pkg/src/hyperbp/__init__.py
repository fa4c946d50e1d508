"""Hyperbolic sections of convex bodies: volumes in the Poincare ball, Fourier
transforms of norm powers through parallel sections, and a numerically
certified pair of bodies whose sections compare one way and whose volumes
compare the other."""
__version__ = "0.1.0"

from .geometry import (
    DomainError,
    RevolutionBody,
    StarBody,
    Subspace,
    ball,
    e_convexity_check,
    hyperbolic_volume,
    map_forward,
    map_inverse,
    pull_body,
    push_body,
    radial_kernel_integral,
    radial_kernel_inverse,
    section_volume,
)
from .quadrature import QuadratureSpec
from .bodies import CylinderCapsParams, SmoothingParams, build_M_for_FT, make_cylinder_caps, smooth_edges, strictify
from .sections import ConvergenceError, FtProfile, ft_norm_power, parallel_section, pd_scan
from .harmonics import HarmonicExpansion, gegenbauer_expand, ft_homogeneous, harmonic_multiplier
from .counterexample import (
    BumpSpec,
    CertificateReport,
    DensityF,
    NegativeSet,
    PerturbationG,
    build_bump,
    build_g,
    build_K,
    certify,
    choose_epsilon,
    elementary_inequality_check,
    find_negative_set,
    solve_k_radial,
    zhang_check,
)
