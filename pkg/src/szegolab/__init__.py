"""Numerical laboratory for equivariant projector-kernel asymptotics.

Weighted torus actions on projective space admit exact isotype projector
kernels (monomial sums) whose large-k behavior is governed by closed-form
leading terms, localization on the on-ray locus of the moment map, and
Gaussian transverse profiles.  This package computes both sides exactly
enough to compare them: exact kernels in log space against predicted
leading terms, dimension counts against growth constants, decay rates
against closed forms.
"""

from .logspace import LogComplex, LogReal, log_factorial
from .weights import (
    CertificateError,
    IsotypeBasis,
    MultiIndex,
    PositiveDimensionalStabilizerError,
    StabilizerGroup,
    WeightedAction,
    character_sum,
    character_sum_vanishes,
    degree_spectrum,
    isotype_basis,
    isotype_dimension,
    stabilizer,
    validate_action,
    weight_partition_counts,
)
from .geometry import (
    GeometryReport,
    ProjectivePoint,
    TangentVector,
    circle_normalization_residual,
    displace,
    geometry_report,
    gm_det_identity_residual,
    gram_C,
    grassmann_preset_eval,
    ker_phi_basis,
    moment_map,
    normal_space_basis,
    on_ray_points,
    random_point,
    scaling_invariants,
)
from .kernels import (
    KernelValue,
    isotype_kernel,
    isotype_kernel_diag,
    level_kernel_residual,
    mc_orthonormality_oracle,
    monomial_norm_c,
)
from .predictions import (
    DecayFit,
    LeadingTerm,
    NotOnRayError,
    TransversalityError,
    decay_envelope_fit,
    gaussian_profile,
    predicted_dim_circle,
    predicted_dim_torus_exponent,
    predicted_leading_circle,
    predicted_leading_torus,
)
from .verify import (
    FitResult,
    QuadratureResult,
    SweepPlan,
    fit_expansion,
    localization_sweep,
    offdiag_modulus_sweep,
    predicted_dim_torus_constant,
    ratio_sweep,
    scaling_sweep,
    simplex_pushforward_integral,
    sphere_moment_integral,
    tube_integral_over_Mvarpi,
)
from . import presets, tolerances

__version__ = "0.1.0"
