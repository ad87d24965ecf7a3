"""Centralized pass/fail thresholds.

Every verdict in the package cites one of these named tolerances; scenario
configs may override individual values.  The strict profile tightens the
deterministic checks (identities, exact ratios) where the numerics have
demonstrated headroom; statistical bounds (MC sigmas, tube accuracy) are
unchanged because they are set by sample counts, not by code quality.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    exact_identity: float = 1e-10        # determinant/normalization identities
    form_agreement: float = 1e-9         # two shapes of the torus leading term
    on_ray_angle: float = 1e-8           # radians: membership of the on-ray locus
    classical_diag_rel: float = 1e-12    # unweighted circle diagonal vs (k+1)/pi
    weighted_ratio_rel: float = 1e-10    # weighted circle ratio vs 1 + B1/k
    b1_abs: float = 1e-9                 # fitted first coefficient, exact cases
    torus_ratio_rel: float = 5e-3        # torus leading term at the top of the grid
    residual_order_min: float = 0.9      # fitted order of the 1/k residual
    dim_deviation_coeff: float = 2.0     # |d! k^-d dim - limit| <= coeff / k
    loglog_slope_abs: float = 1e-3       # dimension growth exponent fit
    tube_rel: float = 0.05               # tube-MC constant vs exact bookkeeping
    localization_rel: float = 0.01       # fitted decay rate vs closed form
    no_decay_gamma: float = 1e-6         # |gamma| below this counts as no decay
    scaling_rel: float = 0.05            # Gaussian profile ratio at the top k
    offdiag_rel: float = 0.10            # off-diagonal modulus profile
    mc_sigmas: float = 3.0               # MC agreement band in combined stderr
    stability_sigmas: float = 3.0        # split-grid coefficient agreement band
    level_residual: float = 1e-10        # multinomial level-kernel identity

    def replace(self, **overrides) -> "Tolerances":
        return dataclasses.replace(self, **overrides)


DEFAULT = Tolerances()

STRICT = DEFAULT.replace(
    exact_identity=1e-11,
    form_agreement=1e-10,
    classical_diag_rel=5e-13,
    weighted_ratio_rel=1e-11,
    b1_abs=1e-10,
    torus_ratio_rel=2.5e-3,
    scaling_rel=0.025,
    offdiag_rel=0.05,
)

PROFILES = {"default": DEFAULT, "strict": STRICT}
