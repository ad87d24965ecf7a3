"""Sweeps, coefficient fits and Monte Carlo quadrature for kernel asymptotics.

Everything here is deterministic given a seed: RNG streams come from
numpy's default_rng seeded per call, reductions are order-fixed, and MC
results carry their own standard errors.  k-grids are filtered to the
residues on which the point's stabilizer character sum is nonzero (on the
complement the exact kernel vanishes identically; the filter's soundness is
spot-checked by direct evaluation each sweep).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import ProjectivePoint, TangentVector, displace, ker_phi_basis
from .kernels import isotype_kernel, isotype_kernel_diag
from .logspace import LogComplex, LogReal
from .predictions import (
    DecayFit,
    decay_envelope_fit,
    dim_constant_prefactor,
    gaussian_profile,
    predicted_leading_torus,
)
from .weights import (
    WeightedAction,
    character_sum_vanishes,
    stabilizer,
)


# ---------------------------------------------------------------------------
# Plans and sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepPlan:
    """A diagonal-asymptotics sweep: action, weight direction, point, k-grid.

    The admissible grid drops every k whose stabilizer character sum
    vanishes; construction fails if nothing survives.
    """

    action: WeightedAction
    varpi: tuple[int, ...]
    point: ProjectivePoint
    k_grid: tuple[int, ...]
    skipped: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if any(k <= 0 for k in self.k_grid):
            raise ValueError("all k must be positive")

    @staticmethod
    def build(action: WeightedAction, varpi, point: ProjectivePoint, k_grid) -> "SweepPlan":
        v = tuple(int(x) for x in np.atleast_1d(np.asarray(varpi)).ravel())
        ks = sorted(set(int(k) for k in k_grid))
        if not ks or ks[0] <= 0:
            raise ValueError("k grid must contain positive integers")
        G = stabilizer(action, point.support)
        keep, skip = [], []
        for k in ks:
            (skip if character_sum_vanishes(G, v, k) else keep).append(k)
        if not keep:
            raise ValueError("no admissible k after residue filtering")
        return SweepPlan(action, v, point, tuple(keep), tuple(skip))


DEFAULT_K_GRID = (250, 500, 1000, 2000, 4000)


@dataclass(frozen=True)
class RatioRow:
    k: int
    exact: LogReal
    predicted: LogComplex
    ratio: float


def ratio_sweep(plan: SweepPlan, form: str = "calD", verify_skipped: int = 10) -> list[RatioRow]:
    """Exact diagonal against the predicted leading term over the plan's grid.

    Ratios are formed by log subtraction.  Up to `verify_skipped` of the
    residue-filtered k are evaluated directly and must give an exactly zero
    kernel (soundness of the filter).
    """
    a, v, x = plan.action, plan.varpi, plan.point
    rng = np.random.default_rng(len(plan.k_grid))
    skipped = list(plan.skipped)
    if skipped and verify_skipped:
        picks = rng.choice(len(skipped), size=min(verify_skipped, len(skipped)), replace=False)
        for i in picks:
            kv = tuple(skipped[i] * c for c in v)
            val = isotype_kernel_diag(a, kv, x)
            if not val.is_zero():
                raise AssertionError(f"residue filter unsound at k={skipped[i]}")
    rows = []
    for k in plan.k_grid:
        kv = tuple(k * c for c in v)
        exact = isotype_kernel_diag(a, kv, x)
        pred = predicted_leading_torus(a, x, v, k, form=form)
        ratio = exact.ratio(pred.abs())
        rows.append(RatioRow(k=k, exact=exact, predicted=pred, ratio=ratio))
    return rows


# ---------------------------------------------------------------------------
# Expansion fitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    """Least-squares expansion of a ratio series in inverse (half-)powers of k."""

    model: str
    leading_ratio_limit: float
    coefficients: np.ndarray
    stderrs: np.ndarray
    residual_order_estimate: float
    stable: bool
    half_coefficients: tuple[np.ndarray, np.ndarray]

    @property
    def B(self) -> np.ndarray:
        """Correction coefficients B_1..B_L (excludes the constant term)."""
        return self.coefficients[1:]


def _design(ks: np.ndarray, L: int, step: float) -> np.ndarray:
    return np.stack([ks ** (-step * l) for l in range(L + 1)], axis=1)


def _ls_with_errors(X: np.ndarray, y: np.ndarray):
    """QR least squares with statistical errors and a numerical noise floor.

    The floor bounds coefficient perturbations from rounding of the data
    (eps * |y| through the pseudoinverse); statistical stderrs do not see
    conditioning, so exact series would otherwise look spuriously unstable.
    """
    Q, R = np.linalg.qr(X)
    coef = np.linalg.solve(R, Q.T @ y)
    resid = y - X @ coef
    dof = max(X.shape[0] - X.shape[1], 1)
    sigma2 = float(resid @ resid) / dof
    Rinv = np.linalg.solve(R, np.eye(R.shape[0]))
    cov = sigma2 * (Rinv @ Rinv.T)
    floor = (
        8.0
        * np.finfo(float).eps
        * float(np.linalg.norm(y))
        * np.linalg.norm(Rinv, axis=1)
    )
    return coef, np.sqrt(np.maximum(np.diag(cov), 0.0)), floor


def fit_expansion(series, L: int, model: str = "inverse") -> FitResult:
    """Fit ratio(k) = c0 + sum_{l<=L} B_l k^{-l} (or half powers).

    Stability: the fit is re-run on the lower and upper halves of the grid;
    coefficients agreeing within 3 combined standard errors mark the result
    stable.  Needs at least L + 3 points.
    """
    pts = [(int(k), float(r)) for k, r in series]
    if len(pts) < L + 3:
        raise ValueError("need at least L + 3 points")
    pts.sort()
    ks = np.array([k for k, _ in pts], dtype=float)
    ys = np.array([r for _, r in pts], dtype=float)
    step = 1.0 if model == "inverse" else 0.5
    if model not in ("inverse", "half"):
        raise ValueError("model must be 'inverse' or 'half'")
    X = _design(ks, L, step)
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise ValueError("rank-deficient design matrix")
    coef, err, _ = _ls_with_errors(X, ys)

    resid = np.abs(ys - 1.0)
    mask = resid > 0
    if np.count_nonzero(mask) >= 2:
        slope, _ = np.polyfit(np.log(ks[mask]), np.log(resid[mask]), 1)
        order = -float(slope)
    else:
        order = math.inf

    half = len(pts) // 2
    stable = True
    halves = []
    if half >= L + 2:
        h_coefs = []
        for sl in (slice(0, half), slice(half, None)):
            Xh = _design(ks[sl], L, step)
            h_coefs.append(_ls_with_errors(Xh, ys[sl]))
        for l in range(1, L + 1):
            c1, e1, f1 = h_coefs[0][0][l], h_coefs[0][1][l], h_coefs[0][2][l]
            c2, e2, f2 = h_coefs[1][0][l], h_coefs[1][1][l], h_coefs[1][2][l]
            band = 3.0 * math.hypot(e1, e2) + f1 + f2
            if abs(c1 - c2) > band:
                stable = False
        halves = [h_coefs[0][0], h_coefs[1][0]]
    else:
        halves = [coef, coef]
    return FitResult(
        model=model,
        leading_ratio_limit=float(coef[0]),
        coefficients=coef,
        stderrs=err,
        residual_order_estimate=order,
        stable=stable,
        half_coefficients=(halves[0], halves[1]),
    )


# ---------------------------------------------------------------------------
# Scaling and localization sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalingRow:
    k: int
    ratio: float


def scaling_sweep(
    a: WeightedAction,
    m: ProjectivePoint,
    varpi,
    v: TangentVector,
    k_grid,
) -> tuple[list[ScalingRow], float]:
    """Diagonal ratios along the rescaled displacement path, plus their target.

    x_k = (z + v/sqrt(k)) / |z + v/sqrt(k)| is gauge-free for diagonal
    values; the target is the Gaussian profile exp(-2 lambda |v|^2).
    """
    plan = SweepPlan.build(a, varpi, m, k_grid)
    target = gaussian_profile(a, m, plan.varpi, v)
    rows = []
    for k in plan.k_grid:
        if v.norm / math.sqrt(k) > 0.5:
            raise ValueError(f"displacement leaves the chart at k={k}")
        xk = displace(m, v, 1.0 / math.sqrt(k))
        kv = tuple(k * c for c in plan.varpi)
        num = isotype_kernel_diag(a, kv, xk)
        den = isotype_kernel_diag(a, kv, m)
        rows.append(ScalingRow(k=k, ratio=num.ratio(den)))
    return rows, target


def offdiag_modulus_sweep(
    a: WeightedAction,
    m: ProjectivePoint,
    varpi,
    v1: TangentVector,
    v2: TangentVector,
    k_grid,
) -> tuple[list[ScalingRow], float]:
    """Off-diagonal modulus ratios |K(x_1k, x_2k)| / diag(x) and their target.

    For a trivial stabilizer the limit modulus is
    exp(-lambda (|v1|^2 + |v2|^2)); displacement-gauge corrections enter at
    relative order k^{-1/2}, hence the looser tolerance downstream.
    """
    plan = SweepPlan.build(a, varpi, m, k_grid)
    lam_target = math.sqrt(
        gaussian_profile(a, m, plan.varpi, v1) * gaussian_profile(a, m, plan.varpi, v2)
    )
    rows = []
    for k in plan.k_grid:
        if max(v1.norm, v2.norm) / math.sqrt(k) > 0.5:
            raise ValueError(f"displacement leaves the chart at k={k}")
        x1 = displace(m, v1, 1.0 / math.sqrt(k))
        x2 = displace(m, v2, 1.0 / math.sqrt(k))
        kv = tuple(k * c for c in plan.varpi)
        num = isotype_kernel(a, kv, x1, x2).modulus()
        den = isotype_kernel_diag(a, kv, m)
        rows.append(ScalingRow(k=k, ratio=num.ratio(den)))
    return rows, lam_target


@dataclass(frozen=True)
class LocalizationRow:
    label: float
    fit: DecayFit
    no_decay: bool


def localization_sweep(
    a: WeightedAction,
    varpi,
    points,
    k_grid,
    labels=None,
    no_decay_gamma: float = 1e-6,
) -> list[LocalizationRow]:
    """Decay-rate map along a path of points crossing the on-ray locus.

    Each point's diagonal series over the k-grid is fit by the decay
    envelope; gamma vanishes (within `no_decay_gamma`) exactly at the on-ray
    crossing and is positive elsewhere.
    """
    v = tuple(int(x) for x in np.atleast_1d(np.asarray(varpi)).ravel())
    ks = sorted(set(int(k) for k in k_grid))
    if labels is None:
        labels = list(range(len(points)))
    out = []
    for label, m in zip(labels, points):
        series = []
        for k in ks:
            kv = tuple(k * c for c in v)
            series.append((k, isotype_kernel_diag(a, kv, m)))
        fit = decay_envelope_fit(series, a.d)
        out.append(
            LocalizationRow(
                label=float(label),
                fit=fit,
                no_decay=(not fit.all_zero) and abs(fit.gamma) < no_decay_gamma,
            )
        )
    return out


# ---------------------------------------------------------------------------
# Monte Carlo quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureResult:
    estimate: float
    stderr: float
    samples: int
    method: str
    extras: dict = field(default_factory=dict)


def _mean_stderr(vals: np.ndarray) -> tuple[float, float]:
    mean = float(vals.mean())
    if vals.size > 1:
        stderr = float(vals.std(ddof=1) / math.sqrt(vals.size))
    else:
        stderr = float("inf")
    return mean, stderr


def simplex_pushforward_integral(f, d: int, samples: int, seed: int) -> QuadratureResult:
    """Mean of f(p) over the uniform simplex (Dirichlet(1, ..., 1) sampling).

    f maps an (N, d+1) block of simplex points to N values.  Agreement with
    sphere_moment_integral on the same integrand is the pushforward oracle:
    the ambient volume projects to the uniform measure on the simplex.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(d + 1), size=samples)
    vals = np.asarray(f(p), dtype=float)
    mean, stderr = _mean_stderr(vals)
    return QuadratureResult(mean, stderr, samples, "simplex_pushforward")


def sphere_moment_integral(f, d: int, samples: int, seed: int) -> QuadratureResult:
    """Mean of f(p(z)) over the unit sphere (normalized complex Gaussians)."""
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((samples, d + 1)) + 1j * rng.standard_normal((samples, d + 1))
    p = np.abs(z) ** 2
    p /= p.sum(axis=1, keepdims=True)
    vals = np.asarray(f(p), dtype=float)
    mean, stderr = _mean_stderr(vals)
    return QuadratureResult(mean, stderr, samples, "sphere_mc")


@dataclass(frozen=True)
class TubeFrame:
    """Batched per-sample geometry handed to tube integrands."""

    p: np.ndarray
    phi: np.ndarray
    norm_phi: np.ndarray
    C: np.ndarray
    det_D: np.ndarray

    def script_d(self) -> np.ndarray:
        return np.sqrt(np.maximum(self.det_D, 0.0))


def _volume_M(d: int) -> float:
    return math.pi**d / math.factorial(d)


def _ball_volume(dim: int, radius: float) -> float:
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0) * radius**dim


def _tube_frame(a: WeightedAction, z: np.ndarray) -> TubeFrame:
    p = np.abs(z) ** 2
    p /= p.sum(axis=1, keepdims=True)
    W = a.W.astype(float)
    phi = p @ W.T
    norm_phi = np.linalg.norm(phi, axis=1)
    C = np.einsum("ni,ji,ki->njk", p, W, W) - np.einsum("nj,nk->njk", phi, phi)
    # det of the empty kernel restriction is 1 (g = 1 bypass path)
    return TubeFrame(p=p, phi=phi, norm_phi=norm_phi, C=C, det_D=np.ones(len(p)))


def _kernel_frames(phi_hat: np.ndarray) -> np.ndarray:
    """Orthonormal bases of the per-sample kernels {xi : phi . xi = 0}.

    Householder reflections mapping e_0 to phi_hat; columns 1..g-1 of the
    reflection span the kernel.  Returns shape (N, g-1, g) (rows are basis
    vectors).
    """
    n, g = phi_hat.shape
    e0 = np.zeros(g)
    e0[0] = 1.0
    u = phi_hat - e0[None, :]
    nu = np.linalg.norm(u, axis=1)
    safe = nu > 1e-12
    H = np.broadcast_to(np.eye(g), (n, g, g)).copy()
    uu = np.zeros_like(u)
    uu[safe] = u[safe] / nu[safe, None]
    H[safe] -= 2.0 * np.einsum("nj,nk->njk", uu[safe], uu[safe])
    # basis rows = columns 1..g-1 of H, transposed into row vectors
    return np.transpose(H[:, :, 1:], (0, 2, 1))


def _metric_distance_to_ray(
    a: WeightedAction, frame: TubeFrame, varpi: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Approximate metric distance to the on-ray locus, and det D per sample.

    The angle-deficit vector of Phi(m) from the ray converts to a metric
    normal displacement through the derivative of Phi along normal
    directions (2 C xi for kernel directions xi), solved sample-by-sample in
    the kernel frame.
    """
    g = a.g
    v_hat = varpi / np.linalg.norm(varpi)
    phi_hat = frame.phi / frame.norm_phi[:, None]
    align = phi_hat @ v_hat
    V = ker_phi_basis(v_hat)  # (g-1, g), fixed
    delta = phi_hat @ V.T  # (N, g-1) angle-deficit coordinates
    B = _kernel_frames(phi_hat)  # (N, g-1, g)
    CB = np.einsum("njk,nlk->njl", frame.C, B)  # (N, g, g-1): C @ B^T
    M = 2.0 * np.einsum("jk,nkl->njl", V, CB) / frame.norm_phi[:, None, None]
    D = np.einsum("nlj,njm->nlm", B, CB)  # (N, g-1, g-1): B C B^T
    det_D = np.linalg.det(D)
    dist = np.full(len(phi_hat), np.inf)
    det_M = np.linalg.det(M)
    ok = (np.abs(det_M) > 1e-14) & (align > 0)
    if np.any(ok):
        y = np.linalg.solve(M[ok], delta[ok][..., None])[..., 0]
        q = np.einsum("nl,nlm,nm->n", y, D[ok], y)
        dist[ok] = np.sqrt(np.maximum(q, 0.0))
    return dist, det_D


def tube_integral_over_Mvarpi(
    a: WeightedAction,
    varpi,
    F,
    epsilon: float = 0.02,
    samples: int = 10**6,
    seed: int = 0,
    richardson: bool = True,
) -> QuadratureResult:
    """Surface integral of F over the on-ray locus by tube counting.

    Samples the ambient space, keeps points whose estimated metric distance
    to the locus is below epsilon, and divides by the normal-disc volume.
    With richardson=True the epsilon and epsilon/2 estimates (same samples)
    are combined as (4 T(eps/2) - T(eps))/3, cancelling the leading
    curvature bias.  F receives a TubeFrame and returns per-sample values.

    For g = 1 the locus is everything and this reduces to the plain ambient
    integral.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    v = np.atleast_1d(np.asarray(varpi, dtype=float)).ravel()
    rng = np.random.default_rng(seed)
    d, g = a.d, a.g
    vol_m = _volume_M(d)
    chunk = 250_000
    contribs = []
    used_eps = (epsilon, epsilon / 2.0)
    n_hits = [0, 0]
    done = 0
    while done < samples:
        b = min(chunk, samples - done)
        z = rng.standard_normal((b, d + 1)) + 1j * rng.standard_normal((b, d + 1))
        frame = _tube_frame(a, z)
        if g == 1:
            vals = np.asarray(F(frame), dtype=float)
            contribs.append(vals * vol_m)
            done += b
            continue
        dist, det_D = _metric_distance_to_ray(a, frame, v)
        frame = TubeFrame(
            p=frame.p, phi=frame.phi, norm_phi=frame.norm_phi, C=frame.C, det_D=det_D
        )
        inside = dist < used_eps[0]
        vals = np.zeros(b)
        if np.any(inside):
            sub = TubeFrame(
                p=frame.p[inside],
                phi=frame.phi[inside],
                norm_phi=frame.norm_phi[inside],
                C=frame.C[inside],
                det_D=frame.det_D[inside],
            )
            vals[inside] = np.asarray(F(sub), dtype=float)
        per_eps = []
        for j, eps in enumerate(used_eps):
            ind = dist < eps
            n_hits[j] += int(np.count_nonzero(ind))
            per_eps.append(vals * ind * (vol_m / _ball_volume(g - 1, eps)))
        if richardson:
            contribs.append((4.0 * per_eps[1] - per_eps[0]) / 3.0)
        else:
            contribs.append(per_eps[0])
        done += b
    allv = np.concatenate(contribs)
    if g > 1 and n_hits[1] == 0:
        raise ValueError(
            "empty tube: raise epsilon or the sample count for this locus"
        )
    mean, stderr = _mean_stderr(allv)
    return QuadratureResult(
        mean,
        stderr,
        samples,
        "tube_mc",
        extras={"epsilon": epsilon, "hits": tuple(n_hits), "richardson": richardson},
    )


def dim_integrand(a: WeightedAction):
    """The dimension-constant surface density |Phi|^{-(d+2-g)} / sqrt(det D)."""
    expo = a.d + 2 - a.g

    def F(frame: TubeFrame) -> np.ndarray:
        sd = frame.script_d()
        out = np.zeros_like(sd)
        ok = sd > 0
        out[ok] = frame.norm_phi[ok] ** (-expo) / sd[ok]
        return out

    return F


def predicted_dim_torus_constant(
    a: WeightedAction,
    varpi,
    epsilon: float = 0.02,
    samples: int = 10**6,
    seed: int = 0,
) -> QuadratureResult:
    """Tube-MC estimate of the constant multiplying (|varpi| k / pi)^{d+1-g}."""
    base = tube_integral_over_Mvarpi(
        a, varpi, dim_integrand(a), epsilon=epsilon, samples=samples, seed=seed
    )
    pref = dim_constant_prefactor(a.g)
    return QuadratureResult(
        base.estimate * pref,
        base.stderr * pref,
        base.samples,
        base.method,
        extras=dict(base.extras, prefactor=pref),
    )
