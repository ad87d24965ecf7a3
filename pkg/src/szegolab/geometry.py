"""Differential geometry of weighted torus actions on P^d, in sphere coordinates.

Model and conventions
---------------------
A point of P^d is represented by a unit vector z in C^{d+1} (any lift); the
derived real vector p_i = |z_i|^2 lives on the standard simplex.  Tangent
vectors of P^d at [z] are represented by their horizontal lifts: vectors
v in C^{d+1} with <z, v> = 0 (Hermitian inner product, antilinear in the
first slot).  In this representation:

* the Riemannian metric is the ambient Euclidean one, g(u, v) = Re<u, v>;
* the complex structure J is multiplication by i;
* the Kahler form is omega(u, v) = Im<u, v>.

With this normalization the total volume of P^d is pi^d / d! and the moment
map of the weight-matrix action is the plain weighted average

    Phi_j(z) = sum_i W[j, i] * p_i,

whose image is the convex hull of the weight columns.  The one-parameter
subgroup along xi in R^g moves z with velocity i * (W^T xi) o z (o is the
componentwise product); its horizontal part represents the induced vector
field downstairs.  The Gram matrix of those vector fields is the covariance

    C[j, k] = sum_i W[j, i] W[k, i] p_i - Phi_j Phi_k,

i.e. the covariance of the weight rows under the probability vector p.  The
overall metric scale implied by taking C equal to this covariance (no extra
factor) is pinned by the exact-kernel calibration exercised in the test
suite, not adjustable here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .weights import WeightedAction, stabilizer

SUPPORT_TOL = 1e-12
RANK_TOL = 1e-11
KERNEL_PHI_TOL = 1e-8

GRASSMANN_WEIGHTS = (1, 2, 3, 3, 4, 5)


# ---------------------------------------------------------------------------
# Points and tangent vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProjectivePoint:
    """A point of P^d as a unit vector in C^{d+1}."""

    z: np.ndarray
    support_tol: float = SUPPORT_TOL

    def __post_init__(self):
        z = np.ascontiguousarray(self.z, dtype=np.complex128)
        norm = float(np.linalg.norm(z))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"point must be unit-normalized (|z| = {norm!r})")
        object.__setattr__(self, "z", z)
        self.z.setflags(write=False)

    @staticmethod
    def from_coords(coords) -> "ProjectivePoint":
        z = np.asarray(coords, dtype=np.complex128)
        norm = np.linalg.norm(z)
        if norm == 0:
            raise ValueError("zero vector does not define a projective point")
        return ProjectivePoint(z / norm)

    @staticmethod
    def from_p(p, phases=None) -> "ProjectivePoint":
        p = np.asarray(p, dtype=float)
        if np.any(p < 0):
            raise ValueError("p must be nonnegative")
        p = p / p.sum()
        z = np.sqrt(p).astype(np.complex128)
        if phases is not None:
            z = z * np.exp(1j * np.asarray(phases, dtype=float))
        return ProjectivePoint.from_coords(z)

    @property
    def d(self) -> int:
        return self.z.shape[0] - 1

    @property
    def p(self) -> np.ndarray:
        return np.abs(self.z) ** 2

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.nonzero(np.abs(self.z) > self.support_tol)[0])


@dataclass(frozen=True)
class TangentVector:
    """Horizontal representative of a tangent vector: <z, v> = 0."""

    base: ProjectivePoint
    v: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.v, dtype=np.complex128)
        slack = abs(np.vdot(self.base.z, v))
        if slack > 1e-12 * max(1.0, float(np.linalg.norm(v))):
            raise ValueError("tangent vector is not horizontal at its base point")
        object.__setattr__(self, "v", v)
        self.v.setflags(write=False)

    @staticmethod
    def horizontal(base: ProjectivePoint, raw) -> "TangentVector":
        raw = np.asarray(raw, dtype=np.complex128)
        v = raw - np.vdot(base.z, raw) * base.z
        return TangentVector(base, v)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.v))

    def scaled(self, t: float) -> "TangentVector":
        return TangentVector(self.base, t * self.v)


def random_point(d: int, rng: np.random.Generator) -> ProjectivePoint:
    z = rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1)
    return ProjectivePoint.from_coords(z)


def displace(m: ProjectivePoint, v: TangentVector, t: float) -> ProjectivePoint:
    """Normalized-affine displacement (z + t v)/|z + t v|.

    Chart-level displacement used by all scaling sweeps; diagonal quantities
    evaluated on it are gauge-free.
    """
    return ProjectivePoint.from_coords(m.z + t * v.v)


def omega_form(u: np.ndarray, v: np.ndarray) -> float:
    """Kahler form on horizontal representatives: Im<u, v>."""
    return float(np.vdot(u, v).imag)


# ---------------------------------------------------------------------------
# Moment map and Gram matrices
# ---------------------------------------------------------------------------


def moment_map(a: WeightedAction, m: ProjectivePoint) -> np.ndarray:
    if m.z.shape[0] != a.n_coords:
        raise ValueError("point dimension does not match the action")
    return a.W @ m.p


def grassmann_preset_eval(p6) -> float:
    """Moment value of the G(2,4) preset on a Plucker 6-vector.

    The input must satisfy the Klein quadric relation
    x0 x5 - x1 x4 + x2 x3 = 0 (coordinates ordered p01, p02, p03, p12, p13,
    p23); evaluation is the weighted average with weights (1,2,3,3,4,5).
    """
    z = np.asarray(p6, dtype=np.complex128)
    if z.shape != (6,):
        raise ValueError("expected a 6-component Plucker vector")
    norm = np.linalg.norm(z)
    if norm == 0:
        raise ValueError("zero Plucker vector")
    z = z / norm
    klein = z[0] * z[5] - z[1] * z[4] + z[2] * z[3]
    if abs(klein) > 1e-10:
        raise ValueError(f"Klein quadric relation violated (residual {abs(klein):.3e})")
    p = np.abs(z) ** 2
    return float(np.dot(GRASSMANN_WEIGHTS, p))


def gram_C(a: WeightedAction, m: ProjectivePoint) -> np.ndarray:
    """Gram matrix of the action vector fields: the covariance of W under p."""
    p = m.p
    W = a.W.astype(float)
    phi = W @ p
    return (W * p) @ W.T - np.outer(phi, phi)


def orbit_vectors(a: WeightedAction, m: ProjectivePoint) -> np.ndarray:
    """Horizontal generator fields, one row per torus coordinate (shape g x (d+1)).

    Row j is the horizontal part of i * (W[j] o z); its Euclidean pairings
    reproduce gram_C.
    """
    z = m.z
    p = m.p
    W = a.W.astype(float)
    phi = W @ p
    raw = 1j * (W * z[None, :])
    return raw - (1j * phi)[:, None] * z[None, :]


def ker_phi_basis(phi) -> np.ndarray:
    """Deterministic orthonormal basis of {xi : phi . xi = 0}, rows of shape (g-1, g).

    Gram-Schmidt over the coordinate basis with smallest-index pivoting, so
    repeated calls agree bit for bit.
    """
    phi = np.asarray(phi, dtype=float).ravel()
    g = phi.shape[0]
    nrm = np.linalg.norm(phi)
    if nrm == 0:
        raise ValueError("ker_phi_basis requires a nonzero vector")
    u = phi / nrm
    rows = []
    for j in range(g):
        cand = np.zeros(g)
        cand[j] = 1.0
        cand -= u[j] * u
        for r in rows:
            cand -= np.dot(r, cand) * r
        n = np.linalg.norm(cand)
        if n > 1e-10:
            rows.append(cand / n)
        if len(rows) == g - 1:
            break
    return np.array(rows).reshape(g - 1, g)


# ---------------------------------------------------------------------------
# Geometry reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeometryReport:
    """Per-point geometric data of an action relative to a weight direction."""

    phi: np.ndarray
    C: np.ndarray
    ker_basis: np.ndarray
    D: np.ndarray
    script_d: float | None
    v_eff: float | None
    lambda_varpi: float
    transversal: bool
    rank_val: int
    locally_free: bool
    stabilizer_order: int | None
    on_ray_angle: float


def _rank_and_null(C: np.ndarray) -> tuple[int, np.ndarray | None]:
    evals, evecs = np.linalg.eigh(C)
    scale = max(1.0, float(np.trace(C)))
    mask = evals > RANK_TOL * scale
    rank = int(np.count_nonzero(mask))
    null = None
    if rank == C.shape[0] - 1:
        null = evecs[:, 0]
    return rank, null


def angle_to_ray(phi, varpi) -> float:
    """Angle (radians) between a moment value and the positive varpi ray.

    Computed from the perpendicular component (atan2), which stays accurate
    for angles far below the ulp resolution of arccos near 1.
    """
    phi = np.asarray(phi, dtype=float).ravel()
    v = np.asarray(varpi, dtype=float).ravel()
    u = v / np.linalg.norm(v)
    para = float(np.dot(phi, u))
    perp = float(np.linalg.norm(phi - para * u))
    return math.atan2(perp, para)


def geometry_report(a: WeightedAction, m: ProjectivePoint, varpi) -> GeometryReport:
    """Gram data, transversality, effective volume and scaling rate at a point.

    D is the Gram of the action fields restricted to ker Phi(m), written in a
    deterministic orthonormal basis of that kernel; sqrt(det D) is the
    kernel-restricted volume factor and is basis-independent.  V_eff (the
    Riemannian orbit volume) is only defined on the locally free locus.
    """
    v = np.atleast_1d(np.asarray(varpi, dtype=float)).ravel()
    if v.shape[0] != a.g:
        raise ValueError("varpi does not match the torus rank")
    if not np.any(v):
        raise ValueError("varpi must be nonzero")
    phi = moment_map(a, m)
    C = gram_C(a, m)
    g = a.g
    ker = ker_phi_basis(phi)
    D = ker @ C @ ker.T
    rank_val, null = _rank_and_null(C)
    locally_free = rank_val == g
    if locally_free:
        transversal = True
    elif rank_val == g - 1:
        transversal = bool(abs(float(null @ phi)) > KERNEL_PHI_TOL * np.linalg.norm(phi))
    else:
        transversal = False
    script_d = None
    if transversal:
        if g == 1:
            script_d = 1.0
        else:
            dd = float(np.linalg.det(D))
            script_d = math.sqrt(dd) if dd > 0 else None
            if script_d is None:
                transversal = False
    order = None
    v_eff = None
    sub = stabilizer(a, m.support)
    if not sub.positive_dimensional:
        order = sub.order
    if locally_free and order is not None:
        detC = float(np.linalg.det(C)) if g > 0 else 1.0
        v_eff = (2 * math.pi) ** g * math.sqrt(max(detC, 0.0)) / order
    lam = float(np.linalg.norm(v) / np.linalg.norm(phi))
    return GeometryReport(
        phi=phi,
        C=C,
        ker_basis=ker,
        D=D,
        script_d=script_d,
        v_eff=v_eff,
        lambda_varpi=lam,
        transversal=transversal,
        rank_val=rank_val,
        locally_free=locally_free,
        stabilizer_order=order,
        on_ray_angle=angle_to_ray(phi, v),
    )


def gm_det_identity_residual(a: WeightedAction, m: ProjectivePoint) -> float:
    """Relative residual of |Phi|_m^2 det C = |Phi|^2 det D.

    |Phi|_m is the dual-metric norm Phi^T C^{-1} Phi; requires an invertible
    C (locally free point).  The identity is exact in exact arithmetic; the
    residual measures floating-point wiring only.
    """
    phi = moment_map(a, m)
    C = gram_C(a, m)
    g = a.g
    if g == 1:
        return 0.0
    rank, _ = _rank_and_null(C)
    if rank < g:
        raise ValueError("C is singular: point is not locally free")
    ker = ker_phi_basis(phi)
    D = ker @ C @ ker.T
    norm_m_sq = float(phi @ np.linalg.solve(C, phi))
    lhs = norm_m_sq * float(np.linalg.det(C))
    rhs = float(phi @ phi) * float(np.linalg.det(D))
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


def circle_normalization_residual(a: WeightedAction, m: ProjectivePoint) -> float:
    """Relative residual of Phi = V_eff |T_m| |Phi|_m / (2 pi), for g = 1.

    Holds at any metric scale; validates the wiring of V_eff, the stabilizer
    order and the dual norm against each other.  Genuine fixed points
    (singleton support) are rejected; for constant-weight actions the orbit
    factor cancels identically and the residual is zero by continuous
    extension.
    """
    if a.g != 1:
        raise ValueError("circle normalization residual requires g = 1")
    if len(m.support) < 2:
        raise ValueError("fixed point: the orbit is degenerate")
    phi = float(moment_map(a, m)[0])
    c = float(gram_C(a, m)[0, 0])
    sub = stabilizer(a, m.support)
    if sub.positive_dimensional or sub.order is None:
        raise ValueError("stabilizer is not finite")
    if c <= 0:
        return 0.0
    v_eff = 2 * math.pi * math.sqrt(c) / sub.order
    norm_m = abs(phi) / math.sqrt(c)
    rhs = v_eff * sub.order * norm_m / (2 * math.pi)
    return abs(abs(phi) - rhs) / max(abs(phi), rhs)


# ---------------------------------------------------------------------------
# Scaling invariants and normal directions
# ---------------------------------------------------------------------------


def scaling_invariants(
    a: WeightedAction,
    m: ProjectivePoint,
    varpi,
    v1: TangentVector,
    v2: TangentVector,
    theta1: float = 0.0,
    theta2: float = 0.0,
) -> tuple[complex | None, complex]:
    """The quadratic scaling invariants (E, H) at a point.

    H(v1, v2) = lambda * [-i omega(v1, v2) - (|v1|^2 + |v2|^2)] with
    lambda = |varpi| / |Phi(m)|; Re H <= 0 always, vanishing only at
    v1 = v2 = 0.

    E is the circle-case (g = 1) invariant of full contact-level
    displacements (theta_l, v_l); Re E <= 0, with equality exactly when the
    difference of the displacements is parallel to the generator
    (-Phi(m), xi_M(m)) of the lifted orbit.  Returns (None, H) when g > 1.
    """
    v = np.atleast_1d(np.asarray(varpi, dtype=float)).ravel()
    phi = moment_map(a, m)
    lam = float(np.linalg.norm(v) / np.linalg.norm(phi))
    w1, w2 = v1.v, v2.v
    H = lam * (
        -1j * omega_form(w1, w2)
        - (np.linalg.norm(w1) ** 2 + np.linalg.norm(w2) ** 2)
    )
    E = None
    if a.g == 1:
        phi0 = float(phi[0])
        xi = orbit_vectors(a, m)[0]
        tau = (theta2 - theta1) / phi0
        diff = (w1 - w2) - tau * xi
        E = (
            1j * (tau * omega_form(xi, w1 + w2) - omega_form(w1, w2))
            - 0.5 * float(np.linalg.norm(diff)) ** 2
        ) / phi0
    return E, complex(H)


def normal_space_basis(a: WeightedAction, m: ProjectivePoint, varpi) -> np.ndarray:
    """Orthonormal real basis of the normal space of the on-ray locus at m.

    The normal space is J applied to the action fields of ker Phi(m); its
    Gram in the kernel basis is D, so a Cholesky factor orthonormalizes.
    Rows are horizontal complex vectors (shape (g-1, d+1)).
    """
    rep = geometry_report(a, m, varpi)
    if not rep.transversal:
        raise ValueError("normal space undefined: transversality fails here")
    if a.g == 1:
        return np.zeros((0, a.n_coords), dtype=np.complex128)
    z = m.z
    W = a.W.astype(float)
    vecs = []
    for u in rep.ker_basis:
        # for xi in ker Phi the generator i (W^T xi) o z is already
        # horizontal; multiplying by i (the complex structure) rotates it
        # into the normal direction and preserves the Gram matrix D
        vecs.append(1j * (1j * ((W.T @ u) * z)))
    vecs = np.array(vecs)
    L = np.linalg.cholesky(rep.D)
    return np.linalg.solve(L, vecs)


def normal_component_residual(
    a: WeightedAction, m: ProjectivePoint, varpi, v: TangentVector
) -> float:
    """Relative distance from v to the normal space (0 = perfectly normal)."""
    basis = normal_space_basis(a, m, varpi)
    nv = v.norm
    if nv == 0:
        return 0.0
    resid = v.v.copy()
    for b in basis:
        resid = resid - np.vdot(b, resid).real * b
    return float(np.linalg.norm(resid)) / nv


def rotate_tangent(
    a: WeightedAction, theta, v: TangentVector, inverse: bool = True
) -> np.ndarray:
    """Differential of a stabilizer element on horizontal vectors.

    A torus element with angle vector theta (full turns) acts on coordinates
    by exp(2 pi i w_i . theta); for elements fixing the base point the same
    phases act on horizontal lifts.  inverse=True applies the inverse element.
    """
    ang = np.array([float(t) for t in theta], dtype=float)
    sign = -1.0 if inverse else 1.0
    phases = np.exp(sign * 2j * math.pi * (a.W.astype(float).T @ ang))
    return v.v * phases


# ---------------------------------------------------------------------------
# On-ray locus sampling
# ---------------------------------------------------------------------------


def on_ray_points(
    a: WeightedAction,
    varpi,
    n: int,
    rng: np.random.Generator,
    require_locally_free: bool = True,
    max_tries: int = 200,
) -> list[ProjectivePoint]:
    """Random points with Phi(m) on the positive varpi ray.

    The p-locus {p >= 0, sum p = 1, Phi(p) parallel to varpi} is a polytope
    cut out by linear equalities; vertices are found by linear programs with
    random objectives and samples are Dirichlet mixtures of vertices dressed
    with random coordinate phases.
    """
    from scipy.optimize import linprog

    v = np.atleast_1d(np.asarray(varpi, dtype=float)).ravel()
    nc = a.n_coords
    W = a.W.astype(float)
    if a.g == 1:
        rows = np.zeros((0, nc))
    else:
        rows = ker_phi_basis(v) @ W
    A_eq = np.vstack([rows, np.ones((1, nc))])
    b_eq = np.zeros(A_eq.shape[0])
    b_eq[-1] = 1.0
    vertices = []
    for _ in range(max(8, 4 * a.g)):
        c = rng.standard_normal(nc)
        res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=[(0, 1)] * nc, method="highs")
        if res.status != 0:
            raise ValueError("empty on-ray locus for this weight direction")
        key = tuple(np.round(res.x, 9))
        if key not in [tuple(np.round(w, 9)) for w in vertices]:
            vertices.append(res.x)
    verts = np.array(vertices)
    check = W @ verts.mean(axis=0)
    if float(np.dot(check, v)) <= 0:
        raise ValueError("locus lies on the opposite ray")
    # LP vertices are only float-accurate; refine samples onto the equality
    # set by orthogonal projection so the on-ray angle is machine-level
    pinv = np.linalg.pinv(A_eq)

    def refine(p: np.ndarray) -> np.ndarray:
        for _ in range(3):
            p = p - pinv @ (A_eq @ p - b_eq)
            p = np.clip(p, 0.0, None)
        return p

    points: list[ProjectivePoint] = []
    tries = 0
    while len(points) < n and tries < max_tries * n:
        tries += 1
        mix = rng.dirichlet(np.ones(len(verts)))
        p = refine(mix @ verts)
        if np.any(p < 0) or angle_to_ray(W @ p, v) > 1e-10:
            continue
        phases = rng.uniform(0.0, 2 * math.pi, size=nc)
        m = ProjectivePoint.from_p(p, phases)
        if require_locally_free:
            rep = geometry_report(a, m, v)
            if not rep.locally_free:
                continue
        points.append(m)
    if len(points) < n:
        raise ValueError("could not sample enough locally free on-ray points")
    return points
