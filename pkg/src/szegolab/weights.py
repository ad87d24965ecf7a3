"""Integer lattice algebra of weighted torus actions on projective space.

A rank-g torus acts on C^{d+1} through an integer weight matrix W
(g rows, d+1 columns): the group element with angle vector theta (measured
in full turns, i.e. theta in R^g mod Z^g) scales the i-th coordinate by
exp(2*pi*i * w_i . theta), where w_i is the i-th column of W.

Everything in this module is exact integer / rational arithmetic:

* positivity certificates (a rational lambda with lambda . w_i >= 1 for all
  i), decided by Fourier-Motzkin elimination over Fractions;
* isotype bases {alpha >= 0 : W alpha = varpi}, enumerated by a DFS whose
  pruning bounds come from the certificate, so no solution can be missed;
* finite stabilizer subgroups of coordinate supports, via Smith reduction of
  the integer weight submatrix, with exact rational angle vectors;
* character sums, reduced mod 1 exactly before the single complex
  exponential per group element.
"""

from __future__ import annotations

import math
import threading
import warnings
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product as _iproduct

import numpy as np


class CertificateError(ValueError):
    """Raised when an operation needs a positivity certificate that is absent."""


class PositiveDimensionalStabilizerError(ValueError):
    """Raised when a finite stabilizer is required but the group is infinite."""


# ---------------------------------------------------------------------------
# Weighted actions and positivity certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WeightedAction:
    """A torus action on P^d given by an integer weight matrix.

    W has shape (g, d+1); column i is the weight vector of the coordinate
    z_i.  `cert`, when present, is a rational vector lambda with
    lambda . w_i >= 1 for every column, certifying that the origin is not in
    the convex hull of the columns (equivalently, that every isotype is
    finite-dimensional).
    """

    W: np.ndarray
    cert: tuple[Fraction, ...] | None

    def __post_init__(self):
        object.__setattr__(self, "W", np.ascontiguousarray(self.W, dtype=np.int64))
        self.W.setflags(write=False)

    @property
    def g(self) -> int:
        return self.W.shape[0]

    @property
    def d(self) -> int:
        return self.W.shape[1] - 1

    @property
    def n_coords(self) -> int:
        return self.W.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.W[:, i]

    def key(self) -> bytes:
        return self.W.tobytes() + bytes([self.g])

    def __eq__(self, other) -> bool:
        return isinstance(other, WeightedAction) and np.array_equal(self.W, other.W)

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        rows = "; ".join(" ".join(str(int(x)) for x in row) for row in self.W)
        return f"WeightedAction([{rows}], cert={'yes' if self.cert else 'no'})"


def _fm_feasible(rows: list[tuple[tuple[Fraction, ...], Fraction]], g: int):
    """Fourier-Motzkin: is {x : a . x >= b for all (a, b)} nonempty?

    Returns a rational feasible point, or None.  Exact; intended for the
    small systems that arise here (columns of a weight matrix).
    """
    if g == 0:
        if all(b <= 0 for _, b in rows):
            return ()
        return None
    lowers, uppers, free = [], [], []
    for a, b in rows:
        c = a[-1]
        rest = a[:-1]
        if c > 0:
            lowers.append(tuple(-ai / c for ai in rest) + (b / c,))
        elif c < 0:
            uppers.append(tuple(-ai / c for ai in rest) + (b / c,))
        else:
            free.append((rest, b))
    combined = list(free)
    for lo in lowers:
        for up in uppers:
            # upper expr - lower expr >= 0
            a = tuple(up[j] - lo[j] for j in range(g - 1))
            b = lo[-1] - up[-1]
            combined.append((a, b))
    sub = _fm_feasible(_dedupe_constraints(combined), g - 1)
    if sub is None:
        return None
    lo_vals = [l[-1] + sum(l[j] * sub[j] for j in range(g - 1)) for l in lowers]
    up_vals = [u[-1] + sum(u[j] * sub[j] for j in range(g - 1)) for u in uppers]
    if lo_vals and up_vals:
        xt = (max(lo_vals) + min(up_vals)) / 2
    elif lo_vals:
        xt = max(lo_vals)
    elif up_vals:
        xt = min(up_vals)
    else:
        xt = Fraction(0)
    return sub + (xt,)


def _dedupe_constraints(rows):
    seen = {}
    for a, b in rows:
        nz = next((x for x in a if x != 0), None)
        scale = abs(nz) if nz is not None else Fraction(1)
        key = tuple(x / scale for x in a)
        bb = b / scale
        prev = seen.get(key)
        if prev is None or bb > prev:
            seen[key] = bb
    return [(k, b) for k, b in seen.items()]


def validate_action(W) -> WeightedAction:
    """Build a WeightedAction, deciding the positivity certificate exactly.

    The certificate lambda satisfies lambda . w_i >= 1 for every column when
    the strict system lambda . w_i > 0 is feasible (the two are equivalent up
    to scaling); it is absent exactly when 0 lies in the convex hull of the
    columns.
    """
    arr = np.asarray(W)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("weight matrix must be a nonempty 2-d integer array")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.round(arr)):
            raise ValueError("weight matrix entries must be integers")
        arr = arr.astype(np.int64)
    g, n = arr.shape
    if g > 8:
        raise ValueError("torus rank above 8 is not supported")
    rows = [
        (tuple(Fraction(int(arr[j, i])) for j in range(g)), Fraction(1))
        for i in range(n)
    ]
    lam = _fm_feasible(rows, g)
    cert = tuple(lam) if lam is not None else None
    return WeightedAction(W=arr, cert=cert)


# ---------------------------------------------------------------------------
# Isotype enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiIndex:
    """Exponent tuple of a monomial z^alpha."""

    alpha: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.alpha)

    def __len__(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class IsotypeBasis:
    """All monomial exponents alpha >= 0 with W alpha = varpi.

    `alphas` is the (B, d+1) integer array in canonical lexicographic order;
    `entries` materializes MultiIndex objects on demand.  Distinct degrees
    index mutually orthogonal blocks of the corresponding function space.
    """

    action: WeightedAction
    varpi: tuple[int, ...]
    alphas: np.ndarray
    degree_window: tuple[int, int]

    def __post_init__(self):
        self.alphas.setflags(write=False)

    def __len__(self) -> int:
        return self.alphas.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return self.alphas.sum(axis=1)

    @property
    def entries(self) -> tuple[MultiIndex, ...]:
        return tuple(MultiIndex(tuple(int(x) for x in row)) for row in self.alphas)

    def by_degree(self) -> dict[int, list[MultiIndex]]:
        out: dict[int, list[MultiIndex]] = {}
        for row in self.alphas:
            mi = MultiIndex(tuple(int(x) for x in row))
            out.setdefault(mi.degree, []).append(mi)
        return dict(sorted(out.items()))


def _integer_certificate(a: WeightedAction) -> np.ndarray:
    lcm = math.lcm(*(f.denominator for f in a.cert))
    return np.array([int(f * lcm) for f in a.cert], dtype=object)


def _as_varpi(a: WeightedAction, varpi) -> tuple[int, ...]:
    if np.isscalar(varpi):
        v = (int(varpi),)
    else:
        v = tuple(int(x) for x in np.asarray(varpi).ravel())
    if len(v) != a.g:
        raise ValueError(f"varpi must have length g={a.g}, got {len(v)}")
    return v


def _require_cert(a: WeightedAction):
    if a.cert is None:
        raise CertificateError(
            "no positivity certificate: isotypes may be infinite-dimensional"
        )


def _enumerate_dfs(
    W: np.ndarray, s: list[int], varpi: tuple[int, ...], budget: int
) -> list[list[int]]:
    """DFS over exponents with exact budget pruning.

    s[i] = Lambda . w_i >= 1 for the integer-scaled certificate Lambda, so any
    completion of a partial solution obeys sum(alpha_i * s_i) = remaining
    budget; coordinates are scanned in index order with ascending values,
    which makes the output canonically lex-sorted and duplicate-free.
    """
    g, n = W.shape
    cols = [tuple(int(x) for x in W[:, i]) for i in range(n)]
    out: list[list[int]] = []

    def last_coord(rem: tuple[int, ...]) -> int | None:
        w = cols[n - 1]
        j = next((t for t in range(g) if w[t] != 0), None)
        if j is None:
            return 0 if all(r == 0 for r in rem) else None
        q, r = divmod(rem[j], w[j])
        if r != 0 or q < 0:
            return None
        if all(q * w[t] == rem[t] for t in range(g)):
            return q
        return None

    def rec(i: int, rem: tuple[int, ...], budget: int, prefix: list[int]):
        if budget < 0:
            return
        if i == n - 1:
            q = last_coord(rem)
            if q is not None and q * s[n - 1] <= budget:
                out.append(prefix + [q])
            return
        w = cols[i]
        for ai in range(budget // s[i] + 1):
            rec(
                i + 1,
                tuple(rem[t] - ai * w[t] for t in range(g)),
                budget - ai * s[i],
                prefix + [ai],
            )

    rec(0, tuple(varpi), budget, [])
    return out


def _solve_square_exact(W: np.ndarray, varpi: tuple[int, ...]):
    """Unique-solution path for square weight matrices.

    Returns the exponent tuple, None when no nonnegative integer solution
    exists, or "singular" to defer to the general enumeration.
    """
    g = W.shape[0]
    A = [[Fraction(int(W[i, j])) for j in range(g)] + [Fraction(varpi[i])] for i in range(g)]
    col = 0
    for r in range(g):
        piv = next((i for i in range(r, g) if A[i][col] != 0), None)
        if piv is None:
            return "singular"
        A[r], A[piv] = A[piv], A[r]
        pv = A[r][col]
        A[r] = [x / pv for x in A[r]]
        for i in range(g):
            if i != r and A[i][col] != 0:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        col += 1
    sol = []
    for i in range(g):
        x = A[i][g]
        if x.denominator != 1 or x < 0:
            return None
        sol.append(int(x))
    return tuple(sol)


def _isotype_alphas(a: WeightedAction, varpi: tuple[int, ...]) -> np.ndarray:
    lam_int = _integer_certificate(a)
    s = np.array([int(lam_int @ a.W[:, i]) for i in range(a.n_coords)], dtype=object)
    budget = int(sum(lam_int[t] * varpi[t] for t in range(a.g)))
    n = a.n_coords
    if budget < 0:
        return np.zeros((0, n), dtype=np.int64)

    if n == a.g:
        sol = _solve_square_exact(a.W, varpi)
        if sol != "singular":
            if sol is None:
                return np.zeros((0, n), dtype=np.int64)
            return np.array([sol], dtype=np.int64)

    if a.g == 1 and n == 2:
        # vectorized two-coordinate path, heavily used by circle sweeps
        w0, w1 = int(a.W[0, 0]), int(a.W[0, 1])
        v = varpi[0]
        sgn = 1 if int(s[0]) * w0 > 0 else -1
        w0s, w1s, vs = sgn * w0, sgn * w1, sgn * v
        if vs < 0:
            return np.zeros((0, 2), dtype=np.int64)
        b = np.arange(vs // w1s + 1, dtype=np.int64)
        rem = vs - w1s * b
        mask = rem % w0s == 0
        a0 = rem[mask] // w0s
        a1 = b[mask]
        alphas = np.stack([a0, a1], axis=1)
        order = np.lexsort((alphas[:, 1], alphas[:, 0]))
        return alphas[order]

    out = _enumerate_dfs(a.W, [int(x) for x in s], varpi, budget)
    if not out:
        return np.zeros((0, n), dtype=np.int64)
    return np.array(out, dtype=np.int64)


_BASIS_CACHE: "OrderedDict[tuple[bytes, tuple[int, ...]], IsotypeBasis]" = OrderedDict()
_BASIS_LOCK = threading.Lock()
_BASIS_CACHE_MAX = 4096


def isotype_basis(a: WeightedAction, varpi) -> IsotypeBasis:
    """Enumerate the isotype basis {alpha >= 0 : W alpha = varpi}.

    Requires a positivity certificate (finiteness guarantee).  varpi = 0 is
    rejected: under a certificate that isotype is the constants and carries
    no scaling family.  Results are memoized in a bounded LRU; the cache is
    safe for concurrent readers with single-writer insertion.
    """
    _require_cert(a)
    v = _as_varpi(a, varpi)
    if all(x == 0 for x in v):
        raise ValueError("varpi = 0 is rejected for isotype operations")
    key = (a.key(), v)
    with _BASIS_LOCK:
        cached = _BASIS_CACHE.get(key)
        if cached is not None:
            _BASIS_CACHE.move_to_end(key)
    if cached is not None:
        return cached
    alphas = _isotype_alphas(a, v)
    lam_int = _integer_certificate(a)
    s = [int(lam_int @ a.W[:, i]) for i in range(a.n_coords)]
    budget = int(sum(lam_int[t] * v[t] for t in range(a.g)))
    if budget >= 0:
        window = (-(-budget // max(s)), budget // min(s))
    else:
        window = (0, -1)
    basis = IsotypeBasis(action=a, varpi=v, alphas=alphas, degree_window=window)
    with _BASIS_LOCK:
        _BASIS_CACHE.setdefault(key, basis)
        while len(_BASIS_CACHE) > _BASIS_CACHE_MAX:
            _BASIS_CACHE.popitem(last=False)
    return basis


@lru_cache(maxsize=32)
def _g1_count_table(weights: tuple[int, ...], n_max: int) -> tuple[int, ...]:
    counts = [0] * (n_max + 1)
    counts[0] = 1
    for w in weights:
        for x in range(w, n_max + 1):
            counts[x] += counts[x - w]
    return tuple(counts)


def isotype_dimension(a: WeightedAction, varpi) -> int:
    """Number of monomials in the isotype (0 for varpi = 0, with a warning).

    For circle actions the count is served from a cached coin-counting table;
    the general case counts the DFS enumeration.
    """
    _require_cert(a)
    v = _as_varpi(a, varpi)
    if all(x == 0 for x in v):
        warnings.warn("varpi = 0: returning dimension 0 (constants excluded)")
        return 0
    if a.g == 1:
        sgn = 1 if a.cert[0] > 0 else -1
        weights = tuple(sorted(sgn * int(x) for x in a.W[0]))
        target = sgn * v[0]
        if target < 0:
            return 0
        n_max = max(target, 256)
        table = _g1_count_table(weights, 1 << (n_max - 1).bit_length())
        return table[target]
    return int(isotype_basis(a, v).alphas.shape[0])


def degree_spectrum(a: WeightedAction, varpi) -> list[int]:
    """Sorted distinct degrees |alpha| occurring in the isotype."""
    basis = isotype_basis(a, varpi)
    return sorted(set(int(x) for x in basis.degrees))


def weight_partition_counts(a: WeightedAction, n: int) -> dict[tuple[int, ...], int]:
    """Degree-n monomial counts grouped by weight W alpha.

    Dynamic programming over coordinates; the counts partition the C(n+d, d)
    monomials of degree n.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    g = a.g
    zero = tuple(0 for _ in range(g))
    states: dict[tuple[int, tuple[int, ...]], int] = {(0, zero): 1}
    for i in range(a.n_coords):
        w = tuple(int(x) for x in a.W[:, i])
        new: dict[tuple[int, tuple[int, ...]], int] = {}
        for (deg, wt), cnt in states.items():
            for e in range(n - deg + 1):
                key = (deg + e, tuple(wt[t] + e * w[t] for t in range(g)))
                new[key] = new.get(key, 0) + cnt
        states = new
    out: dict[tuple[int, ...], int] = {}
    for (deg, wt), cnt in states.items():
        if deg == n:
            out[wt] = out.get(wt, 0) + cnt
    return out


# ---------------------------------------------------------------------------
# Stabilizers and character sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StabilizerGroup:
    """Finite subgroup of the torus fixing a coordinate support.

    Angle vectors are exact rationals mod 1 (units of full turns).  When the
    solution group has positive dimension the order is None and enumeration
    is refused downstream.
    """

    order: int | None
    generators: tuple[tuple[Fraction, ...], ...]
    elements: tuple[tuple[Fraction, ...], ...]
    positive_dimensional: bool = False
    truncated: bool = False

    def is_trivial(self) -> bool:
        return self.order == 1


def _smith_diagonalize(A: list[list[int]], g: int):
    """Diagonalize an integer matrix by unimodular row/column operations.

    Returns (diag, V) with V the accumulated g x g column transform, so that
    the original matrix satisfies U A V = diag for some unimodular U.
    """
    s = len(A)
    V = [[1 if i == j else 0 for j in range(g)] for i in range(g)]

    def col_swap(j1, j2):
        for r in A:
            r[j1], r[j2] = r[j2], r[j1]
        for r in V:
            r[j1], r[j2] = r[j2], r[j1]

    def col_addmul(jdst, jsrc, q):
        for r in A:
            r[jdst] += q * r[jsrc]
        for r in V:
            r[jdst] += q * r[jsrc]

    t = 0
    while t < min(s, g):
        pivot = None
        best = None
        for i in range(t, s):
            for j in range(t, g):
                v = abs(A[i][j])
                if v and (best is None or v < best):
                    best, pivot = v, (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        A[t], A[pi] = A[pi], A[t]
        if pj != t:
            col_swap(t, pj)
        while True:
            # clear column t below the pivot by row operations
            dirty = False
            for i in range(t + 1, s):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    A[i] = [A[i][j] - q * A[t][j] for j in range(g)]
                    if A[i][t]:
                        A[t], A[i] = A[i], A[t]
                        dirty = True
            # clear row t to the right by column operations
            for j in range(t + 1, g):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    col_addmul(j, t, -q)
                    if A[t][j]:
                        col_swap(t, j)
                        dirty = True
            if not dirty and all(A[i][t] == 0 for i in range(t + 1, s)) and all(
                A[t][j] == 0 for j in range(t + 1, g)
            ):
                break
        t += 1
    diag = [A[i][i] for i in range(min(s, g))]
    return diag, V


DEFAULT_ENUMERATION_CAP = 10**6


def stabilizer(
    a: WeightedAction, support, cap: int = DEFAULT_ENUMERATION_CAP
) -> StabilizerGroup:
    """Joint stabilizer {theta mod 1 : w_i . theta integral for i in support}.

    Solved through Smith reduction of the support's weight rows.  The group
    is finite exactly when those rows have full rank g; otherwise a
    positive-dimensional flag is set and no enumeration is attempted.
    Enumeration past `cap` elements raises.
    """
    idx = sorted(set(int(i) for i in support))
    if not idx:
        raise ValueError("support must be nonempty")
    if min(idx) < 0 or max(idx) >= a.n_coords:
        raise ValueError("support indices out of range")
    g = a.g
    rows = [[int(a.W[t, i]) for t in range(g)] for i in idx]
    diag, V = _smith_diagonalize([r[:] for r in rows], g)
    nonzero = [abs(d) for d in diag if d != 0]
    if len(nonzero) < g:
        return StabilizerGroup(
            order=None, generators=(), elements=(), positive_dimensional=True
        )
    order = 1
    for d in nonzero:
        order *= d
    gens = []
    dlist = [abs(d) for d in diag]
    for j, dj in enumerate(dlist):
        if dj > 1:
            gens.append(tuple(Fraction(V[t][j], dj) % 1 for t in range(g)))
    if order > cap:
        return StabilizerGroup(
            order=order, generators=tuple(gens), elements=(), truncated=True
        )
    elems = []
    for combo in _iproduct(*(range(dj) for dj in dlist)):
        theta = tuple(
            sum(Fraction(V[t][j] * combo[j], dlist[j]) for j in range(g)) % 1
            for t in range(g)
        )
        elems.append(theta)
    return StabilizerGroup(
        order=order, generators=tuple(gens), elements=tuple(elems)
    )


def character_sum(G: StabilizerGroup, varpi, k: int) -> complex:
    """Sum over the group of exp(2*pi*i * k * varpi . theta).

    The rational angle k * (varpi . theta) is reduced mod 1 exactly; one
    complex exponential is taken per element.
    """
    if G.positive_dimensional:
        raise PositiveDimensionalStabilizerError(
            "character sum over a positive-dimensional stabilizer"
        )
    if G.truncated:
        raise ValueError("stabilizer enumeration was truncated by the cap")
    v = [int(x) for x in (np.atleast_1d(np.asarray(varpi)).ravel())]
    total = 0.0 + 0.0j
    for theta in G.elements:
        frac = sum(Fraction(v[t]) * theta[t] for t in range(len(theta))) * k % 1
        total += complex(math.cos(2 * math.pi * frac), math.sin(2 * math.pi * frac))
    return total


def character_sum_vanishes(G: StabilizerGroup, varpi, k: int) -> bool:
    """Exact vanishing test for character_sum.

    theta -> exp(2*pi*i*k*varpi.theta) is a character of the finite group, so
    the full sum is |G| when it is trivial on every generator and 0 otherwise.
    """
    if G.positive_dimensional:
        raise PositiveDimensionalStabilizerError(
            "character test over a positive-dimensional stabilizer"
        )
    v = [int(x) for x in (np.atleast_1d(np.asarray(varpi)).ravel())]
    for theta in G.generators:
        frac = sum(Fraction(v[t]) * theta[t] for t in range(len(theta))) * k % 1
        if frac != 0:
            return True
    return False
