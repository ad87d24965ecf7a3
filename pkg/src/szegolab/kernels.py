"""Exact equivariant projector kernels on the unit sphere, in log space.

The Hardy space of the sphere S^{2d+1} splits into the monomials z^alpha.
With the volume normalization of this package (total volume pi^d / d!, unit
fiber mass) the squared L2 norm of z^alpha is pi^d alpha! / (|alpha| + d)!,
so the reproducing coefficient of the monomial is

    c_alpha = (|alpha| + d)! / (pi^d * alpha!).

The isotype projector kernel of a weight vector varpi is then

    K_varpi(x, y) = sum_{W alpha = varpi} c_alpha x^alpha conj(y)^alpha,

a finite sum once the action carries a positivity certificate.  All sums are
accumulated in extended-precision log space (log-sum-exp over the basis,
unit phases carried separately), which keeps k of several thousand digits of
dynamic range away from float overflow.

Relative to the rotation-invariant probability measure sigma on the sphere,
int |z^alpha|^2 dsigma = d! alpha! / (|alpha| + d)! = (d!/pi^d) / c_alpha;
the Monte Carlo oracle below estimates those moments independently of the
kernel code paths.
"""

from __future__ import annotations

import math
import threading
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .logspace import LogComplex, LogReal, log_complex_sum, log_factorial, log_sum_exp
from .weights import WeightedAction, isotype_basis

_LONG = np.longdouble
_LOG_PI = np.log(_LONG(np.pi))

_LOGC_CACHE: "OrderedDict[tuple[bytes, tuple[int, ...]], np.ndarray]" = OrderedDict()
_LOGC_LOCK = threading.Lock()
_LOGC_CACHE_MAX = 4096


def monomial_norm_c(alpha, d: int) -> LogReal:
    """Reproducing coefficient c_alpha = (|alpha| + d)! / (pi^d alpha!)."""
    al = np.asarray(alpha, dtype=np.int64).ravel()
    if np.any(al < 0):
        raise ValueError("alpha must be nonnegative")
    n = int(al.sum())
    logc = log_factorial(n + d) - d * _LOG_PI - np.sum(log_factorial(al))
    return LogReal.from_log(float(logc))


def _log_coeffs(a: WeightedAction, varpi: tuple[int, ...], alphas: np.ndarray) -> np.ndarray:
    key = (a.key(), varpi)
    with _LOGC_LOCK:
        cached = _LOGC_CACHE.get(key)
        if cached is not None:
            _LOGC_CACHE.move_to_end(key)
    if cached is not None:
        return cached
    d = a.d
    degrees = alphas.sum(axis=1)
    logc = log_factorial(degrees + d) - d * _LOG_PI - log_factorial(alphas).sum(axis=1)
    logc = np.asarray(logc, dtype=_LONG).reshape(alphas.shape[0])
    with _LOGC_LOCK:
        _LOGC_CACHE.setdefault(key, logc)
        while len(_LOGC_CACHE) > _LOGC_CACHE_MAX:
            _LOGC_CACHE.popitem(last=False)
    return logc


def _safe_log(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(values.astype(_LONG))


def _power_logsum(alphas: np.ndarray, logp: np.ndarray) -> np.ndarray:
    # sum_i alpha_i log p_i with the convention 0 * (-inf) = 0
    with np.errstate(invalid="ignore"):
        terms = np.where(alphas > 0, alphas * logp[None, :], _LONG(0.0))
    return terms.sum(axis=1)


@dataclass(frozen=True)
class KernelValue:
    """An isotype kernel evaluation: log-magnitude complex plus its weight."""

    value: LogComplex
    varpi: tuple[int, ...]

    def modulus(self) -> LogReal:
        return self.value.abs()


def isotype_kernel_diag(a: WeightedAction, varpi, x) -> LogReal:
    """Diagonal kernel value sum c_alpha prod_i p_i^alpha_i (phase-free).

    Descends to P^d; returns an exact LogReal zero when no basis monomial is
    supported on the point's nonzero coordinates.
    """
    basis = isotype_basis(a, varpi)
    if len(basis) == 0:
        return LogReal.zero()
    logc = _log_coeffs(a, basis.varpi, basis.alphas)
    logp = _safe_log(np.abs(np.asarray(x.z)) ** 2)
    logs = logc + _power_logsum(basis.alphas, logp)
    return LogReal.from_log(log_sum_exp(logs))


def isotype_kernel(a: WeightedAction, varpi, x, y) -> KernelValue:
    """Off-diagonal kernel sum c_alpha x^alpha conj(y)^alpha.

    Hermitian in (x, y); the modulus is gauge-robust while the phase depends
    on the chosen sphere lifts.
    """
    basis = isotype_basis(a, varpi)
    if len(basis) == 0:
        return KernelValue(LogComplex.zero(), _t(varpi))
    logc = _log_coeffs(a, basis.varpi, basis.alphas)
    zx, zy = np.asarray(x.z), np.asarray(y.z)
    logmag = _safe_log(np.abs(zx)) + _safe_log(np.abs(zy))
    logs = logc + _power_logsum(basis.alphas, logmag)
    dphase = np.angle(zx) - np.angle(zy)
    angles = basis.alphas @ dphase
    lm, phase = log_complex_sum(logs, angles)
    return KernelValue(LogComplex(lm, phase), basis.varpi)


def _t(varpi) -> tuple[int, ...]:
    return tuple(int(v) for v in np.atleast_1d(np.asarray(varpi)).ravel())


def _compositions(n: int, parts: int):
    if parts == 1:
        yield (n,)
        return
    for head in range(n + 1):
        for tail in _compositions(n - head, parts - 1):
            yield (head,) + tail


def level_kernel_residual(d: int, n: int, x, y) -> float:
    """Relative residual of the degree-n multinomial kernel identity.

    sum_{|alpha| = n} c_alpha x^alpha conj(y)^alpha must equal
    ((n + d)! / (pi^d n!)) <y, x>^n; computed in extended precision.
    """
    zx = np.asarray(x.z, dtype=np.complex128)
    zy = np.asarray(y.z, dtype=np.complex128)
    prod = (zx * np.conj(zy)).astype(np.complex256)
    lhs = np.complex256(0)
    for alpha in _compositions(n, d + 1):
        logc = log_factorial(n + d) - d * _LOG_PI - np.sum(
            log_factorial(np.array(alpha))
        )
        term = np.exp(np.longdouble(logc)).astype(np.complex256)
        for i, e in enumerate(alpha):
            if e:
                term = term * prod[i] ** e
        lhs = lhs + term
    s = np.sum(prod)
    rhs = np.exp(log_factorial(n + d) - d * _LOG_PI - log_factorial(n)) * s**n
    denom = max(abs(complex(lhs)), abs(complex(rhs)))
    if denom == 0:
        return 0.0
    return float(abs(complex(lhs - rhs)) / denom)


def mc_orthonormality_oracle(
    d: int, alpha, beta, samples: int, seed: int
) -> tuple[complex, float]:
    """Monte Carlo moment int z^alpha conj(z)^beta dsigma on the unit sphere.

    Sampling is by normalized complex Gaussians; the closed form for
    alpha = beta is d! alpha! / (|alpha| + d)!, zero otherwise.  Returns the
    complex estimate and the standard error of its mean.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    al = np.asarray(alpha, dtype=np.int64).ravel()
    be = np.asarray(beta, dtype=np.int64).ravel()
    if al.shape != (d + 1,) or be.shape != (d + 1,):
        raise ValueError("alpha and beta must have d+1 components")
    if np.any(al < 0) or np.any(be < 0):
        raise ValueError("exponents must be nonnegative")
    rng = np.random.default_rng(seed)
    chunk = 200_000
    total = np.complex128(0)
    total_sq = 0.0
    done = 0
    while done < samples:
        b = min(chunk, samples - done)
        z = rng.standard_normal((b, d + 1)) + 1j * rng.standard_normal((b, d + 1))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        vals = np.ones(b, dtype=np.complex128)
        for i in range(d + 1):
            if al[i]:
                vals *= z[:, i] ** al[i]
            if be[i]:
                vals *= np.conj(z[:, i]) ** be[i]
        total += vals.sum()
        total_sq += float(np.sum(np.abs(vals) ** 2))
        done += b
    mean = total / samples
    var = total_sq / samples - abs(mean) ** 2
    stderr = math.sqrt(max(var, 0.0) / samples)
    return complex(mean), stderr
