"""Signed log-domain arithmetic and high-accuracy log-factorials.

Kernel sums multiply factorial ratios against k-th powers of simplex
coordinates; at k of a few thousand these quantities overflow/underflow
float64 by hundreds of orders of magnitude.  Everything value-like in this
package is therefore carried as (sign, log magnitude), with sums done by
log-sum-exp and products by adding logs.  Conversion to a plain float only
happens on demand (ratios, reports).

Log-factorials come from a cumulative table built in extended precision
(80-bit on x86) so that downstream identities checked at 1e-12 relative
tolerance are not polluted by the table itself; beyond the table a Stirling
series with terms through n^-5 is used (its truncation error is far below
extended-precision rounding at those arguments).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_LONG = np.longdouble

# Exact table size: covers every factorial the tight-tolerance paths touch
# (degree up to k*|weight| + d for k <= 4000, |weight| <= 8).
_TABLE_SIZE = 40001

_HALF_LOG_TWO_PI = _LONG(0.5) * np.log(_LONG(2) * _LONG(np.pi))


def _build_table(n: int) -> np.ndarray:
    j = np.arange(n, dtype=_LONG)
    j[0] = 1.0
    return np.cumsum(np.log(j), dtype=_LONG)


_LOGFAC_TABLE = _build_table(_TABLE_SIZE)


def _stirling_logfac(n: np.ndarray) -> np.ndarray:
    # ln n! = (n + 1/2) ln n - n + ln(2*pi)/2 + 1/12n - 1/360n^3 + 1/1260n^5
    # remainder < 1/(1680 n^7), negligible for n above the table.
    n = n.astype(_LONG)
    inv = 1.0 / n
    inv2 = inv * inv
    series = inv / 12.0 * (1.0 - inv2 / 30.0 * (1.0 - inv2 * (10.0 / 42.0)))
    return (n + 0.5) * np.log(n) - n + _HALF_LOG_TWO_PI + series


def log_factorial(n):
    """ln(n!) for nonnegative integer n (scalar or array), extended precision.

    Returns np.longdouble values; table-exact below the internal cutoff,
    Stirling series above it.
    """
    arr = np.asarray(n)
    if np.any(arr < 0):
        raise ValueError("log_factorial requires n >= 0")
    small = arr < _TABLE_SIZE
    if np.all(small):
        out = _LOGFAC_TABLE[arr]
    else:
        out = np.empty(arr.shape, dtype=_LONG)
        out[small] = _LOGFAC_TABLE[arr[small]]
        out[~small] = _stirling_logfac(arr[~small])
    if np.isscalar(n) or arr.ndim == 0:
        return _LONG(out)
    return out


def log_sum_exp(logmags: np.ndarray) -> float:
    """Stable ln(sum exp(l_j)) over an array of log magnitudes.

    Entries of -inf are allowed; an all-(-inf) input yields -inf.
    """
    l = np.asarray(logmags)
    if l.size == 0:
        return -math.inf
    top = np.max(l)
    if not np.isfinite(top):
        return -math.inf
    return float(top + np.log(np.sum(np.exp(l - top))))


def log_complex_sum(logmags: np.ndarray, angles: np.ndarray) -> tuple[float, complex]:
    """Sum of exp(l_j) * e^{i a_j} in log space.

    Returns (log magnitude, unit-modulus phase).  A sum that cancels to zero
    (or an empty input) comes back as (-inf, 1+0j).
    """
    l = np.asarray(logmags)
    if l.size == 0:
        return -math.inf, complex(1.0)
    top = np.max(l)
    if not np.isfinite(top):
        return -math.inf, complex(1.0)
    w = np.exp(l - top)
    s_re = np.sum(w * np.cos(np.asarray(angles, dtype=l.dtype)))
    s_im = np.sum(w * np.sin(np.asarray(angles, dtype=l.dtype)))
    mag = np.hypot(s_re, s_im)
    if mag == 0.0:
        return -math.inf, complex(1.0)
    return float(top + np.log(mag)), complex(float(s_re / mag), float(s_im / mag))


@dataclass(frozen=True)
class LogReal:
    """A real number as sign in {-1, 0, +1} plus natural log of |value|."""

    sign: int
    logmag: float

    @staticmethod
    def zero() -> "LogReal":
        return LogReal(0, -math.inf)

    @staticmethod
    def from_float(x: float) -> "LogReal":
        if x == 0.0:
            return LogReal.zero()
        return LogReal(1 if x > 0 else -1, math.log(abs(x)))

    @staticmethod
    def from_log(logmag: float, sign: int = 1) -> "LogReal":
        if sign == 0 or logmag == -math.inf:
            return LogReal.zero()
        return LogReal(sign, float(logmag))

    def is_zero(self) -> bool:
        return self.sign == 0

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.logmag)

    def __mul__(self, other: "LogReal") -> "LogReal":
        if self.sign == 0 or other.sign == 0:
            return LogReal.zero()
        return LogReal(self.sign * other.sign, self.logmag + other.logmag)

    def __truediv__(self, other: "LogReal") -> "LogReal":
        if other.sign == 0:
            raise ZeroDivisionError("LogReal division by zero")
        if self.sign == 0:
            return LogReal.zero()
        return LogReal(self.sign * other.sign, self.logmag - other.logmag)

    def __pow__(self, e: float) -> "LogReal":
        if self.sign == 0:
            if e <= 0:
                raise ZeroDivisionError("0 to a nonpositive power")
            return LogReal.zero()
        if self.sign < 0:
            raise ValueError("power of a negative LogReal")
        return LogReal(1, self.logmag * e)

    def __neg__(self) -> "LogReal":
        return LogReal(-self.sign, self.logmag)

    def __add__(self, other: "LogReal") -> "LogReal":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = (self, other) if self.logmag >= other.logmag else (other, self)
        delta = math.exp(lo.logmag - hi.logmag)
        if hi.sign == lo.sign:
            return LogReal(hi.sign, hi.logmag + math.log1p(delta))
        if delta == 1.0:
            return LogReal.zero()
        return LogReal(hi.sign, hi.logmag + math.log1p(-delta))

    def ratio(self, other: "LogReal") -> float:
        """self / other as a plain float, formed by log subtraction."""
        return (self / other).to_float()


@dataclass(frozen=True)
class LogComplex:
    """A complex number as log magnitude plus unit-modulus phase."""

    logmag: float
    phase: complex

    @staticmethod
    def zero() -> "LogComplex":
        return LogComplex(-math.inf, complex(1.0))

    @staticmethod
    def from_complex(z: complex) -> "LogComplex":
        m = abs(z)
        if m == 0.0:
            return LogComplex.zero()
        return LogComplex(math.log(m), z / m)

    @staticmethod
    def from_logreal(x: LogReal) -> "LogComplex":
        if x.sign == 0:
            return LogComplex.zero()
        return LogComplex(x.logmag, complex(float(x.sign)))

    def is_zero(self) -> bool:
        return self.logmag == -math.inf

    def abs(self) -> LogReal:
        if self.is_zero():
            return LogReal.zero()
        return LogReal(1, self.logmag)

    def conj(self) -> "LogComplex":
        return LogComplex(self.logmag, self.phase.conjugate())

    def to_complex(self) -> complex:
        if self.is_zero():
            return complex(0.0)
        return math.exp(self.logmag) * self.phase

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        if self.is_zero() or other.is_zero():
            return LogComplex.zero()
        return LogComplex(self.logmag + other.logmag, self.phase * other.phase)

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        if other.is_zero():
            raise ZeroDivisionError("LogComplex division by zero")
        if self.is_zero():
            return LogComplex.zero()
        return LogComplex(self.logmag - other.logmag, self.phase / other.phase)

    def scale(self, x: LogReal) -> "LogComplex":
        return self * LogComplex.from_logreal(x)

    def ratio_to(self, other: "LogComplex") -> complex:
        return (self / other).to_complex()
