"""Scalar special functions: log-gamma, digamma, trigamma and the standard normal.

The gamma-family functions accept Python floats or numpy arrays. Arguments
below ``_SHIFT`` are pushed upward with the recurrence relations and the
result is finished with the Stirling-type asymptotic series, which gives
uniform accuracy from 0.5 up to 1e6 and beyond.
"""

import math
from statistics import NormalDist

import numpy as np

__all__ = [
    "DomainError",
    "log_gamma",
    "digamma",
    "trigamma",
    "std_normal_cdf",
    "std_normal_quantile",
]

_SHIFT = 10.0

# B_2, B_4, ..., B_14
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_STD_NORMAL = NormalDist()


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


def _as_positive(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} requires finite arguments")
    if np.any(arr <= 0):
        raise DomainError(f"{name} requires positive arguments, got {x!r}")
    return arr


def _finish(result, x):
    if np.ndim(x) == 0 and not isinstance(x, np.ndarray):
        return float(result)
    return result


def _shift_up(x):
    """Return (x shifted to >= _SHIFT, list of the original offsets)."""
    z = x.copy()
    offsets = []
    while True:
        low = z < _SHIFT
        if not np.any(low):
            return z, offsets
        offsets.append((low, z.copy()))
        z = np.where(low, z + 1.0, z)


def log_gamma(x):
    """log Gamma(x) for x > 0."""
    arr = _as_positive(x, "log_gamma")
    z, offsets = _shift_up(arr)
    inv = 1.0 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    power = inv
    for k, b in enumerate(_BERNOULLI, start=1):
        series += b / (2 * k * (2 * k - 1)) * power
        power = power * inv2
    out = (z - 0.5) * np.log(z) - z + _HALF_LOG_2PI + series
    # log Gamma(x) = log Gamma(x + 1) - log x
    for low, zk in offsets:
        out = out - np.where(low, np.log(zk), 0.0)
    return _finish(out, x)


def digamma(x):
    """psi(x) = d/dx log Gamma(x) for x > 0."""
    arr = _as_positive(x, "digamma")
    z, offsets = _shift_up(arr)
    inv2 = 1.0 / (z * z)
    series = np.zeros_like(z)
    power = inv2
    for k, b in enumerate(_BERNOULLI, start=1):
        series += b / (2 * k) * power
        power = power * inv2
    out = np.log(z) - 0.5 / z - series
    corr = np.zeros_like(z)
    for low, zk in offsets:
        corr += np.where(low, 1.0 / zk, 0.0)
    return _finish(out - corr, x)


def trigamma(x):
    """psi'(x), the derivative of the digamma function, for x > 0."""
    arr = _as_positive(x, "trigamma")
    z, offsets = _shift_up(arr)
    inv = 1.0 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    power = inv2 * inv
    for b in _BERNOULLI:
        series += b * power
        power = power * inv2
    out = inv + 0.5 * inv2 + series
    corr = np.zeros_like(z)
    for low, zk in offsets:
        corr += np.where(low, 1.0 / (zk * zk), 0.0)
    return _finish(out + corr, x)


def std_normal_cdf(z):
    """Phi(z), computed from the complementary error function."""
    z = float(z)
    if not math.isfinite(z):
        raise DomainError("std_normal_cdf requires a finite argument")
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def std_normal_quantile(u):
    """Inverse of :func:`std_normal_cdf` on the open unit interval."""
    u = float(u)
    if not 0.0 < u < 1.0:
        raise DomainError(f"std_normal_quantile requires 0 < u < 1, got {u!r}")
    return _STD_NORMAL.inv_cdf(u)
