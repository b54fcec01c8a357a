"""Bias-corrected log-determinant and entropy estimators, their constants and risk bounds.

For ``N = n + 1`` Gaussian observations in dimension ``p <= n``,
``log det S - log det Sigma`` is distributed as a sum of independent
``log(chi2_m / n)`` terms with ``m = n, n-1, ..., n-p+1``. Everything here
follows from the mean (digamma) and variance (trigamma) of those terms.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .matstat import ModelDims, SingularOrNotPdError, cholesky_log_det, sample_covariance
from .specfun import digamma, log_gamma, std_normal_quantile, trigamma

__all__ = [
    "LogDetEstimate",
    "EntropyEstimate",
    "RiskReport",
    "tau",
    "sigma",
    "sigma_squared",
    "exact_mse",
    "risk_upper_bound",
    "info_lower_bound",
    "diag_lower_bound",
    "DIAG_LOWER_CONSTANT",
    "rnp_ratio",
    "rnp_bound",
    "boundary_centering",
    "boundary_scale",
    "estimate_log_det",
    "estimate_entropy",
    "entropy_from_log_det",
    "interval",
    "clt_standardize",
    "risk_report",
]

# Le Cam two-point constant for the bounded diagonal family, valid once n*p is large.
DIAG_LOWER_CONSTANT = (1.0 - math.sqrt((math.e - 1.0) / 2.0)) / 32.0

_LOG_2PI = math.log(2.0 * math.pi)


def _dims(dims, p=None):
    if not isinstance(dims, ModelDims):
        dims = ModelDims(dims, p)
    return dims.check()


def _dof(dims):
    """Chi-square degrees of freedom n, n-1, ..., n-p+1 as floats, ascending."""
    return np.arange(dims.n - dims.p + 1, dims.n + 1, dtype=float)


@lru_cache(maxsize=1024)
def _tau(n, p):
    m = _dof(ModelDims(n, p))
    return math.fsum(digamma(m / 2.0) - math.log(n / 2.0))


@lru_cache(maxsize=1024)
def _sigma2(n, p):
    return math.fsum(2.0 / _dof(ModelDims(n, p))[::-1])


@lru_cache(maxsize=1024)
def _exact_mse(n, p):
    return math.fsum(trigamma(_dof(ModelDims(n, p)) / 2.0)[::-1])


def tau(dims, p=None):
    """Exact bias of log det S: sum over k of psi((n-k+1)/2) - log(n/2). Always negative."""
    d = _dims(dims, p)
    return _tau(d.n, d.p)


def sigma_squared(dims, p=None):
    d = _dims(dims, p)
    return _sigma2(d.n, d.p)


def sigma(dims, p=None):
    """CLT scale sqrt(sum_k 2/(n-k+1))."""
    return math.sqrt(sigma_squared(dims, p))


def exact_mse(dims, p=None):
    """Finite-sample risk E(T_hat - log det Sigma)^2 = sum_k trigamma((n-k+1)/2).

    The value does not depend on Sigma.
    """
    d = _dims(dims, p)
    return _exact_mse(d.n, d.p)


def risk_upper_bound(dims, p=None):
    """-2 log(1 - p/n) + (10p / 3n) / (n - p); +inf at p = n."""
    d = _dims(dims, p)
    n, p = d.n, d.p
    if p == n:
        return math.inf
    return -2.0 * math.log1p(-p / n) + (10.0 * p) / (3.0 * n) / (n - p)


def info_lower_bound(dims, p=None):
    """Information-inequality minimax lower bound 2p/n."""
    d = _dims(dims, p)
    return 2.0 * d.p / d.n


def diag_lower_bound(dims, p=None):
    """Minimax lower bound C * p / n over bounded scalar-diagonal covariances.

    Holds for any n, p (including p > n) in the regime n*p > max(1/(K-1)^2, 1).
    """
    if not isinstance(dims, ModelDims):
        dims = ModelDims(dims, p)
    if dims.n < 1 or dims.p < 1:
        raise ValueError(f"need n >= 1 and p >= 1, got n={dims.n}, p={dims.p}")
    return DIAG_LOWER_CONSTANT * dims.p / dims.n


def rnp_ratio(dims, p=None):
    """sum_k 1/(n-k+1)^2 divided by sum_k 1/(n-k+1)."""
    m = _dof(_dims(dims, p))[::-1]
    return math.fsum(1.0 / (m * m)) / math.fsum(1.0 / m)


def rnp_bound(n):
    """Uniform-in-p upper bound on :func:`rnp_ratio`; tends to zero as n grows."""
    if int(n) != n or n < 2:
        raise ValueError(f"rnp_bound requires an integer n >= 2, got {n!r}")
    log_n = math.log(n)
    first = 1.0 / (log_n + 1.0)
    second = (math.pi**2 / 6.0) / (math.log(n + 1.0) - math.log(log_n + 1.0))
    return max(first, second)


def boundary_centering(n):
    """log (n-1)! - n log n, the centering of log det S - log det Sigma when p = n."""
    if int(n) != n or n < 2:
        raise ValueError(f"boundary_centering requires an integer n >= 2, got {n!r}")
    return log_gamma(float(n)) - n * math.log(n)


def boundary_scale(n):
    """sqrt(2 log n), the matching scale when p = n."""
    if int(n) != n or n < 2:
        raise ValueError(f"boundary_scale requires an integer n >= 2, got {n!r}")
    return math.sqrt(2.0 * math.log(n))


@dataclass(frozen=True)
class LogDetEstimate:
    t_hat: float
    sigma: float
    tau: float
    ci_lower: float
    ci_upper: float
    level: float
    n: int
    p: int

    def as_dict(self):
        return {
            "n": self.n,
            "p": self.p,
            "tau": self.tau,
            "sigma": self.sigma,
            "t_hat": self.t_hat,
            "level": self.level,
            "ci_lower": self.ci_lower,
            "ci_upper": self.ci_upper,
        }


@dataclass(frozen=True)
class EntropyEstimate:
    h_hat: float
    ci_lower: float
    ci_upper: float
    underlying: LogDetEstimate

    def as_dict(self):
        return {"h_hat": self.h_hat, "ci_lower": self.ci_lower, "ci_upper": self.ci_upper}


@dataclass(frozen=True)
class RiskReport:
    n: int
    p: int
    exact_mse: float
    upper_bound: float
    info_lower_bound: float
    diag_lower_bound: float
    rnp: float
    rnp_bound: float


def _check_level(level):
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must lie in (0, 1), got {level!r}")


def interval(center, scale, level):
    """Two-sided equal-tail normal interval ``center -/+ z * scale``."""
    _check_level(level)
    half = std_normal_quantile(0.5 * (1.0 + level)) * scale
    return center - half, center + half


def estimate_log_det(x, level=0.95):
    """Estimate log det Sigma as log det S - tau(n, p) with a CLT interval.

    ``x`` holds N = n + 1 observations in rows. Raises
    :class:`~gauss_logdet.matstat.SingularOrNotPdError` when S is singular,
    which is certain when p > n.
    """
    _check_level(level)
    s, dims = sample_covariance(x)
    if dims.p > dims.n:
        raise SingularOrNotPdError(
            f"p = {dims.p} exceeds n = {dims.n}: the sample covariance is singular and "
            "log det Sigma cannot be estimated consistently when p > n"
        )
    dims.check()
    log_det_s = cholesky_log_det(s)
    t = tau(dims)
    sd = sigma(dims)
    t_hat = log_det_s - t
    lo, hi = interval(t_hat, sd, level)
    return LogDetEstimate(t_hat, sd, t, lo, hi, level, dims.n, dims.p)


def entropy_from_log_det(log_det, p):
    """Differential entropy of N_p(mu, Sigma) in nats given log det Sigma."""
    return 0.5 * p + 0.5 * p * _LOG_2PI + 0.5 * log_det


def estimate_entropy(x, level=0.95):
    """Differential entropy estimate (nats): the affine image of :func:`estimate_log_det`."""
    est = estimate_log_det(x, level)
    return EntropyEstimate(
        entropy_from_log_det(est.t_hat, est.p),
        entropy_from_log_det(est.ci_lower, est.p),
        entropy_from_log_det(est.ci_upper, est.p),
        est,
    )


def clt_standardize(t_hat, true_log_det, dims, p=None):
    return (t_hat - true_log_det) / sigma(dims, p)


def risk_report(dims, p=None):
    d = _dims(dims, p)
    return RiskReport(
        n=d.n,
        p=d.p,
        exact_mse=exact_mse(d),
        upper_bound=risk_upper_bound(d),
        info_lower_bound=info_lower_bound(d),
        diag_lower_bound=diag_lower_bound(d),
        rnp=rnp_ratio(d),
        rnp_bound=rnp_bound(d.n) if d.n >= 2 else math.inf,
    )
