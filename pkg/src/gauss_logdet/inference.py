"""Two-sample entropy test, Gaussian KL divergence and quadratic discriminants."""

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.linalg import solve_triangular

from . import estimator
from .matstat import (
    as_sample_matrix,
    cholesky_factor,
    quad_form,
    sample_covariance,
)
from .specfun import std_normal_cdf

__all__ = [
    "DimensionMismatchError",
    "GaussianParams",
    "EntropyTestResult",
    "entropy_equality_test",
    "kl_gaussian_exact",
    "kl_divergence",
    "logdet_ratio_estimate",
    "qda_oracle_discriminant",
    "qda_plugin_discriminant",
    "classify",
]


class DimensionMismatchError(ValueError):
    """Inputs live in different dimensions."""


@dataclass(frozen=True)
class GaussianParams:
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.atleast_2d(np.asarray(self.covariance, dtype=float))
        if mean.ndim != 1:
            raise ValueError("mean must be a vector")
        if cov.shape != (mean.size, mean.size):
            raise DimensionMismatchError(
                f"covariance shape {cov.shape} does not match mean length {mean.size}"
            )
        if not np.array_equal(cov, cov.T):
            raise ValueError("covariance must be symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def p(self):
        return self.mean.size


@dataclass(frozen=True)
class EntropyTestResult:
    """Wald test of equal entropy; ``reject`` iff p_value < alpha."""

    z_stat: float
    p_value: float
    h1: float
    h2: float
    se: float
    alpha: float
    reject: bool

    @property
    def level(self):
        return 1.0 - self.alpha

    def as_dict(self):
        return asdict(self)


def _same_p(x1, x2):
    x1 = as_sample_matrix(x1)
    x2 = as_sample_matrix(x2)
    if x1.shape[1] != x2.shape[1]:
        raise DimensionMismatchError(
            f"samples have different dimensions: {x1.shape[1]} vs {x2.shape[1]}"
        )
    return x1, x2


def entropy_equality_test(x1, x2, alpha=0.05):
    """Test H0: both populations have the same differential entropy.

    z = (H1_hat - H2_hat) / sqrt(sigma_{n1,p}^2 / 4 + sigma_{n2,p}^2 / 4),
    with a two-sided p-value from the normal limit.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    x1, x2 = _same_p(x1, x2)
    e1 = estimator.estimate_entropy(x1)
    e2 = estimator.estimate_entropy(x2)
    se = 0.5 * math.hypot(e1.underlying.sigma, e2.underlying.sigma)
    z = (e1.h_hat - e2.h_hat) / se
    p_value = 2.0 * (1.0 - std_normal_cdf(abs(z)))
    return EntropyTestResult(z, p_value, e1.h_hat, e2.h_hat, se, alpha, p_value < alpha)


def _kl_parts(pp, qq):
    if pp.p != qq.p:
        raise DimensionMismatchError(f"dimensions differ: {pp.p} vs {qq.p}")
    l1 = cholesky_factor(pp.covariance)
    l2 = cholesky_factor(qq.covariance)
    # tr(Sigma2^{-1} Sigma1) = ||L2^{-1} L1||_F^2
    m = solve_triangular(l2, l1, lower=True, check_finite=False)
    trace = float(np.sum(m * m))
    maha = quad_form(l2, qq.mean - pp.mean)
    log_ratio = 2.0 * float(np.sum(np.log(np.diag(l1))) - np.sum(np.log(np.diag(l2))))
    return 0.5 * (trace - pp.p + maha + log_ratio), log_ratio


def kl_gaussian_exact(pp, qq):
    """Closed-form Gaussian relative entropy term for P = N(mu1, Sigma1), Q = N(mu2, Sigma2).

    Returns 0.5 * (tr(Sigma2^-1 Sigma1) - p + (mu2 - mu1)^T Sigma2^-1 (mu2 - mu1)
    + log(det Sigma1 / det Sigma2)), using triangular solves only.

    The log-determinant ratio enters with this orientation on purpose. The
    textbook KL(P || Q) carries log(det Sigma2 / det Sigma1) instead, so the
    two agree only when det Sigma1 = det Sigma2, and this value can be
    negative otherwise. :func:`kl_divergence` returns the textbook quantity.
    """
    return _kl_parts(pp, qq)[0]


def kl_divergence(pp, qq):
    """Textbook KL(P || Q) between two Gaussians; always nonnegative."""
    value, log_ratio = _kl_parts(pp, qq)
    return value - log_ratio


def logdet_ratio_estimate(x1, x2, level=0.95):
    """Estimate log(det Sigma1 / det Sigma2) from two independent samples.

    The variance is sigma_{n1,p}^2 + sigma_{n2,p}^2. The returned
    :class:`~gauss_logdet.estimator.LogDetEstimate` carries the n and tau of
    the first sample, with ``tau`` set to tau1 - tau2.
    """
    x1, x2 = _same_p(x1, x2)
    a = estimator.estimate_log_det(x1, level)
    b = estimator.estimate_log_det(x2, level)
    center = a.t_hat - b.t_hat
    sd = math.hypot(a.sigma, b.sigma)
    lo, hi = estimator.interval(center, sd, level)
    return estimator.LogDetEstimate(center, sd, a.tau - b.tau, lo, hi, level, a.n, a.p)


def _discriminant(z, mu1, l1, mu2, l2, log_det_ratio):
    return -quad_form(l1, z - mu1) + quad_form(l2, z - mu2) - log_det_ratio


def _check_point(z, p):
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.shape != (p,):
        raise DimensionMismatchError(f"point has shape {z.shape}, expected ({p},)")
    return z


def qda_oracle_discriminant(z, pp, qq):
    """Delta(z) with known parameters; Delta > 0 assigns z to the first population."""
    if pp.p != qq.p:
        raise DimensionMismatchError(f"dimensions differ: {pp.p} vs {qq.p}")
    z = _check_point(z, pp.p)
    l1 = cholesky_factor(pp.covariance)
    l2 = cholesky_factor(qq.covariance)
    log_ratio = 2.0 * float(np.sum(np.log(np.diag(l1))) - np.sum(np.log(np.diag(l2))))
    return _discriminant(z, pp.mean, l1, qq.mean, l2, log_ratio)


def qda_plugin_discriminant(z, x1, x2):
    """Delta(z) with sample means and covariances and the bias-corrected log-det ratio."""
    x1, x2 = _same_p(x1, x2)
    z = _check_point(z, x1.shape[1])
    s1, _ = sample_covariance(x1)
    s2, _ = sample_covariance(x2)
    ratio = logdet_ratio_estimate(x1, x2).t_hat
    return _discriminant(
        z, x1.mean(axis=0), cholesky_factor(s1), x2.mean(axis=0), cholesky_factor(s2), ratio
    )


def classify(delta, tol=1e-12):
    """Decision label for a discriminant value."""
    if abs(delta) <= tol:
        return "boundary"
    return "population_1" if delta > 0 else "population_2"
