"""Sample covariance, Cholesky log-determinants and test covariance matrices."""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, solve_triangular

__all__ = [
    "SingularOrNotPdError",
    "InvalidSpecError",
    "ModelDims",
    "CovSpec",
    "as_sample_matrix",
    "sample_covariance",
    "known_mean_covariance",
    "cholesky_factor",
    "cholesky_log_det",
    "make_spd_from_spec",
    "quad_form",
    "parse_cov_spec",
]


class SingularOrNotPdError(np.linalg.LinAlgError):
    """A factorization pivot was non-positive or not finite."""


class InvalidSpecError(ValueError):
    """Malformed covariance specification."""


@dataclass(frozen=True)
class ModelDims:
    """Degrees of freedom ``n`` (observations minus one) and dimension ``p``."""

    n: int
    p: int

    def check(self, allow_boundary=True):
        """Raise ``ValueError`` unless ``1 <= p <= n`` (``p < n`` if not allow_boundary)."""
        n, p = self.n, self.p
        if int(n) != n or int(p) != p:
            raise ValueError(f"n and p must be integers, got n={n!r}, p={p!r}")
        if p < 1 or n < 1:
            raise ValueError(f"need n >= 1 and p >= 1, got n={n}, p={p}")
        if p > n or (not allow_boundary and p == n):
            raise ValueError(
                f"need p <= n for estimation, got n={n}, p={p}; "
                "the log-determinant cannot be estimated consistently when p > n"
            )
        return self


def as_sample_matrix(x):
    """Validate an ``N x p`` data array (rows are observations)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError(f"sample matrix must be 2-D, got shape {x.shape}")
    if x.shape[0] < 2:
        raise ValueError(f"need at least 2 observations, got {x.shape[0]}")
    if x.shape[1] < 1:
        raise ValueError("sample matrix has no columns")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample matrix contains non-finite entries")
    return x


def sample_covariance(x):
    """Return ``(S, dims)`` with S the centered covariance using divisor N - 1."""
    x = as_sample_matrix(x)
    N, p = x.shape
    n = N - 1
    centered = x - x.mean(axis=0)
    s = centered.T @ centered / n
    return 0.5 * (s + s.T), ModelDims(n, p)


def known_mean_covariance(x, mean=None):
    """Covariance about a known mean (zero by default) with divisor N."""
    x = as_sample_matrix(x)
    if mean is not None:
        x = x - np.asarray(mean, dtype=float)
    s = x.T @ x / x.shape[0]
    return 0.5 * (s + s.T)


def _check_square(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def cholesky_factor(a):
    """Lower Cholesky factor of a symmetric matrix, or SingularOrNotPdError."""
    a = _check_square(a)
    if not np.all(np.isfinite(a)):
        raise SingularOrNotPdError("matrix has non-finite entries")
    try:
        low = cholesky(a, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularOrNotPdError(
            f"matrix is not positive definite ({exc}); "
            "typical causes are p > n data or rank-deficient columns"
        ) from None
    d = np.diag(low)
    if not np.all(np.isfinite(d)) or np.any(d <= 0):
        raise SingularOrNotPdError("non-positive pivot in Cholesky factorization")
    return low


def cholesky_log_det(a):
    """log det of a symmetric positive definite matrix, 2 * sum(log diag(L))."""
    return float(2.0 * np.sum(np.log(np.diag(cholesky_factor(a)))))


def quad_form(low, v):
    """v^T A^{-1} v given the lower Cholesky factor of A (no explicit inverse)."""
    w = solve_triangular(low, np.asarray(v, dtype=float), lower=True, check_finite=False)
    return float(np.sum(w * w))


@dataclass(frozen=True)
class CovSpec:
    """Test covariance: ``identity``, ``diag`` (scale a), ``ar`` (rho) or ``random`` (seed)."""

    kind: str
    p: int
    value: float = 1.0
    seed: int = 0

    def __str__(self):
        if self.kind == "identity":
            return "identity"
        if self.kind == "random":
            return f"random:{self.seed}"
        return f"{self.kind}:{self.value!r}"


def parse_cov_spec(text, p):
    """Parse ``identity | diag:a | ar:rho | random:seed`` into a :class:`CovSpec`."""
    kind, _, arg = str(text).strip().partition(":")
    kind = kind.lower()
    try:
        if kind == "identity" and not arg:
            spec = CovSpec("identity", p)
        elif kind == "diag":
            spec = CovSpec("diag", p, value=float(arg))
        elif kind == "ar":
            spec = CovSpec("ar", p, value=float(arg))
        elif kind == "random":
            spec = CovSpec("random", p, seed=int(arg))
        else:
            raise InvalidSpecError(f"kind: unknown covariance spec {text!r}")
    except ValueError as exc:
        if isinstance(exc, InvalidSpecError):
            raise
        raise InvalidSpecError(f"value: cannot parse argument of {text!r}") from None
    _validate_spec(spec)
    return spec


def _validate_spec(spec):
    if int(spec.p) != spec.p or spec.p < 1:
        raise InvalidSpecError(f"p: dimension must be a positive integer, got {spec.p!r}")
    if spec.kind == "diag" and not (np.isfinite(spec.value) and spec.value > 0):
        raise InvalidSpecError(f"value: diagonal entry must be > 0, got {spec.value!r}")
    if spec.kind == "ar" and not -1.0 < spec.value < 1.0:
        raise InvalidSpecError(f"value: AR parameter must lie in (-1, 1), got {spec.value!r}")
    if spec.kind == "random" and not 0 <= spec.seed < 2**64:
        raise InvalidSpecError(f"seed: must be a 64-bit unsigned integer, got {spec.seed!r}")
    if spec.kind not in ("identity", "diag", "ar", "random"):
        raise InvalidSpecError(f"kind: unknown covariance kind {spec.kind!r}")


def make_spd_from_spec(spec):
    """Build the p x p matrix described by ``spec``."""
    _validate_spec(spec)
    p = spec.p
    if spec.kind == "identity":
        return np.eye(p)
    if spec.kind == "diag":
        return spec.value * np.eye(p)
    if spec.kind == "ar":
        idx = np.arange(p)
        return spec.value ** np.abs(idx[:, None] - idx[None, :])
    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    a = rng.standard_normal((p, p))
    m = a.T @ a / p + 0.1 * np.eye(p)
    return 0.5 * (m + m.T)
