"""Seeded Monte Carlo experiments for the log-determinant CLT, coverage and risk.

Every replicate ``r`` draws from its own counter-based stream
``Philox(key=(seed, r))``, so results do not depend on how replicates are
split across workers. Two samplers produce the same law of
``log det S - log det Sigma``:

* ``full_matrix`` draws ``n + 1`` Gaussian rows and factorizes S;
* ``bartlett`` sums ``p`` independent ``log chi2`` terms, O(p) per draw.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import estimator
from .matstat import (
    CovSpec,
    ModelDims,
    cholesky_factor,
    cholesky_log_det,
    make_spd_from_spec,
    parse_cov_spec,
    sample_covariance,
)
from .specfun import std_normal_cdf, std_normal_quantile

__all__ = [
    "SAMPLERS",
    "SimConfig",
    "CltDiagnostics",
    "CoverageReport",
    "MseReport",
    "replicate_rng",
    "sample_bartlett_logdet",
    "sample_full_logdet",
    "draw_logdet_errors",
    "run_clt_experiment",
    "run_coverage_experiment",
    "run_mse_experiment",
    "ks_statistic",
    "ks_two_sample",
    "ks_critical_value",
    "moments",
]

SAMPLERS = ("full_matrix", "bartlett")
DEFAULT_SEED = 20240917

# Asymptotic Kolmogorov distribution quantiles c(alpha).
_KS_C = {0.10: 1.224, 0.05: 1.358, 0.01: 1.628, 0.001: 1.949}


@dataclass(frozen=True)
class SimConfig:
    n: int
    p: int
    reps: int
    seed: int = DEFAULT_SEED
    sampler: str = "bartlett"
    sigma_spec: str = "identity"
    level: float = 0.95

    def __post_init__(self):
        ModelDims(self.n, self.p).check()
        if int(self.reps) != self.reps or self.reps < 1:
            raise ValueError(f"reps must be a positive integer, got {self.reps!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.sampler not in SAMPLERS:
            raise ValueError(f"sampler must be one of {SAMPLERS}, got {self.sampler!r}")
        if not 0.0 < self.level < 1.0:
            raise ValueError(f"level must lie in (0, 1), got {self.level!r}")

    @property
    def dims(self):
        return ModelDims(self.n, self.p)

    def cov_spec(self):
        return parse_cov_spec(self.sigma_spec, self.p)

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class CltDiagnostics:
    mean: float
    variance: float
    skewness: float
    ks_stat: float
    reps: int
    centering: str = "exact"

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class CoverageReport:
    """Empirical CI coverage; ``mc_stderr`` is sqrt(level * (1 - level) / reps)."""

    level: float
    empirical_coverage: float
    reps: int
    mc_stderr: float

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class MseReport:
    empirical_mse: float
    exact_mse: float
    upper_bound: float
    lower_bound: float
    reps: int

    def as_dict(self):
        return asdict(self)


def replicate_rng(seed, r):
    """Independent generator for replicate ``r`` of master ``seed``."""
    return np.random.Generator(np.random.Philox(key=np.array([seed, r], dtype=np.uint64)))


def sample_bartlett_logdet(dims, rng):
    """One draw of log det S - log det Sigma: sum_k log chi2_{n-k+1} - p log n."""
    dims = dims.check()
    df = np.arange(dims.n, dims.n - dims.p, -1, dtype=float)
    return math.fsum(np.log(rng.chisquare(df))) - dims.p * math.log(dims.n)


@dataclass
class _FullSampler:
    dims: ModelDims
    cov: np.ndarray
    factor: np.ndarray = field(init=False)
    log_det: float = field(init=False)

    def __post_init__(self):
        self.factor = cholesky_factor(self.cov)
        self.log_det = cholesky_log_det(self.cov)

    def __call__(self, rng):
        z = rng.standard_normal((self.dims.n + 1, self.dims.p))
        x = z @ self.factor.T
        s, _ = sample_covariance(x)
        return cholesky_log_det(s) - self.log_det


def sample_full_logdet(dims, sigma_spec, rng):
    """One draw of log det S - log det Sigma from n + 1 Gaussian observations.

    ``sigma_spec`` is a :class:`CovSpec`, a spec string or an explicit matrix.
    The standard normals are mapped through the Cholesky factor of Sigma, so
    with a shared stream the result is the same for every Sigma up to rounding.
    """
    dims = dims.check()
    return _FullSampler(dims, _resolve_cov(sigma_spec, dims.p))(rng)


def _resolve_cov(sigma_spec, p):
    if isinstance(sigma_spec, CovSpec):
        return make_spd_from_spec(sigma_spec)
    if isinstance(sigma_spec, str):
        return make_spd_from_spec(parse_cov_spec(sigma_spec, p))
    cov = np.asarray(sigma_spec, dtype=float)
    if cov.shape != (p, p):
        raise ValueError(f"covariance must be {p}x{p}, got shape {cov.shape}")
    return cov


def draw_logdet_errors(cfg, workers=1):
    """Array of ``cfg.reps`` draws of log det S - log det Sigma, ordered by replicate."""
    dims = cfg.dims
    if cfg.sampler == "bartlett":
        draw = lambda rng: sample_bartlett_logdet(dims, rng)  # noqa: E731
    else:
        draw = _FullSampler(dims, make_spd_from_spec(cfg.cov_spec()))

    def run(block):
        return [draw(replicate_rng(cfg.seed, r)) for r in block]

    out = np.empty(cfg.reps)
    if workers <= 1 or cfg.reps < 2 * workers:
        out[:] = run(range(cfg.reps))
        return out
    bounds = np.linspace(0, cfg.reps, workers + 1).astype(int)
    blocks = [range(a, b) for a, b in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for block, values in zip(blocks, pool.map(run, blocks)):
            out[block.start:block.stop] = values
    return out


def moments(values):
    """(mean, unbiased variance, skewness); variance and skewness are 0 for one value."""
    v = np.asarray(values, dtype=float)
    m = v.size
    mean = math.fsum(v) / m
    if m < 2:
        return mean, 0.0, 0.0
    d = v - mean
    m2 = math.fsum(d * d) / m
    m3 = math.fsum(d * d * d) / m
    var = m2 * m / (m - 1)
    skew = m3 / m2**1.5 if m2 > 0 else 0.0
    return mean, var, skew


def ks_statistic(samples, cdf=std_normal_cdf):
    """One-sample two-sided Kolmogorov-Smirnov distance sup |F_m - cdf|."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    m = x.size
    if m == 0:
        raise ValueError("ks_statistic needs at least one sample")
    if not np.all(np.isfinite(x)):
        raise ValueError("ks_statistic needs finite samples")
    f = np.array([cdf(v) for v in x])
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - f), np.max(f - (i - 1) / m)))


def ks_two_sample(a, b):
    """Two-sample Kolmogorov-Smirnov distance between empirical CDFs."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("ks_two_sample needs non-empty samples")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_critical_value(m1, m2, alpha=0.01):
    """Large-sample two-sample KS critical value c(alpha) * sqrt((m1 + m2) / (m1 m2))."""
    return _KS_C[alpha] * math.sqrt((m1 + m2) / (m1 * m2))


def run_clt_experiment(cfg, centering="exact", workers=1):
    """Moments and KS distance to N(0, 1) of the standardized log-determinant.

    ``centering="exact"`` uses tau(n, p) and sigma(n, p). ``"boundary"``
    (requires p = n) uses log (n-1)! - n log n and sqrt(2 log n).
    """
    raw = draw_logdet_errors(cfg, workers)
    if centering == "exact":
        z = (raw - estimator.tau(cfg.dims)) / estimator.sigma(cfg.dims)
    elif centering == "boundary":
        if cfg.p != cfg.n:
            raise ValueError("boundary centering requires p = n")
        z = (raw - estimator.boundary_centering(cfg.n)) / estimator.boundary_scale(cfg.n)
    else:
        raise ValueError(f"unknown centering {centering!r}")
    mean, var, skew = moments(z)
    return CltDiagnostics(mean, var, skew, ks_statistic(z), cfg.reps, centering)


def run_coverage_experiment(cfg, workers=1):
    """Fraction of replicate intervals T_hat -/+ z sigma that contain the truth."""
    raw = draw_logdet_errors(cfg, workers)
    err = raw - estimator.tau(cfg.dims)
    half = std_normal_quantile(0.5 * (1.0 + cfg.level)) * estimator.sigma(cfg.dims)
    covered = int(np.count_nonzero(np.abs(err) <= half))
    return CoverageReport(
        cfg.level,
        covered / cfg.reps,
        cfg.reps,
        math.sqrt(cfg.level * (1.0 - cfg.level) / cfg.reps),
    )


def run_mse_experiment(cfg, workers=1):
    """Empirical squared error of T_hat next to the exact risk and its bounds."""
    raw = draw_logdet_errors(cfg, workers)
    err = raw - estimator.tau(cfg.dims)
    dims = cfg.dims
    return MseReport(
        math.fsum(err * err) / cfg.reps,
        estimator.exact_mse(dims),
        estimator.risk_upper_bound(dims),
        estimator.info_lower_bound(dims),
        cfg.reps,
    )
