"""Log-determinant and differential entropy estimation for high-dimensional Gaussians."""

__version__ = "0.1.0"

from .estimator import (  # noqa: E402
    estimate_entropy,
    estimate_log_det,
    exact_mse,
    info_lower_bound,
    risk_upper_bound,
    sigma,
    tau,
)
from .matstat import (  # noqa: E402
    ModelDims,
    SingularOrNotPdError,
    cholesky_log_det,
    sample_covariance,
)

__all__ = [
    "ModelDims",
    "SingularOrNotPdError",
    "cholesky_log_det",
    "estimate_entropy",
    "estimate_log_det",
    "exact_mse",
    "info_lower_bound",
    "risk_upper_bound",
    "sample_covariance",
    "sigma",
    "tau",
]
