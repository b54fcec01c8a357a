"""Command-line front end.

Exit codes: 0 success, 2 parse or configuration error, 3 singular or not
positive definite covariance, 4 dimension mismatch.
"""

import argparse
import csv
import math
import sys

import numpy as np

from . import __version__, estimator, inference, report, sim
from .matstat import InvalidSpecError, ModelDims, SingularOrNotPdError, parse_cov_spec

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SINGULAR = 3
EXIT_MISMATCH = 4

_SAMPLER_NAMES = {"full": "full_matrix", "bartlett": "bartlett"}


class InputError(Exception):
    """Unreadable or malformed input file or argument."""


def _parse_float(cell):
    try:
        value = float(cell)
    except ValueError:
        return None
    return value


def read_csv_matrix(path):
    """Rows of floats from a CSV file; a non-numeric first row is a header."""
    try:
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if not rows:
        raise InputError(f"{path}: no data rows")
    if any(_parse_float(c) is None for c in rows[0]):
        rows = rows[1:]
    if not rows:
        raise InputError(f"{path}: no data rows after header")
    width = len(rows[0])
    data = []
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise InputError(f"{path}: row {lineno} has {len(row)} fields, expected {width}")
        values = [_parse_float(c) for c in row]
        if any(v is None or not math.isfinite(v) for v in values):
            raise InputError(f"{path}: row {lineno} has a missing or non-numeric value")
        data.append(values)
    return np.array(data, dtype=float)


def read_params(path):
    """Gaussian parameters: first row the mean, next p rows the covariance."""
    m = read_csv_matrix(path)
    p = m.shape[1]
    if m.shape[0] != p + 1:
        raise InputError(f"{path}: expected 1 mean row and {p} covariance rows, got {m.shape[0]} rows")
    try:
        return inference.GaussianParams(m[0], m[1:])
    except inference.DimensionMismatchError:
        raise
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _parse_point(text):
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise InputError(f"cannot parse point {text!r}") from None


def _base(command, inputs, seed=None):
    out = {"command": command, "version": __version__}
    if seed is not None:
        out["seed"] = seed
    out["inputs"] = inputs
    return out


def cmd_estimate(args):
    x = read_csv_matrix(args.data)
    est = estimator.estimate_log_det(x, args.level)
    ent = estimator.estimate_entropy(x, args.level)
    results = est.as_dict()
    results["log_det_sample_cov"] = est.t_hat + est.tau
    results["entropy"] = ent.as_dict()
    return {**_base("estimate", {"data": args.data, "level": args.level}), "results": results}


def cmd_bounds(args):
    n, p = args.n, args.p
    if n < 1 or p < 1:
        raise InputError(f"n and p must be positive integers, got n={n}, p={p}")
    results = {"n": n, "p": p}
    if p <= n:
        dims = ModelDims(n, p)
        results.update(
            tau=estimator.tau(dims),
            sigma=estimator.sigma(dims),
            exact_mse=estimator.exact_mse(dims),
            risk_upper_bound=estimator.risk_upper_bound(dims),
            info_lower_bound=estimator.info_lower_bound(dims),
            diag_lower_bound=estimator.diag_lower_bound(dims),
            rnp_ratio=estimator.rnp_ratio(dims),
            rnp_bound=estimator.rnp_bound(n) if n >= 2 else None,
        )
    else:
        results["estimation"] = "suppressed: p > n, log det Sigma is not consistently estimable"
        results["diag_lower_bound"] = estimator.diag_lower_bound(ModelDims(n, p))
    return {**_base("bounds", {"n": n, "p": p}), "results": results}


def cmd_simulate(args):
    cfg = sim.SimConfig(
        n=args.n,
        p=args.p,
        reps=args.reps,
        seed=args.seed,
        sampler=_SAMPLER_NAMES[args.sampler],
        sigma_spec=args.sigma,
        level=args.level,
    )
    if cfg.sampler == "full_matrix":
        cfg.cov_spec()
    if args.kind == "clt":
        res = sim.run_clt_experiment(cfg, centering=args.centering, workers=args.workers)
    elif args.kind == "coverage":
        res = sim.run_coverage_experiment(cfg, workers=args.workers)
    else:
        res = sim.run_mse_experiment(cfg, workers=args.workers)
    inputs = {
        "kind": args.kind,
        "n": cfg.n,
        "p": cfg.p,
        "reps": cfg.reps,
        "sampler": cfg.sampler,
        "sigma": cfg.sigma_spec,
        "level": cfg.level,
        "centering": args.centering,
    }
    return {**_base("simulate", inputs, seed=cfg.seed), "results": res.as_dict()}


def cmd_test_entropy(args):
    x1 = read_csv_matrix(args.data1)
    x2 = read_csv_matrix(args.data2)
    res = inference.entropy_equality_test(x1, x2, args.alpha)
    inputs = {"data1": args.data1, "data2": args.data2, "alpha": args.alpha}
    return {**_base("test-entropy", inputs), "results": res.as_dict()}


def cmd_kl(args):
    pp = read_params(args.params1)
    qq = read_params(args.params2)
    results = {
        "p": pp.p,
        "kl_pq": inference.kl_gaussian_exact(pp, qq),
        "kl_qp": inference.kl_gaussian_exact(qq, pp),
        "kl_divergence_pq": inference.kl_divergence(pp, qq),
        "kl_divergence_qp": inference.kl_divergence(qq, pp),
    }
    return {**_base("kl", {"params1": args.params1, "params2": args.params2}), "results": results}


def cmd_qda(args):
    if not args.z:
        raise InputError("qda needs at least one --z point")
    points = [_parse_point(z) for z in args.z]
    rows = []
    if args.plugin:
        x1 = read_csv_matrix(args.file1)
        x2 = read_csv_matrix(args.file2)
        ratio = inference.logdet_ratio_estimate(x1, x2, args.level)
        for z in points:
            delta = inference.qda_plugin_discriminant(z, x1, x2)
            rows.append({"z": z.tolist(), "delta": delta, "decision": inference.classify(delta)})
        extra = {"log_det_ratio": ratio.as_dict()}
    else:
        pp = read_params(args.file1)
        qq = read_params(args.file2)
        for z in points:
            delta = inference.qda_oracle_discriminant(z, pp, qq)
            rows.append({"z": z.tolist(), "delta": delta, "decision": inference.classify(delta)})
        extra = {}
    inputs = {
        "mode": "plugin" if args.plugin else "oracle",
        "file1": args.file1,
        "file2": args.file2,
        "z": [z.tolist() for z in points],
    }
    return {**_base("qda", inputs), "results": {**extra, "points": rows}}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gauss-logdet",
        description="Log-determinant and entropy estimation for Gaussian covariance matrices.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output(p):
        p.add_argument("--output", help="write the report here instead of standard output")

    p = sub.add_parser("estimate", help="bias-corrected log det and entropy from a CSV sample")
    p.add_argument("data")
    p.add_argument("--level", type=float, default=0.95)
    add_output(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("bounds", help="exact risk and minimax bounds for (n, p)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    add_output(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="Monte Carlo check of the CLT, coverage or risk")
    p.add_argument("kind", choices=("clt", "coverage", "mse"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=sim.DEFAULT_SEED)
    p.add_argument("--sampler", choices=tuple(_SAMPLER_NAMES), default="bartlett")
    p.add_argument("--sigma", default="identity", help="identity | diag:a | ar:rho | random:seed")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--centering", choices=("exact", "boundary"), default="exact")
    p.add_argument("--workers", type=int, default=1)
    add_output(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("test-entropy", help="two-sample test of equal differential entropy")
    p.add_argument("data1")
    p.add_argument("data2")
    p.add_argument("--alpha", type=float, default=0.05)
    add_output(p)
    p.set_defaults(func=cmd_test_entropy)

    p = sub.add_parser("kl", help="exact KL divergence between two Gaussian parameter files")
    p.add_argument("params1")
    p.add_argument("params2")
    add_output(p)
    p.set_defaults(func=cmd_kl)

    p = sub.add_parser("qda", help="quadratic discriminant for one or more points")
    p.add_argument("file1")
    p.add_argument("file2")
    p.add_argument("--z", action="append", help="comma-separated point; repeatable")
    p.add_argument("--plugin", action="store_true", help="treat the files as data samples")
    p.add_argument("--level", type=float, default=0.95)
    add_output(p)
    p.set_defaults(func=cmd_qda)
    return parser


def _summary_table(payload):
    lines = []

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k, v in obj.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        else:
            lines.append(f"{prefix:<32} {obj}")

    walk("", payload.get("results", {}))
    return "\n".join(lines) + "\n"


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SingularOrNotPdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if "p > n" not in str(exc):
            print(
                "error: the covariance is singular or not positive definite; "
                "with p > n the log-determinant cannot be estimated consistently",
                file=sys.stderr,
            )
        return EXIT_SINGULAR
    except inference.DimensionMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (InvalidSpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    text = report.dumps(payload)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if sys.stderr.isatty():
        sys.stderr.write(_summary_table(payload))
    return EXIT_OK


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
