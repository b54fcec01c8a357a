import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gauss_logdet import estimator as est
from gauss_logdet.inference import (
    DimensionMismatchError,
    GaussianParams,
    classify,
    entropy_equality_test,
    kl_divergence,
    kl_gaussian_exact,
    logdet_ratio_estimate,
    qda_oracle_discriminant,
    qda_plugin_discriminant,
)
from gauss_logdet.matstat import SingularOrNotPdError, make_spd_from_spec, parse_cov_spec
from gauss_logdet.sim import ks_statistic, replicate_rng


def kl_dense_oracle(m1, s1, m2, s2):
    """Same closed form with explicit inverses and determinants."""
    inv = np.linalg.inv(s2)
    d = m2 - m1
    p = len(m1)
    return 0.5 * (np.trace(inv @ s1) - p + d @ inv @ d + math.log(np.linalg.det(s1) / np.linalg.det(s2)))


def entropy_test_rejections(n, p, reps, alpha, scale2=1.0, seed=0):
    out = []
    root2 = math.sqrt(scale2)
    for r in range(reps):
        rng = replicate_rng(seed, r)
        x1 = rng.standard_normal((n + 1, p))
        x2 = root2 * rng.standard_normal((n + 1, p))
        out.append(entropy_equality_test(x1, x2, alpha))
    return out


class TestEntropyTest:
    def test_identical_data(self):
        x = np.random.default_rng(0).standard_normal((30, 4))
        res = entropy_equality_test(x, x)
        assert res.z_stat == 0.0
        assert res.p_value == 1.0
        assert not res.reject

    def test_antisymmetric(self):
        rng = np.random.default_rng(1)
        x1 = rng.standard_normal((40, 5))
        x2 = 1.3 * rng.standard_normal((25, 5))
        a = entropy_equality_test(x1, x2)
        b = entropy_equality_test(x2, x1)
        assert a.z_stat == -b.z_stat
        assert a.p_value == b.p_value

    def test_se_formula(self):
        rng = np.random.default_rng(2)
        res = entropy_equality_test(rng.standard_normal((41, 6)), rng.standard_normal((21, 6)), alpha=0.1)
        assert res.se == pytest.approx(math.sqrt(est.sigma(40, 6) ** 2 / 4 + est.sigma(20, 6) ** 2 / 4), rel=1e-15)
        assert res.level == pytest.approx(0.9)

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(3)
        with pytest.raises(DimensionMismatchError):
            entropy_equality_test(rng.standard_normal((10, 3)), rng.standard_normal((10, 4)))

    def test_singular(self):
        rng = np.random.default_rng(3)
        with pytest.raises(SingularOrNotPdError):
            entropy_equality_test(rng.standard_normal((5, 8)), rng.standard_normal((10, 8)))

    def test_power(self):
        res = entropy_test_rejections(200, 50, 1000, 0.05, scale2=1.5, seed=55)
        assert np.mean([r.reject for r in res]) >= 0.9

    def test_null_statistic_normal(self):
        res = entropy_test_rejections(150, 40, 2000, 0.05, seed=66)
        assert ks_statistic([r.z_stat for r in res]) <= 0.035


class TestKl:
    def test_identical(self):
        pp = GaussianParams([1.0, -2.0], make_spd_from_spec(parse_cov_spec("ar:0.3", 2)))
        assert kl_gaussian_exact(pp, pp) == pytest.approx(0.0, abs=1e-14)

    def test_mean_shift(self):
        assert kl_gaussian_exact(GaussianParams([0.0], [[1.0]]), GaussianParams([1.0], [[1.0]])) == 0.5

    def test_worked_example(self):
        pp = GaussianParams([0.0, 0.0], np.diag([2.0, 2.0]))
        qq = GaussianParams([0.0, 0.0], np.eye(2))
        # 0.5 * (4 - 2 + 0 + log 4)
        assert kl_gaussian_exact(pp, qq) == pytest.approx(1.6931471805599453, abs=1e-9)

    def test_asymmetric(self):
        pp = GaussianParams([0.0, 0.0], np.diag([2.0, 2.0]))
        qq = GaussianParams([0.0, 0.0], np.eye(2))
        assert abs(kl_gaussian_exact(pp, qq) - kl_gaussian_exact(qq, pp)) > 0.1

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1))
    def test_matches_dense(self, p, s1, s2):
        c1 = make_spd_from_spec(parse_cov_spec(f"random:{s1}", p))
        c2 = make_spd_from_spec(parse_cov_spec(f"random:{s2}", p))
        m = np.random.default_rng(s1).standard_normal((2, p))
        pp, qq = GaussianParams(m[0], c1), GaussianParams(m[1], c2)
        assert kl_gaussian_exact(pp, qq) == pytest.approx(kl_dense_oracle(m[0], c1, m[1], c2), rel=1e-8, abs=1e-10)
        assert abs(kl_gaussian_exact(pp, pp)) <= 1e-10

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1))
    def test_textbook_divergence_nonnegative(self, p, s1, s2):
        c1 = make_spd_from_spec(parse_cov_spec(f"random:{s1}", p))
        c2 = make_spd_from_spec(parse_cov_spec(f"random:{s2}", p))
        m = np.random.default_rng(s2).standard_normal((2, p))
        pp, qq = GaussianParams(m[0], c1), GaussianParams(m[1], c2)
        kl = kl_divergence(pp, qq)
        assert kl >= -1e-10
        log_ratio = math.log(np.linalg.det(c1) / np.linalg.det(c2))
        assert kl == pytest.approx(kl_dense_oracle(m[0], c1, m[1], c2) - log_ratio, rel=1e-8, abs=1e-10)
        assert abs(kl_divergence(pp, pp)) <= 1e-10

    def test_textbook_monte_carlo(self):
        """E_P[log p - log q] by sampling, against the closed form."""
        rng = np.random.default_rng(12)
        m1, m2 = np.array([0.5, -1.0]), np.array([0.0, 0.3])
        c1 = np.array([[2.0, 0.4], [0.4, 0.7]])
        c2 = np.array([[1.0, -0.2], [-0.2, 1.5]])
        x = rng.multivariate_normal(m1, c1, size=400_000)

        def logpdf(x, m, c):
            d = x - m
            q = np.einsum("ij,jk,ik->i", d, np.linalg.inv(c), d)
            return -0.5 * (q + math.log(np.linalg.det(c)) + 2 * math.log(2 * math.pi))

        mc = np.mean(logpdf(x, m1, c1) - logpdf(x, m2, c2))
        assert kl_divergence(GaussianParams(m1, c1), GaussianParams(m2, c2)) == pytest.approx(mc, abs=0.01)

    @pytest.mark.xfail(strict=True, reason="the det(Sigma1)/det(Sigma2) orientation makes this negative when det Sigma1 < det Sigma2")
    def test_nonnegative_invariant(self):
        pp = GaussianParams([0.0, 0.0], np.eye(2))
        qq = GaussianParams([0.0, 0.0], np.diag([2.0, 2.0]))
        assert kl_gaussian_exact(pp, qq) >= -1e-10

    def test_equal_determinants_agree(self):
        pp = GaussianParams([0.0, 1.0], np.diag([2.0, 0.5]))
        qq = GaussianParams([1.0, 0.0], np.diag([0.5, 2.0]))
        assert kl_gaussian_exact(pp, qq) == pytest.approx(kl_divergence(pp, qq), abs=1e-14)
        assert kl_gaussian_exact(pp, qq) >= 0

    def test_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            kl_gaussian_exact(GaussianParams([0.0], [[1.0]]), GaussianParams([0.0, 0.0], np.eye(2)))

    def test_not_pd(self):
        bad = GaussianParams([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(SingularOrNotPdError):
            kl_gaussian_exact(bad, GaussianParams([0.0, 0.0], np.eye(2)))


class TestLogDetRatio:
    def test_same_sample(self):
        x = np.random.default_rng(4).standard_normal((30, 5))
        r = logdet_ratio_estimate(x, x)
        assert r.t_hat == 0.0
        assert r.ci_lower == -r.ci_upper

    def test_scale(self):
        x = np.random.default_rng(5).standard_normal((30, 5))
        assert logdet_ratio_estimate(x, 2 * x).t_hat == pytest.approx(-2 * 5 * math.log(2), abs=1e-12)

    def test_variance(self):
        rng = np.random.default_rng(6)
        r = logdet_ratio_estimate(rng.standard_normal((51, 4)), rng.standard_normal((31, 4)))
        assert r.sigma**2 == pytest.approx(est.sigma(50, 4) ** 2 + est.sigma(30, 4) ** 2, rel=1e-14)

    def test_unbiased_monte_carlo(self):
        n, p, reps = 100, 20, 10_000
        vals = np.empty(reps)
        for r in range(reps):
            rng = replicate_rng(77, r)
            x1 = rng.standard_normal((n + 1, p))
            x2 = 2.0 * rng.standard_normal((n + 1, p))
            vals[r] = logdet_ratio_estimate(x1, x2).t_hat
        se = math.sqrt(2) * est.sigma(n, p) / math.sqrt(reps)
        assert abs(vals.mean() + p * math.log(4)) <= 4 * se


class TestQda:
    def test_boundary_point(self):
        e1 = np.array([1.0, 0.0, 0.0])
        pp = GaussianParams(e1, np.eye(3))
        qq = GaussianParams(-e1, np.eye(3))
        delta = qda_oracle_discriminant(np.zeros(3), pp, qq)
        assert abs(delta) <= 1e-12
        assert classify(delta) == "boundary"

    def test_variance_only(self):
        delta = qda_oracle_discriminant([0.0], GaussianParams([0.0], [[4.0]]), GaussianParams([0.0], [[1.0]]))
        assert delta == pytest.approx(-math.log(4), abs=1e-14)
        assert classify(delta) == "population_2"

    def test_at_mean(self):
        cov = make_spd_from_spec(parse_cov_spec("random:2", 4))
        m1 = np.array([1.0, 2.0, -1.0, 0.5])
        m2 = np.zeros(4)
        delta = qda_oracle_discriminant(m1, GaussianParams(m1, cov), GaussianParams(m2, cov))
        d = m1 - m2
        assert delta == pytest.approx(d @ np.linalg.solve(cov, d), rel=1e-10)
        assert delta > 0 and classify(delta) == "population_1"

    def test_linear_when_equal_cov(self):
        cov = make_spd_from_spec(parse_cov_spec("ar:0.4", 3))
        pp = GaussianParams([1.0, 0.0, 2.0], cov)
        qq = GaussianParams([-1.0, 1.0, 0.0], cov)
        a, b = np.array([0.3, -1.0, 2.0]), np.array([2.0, 0.5, -1.0])
        d0 = qda_oracle_discriminant(a, pp, qq)
        d1 = qda_oracle_discriminant(b, pp, qq)
        dm = qda_oracle_discriminant(0.25 * a + 0.75 * b, pp, qq)
        assert dm == pytest.approx(0.25 * d0 + 0.75 * d1, abs=1e-10)

    def test_plugin_same_sample(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal((40, 3))
        z = np.array([0.2, -0.5, 1.0])
        assert qda_plugin_discriminant(z, x, x) == pytest.approx(0.0, abs=1e-12)

    def test_plugin_scale_shift(self):
        rng = np.random.default_rng(9)
        x1 = rng.standard_normal((40, 3))
        x2 = rng.standard_normal((50, 3)) + 1.0
        c = 3.0
        a = logdet_ratio_estimate(x1, x2).t_hat
        b = logdet_ratio_estimate(c * x1, x2).t_hat
        assert b - a == pytest.approx(2 * 3 * math.log(c), abs=1e-12)

    def test_plugin_consistency(self):
        p = 5
        rng = np.random.default_rng(10)
        m1, m2 = np.zeros(p), np.array([4.0, 0.0, 2.0, 0.0, 0.0])
        c1 = np.eye(p)
        c2 = make_spd_from_spec(parse_cov_spec("ar:0.5", p)) * 1.5
        x1 = rng.multivariate_normal(m1, c1, size=501)
        x2 = rng.multivariate_normal(m2, c2, size=501)
        pts = np.vstack([rng.multivariate_normal(m1, c1, 500), rng.multivariate_normal(m2, c2, 500)])
        pp, qq = GaussianParams(m1, c1), GaussianParams(m2, c2)
        agree = [
            np.sign(qda_oracle_discriminant(z, pp, qq)) == np.sign(qda_plugin_discriminant(z, x1, x2))
            for z in pts
        ]
        assert np.mean(agree) >= 0.98

    def test_mismatch(self):
        pp = GaussianParams([0.0, 0.0], np.eye(2))
        with pytest.raises(DimensionMismatchError):
            qda_oracle_discriminant([0.0], pp, pp)
        with pytest.raises(DimensionMismatchError):
            qda_oracle_discriminant([0.0, 0.0], pp, GaussianParams([0.0], [[1.0]]))


class TestParams:
    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            GaussianParams([0.0, 0.0], np.eye(3))

    def test_asymmetric(self):
        with pytest.raises(ValueError):
            GaussianParams([0.0, 0.0], [[1.0, 0.1], [0.2, 1.0]])
