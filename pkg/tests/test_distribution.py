import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from mvtcond import (
    MVTParams,
    ScaledChiSquare,
    log_pdf,
    make_rng,
    params_from_dict,
    params_to_dict,
    pdf,
    sample,
    sample_scaled_chisq,
    scaled_chisq_log_pdf,
)
from mvtcond.distribution import load_params
from mvtcond.exceptions import DimensionMismatch, InvalidParameters, NonPositiveSupport
from mvtcond.verification import ks_statistic, student_t_cdf

from conftest import random_spd

# 50-digit mpmath evaluation of the density formula at mu = 0,
# Sigma = [[2, 1], [1, 3]], nu = 5, x = (1, 1)  (d = 3/5, |Sigma| = 5)
WORKED_LOG_PDF = -3.0392464212009067824450832590993806530646836385885


def test_log_pdf_cauchy_center():
    p = MVTParams([0.0], [[1.0]], 1.0)
    assert log_pdf(p, [0.0]) == pytest.approx(math.log(1.0 / math.pi), rel=1e-15)
    assert log_pdf(p, [0.0]) == pytest.approx(-1.14473, abs=1e-5)


@pytest.mark.parametrize("nu", [0.5, 1.0, 3.0, 17.0, 1e4])
def test_log_pdf_bivariate_center_is_free_of_nu(nu):
    p = MVTParams([0.0, 0.0], np.eye(2), nu)
    assert log_pdf(p, [0.0, 0.0]) == pytest.approx(math.log(1.0 / (2.0 * math.pi)), rel=1e-12)


def test_log_pdf_nu2_center():
    p = MVTParams([0.0], [[1.0]], 2.0)
    assert log_pdf(p, [0.0]) == pytest.approx(math.log(1.0 / (2.0 * math.sqrt(2.0))), rel=1e-15)
    assert pdf(p, [0.0]) == pytest.approx(1.0 / (2.0 * math.sqrt(2.0)), rel=1e-15)


def test_log_pdf_worked_against_high_precision(worked):
    assert log_pdf(worked, [1.0, 1.0]) == pytest.approx(WORKED_LOG_PDF, rel=1e-14)
    assert pdf(worked, [1.0, 1.0]) == pytest.approx(math.exp(WORKED_LOG_PDF), rel=1e-14)


def test_log_pdf_batch_and_dimension_check(worked):
    x = np.array([[1.0, 1.0], [0.0, 0.0], [-3.0, 2.0]])
    np.testing.assert_allclose(log_pdf(worked, x), [log_pdf(worked, r) for r in x], rtol=1e-15)
    with pytest.raises(DimensionMismatch):
        log_pdf(worked, [1.0, 2.0, 3.0])


def test_pdf_underflows_to_zero():
    p = MVTParams([0.0], [[1e-6]], 200.0)
    assert pdf(p, [1e6]) == 0.0
    assert math.isfinite(log_pdf(p, [1e6]))


def test_scaled_chisq_exponential_cases():
    exp1 = ScaledChiSquare(2.0, 2.0)
    with pytest.raises(NonPositiveSupport):
        scaled_chisq_log_pdf(exp1, 0.0)
    assert scaled_chisq_log_pdf(exp1, 1.0) == pytest.approx(-1.0, abs=1e-15)
    s = ScaledChiSquare(2.0, 1.0)
    assert scaled_chisq_log_pdf(s, 0.5) == pytest.approx(math.log(0.5 * math.exp(-0.25)), rel=1e-15)


def test_scaled_chisq_b6_c7():
    s = ScaledChiSquare(6.0, 7.0)
    # closed form (b/2) log(c/2) - log Gamma(b/2) - c/2 at w = 1, checked with mpmath
    assert scaled_chisq_log_pdf(s, 1.0) == pytest.approx(-0.43485827507384132, rel=1e-14)
    mass, _ = integrate.quad(lambda w: math.exp(scaled_chisq_log_pdf(s, w)), 0.0, np.inf)
    assert mass == pytest.approx(1.0, abs=1e-10)


def test_scaled_chisq_invalid():
    with pytest.raises(InvalidParameters):
        ScaledChiSquare(0.0, 1.0)
    with pytest.raises(InvalidParameters):
        ScaledChiSquare(1.0, -2.0)


def test_sample_scaled_chisq_determinism():
    s = ScaledChiSquare(3.3, 1.7)
    a = sample_scaled_chisq(s, make_rng(11))
    assert a == sample_scaled_chisq(s, make_rng(11))
    assert a > 0.0


def test_sample_scaled_chisq_mean_and_ks():
    s = ScaledChiSquare(5.0, 5.0)
    n = 10**6
    w = sample_scaled_chisq(s, make_rng(2024), n)
    se = math.sqrt(s.var() / n)  # var = 2b / c^2 = 0.4
    assert abs(w.mean() - 1.0) < 4.0 * se
    assert ks_statistic(w, s.cdf).passed


@pytest.mark.parametrize("shape", [0.05, 0.3, 0.75])
def test_sample_scaled_chisq_small_shape(shape):
    s = ScaledChiSquare(2.0 * shape, 3.0)
    w = sample_scaled_chisq(s, make_rng(5), 200_000)
    assert np.all(w >= 0.0)
    assert ks_statistic(w, s.cdf).passed


def test_sample_empty_and_deterministic(worked):
    assert sample(worked, 0, make_rng(1)).shape == (0, 2)
    a = sample(worked, 3, make_rng(99))
    b = sample(worked, 3, make_rng(99))
    assert a.tobytes() == b.tobytes()


def test_sample_variance_nu10():
    p = MVTParams([0.0, 0.0], np.eye(2), 10.0)
    n = 10**6
    x = sample(p, n, make_rng(7))
    for j in range(2):
        sq = x[:, j] ** 2
        se = sq.std(ddof=1) / math.sqrt(n)
        assert abs(sq.mean() - 1.25) < 4.0 * se


def test_sample_ks_t3():
    p = MVTParams([0.0], [[1.0]], 3.0)
    x = sample(p, 10**6, make_rng(31))[:, 0]
    assert ks_statistic(x, lambda t: student_t_cdf(t, 3.0)).passed


def test_affine_consistency_bitwise():
    rng = np.random.default_rng(0)
    sigma = random_spd(rng, 3)
    mu = np.array([1.5, -2.0, 0.25])
    full = MVTParams(mu, sigma, 4.5)
    standard = MVTParams(np.zeros(3), np.eye(3), 4.5)
    a = sample(full, 1000, make_rng(123))
    b = mu + sample(standard, 1000, make_rng(123)) @ full.factor.lower.T
    assert a.tobytes() == b.tobytes()


@pytest.mark.parametrize("nu", [1.0, 5.0])
def test_normalization_univariate(nu):
    p = MVTParams([0.7], [[2.5]], nu)
    mass, _ = integrate.quad(lambda t: pdf(p, [t]), -np.inf, np.inf, epsabs=1e-12, epsrel=1e-12, limit=500)
    assert mass == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("nu", [1.0, 5.0])
def test_normalization_bivariate(nu):
    sigma = np.array([[2.0, 0.6], [0.6, 1.0]])
    p = MVTParams([0.5, -1.0], sigma, nu)
    chol = np.linalg.cholesky(sigma)
    jac = np.linalg.det(chol)

    # polar coordinates around mu after the linear map x = mu + chol u
    def integrand(r, theta):
        u = np.array([r * math.cos(theta), r * math.sin(theta)])
        return pdf(p, p.mu + chol @ u) * jac * r

    mass, _ = integrate.dblquad(integrand, 0.0, 2.0 * math.pi, 0.0, np.inf, epsabs=1e-11, epsrel=1e-11)
    assert mass == pytest.approx(1.0, abs=1e-6)


dyadic = st.integers(-2**20, 2**20).map(lambda k: k / 1024.0)


@settings(max_examples=100, deadline=None)
@given(p=st.integers(1, 5), seed=st.integers(0, 2**32 - 1), data=st.data())
def test_log_pdf_symmetric(p, seed, data):
    rng = np.random.default_rng(seed)
    mu = np.array(data.draw(st.lists(st.integers(-50, 50), min_size=p, max_size=p)), dtype=float)
    v = np.array(data.draw(st.lists(dyadic, min_size=p, max_size=p)))
    params = MVTParams(mu, random_spd(rng, p), float(rng.uniform(0.3, 40.0)))
    assert log_pdf(params, mu + v) == log_pdf(params, mu - v)


@settings(max_examples=50, deadline=None)
@given(p=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_log_pdf_radially_decreasing(p, seed):
    rng = np.random.default_rng(seed)
    params = MVTParams(rng.normal(size=p), random_spd(rng, p), float(rng.uniform(0.3, 40.0)))
    u = rng.normal(size=p)
    ts = np.linspace(0.0, 50.0, 400)[1:]
    vals = log_pdf(params, params.mu + ts[:, None] * u)
    assert np.all(np.diff(vals) < 0.0)


def test_heavy_tail_ordering():
    rng = np.random.default_rng(8)
    sigma = random_spd(rng, 3)
    mu = rng.normal(size=3)
    u = rng.normal(size=3)
    chol = np.linalg.cholesky(sigma)
    x = mu + chol @ (10.0 * u / np.linalg.norm(u))  # Mahalanobis radius 10
    assert pdf(MVTParams(mu, sigma, 1.0), x) > pdf(MVTParams(mu, sigma, 30.0), x)


def test_params_validation():
    with pytest.raises(InvalidParameters):
        MVTParams([0.0], [[1.0]], 0.0)
    with pytest.raises(InvalidParameters):
        MVTParams([0.0], [[1.0]], float("inf"))
    with pytest.raises(DimensionMismatch):
        MVTParams([0.0, 1.0], [[1.0]], 1.0)


def test_params_are_immutable(worked):
    with pytest.raises(ValueError):
        worked.mu[0] = 3.0
    with pytest.raises(AttributeError):
        worked.nu = 3.0


def test_json_round_trip(tmp_path, worked):
    doc = params_to_dict(worked)
    assert doc == {"mu": [0.0, 0.0], "sigma": [[2.0, 1.0], [1.0, 3.0]], "nu": 5.0}
    path = tmp_path / "p.json"
    path.write_text(json.dumps(doc))
    back = load_params(path)
    assert log_pdf(back, [1.0, 1.0]) == log_pdf(worked, [1.0, 1.0])


@pytest.mark.parametrize(
    "doc, key",
    [
        ({"sigma": [[1.0]], "nu": 1.0}, "mu"),
        ({"mu": [0.0], "nu": 1.0}, "sigma"),
        ({"mu": [0.0], "sigma": [[1.0]]}, "nu"),
        ({"mu": [0.0], "sigma": [[1.0]], "nu": -1.0}, "nu"),
        ({"mu": [0.0, "a"], "sigma": [[1.0, 0.0], [0.0, 1.0]], "nu": 1.0}, "mu"),
        ({"mu": [0.0, 0.0], "sigma": [[1.0, 0.0]], "nu": 1.0}, "sigma"),
        ({"mu": [0.0, 0.0], "sigma": [[1.0, 2.0], [2.0, 1.0]], "nu": 1.0}, "sigma"),
        ({"mu": [0.0, 0.0], "sigma": [[1.0, 0.0], [0.5, 1.0]], "nu": 1.0}, "sigma"),
    ],
)
def test_json_diagnostics_name_the_key(doc, key):
    with pytest.raises(InvalidParameters, match=f"'{key}'"):
        params_from_dict(doc)
