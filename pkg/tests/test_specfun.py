import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from PointingLab.services import specfun
from PointingLab.services.specfun import SpecialFunctionDomainError


S_GRID = np.array([0.5, 1.0, 2.5, 4.0, 10.0])
X_GRID = np.array([0.01, 0.5, 1.0, 5.0, 20.0])


def test_ln_gamma_matches_scipy():
    x = np.array([0.1, 0.5, 1.0, 1.5, 7.3, 25.0, 170.5])
    np.testing.assert_allclose(specfun.ln_gamma(x), special.gammaln(x), rtol=1e-11, atol=1e-12)


def test_scalar_in_scalar_out():
    assert isinstance(specfun.regularized_upper_gamma(2.0, 1.0), float)
    assert isinstance(specfun.expint_e(1.0, 0.3), float)
    assert isinstance(specfun.marcum_q1(1.0, 2.0), float)


def test_regularized_upper_gamma_grid():
    s, x = np.meshgrid(S_GRID, X_GRID)
    np.testing.assert_allclose(specfun.regularized_upper_gamma(s, x), special.gammaincc(s, x), rtol=1e-9, atol=1e-300)


def test_lower_plus_upper_is_complete_gamma():
    s, x = np.meshgrid(S_GRID, X_GRID)
    total = specfun.lower_incomplete_gamma(s, x) + specfun.upper_incomplete_gamma(s, x)
    np.testing.assert_allclose(total, special.gamma(s), rtol=1e-11)


def test_incomplete_gamma_domain():
    with pytest.raises(SpecialFunctionDomainError):
        specfun.regularized_upper_gamma(-1.0, 1.0)
    with pytest.raises(SpecialFunctionDomainError):
        specfun.lower_incomplete_gamma(1.0, -0.5)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 6])
def test_expint_integer_orders(n):
    x = np.array([0.05, 0.7, 1.0, 5.0, 30.0])
    np.testing.assert_allclose(specfun.expint_e(float(n), x), special.expn(n, x), rtol=1e-10)


@pytest.mark.parametrize("nu", [-3.7, -0.4, 0.3, 1.5, 4.25, 12.6])
def test_expint_real_orders_against_quadrature(nu):
    for x in (0.2, 0.8, 3.0, 15.0):
        expected, _ = integrate.quad(lambda t: t ** -nu * math.exp(-x * t), 1.0, math.inf, epsrel=1e-12, limit=200)
        assert specfun.expint_e(nu, x) == pytest.approx(expected, rel=1e-8)


def test_expint_requires_positive_argument():
    with pytest.raises(SpecialFunctionDomainError):
        specfun.expint_e(1.0, 0.0)


def test_upper_gamma_any_negative_shape():
    # Gamma(-0.5, x) = (Gamma(0.5, x) - x^-0.5 e^-x) / -0.5
    for x in (0.1, 1.0, 4.0):
        expected = (special.gammaincc(0.5, x) * special.gamma(0.5) - x ** -0.5 * math.exp(-x)) / -0.5
        assert specfun.upper_gamma_any(-0.5, x) == pytest.approx(expected, rel=1e-9)


def test_whittaker_scaled_is_x_times_expint():
    x = np.array([0.1, 1.0, 8.0])
    np.testing.assert_allclose(specfun.whittaker_w_scaled(2.7, x), x * specfun.expint_e(2.7, x), rtol=1e-14)


@pytest.mark.parametrize("kappa", [-1.2, -0.3, 0.4])
def test_whittaker_identity_family(kappa):
    # W_{k,k+1/2}(x) = x^(k+1) e^(-x/2) integral_0^inf e^(-x t) (1+t)^(2k) dt
    for x in (0.5, 2.0, 7.0):
        integral, _ = integrate.quad(lambda t: math.exp(-x * t) * (1.0 + t) ** (2.0 * kappa), 0.0, math.inf, epsrel=1e-12)
        expected = x ** (kappa + 1.0) * math.exp(-0.5 * x) * integral
        assert specfun.whittaker_w(kappa, kappa + 0.5, x) == pytest.approx(expected, rel=1e-7)


def test_whittaker_general_indices_fall_back_to_integral():
    # W_{0,1/2}(x) = e^(-x/2)
    value = specfun.whittaker_w(0.0, 0.5, 1.3)
    assert value == pytest.approx(math.exp(-0.65), rel=1e-10)
    other = specfun.whittaker_w(0.25, 0.1, 1.3)
    assert other > 0.0


def test_bessel_i0e_matches_scipy():
    x = np.array([0.0, 0.5, 5.0, 29.0, 31.0, 100.0, 700.0])
    np.testing.assert_allclose(specfun.bessel_i0e(x), special.i0e(x), rtol=1e-10)
    np.testing.assert_allclose(specfun.bessel_i0(x[:5]), special.i0(x[:5]), rtol=1e-10)


def test_marcum_boundaries_exact():
    assert specfun.marcum_q1(1.7, 0.0) == 1.0
    b = np.array([0.3, 1.0, 2.5])
    np.testing.assert_allclose(specfun.marcum_q1(0.0, b), np.exp(-0.5 * b * b), rtol=1e-12)


def test_marcum_matches_noncentral_chi_square():
    a, b = np.meshgrid([0.2, 1.0, 3.0, 6.0], [0.5, 1.5, 4.0, 7.0])
    expected = stats.ncx2.sf(b * b, 2, a * a)
    np.testing.assert_allclose(specfun.marcum_q1(a, b), expected, rtol=1e-7, atol=1e-12)


def test_marcum_domain():
    with pytest.raises(SpecialFunctionDomainError):
        specfun.marcum_q1(-1.0, 1.0)


def test_kummer_matches_scipy():
    a = np.array([0.5, 1.5, 2.0, 3.5])
    b = np.array([1.5, 2.5, 4.0, 1.25])
    x = np.array([0.3, 2.0, 12.0, 40.0])
    np.testing.assert_allclose(specfun.kummer_1f1(a, b, x), special.hyp1f1(a, b, x), rtol=1e-8)


def test_kummer_transformation():
    a, b = 1.3, 2.7
    for x in (-8.0, -2.0, 3.0):
        lhs = specfun.kummer_1f1(a, b, x)
        rhs = math.exp(x) * specfun.kummer_1f1(b - a, b, -x)
        assert lhs == pytest.approx(rhs, rel=1e-7)


def test_kummer_rejects_nonpositive_integer_b():
    with pytest.raises(SpecialFunctionDomainError):
        specfun.kummer_1f1(1.0, -2.0, 0.5)


@pytest.mark.parametrize("b", [-3.0, -0.7, 0.0, 0.7, 2.5])
def test_gauss_moment_against_quadrature(b):
    n, a = 1.5, 0.3
    expected, _ = integrate.quad(lambda x: x ** n * math.exp(-a * x * x + b * x), 0.0, math.inf, epsrel=1e-12)
    assert specfun.gauss_moment(n, a, b) == pytest.approx(expected, rel=1e-7)
    assert specfun.gauss_moment(n, a, b, normalized=True) == pytest.approx(expected / special.gamma(n + 1.0), rel=1e-7)


def test_gauss_moment_domain():
    with pytest.raises(SpecialFunctionDomainError):
        specfun.gauss_moment(-1.5, 1.0, 0.0)


def test_accuracy_record_validation():
    with pytest.raises(ValueError):
        specfun.Accuracy(rel_tol=0.1, max_terms=100)
    looser = specfun.Accuracy(rel_tol=1e-8, max_terms=100)
    assert specfun.expint_e(1.0, 2.0, accuracy=looser) == pytest.approx(special.exp1(2.0), rel=1e-7)


def test_documented_values():
    assert specfun.ln_gamma(7.0) == pytest.approx(math.log(720.0), rel=1e-13)
    assert specfun.upper_incomplete_gamma(1.0, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-12)
    assert specfun.upper_incomplete_gamma(1.0, 0.0) == pytest.approx(1.0, rel=1e-12)
    assert specfun.kummer_1f1(1.0, 2.0, 1.0) == pytest.approx(math.e - 1.0, rel=1e-12)
    assert specfun.kummer_1f1(0.0, 3.0, 5.0) == 1.0
    assert specfun.bessel_i0(-2.3) == pytest.approx(specfun.bessel_i0(2.3), rel=1e-15)


def test_whittaker_incomplete_gamma_identity():
    # x^(-nu/2) e^(-x/2) W_{-nu/2,(1-nu)/2}(x) = Gamma(1-nu, x), here nu = -1
    lhs = 2.0 ** 0.5 * math.exp(-1.0) * specfun.whittaker_w(0.5, 1.0, 2.0)
    assert lhs == pytest.approx(3.0 * math.exp(-2.0), rel=1e-9)


def test_marcum_is_monotone():
    b = np.linspace(0.0, 6.0, 61)
    for a in (0.0, 0.5, 2.0):
        assert np.all(np.diff(specfun.marcum_q1(a, b)) <= 1e-15)
    a = np.linspace(0.0, 6.0, 61)
    assert np.all(np.diff(specfun.marcum_q1(a, 1.5)) >= -1e-15)
