import logging
import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from PointingLab.services import pointing
from PointingLab.services.pointing import (
    LinkDirection,
    PointingVariant,
    ValidityConditionError,
    VibrationProfile,
)
from PointingLab.services.specfun import SpecialFunctionDomainError

N_T, N_R = 25, 30
U_GRID = np.array([0.01, 0.05, 0.2, 0.4, 0.6, 0.8, 0.95, 0.999])


def _theta_cdf_two(beta_a: float, beta_b: float, x: float) -> float:
    """P(G_a + G_b <= x) for G ~ Gamma(1/2, beta) by direct convolution."""
    ga = stats.gamma(0.5, scale=beta_a)
    gb = stats.gamma(0.5, scale=beta_b)
    value, _ = integrate.quad(lambda t: ga.pdf(t) * gb.cdf(x - t), 0.0, x, limit=200, epsabs=1e-13)
    return value


def _normalization(model) -> float:
    value, _ = integrate.quad(lambda u: model.g0 * model.pdf(model.g0 * u), 0.0, 1.0, limit=400)
    return value


def test_profile_validation():
    with pytest.raises(ValueError):
        VibrationProfile(0.1, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        VibrationProfile(-1e-3, 0.0, 0.0, 0.0)
    p = VibrationProfile.from_degrees(1.0, 0.0, 0.0, 0.0)
    assert p.sigma_tx == pytest.approx(math.radians(1.0))
    assert p.frozen_tx().sigma_tx == 0.0


def test_beta_components(general_profile):
    b = pointing.beta_components(general_profile, N_T, N_R)
    assert b.tx == pytest.approx((general_profile.sigma_tx * N_T / 1.061) ** 2)
    assert b.ry == pytest.approx((general_profile.sigma_ry * N_R / 1.061) ** 2)


def test_gamma_sum_spec_single_beta_is_exact():
    spec = pointing.gamma_sum_spec([0.2])
    assert spec.K == 0
    assert spec.c_g == 1.0
    assert spec.theta0 == pytest.approx(1.0)


def test_gamma_sum_spec_captures_mass():
    spec = pointing.gamma_sum_spec([0.05, 0.08, 0.11, 0.03])
    assert spec.theta0 >= 1.0 - 1e-6
    assert spec.beta == tuple(sorted(spec.beta))
    assert spec.shape == 2.0


def test_gamma_sum_equal_betas_reduce_to_gamma():
    beta = 0.07
    spec = pointing.gamma_sum_spec([beta] * 4)
    x = np.array([0.01, 0.05, 0.1, 0.3, 0.6])
    np.testing.assert_allclose(pointing.gamma_sum_cdf(spec, x), stats.gamma(2.0, scale=beta).cdf(x), atol=1e-12)
    np.testing.assert_allclose(pointing.gamma_sum_pdf(spec, x), stats.gamma(2.0, scale=beta).pdf(x), rtol=1e-10)


def test_gamma_sum_unequal_betas_against_convolution():
    spec = pointing.gamma_sum_spec([0.04, 0.11])
    for x in (0.02, 0.1, 0.3, 0.7):
        assert pointing.gamma_sum_cdf(spec, x) == pytest.approx(_theta_cdf_two(0.04, 0.11, x), abs=5e-6)


def test_general_model_cdf_equal_betas():
    profile = VibrationProfile.from_degrees(0.5, 0.5, 0.5, 0.5)
    model = pointing.general_model(profile, 30, 30)
    beta = pointing.beta_components(profile, 30, 30).tx
    expected = special.gammaincc(2.0, -np.log(U_GRID) / beta)
    np.testing.assert_allclose(model.cdf(model.g0 * U_GRID), expected, atol=1e-9)
    assert model.g0 == pytest.approx(math.pi * 900)


def test_general_pdf_integrates_to_one(general_profile):
    model = pointing.general_model(general_profile, N_T, N_R)
    assert _normalization(model) == pytest.approx(1.0, abs=1e-6)


def test_cdf_endpoints_and_monotone(general_profile):
    model = pointing.general_model(general_profile, N_T, N_R)
    u = np.linspace(0.0, 1.0, 1001)
    cdf = model.cdf(model.g0 * u)
    assert cdf[0] == 0.0
    assert cdf[-1] == 1.0
    assert np.all(np.diff(cdf) >= -1e-12)
    assert model.cdf(2.0 * model.g0) == 1.0


def test_negative_gain_is_rejected(general_profile):
    model = pointing.general_model(general_profile, N_T, N_R)
    with pytest.raises(SpecialFunctionDomainError):
        model.cdf(-1.0)


def test_symmetric_equal_betas_is_gamma_two():
    beta = 0.09
    model = pointing.PointingModel(PointingVariant.SYMMETRIC, g0=10.0, betas=(beta, beta))
    expected = special.gammaincc(2.0, -np.log(U_GRID) / beta)
    np.testing.assert_allclose(model.cdf(10.0 * U_GRID), expected, atol=1e-12)


def test_symmetric_continuity_across_equal_betas():
    h = 10.0 * U_GRID
    exact = pointing.cdf_symmetric(0.09, 0.09, 10.0, h)
    near = pointing.cdf_symmetric(0.09, 0.09 * (1.0 + 1e-7), 10.0, h)
    np.testing.assert_allclose(near, exact, atol=1e-6)
    pdf_exact = pointing.pdf_symmetric(0.09, 0.09, 10.0, h)
    pdf_near = pointing.pdf_symmetric(0.09, 0.09 * (1.0 + 1e-7), 10.0, h)
    np.testing.assert_allclose(pdf_near, pdf_exact, rtol=1e-5)


def test_general_and_symmetric_agree_in_degenerate_case(per_node_profile):
    general = pointing.general_model(per_node_profile, N_T, N_R)
    symmetric = pointing.symmetric_model(per_node_profile, N_T, N_R)
    h = general.g0 * np.linspace(0.001, 1.0, 1000)
    assert np.max(np.abs(general.cdf(h) - symmetric.cdf(h))) <= 1e-5


def test_symmetric_model_warns_on_unequal_planes(general_profile, caplog):
    with caplog.at_level(logging.WARNING, logger="PointingLab.services.pointing"):
        pointing.symmetric_model(general_profile, N_T, N_R)
    assert "symmetric model uses their mean" in caplog.text


def test_symmetric_pdf_integrates_to_one(per_node_profile):
    model = pointing.symmetric_model(per_node_profile, N_T, N_R)
    assert _normalization(model) == pytest.approx(1.0, abs=1e-7)


def test_ula_cdf_against_convolution(ula_profile):
    model = pointing.ula_model(ula_profile, N_T, N_R)
    assert model.variant is PointingVariant.ULA
    assert model.g0 == pytest.approx(math.sqrt(N_T * N_R))
    b = pointing.beta_components(ula_profile, N_T, N_R)
    for u in (0.3, 0.6, 0.9):
        x = -math.log(u)
        expected = 1.0 - _theta_cdf_two(b.ty, b.ry, x)
        assert model.cdf(model.g0 * u) == pytest.approx(expected, abs=2e-6)


def test_ula_pdf_integrates_to_one(ula_profile):
    assert _normalization(pointing.ula_model(ula_profile, N_T, N_R)) == pytest.approx(1.0, abs=1e-6)


def test_exponential_sum_tracks_hoyt_form(ula_profile):
    exact = pointing.ula_model(ula_profile, N_T, N_R)
    approx = pointing.ula_approx_model(ula_profile, N_T, N_R, n_terms=30)
    assert approx.uses_exponential_sum
    h = exact.g0 * np.linspace(0.001, 1.0, 1000)
    assert np.max(np.abs(exact.cdf(h) - approx.cdf(h))) <= 1e-3


def test_hoyt_terms_for_tolerance():
    n = pointing.hoyt_terms_for_tolerance(0.5, 1e-4)
    rho = 0.5 / 1.5
    assert 2.0 * rho ** n <= 1e-4 < 2.0 * rho ** (n - 1)
    assert pointing.hoyt_terms_for_tolerance(1.0, 1e-4) == 1
    with pytest.raises(ValueError):
        pointing.hoyt_terms_for_tolerance(0.0, 1e-3)


def test_hoyt_weights_sum_to_one():
    params = pointing.hoyt_params(0.03, 0.07, 30)
    assert math.fsum(params.weights) == pytest.approx(1.0, abs=1e-6)
    assert params.t_q == pytest.approx(math.sqrt(0.03 / 0.07))


def test_one_stable_node_uses_moving_node_betas():
    profile = VibrationProfile.from_degrees(0.0, 0.0, 0.7, 0.4)
    model = pointing.remark1_model(profile, LinkDirection.GROUND_TO_UAV, N_T, N_R)
    assert model.variant is PointingVariant.GROUND_TO_UAV
    reference = pointing.general_model(profile, N_T, N_R)
    h = model.g0 * np.linspace(0.001, 1.0, 500)
    assert np.max(np.abs(model.cdf(h) - reference.cdf(h))) <= 1e-5


def test_uav_to_ground_pairs_tx_planes():
    profile = VibrationProfile.from_degrees(0.7, 0.4, 0.0, 0.0)
    model = pointing.remark1_model(profile, "uav-to-ground", N_T, N_R)
    b = pointing.beta_components(profile, N_T, N_R)
    assert model.betas == (b.ty, b.tx)


def test_all_zero_deviations_give_point_mass():
    model = pointing.general_model(VibrationProfile(0.0, 0.0, 0.0, 0.0), N_T, N_R)
    assert model.variant is PointingVariant.POINT_MASS
    assert model.cdf(model.g0) == 1.0
    assert model.cdf(0.5 * model.g0) == 0.0
    assert model.quantile(0.3) == model.g0
    assert model.moment_normalized(2.0) == 1.0


def test_ula_with_stable_pitch_falls_back():
    profile = VibrationProfile.from_degrees(1.0, 0.0, 1.0, 0.4)
    model = pointing.ula_model(profile, N_T, N_R)
    assert model.variant is PointingVariant.GENERAL
    assert len(model.betas) == 1


@pytest.mark.parametrize("factory", ["general", "symmetric", "ula"])
def test_second_moment_matches_quadrature(factory, general_profile, per_node_profile, ula_profile):
    model = {
        "general": lambda: pointing.general_model(general_profile, N_T, N_R),
        "symmetric": lambda: pointing.symmetric_model(per_node_profile, N_T, N_R),
        "ula": lambda: pointing.ula_model(ula_profile, N_T, N_R),
    }[factory]()
    value, _ = integrate.quad(lambda u: u * u * model.g0 * model.pdf(model.g0 * u), 0.0, 1.0, limit=400)
    assert model.moment_normalized(2.0) == pytest.approx(value, rel=1e-5)


def test_quantile_inverts_cdf(per_node_profile):
    model = pointing.symmetric_model(per_node_profile, N_T, N_R)
    for p in (1e-4, 0.1, 0.5, 0.9):
        assert model.cdf(model.quantile(p)) == pytest.approx(p, rel=1e-8)
    with pytest.raises(ValueError):
        model.quantile(1.0)


def test_model_payload_is_checked():
    with pytest.raises(ValueError):
        pointing.PointingModel(PointingVariant.GENERAL, g0=1.0)
    with pytest.raises(ValueError):
        pointing.PointingModel(PointingVariant.SYMMETRIC, g0=1.0, betas=(0.1,))


def test_validity_error_carries_shape():
    err = ValidityConditionError("bad", shape=-0.4)
    assert isinstance(err, ValueError)
    assert err.shape == -0.4


def test_curve_rows(per_node_profile):
    model = pointing.symmetric_model(per_node_profile, N_T, N_R)
    rows = pointing.curve_rows(model, 50)
    assert len(rows) == 50
    assert rows[0][0] == pytest.approx(0.02)
    assert rows[-1][0] == 1.0
    assert rows[-1][2] == 1.0
    assert all(r[1] >= 0.0 for r in rows)


def test_build_beta_uses_all_four_components(general_profile):
    spec = pointing.build_beta(general_profile, N_T, N_R)
    assert spec.beta == tuple(sorted(pointing.beta_components(general_profile, N_T, N_R)))
    assert spec.shape == 2.0


def test_closed_forms_match_model_dispatch(general_profile, ula_profile):
    general = pointing.general_model(general_profile, N_T, N_R)
    h = general.g0 * U_GRID
    np.testing.assert_array_equal(pointing.pdf_general(general, h), general.pdf(h))
    np.testing.assert_array_equal(pointing.cdf_general(general, h), general.cdf(h))

    ula = pointing.ula_model(ula_profile, N_T, N_R)
    bt, br = ula.betas
    h = ula.g0 * U_GRID
    np.testing.assert_array_equal(pointing.pdf_ula(bt, br, ula.g0, h), ula.pdf(h))
    np.testing.assert_array_equal(pointing.cdf_ula(ula.spec, bt, br, ula.g0, h), ula.cdf(h))

    approx = pointing.ula_approx_model(ula_profile, N_T, N_R)
    np.testing.assert_array_equal(pointing.cdf_ula_approx(approx.spec, approx.g0, h), approx.cdf(h))
    np.testing.assert_array_equal(pointing.pdf_ula_approx(approx.spec, approx.g0, h), approx.pdf(h))


def test_linear_array_pdf_outside_support(ula_profile):
    model = pointing.ula_model(ula_profile, N_T, N_R)
    bt, br = model.betas
    assert pointing.pdf_ula(bt, br, model.g0, 0.0) == 0.0
    assert pointing.pdf_ula(bt, br, model.g0, 1.5 * model.g0) == 0.0
    assert pointing.cdf_ula(model.spec, bt, br, model.g0, 1.5 * model.g0) == 1.0


@pytest.mark.parametrize("factory", ["general", "symmetric", "ula"])
def test_pdf_is_cdf_derivative(factory, general_profile, per_node_profile, ula_profile):
    model = {
        "general": lambda: pointing.general_model(general_profile, N_T, N_R),
        "symmetric": lambda: pointing.symmetric_model(per_node_profile, N_T, N_R),
        "ula": lambda: pointing.ula_model(ula_profile, N_T, N_R),
    }[factory]()
    step = 1e-4 * model.g0
    for u in (0.3, 0.6, 0.9):
        h = u * model.g0
        slope = (model.cdf(h + step) - model.cdf(h - step)) / (2.0 * step)
        assert model.pdf(h) == pytest.approx(slope, rel=1e-4)


def test_exponential_sum_error_shrinks_with_terms():
    # strongly unequal Pitch deviations keep the term-count error well above rounding
    profile = VibrationProfile.from_degrees(0.5, 1.0, 0.5, 0.1)
    exact = pointing.ula_model(profile, N_T, N_R)
    h = exact.g0 * np.linspace(0.001, 1.0, 1000)
    errors = [
        float(np.max(np.abs(pointing.ula_approx_model(profile, N_T, N_R, n_terms=n).cdf(h) - exact.cdf(h))))
        for n in (5, 10, 20, 40)
    ]
    assert errors == sorted(errors, reverse=True)
    assert len(set(errors)) == 4
    assert errors[-1] < errors[0] / 10.0
