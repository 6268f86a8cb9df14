"""End-to-end channel h = h_L * h_a * h_p and the outage sweeps built on it.

h_L is the deterministic path loss, h_a the alpha-mu small-scale fading and
h_p the pointing-error gain. The end-to-end distribution depends on h only
through r = h / (G0 h_L), which every evaluator below works with.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize

from PointingLab.services import antenna
from PointingLab.services.pointing import (
    GammaSumSpec,
    HoytParams,
    PointingModel,
    PointingVariant,
    ValidityConditionError,
    VibrationProfile,
    symmetric_model,
)
from PointingLab.services.specfun import (
    QuadratureError,
    SpecialFunctionDomainError,
    expint_e,
    gauss_moment,
    ln_gamma,
    lower_incomplete_gamma,
    upper_incomplete_gamma,
)

logger = logging.getLogger(__name__)

BOLTZMANN = 1.380649e-23
NEAR_EQUAL_GAP = 1e-4
CENTRAL_STEP = 1e-4


class SnrConvention(str, Enum):
    SQUARED = "squared"
    FRIIS = "friis"


class E2EMethod(str, Enum):
    GENERAL = "general"
    SYMMETRIC = "symmetric"
    LEMMA2 = "lemma2"
    ULA = "ula"
    MIXTURE = "mixture"
    POINT_MASS = "point-mass"


@dataclass(frozen=True)
class FadingParams:
    alpha: float
    mu: int
    h_hat: float = 1.0

    def __post_init__(self) -> None:
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if int(self.mu) != self.mu or self.mu < 1:
            raise ValueError(f"mu must be a positive integer, got {self.mu}")
        object.__setattr__(self, "mu", int(self.mu))
        if not self.h_hat > 0.0:
            raise ValueError(f"h_hat must be positive, got {self.h_hat}")

    def second_moment(self) -> float:
        """E[h_a^2]."""
        a, m = self.alpha, self.mu
        return self.h_hat ** 2 * math.exp(ln_gamma(m + 2.0 / a) - ln_gamma(m) - (2.0 / a) * math.log(m))


@dataclass(frozen=True)
class LinkConfig:
    distance_m: float
    carrier_hz: float = 280e9
    absorption_per_m: float = 0.0
    tx_power_w: float = 0.01
    bandwidth_hz: float = 100e6
    temperature_k: float = 300.0
    snr_threshold_db: float = 5.0
    snr_convention: SnrConvention = SnrConvention.SQUARED
    gain: float = 1.0  # calibration constant multiplying the SNR

    def __post_init__(self) -> None:
        object.__setattr__(self, "snr_convention", SnrConvention(self.snr_convention))
        for name in ("distance_m", "carrier_hz", "tx_power_w", "bandwidth_hz", "temperature_k", "gain"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be positive, got {value}")
        if not (math.isfinite(self.absorption_per_m) and self.absorption_per_m >= 0.0):
            raise ValueError(f"absorption_per_m must be nonnegative, got {self.absorption_per_m}")

    @property
    def wavelength(self) -> float:
        return antenna.SPEED_OF_LIGHT / self.carrier_hz

    @property
    def noise_power_w(self) -> float:
        return BOLTZMANN * self.temperature_k * self.bandwidth_hz

    @property
    def snr_threshold_linear(self) -> float:
        return 10.0 ** (self.snr_threshold_db / 10.0)

    def at_distance(self, distance_m: float) -> "LinkConfig":
        return replace(self, distance_m=distance_m)


def free_space_loss(link: LinkConfig) -> float:
    return (link.wavelength / (4.0 * math.pi * link.distance_m)) ** 2


def absorption_loss(link: LinkConfig) -> float:
    return math.exp(-0.5 * link.absorption_per_m * link.distance_m)


def path_loss(link: LinkConfig) -> float:
    """h_L = (lambda / 4 pi Z)^2 exp(-K Z / 2)."""
    return free_space_loss(link) * absorption_loss(link)


def log_path_loss(link: LinkConfig) -> float:
    """ln h_L, finite where h_L itself underflows."""
    return 2.0 * math.log(link.wavelength / (4.0 * math.pi * link.distance_m)) - 0.5 * link.absorption_per_m * link.distance_m


# ---------------------------------------------------------------------------
# alpha-mu fading
# ---------------------------------------------------------------------------

def _as_array(h) -> Tuple[bool, np.ndarray]:
    scalar = np.ndim(h) == 0
    ha = np.atleast_1d(np.asarray(h, dtype=float))
    if np.any(np.isnan(ha)) or np.any(ha < 0.0):
        raise SpecialFunctionDomainError("channel gain must be nonnegative")
    return scalar, ha


def _finish(out: np.ndarray, scalar: bool):
    if scalar:
        return float(out[0])
    return out


def alpha_mu_pdf(f: FadingParams, h_a):
    scalar, ha = _as_array(h_a)
    out = np.zeros_like(ha)
    pos = ha > 0.0
    if np.any(pos):
        a, m = f.alpha, f.mu
        ln_t = np.log(ha[pos] / f.h_hat)
        with np.errstate(under="ignore"):
            out[pos] = np.exp(
                math.log(a) + m * math.log(m) - ln_gamma(m) - math.log(f.h_hat)
                + (a * m - 1.0) * ln_t - m * np.exp(a * ln_t)
            )
    return _finish(out, scalar)


def alpha_mu_cdf(f: FadingParams, h_a):
    """1 - exp(-y) sum_{k<mu} y^k / k! with y = mu (h_a / h_hat)^alpha, i.e. P(mu, y)."""
    scalar, ha = _as_array(h_a)
    with np.errstate(over="ignore"):
        y = np.minimum(f.mu * (ha / f.h_hat) ** f.alpha, 1e300)
        out = np.atleast_1d(lower_incomplete_gamma(float(f.mu), y)) / math.exp(ln_gamma(f.mu))
    return _finish(np.clip(out, 0.0, 1.0), scalar)


# ---------------------------------------------------------------------------
# Closed-form constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class E2EParams:
    """Constants shared by the closed-form end-to-end expressions.

    a1, a2 are the alpha-mu constants; a3 = a1 / (G0 h_L) is the density
    prefactor. v1..v4 are the exponential-integral orders of the symmetric
    PDF (v1, v2) and CDF (v3 - m, v4 - m); v5, v6 the per-term orders of the
    linear-array forms. s1, s2 are the incomplete-gamma shapes of the
    gamma form, legal only when both are positive.
    """

    alpha: float
    mu: int
    g0: float
    h_l: float
    a1: float
    a2: float
    a3: float
    v1: Optional[float] = None
    v2: Optional[float] = None
    v3: Optional[float] = None
    v4: Optional[float] = None
    v5: Tuple[float, ...] = ()
    v6: Tuple[float, ...] = ()
    s1: Optional[float] = None
    s2: Optional[float] = None

    def scaled(self, h: np.ndarray) -> np.ndarray:
        return h / (self.g0 * self.h_l)

    def a0(self, h):
        return self.scaled(np.asarray(h, dtype=float)) ** self.alpha

    def z(self, h):
        return self.a2 * self.a0(h)


def e2e_params(
    f: FadingParams,
    h_l: float,
    g0: float,
    beta_t: Optional[float] = None,
    beta_r: Optional[float] = None,
    hoyt: Optional[HoytParams] = None,
    beta_sum: Optional[float] = None,
) -> E2EParams:
    if not (h_l > 0.0 and g0 > 0.0):
        raise ValueError("h_l and g0 must be positive")
    a, m = f.alpha, f.mu
    a1 = math.exp(math.log(a) + m * math.log(m) - a * m * math.log(f.h_hat) - ln_gamma(m))
    a2 = m / f.h_hat ** a
    extra = {}
    if beta_t is not None and beta_r is not None:
        inv_t = 1.0 / (a * beta_t) if beta_t > 0.0 else math.inf
        inv_r = 1.0 / (a * beta_r) if beta_r > 0.0 else math.inf
        extra.update(
            v1=inv_t - m + 1.0, v2=inv_r - m + 1.0,
            v3=inv_t + 1.0, v4=inv_r + 1.0,
            s1=m - inv_t, s2=m - inv_r,
        )
    if hoyt is not None:
        lam = np.asarray(hoyt.re4) / beta_sum if beta_sum is not None else np.asarray(hoyt.exponents)
        extra.update(
            v5=tuple(float(v) for v in lam / a - m + 1.0),
            v6=tuple(float(v) for v in lam / a + 1.0),
        )
    return E2EParams(alpha=a, mu=m, g0=g0, h_l=h_l, a1=a1, a2=a2, a3=a1 / (g0 * h_l), **extra)


def _prepare(h, params: E2EParams) -> Tuple[bool, np.ndarray, np.ndarray, np.ndarray]:
    scalar, ha = _as_array(h)
    pos = ha > 0.0
    r = np.where(pos, params.scaled(ha), 1.0)
    return scalar, pos, r, params.a2 * r ** params.alpha


def _ln_power_terms(z: np.ndarray, mu: int) -> np.ndarray:
    """ln(z^m / m!) for m = 0..mu-1, shape (mu, len(z))."""
    m = np.arange(mu, dtype=float)[:, None]
    with np.errstate(divide="ignore"):
        return np.where(m == 0.0, 0.0, m * np.log(z)[None, :]) - np.array([math.lgamma(k + 1.0) for k in range(mu)])[:, None]


def _density_prefactor(params: E2EParams, r: np.ndarray) -> np.ndarray:
    return params.a3 * np.exp((params.alpha * params.mu - 1.0) * np.log(r))


def _pair_difference(phi: Callable[[float], np.ndarray], beta_t: float, beta_r: float) -> np.ndarray:
    """(phi(bt) - phi(br)) / (bt - br), its derivative when the betas nearly coincide."""
    if beta_t == 0.0 or beta_r == 0.0:
        beta = max(beta_t, beta_r)
        return phi(beta) / beta
    if abs(beta_t - beta_r) / max(beta_t, beta_r) < NEAR_EQUAL_GAP:
        beta = 0.5 * (beta_t + beta_r)
        step = CENTRAL_STEP * beta
        return (phi(beta + step) - phi(beta - step)) / (2.0 * step)
    return (phi(beta_t) - phi(beta_r)) / (beta_t - beta_r)


# ---------------------------------------------------------------------------
# Symmetric betas: exponential-integral (Whittaker) form and the gamma form
# ---------------------------------------------------------------------------

def _check_betas(beta_t: float, beta_r: float) -> None:
    if not (beta_t >= 0.0 and beta_r >= 0.0) or beta_t + beta_r == 0.0:
        raise SpecialFunctionDomainError("betas must be nonnegative and not both zero")


def e2e_pdf_symmetric(beta_t: float, beta_r: float, f: FadingParams, h_l: float, g0: float, h):
    _check_betas(beta_t, beta_r)
    params = e2e_params(f, h_l, g0)
    scalar, pos, r, z = _prepare(h, params)
    a, m = f.alpha, f.mu

    def psi(beta: float) -> np.ndarray:
        return np.atleast_1d(expint_e(1.0 / (a * beta) - m + 1.0, z)) / a

    with np.errstate(under="ignore"):
        value = _density_prefactor(params, r) * _pair_difference(psi, beta_t, beta_r)
    return _finish(np.where(pos, np.maximum(value, 0.0), 0.0), scalar)


def e2e_cdf_symmetric(beta_t: float, beta_r: float, f: FadingParams, h_l: float, g0: float, h):
    _check_betas(beta_t, beta_r)
    params = e2e_params(f, h_l, g0)
    scalar, pos, r, z = _prepare(h, params)
    a, m = f.alpha, f.mu
    ln_pow = _ln_power_terms(z, m)
    orders = 1.0 - np.arange(m, dtype=float)[:, None]

    def phi(beta: float) -> np.ndarray:
        with np.errstate(under="ignore", over="ignore"):
            e = np.atleast_1d(expint_e(orders + 1.0 / (a * beta), z[None, :]))
            return np.sum(np.exp(ln_pow) * e, axis=0) / a

    tail = _pair_difference(phi, beta_t, beta_r)
    return _finish(np.where(pos, np.clip(1.0 - tail, 0.0, 1.0), 0.0), scalar)


def e2e_pdf_lemma2(beta_t: float, beta_r: float, f: FadingParams, h_l: float, g0: float, h):
    """Gamma form of the symmetric density; requires alpha * mu * min(beta) > 1."""
    if not (beta_t > 0.0 and beta_r > 0.0):
        raise SpecialFunctionDomainError("the gamma form needs two positive betas")
    params = e2e_params(f, h_l, g0, beta_t=beta_t, beta_r=beta_r)
    for s in (params.s1, params.s2):
        if not s > 0.0:
            raise ValidityConditionError(
                f"gamma form requires alpha*mu*min(beta) > 1 (shape {s:.6g} is not positive)", s
            )
    scalar, pos, r, z = _prepare(h, params)
    a, m = f.alpha, f.mu

    def psi(beta: float) -> np.ndarray:
        s = m - 1.0 / (a * beta)
        with np.errstate(under="ignore", over="ignore"):
            return np.exp(-s * np.log(z)) * np.atleast_1d(upper_incomplete_gamma(s, z)) / a

    value = _density_prefactor(params, r) * _pair_difference(psi, beta_t, beta_r)
    return _finish(np.where(pos, np.maximum(value, 0.0), 0.0), scalar)


# ---------------------------------------------------------------------------
# Linear arrays: exponential-sum pointing approximation
# ---------------------------------------------------------------------------

def _hoyt_rates(hoyt: HoytParams, beta_ty: float, beta_ry: float) -> Tuple[np.ndarray, np.ndarray]:
    weights = np.asarray(hoyt.weights)
    rates = np.asarray(hoyt.re4) / (beta_ty + beta_ry)
    return weights, rates


def e2e_pdf_ula(hoyt: HoytParams, beta_ty: float, beta_ry: float, f: FadingParams, h_l: float, g0: float, h):
    params = e2e_params(f, h_l, g0, hoyt=hoyt, beta_sum=beta_ty + beta_ry)
    scalar, pos, r, z = _prepare(h, params)
    weights, rates = _hoyt_rates(hoyt, beta_ty, beta_ry)
    orders = np.asarray(params.v5)[:, None]
    with np.errstate(under="ignore"):
        e = np.atleast_1d(expint_e(orders, z[None, :]))
        total = np.sum((weights * rates)[:, None] * e, axis=0) / f.alpha
        value = _density_prefactor(params, r) * total
    return _finish(np.where(pos, np.maximum(value, 0.0), 0.0), scalar)


def e2e_cdf_ula(hoyt: HoytParams, beta_ty: float, beta_ry: float, f: FadingParams, h_l: float, g0: float, h):
    params = e2e_params(f, h_l, g0, hoyt=hoyt, beta_sum=beta_ty + beta_ry)
    scalar, pos, r, z = _prepare(h, params)
    weights, rates = _hoyt_rates(hoyt, beta_ty, beta_ry)
    base = np.asarray(params.v6)
    ln_pow = _ln_power_terms(z, f.mu)
    tail = np.zeros_like(z)
    with np.errstate(under="ignore", over="ignore"):
        for k in range(f.mu):
            e = np.atleast_1d(expint_e((base - k)[:, None], z[None, :]))
            tail += np.exp(ln_pow[k]) * np.sum((weights * rates)[:, None] * e, axis=0)
    tail /= f.alpha
    return _finish(np.where(pos, np.clip(1.0 - tail, 0.0, 1.0), 0.0), scalar)


# ---------------------------------------------------------------------------
# General betas: second-order expansion of exp(alpha x)
# ---------------------------------------------------------------------------

def _gamma_sum_weights(spec: GammaSumSpec) -> np.ndarray:
    delta = np.asarray(spec.delta)
    return delta / math.fsum(spec.delta)


def _expanded_expectation(spec: GammaSumSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """sum_k w_k J_{rho+k-1}(a b1^2, b b1) / Gamma(rho+k) with w_k the normalized deltas."""
    b1 = spec.beta[0]
    total = np.zeros_like(a)
    for k, w in enumerate(_gamma_sum_weights(spec)):
        if w == 0.0:
            continue
        with np.errstate(over="ignore", invalid="ignore"):
            moment = np.atleast_1d(gauss_moment(spec.shape + k - 1.0, a * b1 * b1, b * b1, normalized=True))
        total += w * moment
    return total


def _general_spec(model: PointingModel) -> GammaSumSpec:
    if model.variant is not PointingVariant.GENERAL:
        raise ValueError("the general end-to-end form needs a general pointing model")
    return model.spec


def e2e_pdf_general(model: PointingModel, f: FadingParams, h_l: float, h):
    """Approximate density from exp(alpha x) ~ 1 + alpha x + alpha^2 x^2 / 2."""
    spec = _general_spec(model)
    params = e2e_params(f, h_l, model.g0)
    scalar, pos, r, z = _prepare(h, params)
    a, m = f.alpha, f.mu
    quad_coef = 0.5 * z * a * a
    lin_coef = a * m - 1.0 / spec.beta[0] - z * a
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        value = _density_prefactor(params, r) * np.exp(-z) * _expanded_expectation(spec, quad_coef, lin_coef)
    value = np.where(np.isfinite(value), np.maximum(value, 0.0), np.inf)
    return _finish(np.where(pos, value, 0.0), scalar)


def e2e_cdf_general(model: PointingModel, f: FadingParams, h_l: float, h):
    spec = _general_spec(model)
    params = e2e_params(f, h_l, model.g0)
    scalar, pos, r, z = _prepare(h, params)
    a, m = f.alpha, f.mu
    quad_coef = 0.5 * z * a * a
    ln_pow = _ln_power_terms(z, m)
    tail = np.zeros_like(z)
    for k in range(m):
        lin_coef = k * a - 1.0 / spec.beta[0] - z * a
        with np.errstate(under="ignore", over="ignore", invalid="ignore"):
            tail += np.exp(ln_pow[k] - z) * _expanded_expectation(spec, quad_coef, lin_coef)
    tail = np.where(np.isnan(tail), np.inf, tail)
    return _finish(np.where(pos, np.clip(1.0 - tail, 0.0, 1.0), 0.0), scalar)


# ---------------------------------------------------------------------------
# Numeric composition
# ---------------------------------------------------------------------------

def _mixture_scalar(integrand: Callable[[float], float], lower: float) -> float:
    value, abserr = integrate.quad(integrand, lower, math.inf, limit=400, epsabs=1e-13, epsrel=1e-10)
    if not math.isfinite(value) or abserr > 1e-6 * abs(value) + 1e-12:
        raise QuadratureError(f"mixture integral did not converge (abserr={abserr:.3g})")
    return value


def mixture_cdf(pointing_model: PointingModel, f: FadingParams, h_l: float, h):
    """P(h_L h_a h_p <= h) = F_a(y0) + int_{y0}^inf F_p(h / (h_L y)) f_a(y) dy, y0 = h / (h_L G0)."""
    scalar, ha = _as_array(h)
    out = np.zeros_like(ha)
    for i, value in enumerate(ha):
        if value <= 0.0:
            continue
        y0 = value / (h_l * pointing_model.g0)
        tail = _mixture_scalar(
            lambda y: float(pointing_model.cdf(value / (h_l * y))) * float(alpha_mu_pdf(f, y)), y0
        )
        out[i] = min(1.0, float(alpha_mu_cdf(f, y0)) + tail)
    return _finish(out, scalar)


def mixture_pdf(pointing_model: PointingModel, f: FadingParams, h_l: float, h):
    scalar, ha = _as_array(h)
    out = np.zeros_like(ha)
    for i, value in enumerate(ha):
        if value <= 0.0:
            continue
        y0 = value / (h_l * pointing_model.g0)
        out[i] = _mixture_scalar(
            lambda y: float(pointing_model.pdf(value / (h_l * y))) * float(alpha_mu_pdf(f, y)) / (h_l * y), y0
        )
    return _finish(out, scalar)


# ---------------------------------------------------------------------------
# Evaluator object
# ---------------------------------------------------------------------------

def default_method(pointing: PointingModel) -> E2EMethod:
    if pointing.variant is PointingVariant.GENERAL:
        return E2EMethod.GENERAL
    if pointing.variant is PointingVariant.SYMMETRIC:
        return E2EMethod.SYMMETRIC
    if pointing.variant is PointingVariant.POINT_MASS:
        return E2EMethod.POINT_MASS
    return E2EMethod.ULA


@dataclass(frozen=True)
class EndToEndModel:
    pointing: PointingModel
    fading: FadingParams
    h_l: float
    method: Optional[E2EMethod] = None

    def __post_init__(self) -> None:
        if not self.h_l > 0.0:
            raise ValueError(f"h_l must be positive, got {self.h_l}")
        method = default_method(self.pointing) if self.method is None else E2EMethod(self.method)
        allowed = {
            E2EMethod.GENERAL: (PointingVariant.GENERAL,),
            E2EMethod.SYMMETRIC: (PointingVariant.SYMMETRIC,),
            E2EMethod.LEMMA2: (PointingVariant.SYMMETRIC,),
            E2EMethod.ULA: (
                PointingVariant.ULA, PointingVariant.ULA_APPROX,
                PointingVariant.GROUND_TO_UAV, PointingVariant.UAV_TO_GROUND,
            ),
            E2EMethod.POINT_MASS: (PointingVariant.POINT_MASS,),
        }
        if method in allowed and self.pointing.variant not in allowed[method]:
            raise ValueError(f"{method.value} form does not apply to a {self.pointing.variant.value} pointing model")
        object.__setattr__(self, "method", method)

    @property
    def scale(self) -> float:
        return self.pointing.g0 * self.h_l

    def with_path_loss(self, h_l: float) -> "EndToEndModel":
        return replace(self, h_l=h_l)

    def pdf(self, h):
        p = self.pointing
        if self.method is E2EMethod.GENERAL:
            return e2e_pdf_general(p, self.fading, self.h_l, h)
        if self.method is E2EMethod.SYMMETRIC:
            return e2e_pdf_symmetric(p.betas[0], p.betas[1], self.fading, self.h_l, p.g0, h)
        if self.method is E2EMethod.LEMMA2:
            return e2e_pdf_lemma2(p.betas[0], p.betas[1], self.fading, self.h_l, p.g0, h)
        if self.method is E2EMethod.ULA:
            return e2e_pdf_ula(p.spec, p.betas[0], p.betas[1], self.fading, self.h_l, p.g0, h)
        if self.method is E2EMethod.POINT_MASS:
            scalar, ha = _as_array(h)
            return _finish(np.atleast_1d(alpha_mu_pdf(self.fading, ha / self.scale)) / self.scale, scalar)
        return mixture_pdf(p, self.fading, self.h_l, h)

    def cdf(self, h):
        p = self.pointing
        if self.method is E2EMethod.GENERAL:
            return e2e_cdf_general(p, self.fading, self.h_l, h)
        if self.method in (E2EMethod.SYMMETRIC, E2EMethod.LEMMA2):
            return e2e_cdf_symmetric(p.betas[0], p.betas[1], self.fading, self.h_l, p.g0, h)
        if self.method is E2EMethod.ULA:
            return e2e_cdf_ula(p.spec, p.betas[0], p.betas[1], self.fading, self.h_l, p.g0, h)
        if self.method is E2EMethod.POINT_MASS:
            scalar, ha = _as_array(h)
            return _finish(np.atleast_1d(alpha_mu_cdf(self.fading, ha / self.scale)), scalar)
        return mixture_cdf(p, self.fading, self.h_l, h)

    def quantile(self, p: float) -> float:
        """Gain h with cdf(h) = p, found by brentq on ln h."""
        if not 0.0 < p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {p}")

        def gap(t: float) -> float:
            return float(self.cdf(math.exp(t))) - p

        centre = math.log(self.scale * self.fading.h_hat)
        lower, upper = centre - 1.0, centre + 1.0
        while gap(lower) >= 0.0:
            lower -= 2.0 * (centre - lower)
            if centre - lower > 2000.0:
                raise ArithmeticError(f"could not bracket the {p} quantile from below")
        while gap(upper) <= 0.0:
            upper += 2.0 * (upper - centre)
            if upper - centre > 2000.0:
                raise ArithmeticError(f"could not bracket the {p} quantile from above")
        return math.exp(optimize.brentq(gap, lower, upper, xtol=1e-12, rtol=1e-12))

    def second_moment(self) -> float:
        """E[h^2] = h_L^2 G0^2 E[h_a^2] E[(h_p / G0)^2]."""
        return self.scale ** 2 * self.fading.second_moment() * self.pointing.moment_normalized(2.0)


# ---------------------------------------------------------------------------
# Outage
# ---------------------------------------------------------------------------

class OutageResult(NamedTuple):
    probability: float
    outside_support: bool


class NSweepResult(NamedTuple):
    rows: List[Tuple[int, float, float, float]]
    best_outage_n: int
    best_length_n: int


def threshold_gain(link: LinkConfig) -> float:
    """Smallest end-to-end gain h meeting the SNR threshold."""
    power = link.snr_threshold_linear * link.noise_power_w / (link.tx_power_w * link.gain)
    if link.snr_convention is SnrConvention.FRIIS:
        power *= free_space_loss(link)
    return math.sqrt(power)


def log_threshold_gain(link: LinkConfig) -> float:
    log_power = math.log(link.snr_threshold_linear * link.noise_power_w / (link.tx_power_w * link.gain))
    if link.snr_convention is SnrConvention.FRIIS:
        log_power += 2.0 * math.log(link.wavelength / (4.0 * math.pi * link.distance_m))
    return 0.5 * log_power


def snr_mean_db(link: LinkConfig, model: EndToEndModel) -> float:
    snr = link.tx_power_w * link.gain * model.second_moment() / link.noise_power_w
    if link.snr_convention is SnrConvention.FRIIS:
        snr /= free_space_loss(link)
    return 10.0 * math.log10(snr)


def outage_probability(link: LinkConfig, channel_cdf: Callable[[float], float]) -> OutageResult:
    """P(gamma < gamma_th) = F_h(h_th)."""
    h_th = threshold_gain(link)
    probability = float(channel_cdf(h_th))
    outside = probability <= 0.0 or probability >= 1.0
    if outside:
        logger.warning("Outage threshold %.6g lies outside the channel support (P_out=%g)", h_th, probability)
    return OutageResult(probability=min(max(probability, 0.0), 1.0), outside_support=outside)


def calibrate_gain(link: LinkConfig, e2e_model: EndToEndModel, target: float, z_anchor: float) -> float:
    """SNR constant that puts the outage at ``target`` when the link is ``z_anchor`` metres long."""
    anchored = link.at_distance(z_anchor)
    model = e2e_model.with_path_loss(path_loss(anchored))
    q = model.quantile(target)
    uncalibrated = replace(anchored, gain=1.0)
    gain = (threshold_gain(uncalibrated) / q) ** 2
    logger.info("Calibrated SNR constant %.6g (%.2f dB) at Z=%.1f m, P_out=%g", gain, 10.0 * math.log10(gain), z_anchor, target)
    return gain


def max_link_length(
    link: LinkConfig,
    e2e_model: EndToEndModel,
    target: float,
    z_bounds: Tuple[float, float] = (1.0, 1e6),
) -> float:
    """Largest distance whose outage stays at or below ``target``."""
    log_q_norm = math.log(e2e_model.quantile(target) / e2e_model.h_l)

    def margin(z: float) -> float:
        at = link.at_distance(z)
        return log_path_loss(at) + log_q_norm - log_threshold_gain(at)

    low, high = z_bounds
    if margin(low) < 0.0:
        logger.warning("Outage target %g is missed even at %.3g m", target, low)
        return 0.0
    if margin(high) > 0.0:
        logger.warning("Outage target %g holds beyond %.3g m", target, high)
        return high
    return optimize.brentq(margin, low, high, xtol=1e-6, rtol=1e-12)


def outage_sweep(link: LinkConfig, e2e_model: EndToEndModel, z_values: Sequence[float]) -> List[Tuple[float, float, float]]:
    """Rows (z_m, outage_prob, snr_db_mean)."""
    rows = []
    for z in z_values:
        at = link.at_distance(float(z))
        model = e2e_model.with_path_loss(path_loss(at))
        result = outage_probability(at, model.cdf)
        rows.append((float(z), result.probability, snr_mean_db(at, model)))
    return rows


def optimal_n_sweep(
    link: LinkConfig,
    profile: VibrationProfile,
    n_values: Sequence[int],
    fading: Optional[FadingParams] = None,
    target: float = 1e-3,
    pointing_factory: Optional[Callable[[VibrationProfile, int], PointingModel]] = None,
) -> NSweepResult:
    """Rows (N, outage_prob, snr_db_mean, z_max_m) for N_t = N_r = N.

    The outage and mean SNR are taken at the configured link length; z_max_m
    is the longest link meeting ``target``.

    ``pointing_factory(profile, n)`` builds the pointing model for each N;
    the symmetric model is used when it is omitted.
    """
    if not n_values:
        raise ValueError("n_values must not be empty")
    fading = fading or FadingParams(alpha=2.0, mu=4)
    factory = pointing_factory or (lambda prof, n: symmetric_model(prof, n, n))
    h_l = path_loss(link)
    rows = []
    for n in n_values:
        model = EndToEndModel(factory(profile, int(n)), fading, h_l)
        p_out = outage_probability(link, model.cdf).probability
        rows.append((int(n), p_out, snr_mean_db(link, model), max_link_length(link, model, target)))
        logger.debug("N=%d: P_out=%.6g, z_max=%.1f m", n, p_out, rows[-1][3])
    best_outage = min(rows, key=lambda row: row[1])[0]
    best_length = max(rows, key=lambda row: row[3])[0]
    return NSweepResult(rows=rows, best_outage_n=best_outage, best_length_n=best_length)
