"""Pointing-error distributions of the combined Tx/Rx array gain.

With the Gaussian main-lobe approximation each orientation angle contributes
Theta_qw = theta_qw^2 / (2 w_Bq^2) ~ Gamma(1/2, beta_qw) to the log gain
loss, so h_p = G0 * exp(-Theta) with Theta the sum of the active terms.
All evaluators work on the normalized gain u = h_p / G0.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, NamedTuple, Optional, Tuple, Union

import numpy as np
from scipy import optimize

from PointingLab.services import antenna
from PointingLab.services.specfun import (
    SeriesTruncationError,
    SpecialFunctionDomainError,
    bessel_i0e,
    ln_gamma,
    lower_incomplete_gamma,
    marcum_q1,
    regularized_upper_gamma,
)
from PointingLab.settings import settings

logger = logging.getLogger(__name__)

MAX_SIGMA_RAD = 0.1
SYMMETRY_GAP = 1e-6
SYMMETRIC_WARN_GAP = 0.05


class ValidityConditionError(ValueError):
    """A closed form was requested outside its validity condition."""

    def __init__(self, message: str, shape: float):
        super().__init__(message)
        self.shape = shape


class PointingVariant(str, Enum):
    GENERAL = "general"
    SYMMETRIC = "symmetric"
    ULA = "ula"
    ULA_APPROX = "ula-approx"
    GROUND_TO_UAV = "ground-to-uav"
    UAV_TO_GROUND = "uav-to-ground"
    POINT_MASS = "point-mass"


class LinkDirection(str, Enum):
    GROUND_TO_UAV = "ground-to-uav"
    UAV_TO_GROUND = "uav-to-ground"


@dataclass(frozen=True)
class VibrationProfile:
    """Standard deviations (radians) of the four orientation fluctuations.

    A zero entry marks a perfectly stable axis.
    """

    sigma_tx: float
    sigma_ty: float
    sigma_rx: float
    sigma_ry: float

    def __post_init__(self) -> None:
        for name in ("sigma_tx", "sigma_ty", "sigma_rx", "sigma_ry"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0 or value >= MAX_SIGMA_RAD:
                raise ValueError(f"{name} must lie in [0, {MAX_SIGMA_RAD}) rad, got {value}")

    @classmethod
    def from_degrees(cls, tx: float, ty: float, rx: float, ry: float) -> "VibrationProfile":
        return cls(math.radians(tx), math.radians(ty), math.radians(rx), math.radians(ry))

    def frozen_tx(self) -> "VibrationProfile":
        return VibrationProfile(0.0, 0.0, self.sigma_rx, self.sigma_ry)

    def frozen_rx(self) -> "VibrationProfile":
        return VibrationProfile(self.sigma_tx, self.sigma_ty, 0.0, 0.0)


class BetaComponents(NamedTuple):
    tx: float
    ty: float
    rx: float
    ry: float


@dataclass(frozen=True)
class GammaSumSpec:
    """Moschopoulos series for a sum of shape-1/2 gamma variables."""

    beta: Tuple[float, ...]
    c_g: float
    delta: Tuple[float, ...]
    K: int

    @property
    def shape(self) -> float:
        return 0.5 * len(self.beta)

    @property
    def theta0(self) -> float:
        """Captured probability mass C_g * sum(delta)."""
        return self.c_g * math.fsum(self.delta)


@dataclass(frozen=True)
class HoytParams:
    t_q: float
    re1: float
    re2: float
    re3: Tuple[float, ...]
    re4: Tuple[float, ...]
    re5: float
    n_terms: int
    weights: Tuple[float, ...] = field(default=())
    exponents: Tuple[float, ...] = field(default=())


@dataclass(frozen=True)
class PointingModel:
    """Immutable pointing-error evaluator.

    ``betas`` holds (beta_t, beta_r) for the symmetric variant, the Hoyt pair
    for the ULA and one-stable-node variants and the sorted active betas for
    the general variant.
    """

    variant: PointingVariant
    g0: float
    spec: Optional[Union[GammaSumSpec, HoytParams]] = None
    betas: Tuple[float, ...] = ()
    approximate: bool = False

    def __post_init__(self) -> None:
        if not self.g0 > 0.0:
            raise ValueError(f"g0 must be positive, got {self.g0}")
        expects = {
            PointingVariant.GENERAL: GammaSumSpec,
            PointingVariant.ULA: HoytParams,
            PointingVariant.ULA_APPROX: HoytParams,
            PointingVariant.GROUND_TO_UAV: HoytParams,
            PointingVariant.UAV_TO_GROUND: HoytParams,
        }
        wanted = expects.get(self.variant)
        if wanted is not None and not isinstance(self.spec, wanted):
            raise ValueError(f"{self.variant.value} model needs a {wanted.__name__} payload")
        if self.variant is PointingVariant.SYMMETRIC and len(self.betas) != 2:
            raise ValueError("symmetric model needs (beta_t, beta_r)")

    @property
    def uses_exponential_sum(self) -> bool:
        return self.variant is PointingVariant.ULA_APPROX or (
            self.variant in (PointingVariant.GROUND_TO_UAV, PointingVariant.UAV_TO_GROUND)
            and self.approximate
        )

    def pdf(self, h):
        if self.variant is PointingVariant.GENERAL:
            return pdf_general(self, h)
        if self.variant is PointingVariant.SYMMETRIC:
            return pdf_symmetric(self.betas[0], self.betas[1], self.g0, h)
        if self.variant is PointingVariant.POINT_MASS:
            return _point_mass_pdf(self.g0, h)
        if self.uses_exponential_sum:
            return pdf_ula_approx(self.spec, self.g0, h)
        return pdf_ula(self.betas[0], self.betas[1], self.g0, h)

    def cdf(self, h):
        if self.variant is PointingVariant.GENERAL:
            return cdf_general(self, h)
        if self.variant is PointingVariant.SYMMETRIC:
            return cdf_symmetric(self.betas[0], self.betas[1], self.g0, h)
        if self.variant is PointingVariant.POINT_MASS:
            return _point_mass_cdf(self.g0, h)
        if self.uses_exponential_sum:
            return cdf_ula_approx(self.spec, self.g0, h)
        return cdf_ula(self.spec, self.betas[0], self.betas[1], self.g0, h)

    def moment_normalized(self, order: float) -> float:
        """E[(h_p / G0)^order], the moment generating function of Theta at -order."""
        if order < 0.0:
            raise ValueError("order must be nonnegative")
        if self.variant is PointingVariant.POINT_MASS:
            return 1.0
        if self.uses_exponential_sum:
            w = np.asarray(self.spec.weights)
            lam = np.asarray(self.spec.exponents)
            return float(np.sum(w * lam / (lam + order)))
        if self.variant is PointingVariant.SYMMETRIC:
            bt, br = self.betas
            return 1.0 / ((1.0 + order * bt) * (1.0 + order * br))
        if self.variant is PointingVariant.GENERAL:
            return float(np.prod((1.0 + order * np.asarray(self.spec.beta)) ** -0.5))
        ba, bb = self.betas
        return float(((1.0 + order * ba) * (1.0 + order * bb)) ** -0.5)

    def quantile(self, p: float) -> float:
        """Gain h with cdf(h) = p, by bracketing on ln(h / G0)."""
        if not 0.0 < p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {p}")
        if self.variant is PointingVariant.POINT_MASS:
            return self.g0

        def gap(t: float) -> float:
            return float(self.cdf(self.g0 * math.exp(t))) - p

        lower = -1.0
        while gap(lower) > 0.0:
            lower *= 2.0
            if lower < -1e5:
                raise ArithmeticError(f"quantile {p} lies below the representable gain range")
        if gap(0.0) < 0.0:
            return self.g0
        t = optimize.brentq(gap, lower, 0.0, xtol=1e-12, rtol=1e-12)
        return self.g0 * math.exp(t)


# ---------------------------------------------------------------------------
# Shared argument handling
# ---------------------------------------------------------------------------

def _normalize(h, g0: float) -> Tuple[bool, np.ndarray, np.ndarray]:
    """Return (scalar, u, x) with u = h/g0 clipped to (0, 1] and x = -ln u."""
    scalar = np.ndim(h) == 0
    ha = np.atleast_1d(np.asarray(h, dtype=float))
    if np.any(np.isnan(ha)) or np.any(ha < 0.0):
        raise SpecialFunctionDomainError("pointing gain must be nonnegative")
    u = ha / g0
    with np.errstate(divide="ignore"):
        x = -np.log(np.minimum(u, 1.0))
    return scalar, u, x


def _finish(out: np.ndarray, scalar: bool):
    if scalar:
        return float(out[0])
    return out


def _point_mass_pdf(g0: float, h):
    scalar, u, _ = _normalize(h, g0)
    return _finish(np.where(u == 1.0, np.inf, 0.0), scalar)


def _point_mass_cdf(g0: float, h):
    scalar, u, _ = _normalize(h, g0)
    return _finish(np.where(u >= 1.0, 1.0, 0.0), scalar)


# ---------------------------------------------------------------------------
# General case: Moschopoulos series
# ---------------------------------------------------------------------------

def beta_components(profile: VibrationProfile, n_t: int, n_r: int) -> BetaComponents:
    w_t = antenna.beamwidth(n_t)
    w_r = antenna.beamwidth(n_r)
    return BetaComponents(
        tx=(profile.sigma_tx / w_t) ** 2,
        ty=(profile.sigma_ty / w_t) ** 2,
        rx=(profile.sigma_rx / w_r) ** 2,
        ry=(profile.sigma_ry / w_r) ** 2,
    )


def gamma_sum_spec(
    betas,
    mass_target: Optional[float] = None,
    max_terms: Optional[int] = None,
) -> GammaSumSpec:
    """Moschopoulos coefficients for a sum of Gamma(1/2, beta_i) variables.

    Zero betas are dropped. The series is extended until the captured mass
    C_g * sum(delta) reaches 1 - mass_target.
    """
    mass_target = settings.MASS_TARGET if mass_target is None else mass_target
    max_terms = settings.MAX_MOSCHOPOULOS_TERMS if max_terms is None else max_terms
    active = sorted(float(b) for b in betas if b > 0.0)
    if not active:
        raise ValueError("at least one positive beta is required")
    b1 = active[0]
    ratios = np.array([b1 / b for b in active])
    c_g = float(np.prod(np.sqrt(ratios)))
    decay = 1.0 - ratios

    gamma = [0.0]
    delta = [1.0]
    captured = c_g
    k = 0
    while 1.0 - captured > mass_target:
        k += 1
        if k > max_terms:
            raise SeriesTruncationError(
                f"Moschopoulos series needs more than {max_terms} terms (captured mass {captured:.9f})"
            )
        gamma.append(float(np.sum(decay ** k)) / (2.0 * k))
        d_k = math.fsum(i * gamma[i] * delta[k - i] for i in range(1, k + 1)) / k
        delta.append(d_k)
        captured += c_g * d_k
    logger.debug("Moschopoulos series: %d terms, captured mass %.12f", k, captured)
    return GammaSumSpec(beta=tuple(active), c_g=c_g, delta=tuple(delta), K=k)


def build_beta(
    profile: VibrationProfile,
    n_t: int,
    n_r: int,
    mass_target: Optional[float] = None,
    max_terms: Optional[int] = None,
) -> GammaSumSpec:
    return gamma_sum_spec(beta_components(profile, n_t, n_r), mass_target, max_terms)


def _shapes(spec: GammaSumSpec) -> np.ndarray:
    return spec.shape + np.arange(spec.K + 1, dtype=float)


def gamma_sum_pdf(spec: GammaSumSpec, x):
    """Density of Theta, normalized by the captured mass."""
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    b1 = spec.beta[0]
    y = xa / b1
    s = _shapes(spec)[:, None]
    delta = np.asarray(spec.delta)[:, None]
    power = s - 1.0
    with np.errstate(divide="ignore", invalid="ignore", under="ignore", over="ignore"):
        ln_y = np.log(y)[None, :]
        ln_pow = np.where(power == 0.0, 0.0, power * ln_y)
        ln_terms = np.log(delta) + ln_pow - y[None, :] - ln_gamma(s) - math.log(b1)
        out = np.exp(ln_terms).sum(axis=0) / math.fsum(spec.delta)
    out = np.where(xa < 0.0, 0.0, out)
    return _finish(out, scalar)


def _gamma_sum_tail(spec: GammaSumSpec, x: np.ndarray) -> np.ndarray:
    y = np.maximum(x, 0.0) / spec.beta[0]
    s = _shapes(spec)[:, None]
    q = regularized_upper_gamma(s, y[None, :])
    return np.asarray(spec.delta) @ q / math.fsum(spec.delta)


def gamma_sum_cdf(spec: GammaSumSpec, x):
    """CDF of Theta, normalized by the captured mass."""
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.maximum(xa, 0.0) / spec.beta[0]
    s = _shapes(spec)[:, None]
    p = lower_incomplete_gamma(s, y[None, :]) / np.exp(ln_gamma(s))
    out = np.asarray(spec.delta) @ p / math.fsum(spec.delta)
    return _finish(np.clip(out, 0.0, 1.0), scalar)


def pdf_general(model: PointingModel, h_p):
    scalar, u, x = _normalize(h_p, model.g0)
    inside = (u > 0.0) & (u <= 1.0)
    out = np.zeros_like(u)
    if np.any(inside):
        f_theta = np.atleast_1d(gamma_sum_pdf(model.spec, x[inside]))
        out[inside] = f_theta / (model.g0 * u[inside])
    return _finish(out, scalar)


def cdf_general(model: PointingModel, h_p):
    """P(h <= h_p) = P(Theta >= -ln(h_p / G0)); equals 1 at h_p = G0 by construction."""
    scalar, u, x = _normalize(h_p, model.g0)
    out = np.where(u >= 1.0, 1.0, 0.0)
    inside = (u > 0.0) & (u < 1.0)
    if np.any(inside):
        out[inside] = np.clip(_gamma_sum_tail(model.spec, x[inside]), 0.0, 1.0)
    return _finish(out, scalar)


# ---------------------------------------------------------------------------
# Per-node symmetric case
# ---------------------------------------------------------------------------

def _check_pair(beta_t: float, beta_r: float, g0: float) -> None:
    if not (beta_t >= 0.0 and beta_r >= 0.0) or beta_t + beta_r == 0.0:
        raise SpecialFunctionDomainError("betas must be nonnegative and not both zero")
    if not g0 > 0.0:
        raise SpecialFunctionDomainError("g0 must be positive")


def _exponential_pdf(beta: float, u: np.ndarray, g0: float) -> np.ndarray:
    with np.errstate(divide="ignore", under="ignore"):
        return np.exp((1.0 / beta - 1.0) * np.log(u)) / (g0 * beta)


def pdf_symmetric(beta_t: float, beta_r: float, g0: float, h_p):
    """Density of h_p when each node has equal Yaw and Pitch betas."""
    _check_pair(beta_t, beta_r, g0)
    scalar, u, _ = _normalize(h_p, g0)
    inside = (u > 0.0) & (u <= 1.0)
    out = np.zeros_like(u)
    ui = u[inside]
    with np.errstate(divide="ignore", under="ignore", over="ignore", invalid="ignore"):
        ln_u = np.log(ui)
        if beta_t == 0.0 or beta_r == 0.0:
            value = _exponential_pdf(max(beta_t, beta_r), ui, g0)
        elif abs(beta_t - beta_r) / max(beta_t, beta_r) < SYMMETRY_GAP:
            beta = 0.5 * (beta_t + beta_r)
            value = np.exp((1.0 / beta - 1.0) * ln_u) * (-ln_u) / (g0 * beta * beta)
        else:
            # u^(1/bt) - u^(1/br) = u^(1/br) * expm1((1/bt - 1/br) ln u)
            d = (1.0 / beta_t - 1.0 / beta_r) * ln_u
            value = np.exp((1.0 / beta_r - 1.0) * ln_u) * np.expm1(d) / (g0 * (beta_t - beta_r))
    out[inside] = np.maximum(value, 0.0)
    return _finish(out, scalar)


def cdf_symmetric(beta_t: float, beta_r: float, g0: float, h_p):
    _check_pair(beta_t, beta_r, g0)
    scalar, u, _ = _normalize(h_p, g0)
    out = np.where(u >= 1.0, 1.0, 0.0)
    inside = (u > 0.0) & (u < 1.0)
    ui = u[inside]
    with np.errstate(divide="ignore", under="ignore", over="ignore", invalid="ignore"):
        ln_u = np.log(ui)
        if beta_t == 0.0 or beta_r == 0.0:
            value = np.exp(ln_u / max(beta_t, beta_r))
        elif abs(beta_t - beta_r) / max(beta_t, beta_r) < SYMMETRY_GAP:
            beta = 0.5 * (beta_t + beta_r)
            value = np.exp(ln_u / beta) * (1.0 - ln_u / beta)
        else:
            d = (1.0 / beta_t - 1.0 / beta_r) * ln_u
            value = np.exp(ln_u / beta_r) * (1.0 + beta_t * np.expm1(d) / (beta_t - beta_r))
    out[inside] = np.clip(value, 0.0, 1.0)
    return _finish(out, scalar)


# ---------------------------------------------------------------------------
# ULA (Hoyt) case and its exponential-sum approximation
# ---------------------------------------------------------------------------

def hoyt_terms_for_tolerance(t_q: float, tol: float) -> int:
    """Smallest term count whose weight-sum error 2 * rho^N stays below ``tol``."""
    if not 0.0 < t_q <= 1.0:
        raise ValueError(f"t_q must lie in (0, 1], got {t_q}")
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol must lie in (0, 1), got {tol}")
    rho = (1.0 - t_q) / (1.0 + t_q)
    if rho <= 0.0:
        return 1
    return max(1, math.ceil(math.log(tol / 2.0) / math.log(rho)))


def hoyt_params(beta_a: float, beta_b: float, n_terms: Optional[int] = None) -> HoytParams:
    if not (beta_a > 0.0 and beta_b > 0.0):
        raise ValueError("Hoyt parameters need two positive betas")
    n_terms = settings.HOYT_TERMS if n_terms is None else n_terms
    if n_terms < 1:
        raise ValueError(f"n_terms must be at least 1, got {n_terms}")
    q = math.sqrt(min(beta_a, beta_b) / max(beta_a, beta_b))
    q2 = q * q
    root = math.sqrt(1.0 + q2)
    re1 = (1.0 + q) * root / (2.0 * q)
    re2 = (1.0 - q) * root / (2.0 * q)
    n = np.arange(1, n_terms + 1, dtype=float)
    re3 = 1.0 + (1.0 - q2) / (1.0 + q2) * np.cos(math.pi * (2.0 * n - 1.0) / n_terms)
    re4 = (1.0 + q2) ** 2 * re3 / (2.0 * q2)
    re5 = 2.0 * q / (n_terms * (1.0 + q2))
    weights = re5 / re3
    exponents = re4 / (beta_a + beta_b)
    return HoytParams(
        t_q=q, re1=re1, re2=re2,
        re3=tuple(float(v) for v in re3),
        re4=tuple(float(v) for v in re4),
        re5=re5, n_terms=n_terms,
        weights=tuple(float(v) for v in weights),
        exponents=tuple(float(v) for v in exponents),
    )


def pdf_ula(beta_ty: float, beta_ry: float, g0: float, h_p):
    """Density of h_p for linear arrays (sum of two unequal shape-1/2 gammas)."""
    if not (beta_ty > 0.0 and beta_ry > 0.0):
        raise SpecialFunctionDomainError("pdf_ula requires positive betas")
    scalar, u, _ = _normalize(h_p, g0)
    inside = (u > 0.0) & (u <= 1.0)
    out = np.zeros_like(u)
    c = (beta_ty + beta_ry) / (2.0 * beta_ty * beta_ry)
    d = (beta_ty - beta_ry) / (2.0 * beta_ty * beta_ry)
    with np.errstate(divide="ignore", under="ignore", over="ignore", invalid="ignore"):
        ln_u = np.log(u[inside])
        arg = d * ln_u
        power = np.where(c == 1.0, 0.0, (c - 1.0) * ln_u)
        value = np.exp(power + np.abs(arg)) * bessel_i0e(arg) / (g0 * math.sqrt(beta_ty * beta_ry))
    out[inside] = value
    return _finish(out, scalar)


def cdf_ula(params: HoytParams, beta_ty: float, beta_ry: float, g0: float, h_p):
    """CDF of h_p for linear arrays as a difference of two Marcum Q terms."""
    scalar, u, x = _normalize(h_p, g0)
    out = np.where(u >= 1.0, 1.0, 0.0)
    inside = (u > 0.0) & (u < 1.0)
    if np.any(inside):
        s = np.sqrt(2.0 * x[inside] / (beta_ty + beta_ry))
        a = params.re1 * s
        b = params.re2 * s
        value = 1.0 - marcum_q1(a, b) + marcum_q1(b, a)
        out[inside] = np.clip(value, 0.0, 1.0)
    return _finish(out, scalar)


def cdf_ula_approx(params: HoytParams, g0: float, h_p):
    scalar, u, _ = _normalize(h_p, g0)
    out = np.where(u >= 1.0, 1.0, 0.0)
    inside = (u > 0.0) & (u < 1.0)
    if np.any(inside):
        w = np.asarray(params.weights)[:, None]
        lam = np.asarray(params.exponents)[:, None]
        with np.errstate(under="ignore"):
            value = np.sum(w * np.exp(lam * np.log(u[inside])[None, :]), axis=0)
        out[inside] = np.clip(value, 0.0, 1.0)
    return _finish(out, scalar)


def pdf_ula_approx(params: HoytParams, g0: float, h_p):
    scalar, u, _ = _normalize(h_p, g0)
    out = np.zeros_like(u)
    inside = (u > 0.0) & (u <= 1.0)
    if np.any(inside):
        w = np.asarray(params.weights)[:, None]
        lam = np.asarray(params.exponents)[:, None]
        with np.errstate(under="ignore", divide="ignore", over="ignore"):
            value = np.sum(w * lam * np.exp((lam - 1.0) * np.log(u[inside])[None, :]), axis=0)
        out[inside] = value / g0
    return _finish(out, scalar)


# ---------------------------------------------------------------------------
# Factories
# ---------------------------------------------------------------------------

def combined_peak_gain(cfg_t: antenna.ArrayConfig, cfg_r: antenna.ArrayConfig) -> float:
    return math.sqrt(antenna.peak_gain(cfg_t) * antenna.peak_gain(cfg_r))


def point_mass_model(g0: float) -> PointingModel:
    return PointingModel(variant=PointingVariant.POINT_MASS, g0=g0)


def _fallback(betas, g0: float, reason: str) -> PointingModel:
    """Gamma-sum model over the active betas when a structured form does not apply."""
    active = [b for b in betas if b > 0.0]
    if not active:
        logger.debug("All orientation deviations are zero, using a point mass")
        return point_mass_model(g0)
    logger.debug("Falling back to the gamma-sum model: %s", reason)
    return PointingModel(variant=PointingVariant.GENERAL, g0=g0, spec=gamma_sum_spec(active), betas=tuple(sorted(active)))


def general_model(profile: VibrationProfile, n_t: int, n_r: int) -> PointingModel:
    g0 = math.pi * n_t * n_r
    betas = beta_components(profile, n_t, n_r)
    if not any(b > 0.0 for b in betas):
        return point_mass_model(g0)
    spec = gamma_sum_spec(betas)
    return PointingModel(variant=PointingVariant.GENERAL, g0=g0, spec=spec, betas=spec.beta)


def symmetric_model(profile: VibrationProfile, n_t: int, n_r: int) -> PointingModel:
    """Per-node symmetric model; unequal Yaw/Pitch betas of a node are averaged."""
    g0 = math.pi * n_t * n_r
    b = beta_components(profile, n_t, n_r)
    pairs = {"Tx": (b.tx, b.ty), "Rx": (b.rx, b.ry)}
    for node, (first, second) in pairs.items():
        top = max(first, second)
        if top > 0.0 and abs(first - second) / top > SYMMETRIC_WARN_GAP:
            logger.warning(
                "%s Yaw/Pitch betas differ by %.1f%%; the symmetric model uses their mean",
                node, 100.0 * abs(first - second) / top,
            )
    beta_t = 0.5 * (b.tx + b.ty)
    beta_r = 0.5 * (b.rx + b.ry)
    if beta_t == 0.0 and beta_r == 0.0:
        return point_mass_model(g0)
    return PointingModel(variant=PointingVariant.SYMMETRIC, g0=g0, betas=(beta_t, beta_r))


def ula_model(
    profile: VibrationProfile,
    n_t: int,
    n_r: int,
    approximate: bool = False,
    n_terms: Optional[int] = None,
) -> PointingModel:
    """Linear arrays along y: only the Pitch deviations reduce the gain."""
    g0 = math.sqrt(float(n_t * n_r))
    b = beta_components(profile, n_t, n_r)
    if b.ty <= 0.0 or b.ry <= 0.0:
        return _fallback((b.ty, b.ry), g0, "one Pitch deviation is zero")
    variant = PointingVariant.ULA_APPROX if approximate else PointingVariant.ULA
    spec = hoyt_params(b.ty, b.ry, n_terms)
    return PointingModel(variant=variant, g0=g0, spec=spec, betas=(b.ty, b.ry), approximate=approximate)


def ula_approx_model(profile: VibrationProfile, n_t: int, n_r: int, n_terms: Optional[int] = None) -> PointingModel:
    return ula_model(profile, n_t, n_r, approximate=True, n_terms=n_terms)


def remark1_model(
    profile: VibrationProfile,
    direction: LinkDirection,
    n_t: int,
    n_r: int,
    approximate: bool = False,
    n_terms: Optional[int] = None,
) -> PointingModel:
    """Planar arrays with one stable node: the Yaw and Pitch betas of the
    moving node take the places of the two Hoyt betas."""
    direction = LinkDirection(direction)
    g0 = math.pi * n_t * n_r
    b = beta_components(profile, n_t, n_r)
    if direction is LinkDirection.GROUND_TO_UAV:
        pair = (b.rx, b.ry)
        variant = PointingVariant.GROUND_TO_UAV
    else:
        pair = (b.ty, b.tx)
        variant = PointingVariant.UAV_TO_GROUND
    if pair[0] <= 0.0 or pair[1] <= 0.0:
        return _fallback(pair, g0, "the moving node has a zero deviation")
    spec = hoyt_params(pair[0], pair[1], n_terms)
    return PointingModel(variant=variant, g0=g0, spec=spec, betas=pair, approximate=approximate)


def curve_rows(model: PointingModel, n_points: int) -> List[Tuple[float, float, float]]:
    """Rows (h_over_g0, pdf, cdf) on the grid u = i / n_points, i = 1..n_points."""
    if n_points < 1:
        raise ValueError("n_points must be positive")
    u = np.arange(1, n_points + 1, dtype=float) / n_points
    h = model.g0 * u
    pdf = np.atleast_1d(model.pdf(h))
    cdf = np.atleast_1d(model.cdf(h))
    return [(float(a), float(b), float(c)) for a, b, c in zip(u, pdf, cdf)]
