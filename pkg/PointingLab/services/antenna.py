import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from scipy import integrate

from PointingLab.services.specfun import QuadratureError

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299792458.0
BEAMWIDTH_CONSTANT = 1.061
_SINC_EPS = 1e-6


class ArrayKind(str, Enum):
    UPA = "UPA"
    ULA = "ULA"


@dataclass(frozen=True)
class ArrayConfig:
    kind: ArrayKind
    n_elements: int
    carrier_hz: float = 280e9
    element_spacing_wavelengths: float = 0.5

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ArrayKind(self.kind))
        if int(self.n_elements) != self.n_elements or self.n_elements < 1:
            raise ValueError(f"n_elements must be a positive integer, got {self.n_elements}")
        if not self.carrier_hz > 0.0:
            raise ValueError(f"carrier_hz must be positive, got {self.carrier_hz}")
        if not 0.0 < self.element_spacing_wavelengths <= 1.0:
            raise ValueError(
                f"element_spacing_wavelengths must lie in (0, 1], got {self.element_spacing_wavelengths}"
            )

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def wave_number(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def kd(self) -> float:
        """Phase step k*d between adjacent elements."""
        return 2.0 * math.pi * self.element_spacing_wavelengths


@dataclass(frozen=True)
class Orientation:
    theta_x: float  # Yaw-plane deviation, radians
    theta_y: float  # Pitch-plane deviation, radians

    def __post_init__(self) -> None:
        for name in ("theta_x", "theta_y"):
            value = getattr(self, name)
            if not math.isfinite(value) or abs(value) >= math.pi / 2.0:
                raise ValueError(f"{name} must be finite with magnitude below pi/2, got {value}")


def _array_factor_sq(n: int, psi):
    """(sin(n psi/2) / (n sin(psi/2)))^2 with removable singularities filled in."""
    psi = np.asarray(psi, dtype=float)
    half = 0.5 * psi
    s = np.sin(half)
    near = np.abs(s) < _SINC_EPS
    safe = np.where(near, 1.0, s)
    ratio = np.sin(n * half) / (n * safe)
    delta = half - math.pi * np.round(half / math.pi)
    limit = 1.0 - (n * n - 1.0) * delta * delta / 6.0
    return np.where(near, limit * limit, ratio * ratio)


def upa_gain_normalized(cfg: ArrayConfig, theta, phi):
    """Normalized UPA gain: product of the x and y array factors, in [0, 1]."""
    if cfg.kind is not ArrayKind.UPA:
        raise ValueError("upa_gain_normalized requires a UPA configuration")
    sin_t = np.sin(theta)
    gx = _array_factor_sq(cfg.n_elements, cfg.kd * sin_t * np.cos(phi))
    gy = _array_factor_sq(cfg.n_elements, cfg.kd * sin_t * np.sin(phi))
    return gx * gy


def ula_gain_normalized(cfg: ArrayConfig, theta, phi):
    """Normalized ULA gain; the array lies along y so the Yaw plane is flat."""
    if cfg.kind is not ArrayKind.ULA:
        raise ValueError("ula_gain_normalized requires a ULA configuration")
    return _array_factor_sq(cfg.n_elements, cfg.kd * np.sin(theta) * np.sin(phi))


def gain_normalized(cfg: ArrayConfig, theta, phi):
    if cfg.kind is ArrayKind.UPA:
        return upa_gain_normalized(cfg, theta, phi)
    return ula_gain_normalized(cfg, theta, phi)


def exact_gain(cfg: ArrayConfig, theta_x, theta_y):
    """Normalized gain at the direction reached by a (Yaw, Pitch) deviation pair.

    With tx = tan(theta_x) and ty = tan(theta_y) the arctan composition gives
    sin(theta) cos(phi) = tx / r and sin(theta) sin(phi) = ty / r, where
    r = sqrt(1 + tx^2 + ty^2) and phi = atan2(ty, tx).
    """
    tx = np.tan(theta_x)
    ty = np.tan(theta_y)
    r = np.sqrt(1.0 + tx * tx + ty * ty)
    gy = _array_factor_sq(cfg.n_elements, cfg.kd * ty / r)
    if cfg.kind is ArrayKind.ULA:
        return gy
    return _array_factor_sq(cfg.n_elements, cfg.kd * tx / r) * gy


def beamwidth(n_elements: int) -> float:
    """Angular beamwidth w_B of the Gaussian main-lobe approximation."""
    return BEAMWIDTH_CONSTANT / n_elements


def peak_gain(cfg: ArrayConfig) -> float:
    """Closed-form peak gain: pi N^2 for a UPA, N for a broadside ULA."""
    if cfg.kind is ArrayKind.UPA:
        return math.pi * cfg.n_elements ** 2
    return float(cfg.n_elements)


def gaussian_mainlobe_gain(n_elements: int, theta):
    if n_elements < 1:
        raise ValueError(f"n_elements must be positive, got {n_elements}")
    w_b = beamwidth(n_elements)
    return math.pi * n_elements ** 2 * np.exp(-np.square(theta) / w_b ** 2)


def compose_orientation(o: Orientation, small_angle: bool = False) -> float:
    """Total deviation angle of a (Yaw, Pitch) pair.

    The exact form is atan(sqrt(tan^2 + tan^2)); ``small_angle`` selects the
    root-sum-square used by the analytic derivations.
    """
    if small_angle:
        return math.hypot(o.theta_x, o.theta_y)
    return math.atan(math.hypot(math.tan(o.theta_x), math.tan(o.theta_y)))


def _null_angles(cfg: ArrayConfig, limit: int = 60) -> List[float]:
    """Polar angles of the array-factor nulls along an axis, used as quadrature breakpoints."""
    points = []
    spacing = cfg.element_spacing_wavelengths
    for m in range(1, limit + 1):
        s = m / (cfg.n_elements * spacing)
        if s >= 1.0:
            break
        points.append(math.asin(s))
    return points


@lru_cache(maxsize=128)
def _g0_numeric_cached(kind: ArrayKind, n_elements: int, spacing: float) -> float:
    cfg = ArrayConfig(kind=kind, n_elements=n_elements, element_spacing_wavelengths=spacing)
    if n_elements == 1:
        return 1.0

    def over_phi(theta: float) -> float:
        # one quadrant in phi; both patterns are symmetric under phi -> -phi and phi -> pi - phi
        value, _ = integrate.quad(
            lambda phi: float(gain_normalized(cfg, theta, phi)), 0.0, math.pi / 2.0,
            limit=200, epsabs=0.0, epsrel=1e-8,
        )
        return value * math.sin(theta)

    value, abserr = integrate.quad(
        over_phi, 0.0, math.pi / 2.0, points=_null_angles(cfg),
        limit=500, epsabs=0.0, epsrel=1e-7,
    )
    if abserr > 1e-5 * value:
        raise QuadratureError(
            f"G0 integration for {kind.value} N={n_elements} did not reach tolerance (abserr={abserr:.3g})"
        )
    # a planar aperture radiates into its front half-space only; a linear array
    # radiates into both, and its back half mirrors the front
    radiated = (4.0 if kind is ArrayKind.UPA else 8.0) * value
    logger.debug("G0 integral for %s N=%d: %.9g", kind.value, n_elements, radiated)
    return 4.0 * math.pi / radiated


def g0_numeric(cfg: ArrayConfig) -> float:
    """Peak gain 4 pi / integral of the normalized pattern over the radiating region.

    A UPA is integrated over the front half-space theta in [0, pi/2], which
    reproduces the aperture gain pi N^2 at half-wavelength spacing. A ULA is
    integrated over the whole sphere, giving N.
    """
    return _g0_numeric_cached(cfg.kind, cfg.n_elements, cfg.element_spacing_wavelengths)


def pattern_grid(
    cfg: ArrayConfig,
    theta_steps: int,
    phi_steps: int,
    theta_max: float = math.pi / 2.0,
) -> List[Tuple[float, float, float, float]]:
    """Rows (theta_deg, phi_deg, gain_linear, gain_dbi) on a regular grid."""
    if theta_steps < 1 or phi_steps < 1:
        raise ValueError("theta_steps and phi_steps must be positive")
    g0 = g0_numeric(cfg)
    thetas = np.linspace(0.0, theta_max, theta_steps)
    phis = np.linspace(0.0, 2.0 * math.pi, phi_steps, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    gain = g0 * gain_normalized(cfg, tt, pp)
    dbi = 10.0 * np.log10(np.maximum(gain, 1e-30))
    return [
        (math.degrees(t), math.degrees(p), float(g), float(d))
        for t, p, g, d in zip(tt.ravel(), pp.ravel(), gain.ravel(), dbi.ravel())
    ]
