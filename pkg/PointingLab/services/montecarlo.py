"""Monte-Carlo oracle: Gaussian orientation draws pushed through the array patterns.

Five independent substreams are spawned from one seed: the four orientation
angles (Tx Yaw, Tx Pitch, Rx Yaw, Rx Pitch) and the small-scale fading.
Samples are drawn batch by batch from the same generators, so the batch size
never changes the result.
"""

import csv
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from PointingLab.services import antenna
from PointingLab.services.channel import FadingParams, LinkConfig, path_loss, threshold_gain
from PointingLab.services.pointing import VibrationProfile, combined_peak_gain
from PointingLab.settings import settings

logger = logging.getLogger(__name__)

QUANTILE_LEVELS = (0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99)
_STREAMS = 5
_FADING_STREAM = 4


class PatternKind(str, Enum):
    EXACT_ARRAY = "exact"
    GAUSSIAN_MAINLOBE = "gaussian"


@dataclass(frozen=True)
class SimPlan:
    n_samples: int = settings.MC_SAMPLES
    seed: int = settings.MC_SEED
    pattern: PatternKind = PatternKind.EXACT_ARRAY
    batch: int = settings.MC_BATCH

    def __post_init__(self) -> None:
        object.__setattr__(self, "pattern", PatternKind(self.pattern))
        if self.n_samples < 1000:
            raise ValueError(f"n_samples must be at least 1000, got {self.n_samples}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.batch < 1:
            raise ValueError(f"batch must be positive, got {self.batch}")

    def generators(self) -> List[np.random.Generator]:
        children = np.random.SeedSequence(self.seed).spawn(_STREAMS)
        return [np.random.Generator(np.random.PCG64(child)) for child in children]

    def batches(self) -> Iterator[int]:
        remaining = self.n_samples
        while remaining > 0:
            size = min(self.batch, remaining)
            remaining -= size
            yield size


@dataclass(frozen=True)
class EmpiricalDistribution:
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.sort(np.asarray(self.values, dtype=float).ravel())
        if values.size == 0:
            raise ValueError("an empirical distribution needs at least one sample")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def count(self) -> int:
        return int(self.values.size)

    @property
    def support(self) -> Tuple[float, float]:
        return float(self.values[0]), float(self.values[-1])

    def ecdf(self, x):
        ranks = np.searchsorted(self.values, x, side="right")
        if np.ndim(ranks) == 0:
            return float(ranks) / self.count
        return ranks / self.count

    def quantiles(self, levels: Sequence[float] = QUANTILE_LEVELS) -> np.ndarray:
        return np.quantile(self.values, levels)

    def histogram(self, bins: int, value_range: Optional[Tuple[float, float]] = None) -> Tuple[np.ndarray, np.ndarray]:
        return np.histogram(self.values, bins=bins, range=value_range, density=True)


class MonteCarloOutage(NamedTuple):
    probability: float
    low: float
    high: float
    failures: int
    n_samples: int


def _orientation_batch(gens: List[np.random.Generator], profile: VibrationProfile, size: int) -> Tuple[np.ndarray, ...]:
    sigmas = (profile.sigma_tx, profile.sigma_ty, profile.sigma_rx, profile.sigma_ry)
    return tuple(sigma * gen.standard_normal(size) for sigma, gen in zip(sigmas, gens[:4]))


def _node_gain(cfg: antenna.ArrayConfig, theta_x: np.ndarray, theta_y: np.ndarray, pattern: PatternKind) -> np.ndarray:
    """Normalized gain of one node, in [0, 1]."""
    if pattern is PatternKind.EXACT_ARRAY:
        return antenna.exact_gain(cfg, theta_x, theta_y)
    w_b = antenna.beamwidth(cfg.n_elements)
    if cfg.kind is antenna.ArrayKind.ULA:
        return np.exp(-np.square(theta_y) / w_b ** 2)
    return np.exp(-(np.square(theta_x) + np.square(theta_y)) / w_b ** 2)


def _pointing_batch(
    gens: List[np.random.Generator],
    plan: SimPlan,
    profile: VibrationProfile,
    cfg_t: antenna.ArrayConfig,
    cfg_r: antenna.ArrayConfig,
    size: int,
) -> np.ndarray:
    tx, ty, rx, ry = _orientation_batch(gens, profile, size)
    g_t = _node_gain(cfg_t, tx, ty, plan.pattern)
    g_r = _node_gain(cfg_r, rx, ry, plan.pattern)
    return combined_peak_gain(cfg_t, cfg_r) * np.sqrt(g_t * g_r)


def _alpha_mu_batch(gen: np.random.Generator, f: FadingParams, size: int) -> np.ndarray:
    # mu (h_a / h_hat)^alpha ~ Gamma(mu, 1)
    return f.h_hat * (gen.standard_gamma(f.mu, size) / f.mu) ** (1.0 / f.alpha)


def _collect(plan: SimPlan, draw: Callable[[List[np.random.Generator], int], np.ndarray]) -> EmpiricalDistribution:
    gens = plan.generators()
    blocks = [draw(gens, size) for size in plan.batches()]
    logger.debug("Drew %d samples in %d batches (seed %d)", plan.n_samples, len(blocks), plan.seed)
    return EmpiricalDistribution(np.concatenate(blocks))


def sample_pointing(
    plan: SimPlan,
    profile: VibrationProfile,
    cfg_t: antenna.ArrayConfig,
    cfg_r: antenna.ArrayConfig,
) -> EmpiricalDistribution:
    """Samples of h_p = G0 sqrt(G'_t G'_r) for Gaussian orientation fluctuations."""
    return _collect(plan, lambda gens, size: _pointing_batch(gens, plan, profile, cfg_t, cfg_r, size))


def sample_alpha_mu(plan: SimPlan, f: FadingParams) -> EmpiricalDistribution:
    return _collect(plan, lambda gens, size: _alpha_mu_batch(gens[_FADING_STREAM], f, size))


def _e2e_batch(gens, plan, profile, cfg_t, cfg_r, f, h_l, size) -> np.ndarray:
    h_p = _pointing_batch(gens, plan, profile, cfg_t, cfg_r, size)
    return h_l * _alpha_mu_batch(gens[_FADING_STREAM], f, size) * h_p


def sample_e2e(
    plan: SimPlan,
    profile: VibrationProfile,
    cfg_t: antenna.ArrayConfig,
    cfg_r: antenna.ArrayConfig,
    f: FadingParams,
    link: LinkConfig,
) -> EmpiricalDistribution:
    """Samples of h = h_L h_a h_p."""
    h_l = path_loss(link)
    return _collect(plan, lambda gens, size: _e2e_batch(gens, plan, profile, cfg_t, cfg_r, f, h_l, size))


def wilson_interval(k: int, n: int, z: float = 1.96) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion k / n."""
    if n <= 0 or not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n and n > 0, got k={k}, n={n}")
    p = k / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def outage_mc(
    plan: SimPlan,
    profile: VibrationProfile,
    cfg_t: antenna.ArrayConfig,
    cfg_r: antenna.ArrayConfig,
    f: FadingParams,
    link: LinkConfig,
) -> MonteCarloOutage:
    h_th = threshold_gain(link)
    h_l = path_loss(link)
    gens = plan.generators()
    failures = 0
    for size in plan.batches():
        failures += int(np.count_nonzero(_e2e_batch(gens, plan, profile, cfg_t, cfg_r, f, h_l, size) < h_th))
    low, high = wilson_interval(failures, plan.n_samples)
    return MonteCarloOutage(failures / plan.n_samples, low, high, failures, plan.n_samples)


def ks_distance(dist: EmpiricalDistribution, cdf: Callable, grid_size: Optional[int] = None) -> float:
    """Kolmogorov-Smirnov distance sup |ECDF - F| over the sample points.

    With ``grid_size`` the analytic CDF is evaluated on that many points
    across the sample support and linearly interpolated.
    """
    x = dist.values
    n = dist.count
    if grid_size is None:
        f = np.asarray(cdf(x), dtype=float)
    else:
        low, high = dist.support
        grid = np.linspace(low, high, grid_size) if high > low else np.array([low])
        f = np.interp(x, grid, np.asarray(cdf(grid), dtype=float))
    i = np.arange(1, n + 1, dtype=float)
    return float(max(np.max(i / n - f), np.max(f - (i - 1.0) / n)))


def export_samples(dist: EmpiricalDistribution, path) -> Tuple[Path, Path]:
    """Write the samples as little-endian float64 and a quantile summary CSV next to them."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dist.values.astype("<f8").tofile(path)
    summary = path.with_name(path.name + ".quantiles.csv")
    with summary.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["level", "value"])
        for level, value in zip(QUANTILE_LEVELS, dist.quantiles()):
            writer.writerow([f"{level:g}", f"{value:.{settings.CSV_DIGITS}g}"])
    logger.info("Exported %d samples to %s", dist.count, path)
    return path, summary
