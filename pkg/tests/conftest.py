import math

import pytest

from PointingLab.services.antenna import ArrayConfig, ArrayKind
from PointingLab.services.channel import FadingParams, LinkConfig, path_loss
from PointingLab.services.pointing import VibrationProfile


@pytest.fixture
def general_profile() -> VibrationProfile:
    """Low-vibration profile with four distinct deviations (N_t=25, N_r=30)."""
    return VibrationProfile.from_degrees(0.6, 0.5, 0.7, 0.4)


@pytest.fixture
def per_node_profile() -> VibrationProfile:
    """Equal Yaw and Pitch deviations on each node."""
    return VibrationProfile.from_degrees(0.5, 0.5, 0.6, 0.6)


@pytest.fixture
def strong_profile() -> VibrationProfile:
    """Per-node symmetric profile strong enough for the gamma form of the end-to-end density."""
    return VibrationProfile.from_degrees(1.0, 1.0, 0.9, 0.9)


@pytest.fixture
def ula_profile() -> VibrationProfile:
    return VibrationProfile.from_degrees(1.0, 0.6, 1.0, 0.4)


@pytest.fixture
def fading() -> FadingParams:
    return FadingParams(alpha=2.0, mu=4)


@pytest.fixture
def link() -> LinkConfig:
    return LinkConfig(distance_m=1000.0, absorption_per_m=2e-3)


@pytest.fixture
def h_l(link) -> float:
    return path_loss(link)


@pytest.fixture
def upa_pair():
    return ArrayConfig(kind=ArrayKind.UPA, n_elements=25), ArrayConfig(kind=ArrayKind.UPA, n_elements=30)


@pytest.fixture
def ula_pair():
    return ArrayConfig(kind=ArrayKind.ULA, n_elements=25), ArrayConfig(kind=ArrayKind.ULA, n_elements=30)


@pytest.fixture
def ks_tolerance():
    """KS acceptance level: the table tolerance or the 0.1% critical value at n samples."""

    def tolerance(n: int, floor: float = 0.01) -> float:
        return max(floor, 1.95 / math.sqrt(n))

    return tolerance
