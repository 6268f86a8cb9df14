"""Run configuration: one declarative JSON document per run.

A document either comes from ``--config PATH`` or names one of the frozen
presets under ``presets/``. Unknown keys are rejected. The pydantic records
convert into the frozen dataclasses the services work with.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from PointingLab.services import antenna, pointing
from PointingLab.services.channel import E2EMethod, EndToEndModel, FadingParams, LinkConfig, SnrConvention, path_loss
from PointingLab.services.montecarlo import PatternKind, SimPlan
from PointingLab.settings import settings

logger = logging.getLogger(__name__)

PRESET_DIR = Path(__file__).resolve().parent / "presets"

_ULA_VARIANTS = (pointing.PointingVariant.ULA, pointing.PointingVariant.ULA_APPROX)


class _Record(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ArraySpec(_Record):
    kind: antenna.ArrayKind = antenna.ArrayKind.UPA
    n_elements: int = Field(25, ge=1)
    carrier_hz: float = Field(280e9, gt=0)
    element_spacing_wavelengths: float = Field(0.5, gt=0, le=1)

    def to_domain(self) -> antenna.ArrayConfig:
        return antenna.ArrayConfig(
            kind=self.kind,
            n_elements=self.n_elements,
            carrier_hz=self.carrier_hz,
            element_spacing_wavelengths=self.element_spacing_wavelengths,
        )


class VibrationSpec(_Record):
    """Standard deviations of Tx Yaw, Tx Pitch, Rx Yaw and Rx Pitch."""

    angle_unit: Literal["deg", "rad"] = "deg"
    sigma_tx: float = Field(0.6, ge=0)
    sigma_ty: float = Field(0.5, ge=0)
    sigma_rx: float = Field(0.7, ge=0)
    sigma_ry: float = Field(0.4, ge=0)

    @model_validator(mode="after")
    def _check_range(self) -> "VibrationSpec":
        if math.radians(self.largest_deg) >= pointing.MAX_SIGMA_RAD:
            raise ValueError(f"vibration standard deviations must stay below {pointing.MAX_SIGMA_RAD} rad")
        return self

    def to_domain(self) -> pointing.VibrationProfile:
        values = (self.sigma_tx, self.sigma_ty, self.sigma_rx, self.sigma_ry)
        if self.angle_unit == "deg":
            return pointing.VibrationProfile.from_degrees(*values)
        return pointing.VibrationProfile(*values)

    @property
    def largest_deg(self) -> float:
        top = max(self.sigma_tx, self.sigma_ty, self.sigma_rx, self.sigma_ry)
        return top if self.angle_unit == "deg" else math.degrees(top)


class FadingSpec(_Record):
    alpha: float = Field(2.0, gt=0)
    mu: int = Field(4, ge=1)
    h_hat: float = Field(1.0, gt=0)

    def to_domain(self) -> FadingParams:
        return FadingParams(alpha=self.alpha, mu=self.mu, h_hat=self.h_hat)


class LinkSpec(_Record):
    distance_m: float = Field(1000.0, gt=0)
    carrier_hz: float = Field(280e9, gt=0)
    absorption_per_km: float = Field(2.0, ge=0)
    tx_power_w: float = Field(0.01, gt=0)
    bandwidth_hz: float = Field(100e6, gt=0)
    temperature_k: float = Field(300.0, gt=0)
    snr_threshold_db: float = 5.0
    snr_convention: SnrConvention = SnrConvention.SQUARED
    gain: float = Field(1.0, gt=0)

    def to_domain(self, absorption_per_km: Optional[float] = None) -> LinkConfig:
        absorption = self.absorption_per_km if absorption_per_km is None else absorption_per_km
        return LinkConfig(
            distance_m=self.distance_m,
            carrier_hz=self.carrier_hz,
            absorption_per_m=absorption / 1000.0,
            tx_power_w=self.tx_power_w,
            bandwidth_hz=self.bandwidth_hz,
            temperature_k=self.temperature_k,
            snr_threshold_db=self.snr_threshold_db,
            snr_convention=self.snr_convention,
            gain=self.gain,
        )


class SimSpec(_Record):
    n_samples: int = Field(settings.MC_SAMPLES, ge=1000)
    seed: int = Field(settings.MC_SEED, ge=0, lt=2 ** 64)
    pattern: PatternKind = PatternKind.EXACT_ARRAY
    batch: int = Field(settings.MC_BATCH, ge=1)
    export_path: Optional[str] = None

    def to_domain(self, pattern: Optional[PatternKind] = None) -> SimPlan:
        return SimPlan(
            n_samples=self.n_samples,
            seed=self.seed,
            pattern=self.pattern if pattern is None else pattern,
            batch=self.batch,
        )


class CurveSpec(_Record):
    n_points: int = Field(200, ge=1)
    # end-to-end curves run over r = h / (G0 h_L) in (0, e2e_ratio_max]
    e2e_ratio_max: float = Field(3.0, gt=0)
    mc_overlay: bool = False


class PatternSpec(_Record):
    theta_steps: int = Field(91, ge=1)
    phi_steps: int = Field(72, ge=1)
    theta_max_deg: float = Field(90.0, gt=0, le=90)


class CalibrationSpec(_Record):
    target: float = Field(1e-2, gt=0, lt=1)
    anchor_distance_m: float = Field(3100.0, gt=0)
    absorption_per_km: Optional[float] = Field(None, ge=0)


class OutageSpec(_Record):
    mode: Literal["distance", "elements"] = "distance"
    z_m: List[float] = Field(default_factory=lambda: [100.0 * i for i in range(1, 51)])
    absorption_per_km: List[float] = Field(default_factory=list)
    n_values: List[int] = Field(default_factory=lambda: list(range(10, 101, 10)))
    profiles: List[VibrationSpec] = Field(default_factory=list)
    target: float = Field(1e-3, gt=0, lt=1)
    calibration: Optional[CalibrationSpec] = None

    @model_validator(mode="after")
    def _check_grids(self) -> "OutageSpec":
        if not self.z_m or any(z <= 0 for z in self.z_m):
            raise ValueError("outage.z_m must be a nonempty list of positive distances")
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise ValueError("outage.n_values must be a nonempty list of positive integers")
        if any(k < 0 for k in self.absorption_per_km):
            raise ValueError("outage.absorption_per_km entries must be nonnegative")
        return self


class RunConfig(_Record):
    name: str = "custom"
    variant: pointing.PointingVariant = pointing.PointingVariant.GENERAL
    approximate: bool = False
    hoyt_terms: Optional[int] = Field(None, ge=1)
    e2e_method: Optional[E2EMethod] = None
    tx: ArraySpec = Field(default_factory=ArraySpec)
    rx: ArraySpec = Field(default_factory=lambda: ArraySpec(n_elements=30))
    vibration: VibrationSpec = Field(default_factory=VibrationSpec)
    fading: FadingSpec = Field(default_factory=FadingSpec)
    link: LinkSpec = Field(default_factory=LinkSpec)
    simulation: SimSpec = Field(default_factory=SimSpec)
    curve: CurveSpec = Field(default_factory=CurveSpec)
    pattern: PatternSpec = Field(default_factory=PatternSpec)
    outage: OutageSpec = Field(default_factory=OutageSpec)
    output: Optional[str] = None

    @model_validator(mode="after")
    def _check_arrays(self) -> "RunConfig":
        if self.variant is pointing.PointingVariant.POINT_MASS:
            return self
        wanted = antenna.ArrayKind.ULA if self.variant in _ULA_VARIANTS else antenna.ArrayKind.UPA
        for node, spec in (("tx", self.tx), ("rx", self.rx)):
            if spec.kind is not wanted:
                raise ValueError(f"variant {self.variant.value} needs {wanted.value} arrays, {node} is {spec.kind.value}")
        return self

    def arrays(self) -> Tuple[antenna.ArrayConfig, antenna.ArrayConfig]:
        return self.tx.to_domain(), self.rx.to_domain()

    def pointing_model(self, vibration: Optional[VibrationSpec] = None, n_elements: Optional[int] = None) -> pointing.PointingModel:
        """Pointing model for the configured variant.

        ``n_elements`` overrides both array sizes (the element-count sweep).
        """
        profile = (vibration or self.vibration).to_domain()
        n_t = self.tx.n_elements if n_elements is None else n_elements
        n_r = self.rx.n_elements if n_elements is None else n_elements
        variant = self.variant
        if variant is pointing.PointingVariant.GENERAL:
            return pointing.general_model(profile, n_t, n_r)
        if variant is pointing.PointingVariant.SYMMETRIC:
            return pointing.symmetric_model(profile, n_t, n_r)
        if variant in _ULA_VARIANTS:
            approximate = self.approximate or variant is pointing.PointingVariant.ULA_APPROX
            return pointing.ula_model(profile, n_t, n_r, approximate=approximate, n_terms=self.hoyt_terms)
        if variant is pointing.PointingVariant.POINT_MASS:
            return pointing.point_mass_model(math.pi * n_t * n_r)
        return pointing.remark1_model(
            profile, pointing.LinkDirection(variant.value), n_t, n_r,
            approximate=self.approximate, n_terms=self.hoyt_terms,
        )

    def e2e_model(self, link: Optional[LinkConfig] = None, **pointing_overrides) -> EndToEndModel:
        link = link or self.link.to_domain()
        return EndToEndModel(
            pointing=self.pointing_model(**pointing_overrides),
            fading=self.fading.to_domain(),
            h_l=path_loss(link),
            method=self.e2e_method,
        )

    def document(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def echo_document(cfg: RunConfig) -> str:
    """Resolved configuration as canonical JSON (sorted keys, LF line ends)."""
    return json.dumps(cfg.document(), sort_keys=True, indent=2) + "\n"


def list_presets() -> List[str]:
    return sorted(p.stem for p in PRESET_DIR.glob("*.json"))


def parse_config(doc: Any) -> Tuple[bool, Any]:
    """Validate a decoded document. Returns (success, RunConfig_or_error)."""
    if not isinstance(doc, dict):
        return False, "Configuration document must be a JSON object."
    try:
        return True, RunConfig.model_validate(doc)
    except ValidationError as e:
        return False, f"Invalid configuration:\n{e}"
    except ValueError as e:
        return False, f"Invalid configuration: {e}"


def _read_json(path: Path) -> Tuple[bool, Any]:
    try:
        return True, json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        return False, f"Cannot read {path}: {e}"
    except json.JSONDecodeError as e:
        return False, f"{path} is not valid JSON: {e}"


def load_config_file(path) -> Tuple[bool, Any]:
    ok, data = _read_json(Path(path))
    if not ok:
        return False, data
    return parse_config(data)


def load_preset(name: str) -> Tuple[bool, Any]:
    available = list_presets()
    if name not in available:
        return False, f"Unknown preset '{name}'. Available presets: {', '.join(available)}"
    ok, data = _read_json(PRESET_DIR / f"{name}.json")
    if not ok:
        return False, data
    return parse_config(data)


def resolve_config(
    preset: Optional[str] = None,
    path: Optional[str] = None,
    seed: Optional[int] = None,
    samples: Optional[int] = None,
    output: Optional[str] = None,
) -> Tuple[bool, Any]:
    """Load the run document and apply command-line overrides.

    Returns (success, RunConfig_or_error). Without a preset or a file the
    documented defaults are used.
    """
    if preset and path:
        return False, "Use either --preset or --config, not both."
    if preset:
        ok, cfg = load_preset(preset)
    elif path:
        ok, cfg = load_config_file(path)
    else:
        ok, cfg = True, RunConfig()
    if not ok:
        return False, cfg
    if seed is None and samples is None and output is None:
        return True, cfg

    doc = cfg.document()
    if seed is not None:
        doc["simulation"]["seed"] = seed
    if samples is not None:
        doc["simulation"]["n_samples"] = samples
    if output is not None:
        doc["output"] = output
    return parse_config(doc)
