import logging
from dataclasses import replace
from typing import Any, Dict, List

from PointingLab.plugins.config import RunConfig
from PointingLab.plugins.output import Table
from PointingLab.services import channel

logger = logging.getLogger(__name__)


class OutagePlugin:
    """
    Outage curves versus link length (one per absorption coefficient) and the
    outage / maximum-length sweep over the array size N_t = N_r = N.
    """

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg

    def calibrated_gain(self) -> float:
        """SNR constant from the calibration anchor, or the configured gain."""
        cal = self.cfg.outage.calibration
        if cal is None:
            return self.cfg.link.gain
        anchor_link = self.cfg.link.to_domain(absorption_per_km=cal.absorption_per_km)
        return channel.calibrate_gain(
            replace(anchor_link, gain=1.0),
            self.cfg.e2e_model(anchor_link),
            cal.target,
            cal.anchor_distance_m,
        )

    def run(self) -> Table:
        if self.cfg.outage.mode == "elements":
            return self.element_sweep()
        return self.distance_sweep()

    def distance_sweep(self) -> Table:
        spec = self.cfg.outage
        gain = self.calibrated_gain()
        absorptions = spec.absorption_per_km or [self.cfg.link.absorption_per_km]
        rows: List[tuple] = []
        lengths: Dict[str, float] = {}
        for k in absorptions:
            link = replace(self.cfg.link.to_domain(absorption_per_km=k), gain=gain)
            model = self.cfg.e2e_model(link)
            for z, p_out, snr_db in channel.outage_sweep(link, model, spec.z_m):
                rows.append((float(k), z, p_out, snr_db))
            lengths[f"{k:g}"] = channel.max_link_length(link, model, spec.target)
            logger.info("K=%g /km: longest link at P_out <= %g is %.1f m", k, spec.target, lengths[f"{k:g}"])
        summary: Dict[str, Any] = {
            "snr_gain": gain,
            "target": spec.target,
            "max_link_length_m": lengths,
        }
        return Table(header=["absorption_per_km", "z_m", "outage_prob", "snr_db_mean"], rows=rows, summary=summary)

    def element_sweep(self) -> Table:
        spec = self.cfg.outage
        gain = self.calibrated_gain()
        link = replace(self.cfg.link.to_domain(), gain=gain)
        fading = self.cfg.fading.to_domain()
        profiles = spec.profiles or [self.cfg.vibration]
        rows: List[tuple] = []
        best: List[Dict[str, Any]] = []
        for index, vibration in enumerate(profiles):
            result = channel.optimal_n_sweep(
                link,
                vibration.to_domain(),
                spec.n_values,
                fading=fading,
                target=spec.target,
                pointing_factory=lambda _profile, n, v=vibration: self.cfg.pointing_model(vibration=v, n_elements=n),
            )
            rows.extend((index,) + row for row in result.rows)
            best.append({"profile": index, "best_outage_n": result.best_outage_n, "best_length_n": result.best_length_n})
            logger.info(
                "Profile %d: lowest outage at N=%d, longest link at N=%d",
                index, result.best_outage_n, result.best_length_n,
            )
        summary = {"snr_gain": gain, "target": spec.target, "optima": best}
        return Table(header=["profile", "n_elements", "outage_prob", "snr_db_mean", "z_max_m"], rows=rows, summary=summary)
