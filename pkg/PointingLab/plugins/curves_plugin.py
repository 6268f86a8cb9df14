import logging
import math
from typing import Any, Dict, List, Optional

import numpy as np

from PointingLab.plugins.config import RunConfig
from PointingLab.plugins.output import Table
from PointingLab.services import antenna, channel, montecarlo, pointing

logger = logging.getLogger(__name__)


class CurvesPlugin:
    """
    Plot-ready curves: the antenna pattern, the pointing-error distribution
    and the end-to-end channel distribution, with optional Monte-Carlo columns.
    """

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg

    # Antenna pattern
    def pattern(self, node: str = "tx") -> Table:
        spec = self.cfg.tx if node == "tx" else self.cfg.rx
        array = spec.to_domain()
        p = self.cfg.pattern
        rows = antenna.pattern_grid(array, p.theta_steps, p.phi_steps, math.radians(p.theta_max_deg))
        summary = {
            "node": node,
            "kind": array.kind.value,
            "n_elements": array.n_elements,
            "g0_numeric": antenna.g0_numeric(array),
            "g0_closed_form": antenna.peak_gain(array),
        }
        logger.info("Pattern grid for %s %s N=%d: %d rows", node, array.kind.value, array.n_elements, len(rows))
        return Table(header=["theta_deg", "phi_deg", "gain_linear", "gain_dbi"], rows=rows, summary=summary)

    # Pointing-error distribution
    def pointing(self, n_points: Optional[int] = None, mc_overlay: Optional[bool] = None) -> Table:
        model = self.cfg.pointing_model()
        n_points = n_points or self.cfg.curve.n_points
        overlay = self.cfg.curve.mc_overlay if mc_overlay is None else mc_overlay
        rows = pointing.curve_rows(model, n_points)
        summary: Dict[str, Any] = {"variant": model.variant.value, "g0": model.g0}
        if isinstance(model.spec, pointing.GammaSumSpec):
            summary["series_terms"] = model.spec.K
            summary["captured_mass"] = model.spec.theta0
        header = ["h_over_g0", "pdf", "cdf"]
        if not overlay:
            return Table(header=header, rows=rows, summary=summary)

        cfg_t, cfg_r = self.cfg.arrays()
        plan = self.cfg.simulation.to_domain()
        dist = montecarlo.sample_pointing(plan, self.cfg.vibration.to_domain(), cfg_t, cfg_r)
        self._maybe_export(dist)
        u = np.array([row[0] for row in rows])
        mc_cdf, mc_pdf = self._overlay(dist, u * model.g0)
        summary.update(self._mc_summary(plan, dist, model.cdf))
        rows = [row + (float(c), float(d)) for row, c, d in zip(rows, mc_cdf, mc_pdf)]
        return Table(header=header + ["mc_cdf", "mc_pdf"], rows=rows, summary=summary)

    # End-to-end channel
    def e2e(self, n_points: Optional[int] = None, method: Optional[str] = None, mc_overlay: Optional[bool] = None) -> Table:
        cfg = self.cfg
        if method is not None:
            cfg = cfg.model_copy(update={"e2e_method": channel.E2EMethod(method)})
        link = cfg.link.to_domain()
        model = cfg.e2e_model(link)
        n_points = n_points or cfg.curve.n_points
        overlay = cfg.curve.mc_overlay if mc_overlay is None else mc_overlay

        r = np.arange(1, n_points + 1, dtype=float) / n_points * cfg.curve.e2e_ratio_max
        h = r * model.scale
        pdf = np.atleast_1d(model.pdf(h))
        cdf = np.atleast_1d(model.cdf(h))
        rows: List[tuple] = [(float(a), float(b), float(c), float(d)) for a, b, c, d in zip(r, h, pdf, cdf)]
        summary: Dict[str, Any] = {
            "variant": model.pointing.variant.value,
            "method": model.method.value,
            "path_loss": model.h_l,
            "g0": model.pointing.g0,
        }
        header = ["h_over_scale", "h", "pdf", "cdf"]
        if not overlay:
            return Table(header=header, rows=rows, summary=summary)

        cfg_t, cfg_r = cfg.arrays()
        plan = cfg.simulation.to_domain()
        dist = montecarlo.sample_e2e(plan, cfg.vibration.to_domain(), cfg_t, cfg_r, cfg.fading.to_domain(), link)
        self._maybe_export(dist)
        mc_cdf, mc_pdf = self._overlay(dist, h)
        summary.update(self._mc_summary(plan, dist, model.cdf))
        rows = [row + (float(c), float(d)) for row, c, d in zip(rows, mc_cdf, mc_pdf)]
        return Table(header=header + ["mc_cdf", "mc_pdf"], rows=rows, summary=summary)

    @staticmethod
    def _overlay(dist: montecarlo.EmpiricalDistribution, h: np.ndarray):
        """ECDF at the grid points and the histogram density of the bin ending at each point."""
        edges = np.concatenate(([0.0], h))
        counts, _ = np.histogram(dist.values, bins=edges)
        density = counts / (dist.count * np.diff(edges))
        return np.atleast_1d(dist.ecdf(h)), density

    @staticmethod
    def _mc_summary(plan: montecarlo.SimPlan, dist: montecarlo.EmpiricalDistribution, cdf) -> Dict[str, Any]:
        return {
            "mc_samples": plan.n_samples,
            "mc_seed": plan.seed,
            "mc_pattern": plan.pattern.value,
            "mc_ks_distance": montecarlo.ks_distance(dist, cdf, grid_size=4000),
        }

    def _maybe_export(self, dist: montecarlo.EmpiricalDistribution) -> None:
        if self.cfg.simulation.export_path:
            montecarlo.export_samples(dist, self.cfg.simulation.export_path)
