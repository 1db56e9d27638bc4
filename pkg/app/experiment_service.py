"""Denoising experiment: noisy samples, subdivision limit, optional LLR baseline, L2 errors."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from app.schemas import BandwidthReport, DenoiseErrors, NoiseModel, SchemeSpec
from core.baseline_llr import bandwidth_report, default_bandwidth_grid, l2_error, llr_curve
from core.lsqfit import NodeSet
from core.noise import sample_noisy
from core.result_exporter import ResultExporter
from core.schemes import mask
from core.subdivide import SignalLevel, evaluate_limit, grid_offset
from domain.signal_catalog import get_signal

logger = logging.getLogger(__name__)

GRID_START = 0
GRID_STOP = 100
DEFAULT_LIMIT_K = 6


@dataclass
class DenoiseResult:
    errors: DenoiseErrors
    abscissae: np.ndarray
    truth: np.ndarray
    limit: np.ndarray
    sample_x: Optional[np.ndarray] = None
    sample_y: Optional[np.ndarray] = None
    llr: Optional[np.ndarray] = None
    bandwidth: Optional[BandwidthReport] = None


class DenoiseExperiment:
    """Samples a catalog function at the integers, adds noise and compares estimators on [0, 100]."""

    def __init__(self, grid_start: int = GRID_START, grid_stop: int = GRID_STOP) -> None:
        if grid_stop <= grid_start:
            raise ValueError("grid_stop must exceed grid_start")
        self.grid_start = grid_start
        self.grid_stop = grid_stop

    def _sample_nodes(self, spec: SchemeSpec) -> NodeSet:
        lo, hi = spec.support
        pad = max(-lo, hi) + 1
        return NodeSet(start=float(self.grid_start - pad), step=1.0, count=self.grid_stop - self.grid_start + 1 + 2 * pad)

    def run(
        self,
        function_id: str,
        spec: SchemeSpec,
        noise: NoiseModel,
        K: int = DEFAULT_LIMIT_K,
        llr: bool = False,
        candidates: Optional[Sequence[float]] = None,
    ) -> DenoiseResult:
        signal = get_signal(function_id)
        nodes = self._sample_nodes(spec)
        samples = sample_noisy(signal, nodes, noise)

        limit = evaluate_limit(mask(spec), SignalLevel(0, int(nodes.start), samples), K)
        positions = limit.abscissae + grid_offset(spec, K)
        keep = (positions >= self.grid_start - 1e-12) & (positions <= self.grid_stop + 1e-12)
        abscissae, estimate = positions[keep], limit.values[keep]
        truth = signal(abscissae)
        errors = DenoiseErrors(
            function_id=function_id,
            sigma=noise.sigma,
            seed=noise.seed,
            spec=spec,
            limit_l2=l2_error(estimate, truth, limit.step),
        )
        result = DenoiseResult(
            errors=errors,
            abscissae=abscissae,
            truth=truth,
            limit=estimate,
            sample_x=nodes.points,
            sample_y=samples,
        )

        if llr:
            inside = (nodes.points >= self.grid_start) & (nodes.points <= self.grid_stop)
            xs, ys = nodes.points[inside], samples[inside]
            grid = default_bandwidth_grid(xs) if candidates is None else candidates
            report = bandwidth_report(xs, ys, grid)
            curve = llr_curve(xs, ys, NodeSet(start=float(abscissae[0]), step=limit.step, count=abscissae.size), report.bandwidth)
            result.llr, result.bandwidth = curve, report
            result.errors = errors.model_copy(
                update={"llr_l2": l2_error(curve, truth, limit.step), "llr_bandwidth": report.bandwidth}
            )

        logger.info(
            "Denoise %s %s sigma=%g seed=%d: limit L2 %.6g%s",
            function_id, spec.label(), noise.sigma, noise.seed, result.errors.limit_l2,
            "" if result.errors.llr_l2 is None else f", LLR L2 {result.errors.llr_l2:.6g}",
        )
        return result

    def export(self, result: DenoiseResult, exporter: ResultExporter) -> None:
        exporter.write_columns("truth.csv", {"x": result.abscissae, "value": result.truth})
        exporter.write_columns("samples.csv", {"x": result.sample_x, "y": result.sample_y})
        exporter.write_columns("limit.csv", {"x": result.abscissae, "estimate": result.limit})
        if result.llr is not None:
            exporter.write_columns("llr.csv", {"x": result.abscissae, "estimate": result.llr})
            exporter.write_json("bandwidth.json", result.bandwidth)
        exporter.write_json("errors.json", result.errors)
