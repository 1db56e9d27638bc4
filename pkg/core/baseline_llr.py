"""Local linear regression with a Gaussian kernel, the comparison estimator.

At x* the intercept α of the line minimizing Σ K(x_i − x*) (y_i − α − β (x_i − x*))²
is the estimate, with K(d) = exp(−d² / (2 h²)). Bandwidths are chosen by
leave-one-out cross-validation over a candidate grid.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from app.schemas import BandwidthReport
from core.errors import SingularFitError
from core.lsqfit import NodeSet

logger = logging.getLogger(__name__)

SINGULAR_TOL = 1e-12
TIE_RTOL = 1e-9
TIE_ATOL = 1e-12


@dataclass(frozen=True)
class LocalFit:
    alpha: float
    beta: float
    x_star: float
    bandwidth: float


def _check_inputs(xs: Sequence[float], ys: Sequence[float], bandwidth: Optional[float] = None):
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise ValueError(f"xs and ys must be 1-D of equal length, got {x.shape} and {y.shape}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("data must be finite")
    if np.unique(x).size < 2:
        raise ValueError("local linear regression needs at least two distinct abscissae")
    if bandwidth is not None and not bandwidth > 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    return x, y


def _solve(offsets: np.ndarray, weights: np.ndarray, y: np.ndarray):
    """Weighted normal equations row by row; offsets and weights are (points, samples)."""
    s0 = weights.sum(axis=1)
    s1 = (weights * offsets).sum(axis=1)
    s2 = (weights * offsets**2).sum(axis=1)
    t0 = weights @ y
    t1 = (weights * offsets) @ y
    det = s0 * s2 - s1**2
    singular = (s0 <= 0) | (det <= SINGULAR_TOL * s0 * s2)
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = (s2 * t0 - s1 * t1) / det
        beta = (s0 * t1 - s1 * t0) / det
    return alpha, beta, singular


def _kernel(offsets: np.ndarray, bandwidth: float) -> np.ndarray:
    return np.exp(-(offsets**2) / (2.0 * bandwidth**2))


def llr_fit(xs: Sequence[float], ys: Sequence[float], x_star: float, bandwidth: float) -> LocalFit:
    x, y = _check_inputs(xs, ys, bandwidth)
    offsets = (x - float(x_star))[None, :]
    alpha, beta, singular = _solve(offsets, _kernel(offsets, bandwidth), y)
    if singular[0]:
        raise SingularFitError(f"weighted design is singular at x*={x_star} with bandwidth {bandwidth}")
    return LocalFit(alpha=float(alpha[0]), beta=float(beta[0]), x_star=float(x_star), bandwidth=float(bandwidth))


def llr_curve(xs: Sequence[float], ys: Sequence[float], grid: NodeSet, bandwidth: float) -> np.ndarray:
    """α of the local fit at every grid point."""
    x, y = _check_inputs(xs, ys, bandwidth)
    offsets = x[None, :] - grid.points[:, None]
    alpha, _, singular = _solve(offsets, _kernel(offsets, bandwidth), y)
    if np.any(singular):
        bad = grid.points[np.argmax(singular)]
        raise SingularFitError(f"weighted design is singular at x*={bad} with bandwidth {bandwidth}")
    return alpha


def loo_scores(xs: Sequence[float], ys: Sequence[float], candidates: Sequence[float]) -> List[Optional[float]]:
    """Mean leave-one-out squared prediction error per candidate; None where some fit is singular."""
    x, y = _check_inputs(xs, ys)
    offsets = x[None, :] - x[:, None]
    scores: List[Optional[float]] = []
    for h in candidates:
        if not h > 0:
            raise ValueError(f"bandwidth candidates must be positive, got {h}")
        weights = _kernel(offsets, float(h))
        np.fill_diagonal(weights, 0.0)
        alpha, _, singular = _solve(offsets, weights, y)
        scores.append(None if np.any(singular) else float(np.mean((y - alpha) ** 2)))
    return scores


def bandwidth_report(xs: Sequence[float], ys: Sequence[float], candidates: Sequence[float]) -> BandwidthReport:
    """LOO selection; near-ties go to the smallest bandwidth."""
    if len(candidates) == 0:
        raise ValueError("at least one bandwidth candidate is required")
    scores = loo_scores(xs, ys, candidates)
    valid = [(h, s) for h, s in zip(candidates, scores) if s is not None]
    if not valid:
        raise SingularFitError("every bandwidth candidate gives a singular leave-one-out fit")
    best = min(s for _, s in valid)
    chosen = min(h for h, s in valid if s <= best * (1.0 + TIE_RTOL) + TIE_ATOL)
    logger.debug("Selected bandwidth %.6g from %d candidates (LOO %.6g)", chosen, len(candidates), best)
    return BandwidthReport(
        bandwidth=float(chosen),
        candidates=[float(h) for h in candidates],
        loo_scores=scores,
    )


def select_bandwidth(xs: Sequence[float], ys: Sequence[float], candidates: Sequence[float]) -> float:
    return bandwidth_report(xs, ys, candidates).bandwidth


def default_bandwidth_grid(xs: Sequence[float], count: int = 12) -> np.ndarray:
    """Geometric grid over [0.25 h, 32 h] with h the median spacing of the sorted abscissae."""
    spacing = np.diff(np.unique(np.asarray(xs, dtype=float)))
    if spacing.size == 0:
        raise ValueError("need at least two distinct abscissae")
    h = float(np.median(spacing))
    return np.geomspace(0.25 * h, 32.0 * h, count)


def l2_error(estimate: Sequence[float], truth: Sequence[float], step: float) -> float:
    """Discrete L2 distance sqrt(step · Σ (estimate − truth)²)."""
    e = np.asarray(estimate, dtype=float)
    t = np.asarray(truth, dtype=float)
    if e.shape != t.shape:
        raise ValueError(f"length mismatch: {e.shape} vs {t.shape}")
    if not step > 0:
        raise ValueError("step must be positive")
    return float(np.sqrt(step * np.sum((e - t) ** 2)))
