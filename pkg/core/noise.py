"""Noise model, ψ = Σ φ(· − i)² and the expected squared error of limit estimators.

The limit of noisy samples y_j = f(j) + ε_j at x is Σ_j y_j φ(x − j), so its
expected squared error splits into σ²ψ(x) and the squared bias of the
noiseless limit. Abscissae passed to the estimator functions are true
positions: for dual families the limit sits half a unit to the right of the
index grid and the weights account for that.
"""
from __future__ import annotations

import logging
import math
from typing import Callable, Iterable, Optional, Tuple

import numpy as np
import scipy.integrate

from app.schemas import ConjectureReport, ErrorDecomposition, Family, NoiseModel, PsiStats, SchemeSpec
from core.lsqfit import NodeSet
from core.subdivide import LimitSamples, basic_limit_function, periodize

logger = logging.getLogger(__name__)

RealFunction = Callable[[np.ndarray], np.ndarray]

PSI_MIN_RESOLUTION = 6
PSI_STATS_MIN_RESOLUTION = 9
QUADRATURE_STEP = 0.002
MC_BLOCK = 4096
HAT_INTEGRAL_REFERENCE = 0.6647


def _evaluate(f: RealFunction, xs: np.ndarray) -> np.ndarray:
    values = np.asarray(f(np.asarray(xs, dtype=float)), dtype=float)
    values = np.broadcast_to(values, np.shape(xs)).astype(float)
    if not np.all(np.isfinite(values)):
        raise ValueError("sampled function returned non-finite values")
    return values


def sample_noisy(f: RealFunction, grid: NodeSet, model: NoiseModel) -> np.ndarray:
    """f(x_i) + σ ε_i with ε_i standard normal from ``default_rng(model.seed)``."""
    if model.sigma < 0:
        raise ValueError("sigma must be non-negative")
    exact = _evaluate(f, grid.points)
    rng = np.random.default_rng(model.seed)
    return exact + model.sigma * rng.standard_normal(grid.count)


def psi(spec: SchemeSpec, K: int) -> LimitSamples:
    """ψ on [0, 1] at spacing 2^{-K}, in the index convention of the basic limit function."""
    if K < PSI_MIN_RESOLUTION:
        raise ValueError(f"psi needs K >= {PSI_MIN_RESOLUTION}, got {K}")
    values = periodize(basic_limit_function(spec, K), power=2)
    return LimitSamples(K, 0, values)


def psi_stats(spec: SchemeSpec, K: int = 10) -> PsiStats:
    """Extremes of ψ on the dyadic grid and its trapezoid integral at step 0.002."""
    if K < PSI_STATS_MIN_RESOLUTION:
        raise ValueError(f"psi_stats needs K >= {PSI_STATS_MIN_RESOLUTION}, got {K}")
    samples = psi(spec, K)
    fine = np.linspace(0.0, 1.0, int(round(1.0 / QUADRATURE_STEP)) + 1)
    integral = float(scipy.integrate.trapezoid(np.interp(fine, samples.abscissae, samples.values), fine))
    if spec.family == "primal_even" and spec.n == 1 and spec.degree == 1:
        logger.warning(
            "Hat function psi integral is %.4f (analytic 2/3); tabulated reference value is %.4f",
            integral, HAT_INTEGRAL_REFERENCE,
        )
    return PsiStats(
        degree=spec.degree,
        n=spec.n,
        min=float(samples.values.min()),
        max=float(samples.values.max()),
        integral=integral,
        grid_step=QUADRATURE_STEP,
    )


def limit_weights(spec: SchemeSpec, x: float, K: int = 10) -> Tuple[np.ndarray, np.ndarray]:
    """Integer nodes j and weights φ(x − j) of the limit at ``x``; x must lie on the 2^{-K} grid."""
    blf = basic_limit_function(spec, K)
    shift = 0.5 if spec.is_dual else 0.0
    index = blf.index_of(float(x) - shift)
    lo, hi = spec.support
    scale = blf.scale
    first = -((hi * scale - index) // scale)
    last = (index - lo * scale) // scale
    nodes = np.arange(first, last + 1)
    weights = blf.values[index - nodes * scale - blf.first_index]
    return nodes, np.array(weights)


def expected_sq_error(
    spec: SchemeSpec, f: RealFunction, sigma: float, x: float, K: int = 10
) -> ErrorDecomposition:
    """σ²ψ(x) plus the squared error of the noiseless limit at ``x``."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    nodes, weights = limit_weights(spec, x, K)
    estimate = float(weights @ _evaluate(f, nodes.astype(float)))
    bias = estimate - float(_evaluate(f, np.array([float(x)]))[0])
    variance_term = sigma**2 * float(weights @ weights)
    bias_sq_term = bias * bias
    return ErrorDecomposition(
        x=float(x),
        sigma=float(sigma),
        variance_term=variance_term,
        bias_sq_term=bias_sq_term,
        total=variance_term + bias_sq_term,
    )


def monte_carlo_squared_errors(
    spec: SchemeSpec,
    f: RealFunction,
    sigma: float,
    x: float,
    trials: int,
    seed: int,
    K: int = 10,
    window: Optional[Tuple[int, int]] = None,
) -> np.ndarray:
    """Per-trial (f̂(x) − f(x))² for independent noise on the integer samples in ``window``.

    Trials are drawn in fixed blocks, each from its own child of
    ``SeedSequence(seed)``, so the result depends only on the arguments.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    nodes, weights = limit_weights(spec, x, K)
    if window is None:
        window = (int(nodes[0]), int(nodes[-1]))
    lo, hi = window
    if lo > nodes[0] or hi < nodes[-1]:
        raise ValueError(
            f"window [{lo}, {hi}] does not cover the samples [{nodes[0]}, {nodes[-1]}] the limit at {x} uses"
        )
    padded = np.zeros(hi - lo + 1)
    padded[nodes - lo] = weights
    clean = _evaluate(f, np.arange(lo, hi + 1, dtype=float))
    truth = float(_evaluate(f, np.array([float(x)]))[0])
    noiseless_error = float(padded @ clean) - truth

    blocks = math.ceil(trials / MC_BLOCK)
    errors = np.empty(trials)
    for b, child in enumerate(np.random.SeedSequence(seed).spawn(blocks)):
        size = min(MC_BLOCK, trials - b * MC_BLOCK)
        eps = np.random.default_rng(child).standard_normal((size, padded.size))
        errors[b * MC_BLOCK : b * MC_BLOCK + size] = (noiseless_error + sigma * (eps @ padded)) ** 2
    return errors


def monte_carlo_mse(
    spec: SchemeSpec,
    f: RealFunction,
    sigma: float,
    x: float,
    trials: int,
    seed: int,
    K: int = 10,
    window: Optional[Tuple[int, int]] = None,
) -> float:
    """Empirical mean squared error of the limit estimator at ``x``."""
    errors = monte_carlo_squared_errors(spec, f, sigma, x, trials, seed, K=K, window=window)
    return float(errors.mean())


def _strictly_monotone(values: list[float], increasing: bool) -> bool:
    pairs = zip(values, values[1:])
    return all((b > a) if increasing else (b < a) for a, b in pairs)


def conjecture_probe(
    degrees: Iterable[int], ns: Iterable[int], K: int = 10, family: Family = "primal_even"
) -> ConjectureReport:
    """ψ statistics over a (degree, n) grid with the two monotonicity flags.

    ``max_decreasing_in_n`` and ``integral_increasing_in_d`` are numerical
    evidence only; a key is present only when at least two values vary.
    """
    degrees, ns = sorted(set(degrees)), sorted(set(ns))
    if not degrees or not ns:
        raise ValueError("conjecture probe needs at least one degree and one n")
    specs = {(d, n): SchemeSpec(family=family, n=n, degree=d) for d in degrees for n in ns}
    stats = {key: psi_stats(spec, K) for key, spec in specs.items()}

    max_decreasing = {}
    if len(ns) > 1:
        for d in degrees:
            max_decreasing[d] = _strictly_monotone([stats[(d, n)].max for n in ns], increasing=False)
    integral_increasing = {}
    if len(degrees) > 1:
        for n in ns:
            integral_increasing[n] = _strictly_monotone([stats[(d, n)].integral for d in degrees], increasing=True)
    logger.info("Conjecture probe over %d (degree, n) pairs at K=%d", len(stats), K)
    return ConjectureReport(
        K=K,
        rows=[stats[key] for key in sorted(stats)],
        max_decreasing_in_n=max_decreasing,
        integral_increasing_in_d=integral_increasing,
    )
