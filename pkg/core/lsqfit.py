"""Discrete least squares polynomial fitting on equispaced nodes.

Fits are computed by projection onto polynomials that are orthonormal for
the discrete inner product over the nodes, so no normal equations are ever
inverted. The evaluation filter of a fit is the vector of weights that maps
data values to the value of the fit at one abscissa; refinement masks are
assembled from these filters.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np
import sympy
from numpy.polynomial import polynomial as P

from core.errors import SingularFitError

logger = logging.getLogger(__name__)

ORTHO_RANK_TOL = 1e-12


@dataclass(frozen=True)
class NodeSet:
    """Equispaced nodes ``start + i * step`` for ``i = 0 .. count - 1``."""

    start: float
    step: float
    count: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("node set must contain at least one node")
        if not self.step > 0:
            raise ValueError(f"node step must be positive, got {self.step}")
        if not (math.isfinite(float(self.start)) and math.isfinite(float(self.step))):
            raise ValueError("node start and step must be finite")

    @property
    def points(self) -> np.ndarray:
        return float(self.start) + float(self.step) * np.arange(self.count, dtype=float)

    @property
    def exact_points(self) -> Tuple[Fraction, ...]:
        start, step = Fraction(self.start), Fraction(self.step)
        return tuple(start + i * step for i in range(self.count))

    @property
    def center(self) -> float:
        return float(self.start) + float(self.step) * (self.count - 1) / 2.0


@dataclass(frozen=True, eq=False)
class PolyCoeffs:
    """Monomial coefficients β_0..β_d in ascending degree."""

    coefficients: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        return eval_poly(self, x)


@dataclass(frozen=True, eq=False)
class OrthoBasis:
    """Polynomials L_0..L_d orthonormal for the discrete inner product over ``nodes``.

    ``polys`` hold monomial coefficients in the original variable. Values are
    evaluated through the centred, unit-step representation kept in
    ``_local`` because the monomial form loses accuracy on wide node sets.
    """

    degree: int
    polys: Tuple[PolyCoeffs, ...]
    nodes: NodeSet
    _local: Tuple[np.ndarray, ...] = field(repr=False)

    def _to_local(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.nodes.center) / float(self.nodes.step)

    def values(self, x) -> np.ndarray:
        """Matrix of L_j(x) with one row per basis polynomial."""
        u = self._to_local(x)
        return np.array([P.polyval(u, c) for c in self._local])

    def node_values(self) -> np.ndarray:
        return self.values(self.nodes.points)


@dataclass(frozen=True, eq=False)
class EvalFilter:
    """Weights ℓ_i(point) so that ``weights @ y`` is the fitted value at ``point``."""

    weights: np.ndarray
    point: float

    def apply(self, values: Sequence[float]) -> float:
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))


def eval_poly(p: PolyCoeffs, x):
    """Horner evaluation of Σ β_j x^j; accepts scalars or arrays."""
    result = P.polyval(x, np.asarray(p.coefficients, dtype=float))
    if np.ndim(result) == 0:
        return float(result)
    return result


def _check_data(nodes: NodeSet, values: Sequence[float], degree: int) -> np.ndarray:
    if degree < 0:
        raise ValueError(f"degree must be non-negative, got {degree}")
    y = np.asarray(values, dtype=float)
    if y.ndim != 1 or y.shape[0] != nodes.count:
        raise ValueError(f"expected {nodes.count} values, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError("values must be finite")
    return y


def ortho_polynomials(nodes: NodeSet, degree: int) -> OrthoBasis:
    """Gram–Schmidt (Stieltjes form) of 1, u, u², ... under ⟨f, g⟩ = Σ f(x_i) g(x_i)."""
    if degree < 0:
        raise ValueError(f"degree must be non-negative, got {degree}")
    if degree >= nodes.count:
        raise SingularFitError(
            f"degree {degree} needs more than {nodes.count} nodes for an orthonormal basis"
        )

    u = (nodes.points - nodes.center) / float(nodes.step)
    node_vals: list[np.ndarray] = []
    local: list[np.ndarray] = []
    for j in range(degree + 1):
        if j == 0:
            coeffs = np.array([1.0])
            vals = np.ones_like(u)
        else:
            coeffs = P.polymulx(local[j - 1])
            vals = u * node_vals[j - 1]
        # two passes keep the basis orthogonal to working precision
        for _ in range(2):
            for i in range(j):
                proj = float(np.dot(vals, node_vals[i]))
                vals = vals - proj * node_vals[i]
                coeffs = P.polysub(coeffs, proj * local[i])
        norm = float(np.sqrt(np.dot(vals, vals)))
        if norm <= ORTHO_RANK_TOL:
            raise SingularFitError(f"Gram matrix singular at degree {j}")
        node_vals.append(vals / norm)
        local.append(coeffs / norm)

    # substitute u = (x - c) / h to get monomial coefficients in x
    affine = np.polynomial.Polynomial([-nodes.center / nodes.step, 1.0 / nodes.step])
    polys = tuple(
        PolyCoeffs(np.asarray(np.polynomial.Polynomial(c)(affine).coef, dtype=float))
        for c in local
    )
    return OrthoBasis(degree=degree, polys=polys, nodes=nodes, _local=tuple(local))


def fit_least_squares(nodes: NodeSet, values: Sequence[float], degree: int) -> PolyCoeffs:
    """Least squares polynomial of the given degree.

    With ``count <= degree`` the problem is underdetermined and the
    interpolant of minimal monomial-coefficient norm is returned.
    """
    y = _check_data(nodes, values, degree)
    if degree < nodes.count:
        basis = ortho_polynomials(nodes, degree)
        moments = basis.node_values() @ y
        coeffs = np.zeros(degree + 1)
        for m, poly in zip(moments, basis.polys):
            coeffs[: len(poly.coefficients)] += m * poly.coefficients
        return PolyCoeffs(coeffs)

    vander = np.vander(nodes.points, degree + 1, increasing=True)
    beta, *_ = np.linalg.lstsq(vander, y, rcond=None)
    return PolyCoeffs(beta)


def evaluation_filter(nodes: NodeSet, degree: int, x: float) -> EvalFilter:
    """Weights ℓ_i(x) = Σ_j L_j(x_i) L_j(x), or the min-norm analogue if degree >= count."""
    if degree < 0:
        raise ValueError(f"degree must be non-negative, got {degree}")
    if not math.isfinite(x):
        raise ValueError("evaluation point must be finite")
    if degree < nodes.count:
        basis = ortho_polynomials(nodes, degree)
        weights = basis.node_values().T @ basis.values(x)
        return EvalFilter(weights=np.asarray(weights, dtype=float).reshape(-1), point=float(x))

    vander = np.vander(nodes.points, degree + 1, increasing=True)
    at_x = np.array([float(x) ** j for j in range(degree + 1)])
    weights = np.linalg.pinv(vander).T @ at_x
    return EvalFilter(weights=weights, point=float(x))


def exact_evaluation_filter(
    points: Sequence[Fraction], degree: int, x: Fraction
) -> Tuple[Fraction, ...]:
    """Rational filter weights for rational nodes and evaluation point.

    Uses w = A (AᵀA)⁻¹ v(x) when the fit is determined and the min-norm form
    w = (AAᵀ)⁻¹ A v(x) otherwise, with A the monomial Vandermonde matrix.
    """
    if degree < 0:
        raise ValueError(f"degree must be non-negative, got {degree}")
    if len(points) < 1:
        raise ValueError("node set must contain at least one node")
    nodes = [sympy.Rational(p.numerator, p.denominator) for p in map(Fraction, points)]
    xr = sympy.Rational(Fraction(x).numerator, Fraction(x).denominator)
    A = sympy.Matrix([[node**j for j in range(degree + 1)] for node in nodes])
    v = sympy.Matrix([xr**j for j in range(degree + 1)])
    if degree < len(nodes):
        w = A * (A.T * A).LUsolve(v)
    else:
        w = (A * A.T).LUsolve(A * v)
    weights = (sympy.Rational(c) for c in w)
    return tuple(Fraction(int(c.p), int(c.q)) for c in weights)
