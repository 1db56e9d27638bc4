"""Subdivision engine: refinement, basic limit functions and integer values.

Level-k data f^k_i sits at the dyadic point 2^{-k} i. Limits are reported
in this index convention for every family; dual schemes additionally drift
by a quarter of the coarse spacing per level, see :func:`grid_offset`.
"""
from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg

from app.schemas import SchemeSpec
from core.errors import DivisionRemainderError, EigenspaceError
from core.schemes import Mask, Symbol, mask, symbol

logger = logging.getLogger(__name__)

Boundary = Literal["zero", "valid"]

EIGEN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SignalLevel:
    """Values f^k_{first_index + j} on the level-k dyadic grid."""

    level: int
    first_index: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.level < 0:
            raise ValueError("level must be non-negative")

    @classmethod
    def delta(cls, pad: int = 0) -> "SignalLevel":
        values = np.zeros(2 * pad + 1)
        values[pad] = 1.0
        return cls(0, -pad, values)

    @property
    def last_index(self) -> int:
        return self.first_index + len(self.values) - 1

    @property
    def abscissae(self) -> np.ndarray:
        return np.arange(self.first_index, self.last_index + 1) / float(2**self.level)


@dataclass(frozen=True, eq=False)
class LimitSamples:
    """Limit values at 2^{-resolution}(first_index + j); zero outside the stored window."""

    resolution: int
    first_index: int
    values: np.ndarray

    @property
    def scale(self) -> int:
        return 2**self.resolution

    @property
    def last_index(self) -> int:
        return self.first_index + len(self.values) - 1

    @property
    def abscissae(self) -> np.ndarray:
        return np.arange(self.first_index, self.last_index + 1) / float(self.scale)

    @property
    def step(self) -> float:
        return 1.0 / self.scale

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Values at indices lo..hi, zero-filled outside the stored range."""
        out = np.zeros(hi - lo + 1)
        a, b = max(lo, self.first_index), min(hi, self.last_index)
        if a <= b:
            out[a - lo : b - lo + 1] = self.values[a - self.first_index : b - self.first_index + 1]
        return out

    def index_of(self, x: float) -> int:
        """Grid index of ``x``; raises if ``x`` is not on the grid."""
        pos = float(x) * self.scale
        idx = int(round(pos))
        if abs(pos - idx) > 1e-9:
            raise ValueError(f"{x} is not on the 2^-{self.resolution} grid")
        return idx

    def at(self, x: float) -> float:
        return float(self.window(self.index_of(x), self.index_of(x))[0])

    def at_integers(self) -> SignalLevel:
        lo = -(-self.first_index // self.scale)
        hi = self.last_index // self.scale
        ks = np.arange(lo, hi + 1)
        return SignalLevel(0, int(lo), self.window(self.first_index, self.last_index)[ks * self.scale - self.first_index])


def refine(m: Mask, signal: SignalLevel, *, boundary: Boundary = "zero") -> SignalLevel:
    """One step f^{k+1}_i = Σ_j a_{i-2j} f^k_j.

    ``boundary="zero"`` treats data outside the window as zero and emits every
    index that receives a contribution; ``"valid"`` keeps only outputs whose
    whole stencil lies inside the window.
    """
    values = np.asarray(signal.values, dtype=float)
    if values.size == 0:
        raise ValueError("cannot refine an empty signal")
    upsampled = np.zeros(2 * values.size - 1)
    upsampled[::2] = values
    out = np.convolve(upsampled, m.coefficients)
    first = 2 * signal.first_index + m.first_index
    if boundary == "valid":
        lo = 2 * signal.first_index - 1 + m.last_index
        hi = 2 * signal.last_index + 1 + m.first_index
        if hi < lo:
            raise ValueError("window too short for any fully supported output")
        out = out[lo - first : hi - first + 1]
        first = lo
    elif boundary != "zero":
        raise ValueError(f"unknown boundary policy {boundary!r}")
    return SignalLevel(signal.level + 1, first, out)


def refine_many(m: Mask, signal: SignalLevel, steps: int, *, boundary: Boundary = "zero") -> SignalLevel:
    if steps < 0:
        raise ValueError("steps must be non-negative")
    for _ in range(steps):
        signal = refine(m, signal, boundary=boundary)
    return signal


def grid_offset(spec: SchemeSpec, level: int) -> float:
    """Shift between index abscissa 2^{-k} i and the true parameter of f^k_i."""
    if spec.is_primal:
        return 0.0
    return 0.5 * (1.0 - 2.0 ** (-level))


@functools.lru_cache(maxsize=64)
def basic_limit_function(spec: SchemeSpec, K: int) -> LimitSamples:
    """S^K δ on the 2^{-K} grid over the closed support of the basic limit function."""
    if K < 1:
        raise ValueError("K must be at least 1")
    m = mask(spec)
    refined = refine_many(m, SignalLevel.delta(), K)
    lo, hi = spec.support
    scale = 2**K
    values = np.zeros((hi - lo) * scale + 1)
    offset = refined.first_index - lo * scale
    values[offset : offset + refined.values.size] = refined.values
    values.flags.writeable = False
    logger.debug("Basic limit function %s at K=%d: %d samples", spec.label(), K, values.size)
    return LimitSamples(K, lo * scale, values)


def subdivision_matrix(m: Mask) -> tuple[np.ndarray, int]:
    """M[i, l] = a_{2i-l} over the integers strictly inside the mask support."""
    lo, hi = m.first_index + 1, m.last_index - 1
    if hi < lo:
        return np.ones((1, 1)), 0
    idx = np.arange(lo, hi + 1)
    matrix = np.array([[m.coefficient(2 * i - l) for l in idx] for i in idx])
    return matrix, lo


def two_slanted_matrix(n: int) -> np.ndarray:
    """The (4n-3)×(4n-3) band matrix of r = 1/(2n-1) and s = 1/(2n) for degree-1 primal schemes."""
    if n < 1:
        raise ValueError("n must be at least 1")
    r, s = 1.0 / (2 * n - 1), 1.0 / (2 * n)
    size, centre = 4 * n - 3, 2 * n - 2
    A = np.zeros((size, size))
    for row in range(size):
        for col in range(size):
            k = 2 * (row - centre) - (col - centre)
            if k % 2 == 0 and abs(k) <= 2 * n - 2:
                A[row, col] = r
            elif k % 2 and abs(k) <= 2 * n - 1:
                A[row, col] = s
    return A


def integer_values_eigen(spec: SchemeSpec) -> SignalLevel:
    """φ at the integers as the eigenvector of eigenvalue 1, scaled to sum to 1."""
    if spec.family == "primal_even" and spec.degree == 1:
        matrix, first = two_slanted_matrix(spec.n), -(2 * spec.n - 2)
    else:
        matrix, first = subdivision_matrix(mask(spec))
    eigvals, eigvecs = scipy.linalg.eig(matrix)
    hits = np.flatnonzero(np.abs(eigvals - 1.0) <= EIGEN_TOL)
    if hits.size != 1:
        raise EigenspaceError(
            f"{spec.label()}: eigenvalue 1 has multiplicity {hits.size} within {EIGEN_TOL}"
        )
    vector = np.real(eigvecs[:, hits[0]])
    total = vector.sum()
    if abs(total) <= EIGEN_TOL:
        raise EigenspaceError(f"{spec.label()}: eigenvector cannot be normalized")
    logger.debug("Integer values of %s from a %dx%d eigenproblem", spec.label(), *matrix.shape)
    return SignalLevel(0, first, vector / total)


def evaluate_limit(m: Mask, f0: SignalLevel, K: int, *, boundary: Boundary = "zero") -> LimitSamples:
    """S^K f^0 attached to the 2^{-K} grid."""
    if K < 1:
        raise ValueError("K must be at least 1")
    refined = refine_many(m, f0, K, boundary=boundary)
    return LimitSamples(K, refined.first_index, refined.values)


def translate_sum(blf: LimitSamples, f0: SignalLevel) -> LimitSamples:
    """Σ_j f0_j φ(x - j) evaluated on the grid of ``blf``."""
    scale = blf.scale
    values = np.zeros(blf.values.size + (f0.values.size - 1) * scale)
    for j, f in enumerate(np.asarray(f0.values, dtype=float)):
        if f:
            values[j * scale : j * scale + blf.values.size] += f * blf.values
    return LimitSamples(blf.resolution, blf.first_index + f0.first_index * scale, values)


def periodize(samples: LimitSamples, power: int = 1) -> np.ndarray:
    """Σ_j v(x - j)^power for x on [0, 1] (2^K + 1 points, both ends equal)."""
    scale = samples.scale
    residues = np.mod(np.arange(samples.first_index, samples.last_index + 1), scale)
    period = np.bincount(residues, weights=np.asarray(samples.values) ** power, minlength=scale)
    return np.append(period, period[0])


def limit_filter_at_integers(
    spec: SchemeSpec, f0: SignalLevel, *, boundary: Boundary = "zero"
) -> SignalLevel:
    """(S^∞ f^0)(k) = Σ_j f^0_{k-j} φ(j): the limit at the integers as a discrete filter."""
    if spec.family != "primal_even":
        raise ValueError("the integer filter is defined for primal_even schemes")
    weights = integer_values_eigen(spec)
    if boundary == "valid":
        values = np.convolve(f0.values, weights.values, mode="valid")
        first = f0.first_index + weights.last_index
    else:
        values = np.convolve(f0.values, weights.values)
        first = f0.first_index + weights.first_index
    return SignalLevel(0, first, values)


def blf_derivative(spec: SchemeSpec, K: int) -> LimitSamples:
    """φ' from refining Δδ with the forward-difference scheme 2z·a(z)/(1+z).

    Sample i equals 2^K (φ_K(i+1) − φ_K(i)) for φ_K = S^K δ.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    a = symbol(mask(spec))
    if a.multiplicity_at_minus_one() < 2:
        raise DivisionRemainderError(f"{spec.label()}: symbol is not divisible by (1+z)^2")
    q = a.divide_by_one_plus_z()
    exact = tuple(2 * c for c in q.exact) if q.exact is not None else None
    difference = Symbol(q.first_index + 1, 2.0 * q.coefficients, exact)
    difference_mask = Mask(difference.first_index, difference.coefficients, difference.exact)
    refined = refine_many(difference_mask, SignalLevel(0, -1, np.array([1.0, -1.0])), K)
    return LimitSamples(K, refined.first_index, refined.values)
