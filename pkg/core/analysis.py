"""Convergence and smoothness analysis on Laurent symbols.

Hölder lower bounds follow b(z) = 2^m a(z) / (1+z)^m and
ν = m − log2(‖S_b^L‖_∞) / L, where ‖S_b^L‖_∞ is read off the coefficients of
b(z) b(z²) ... b(z^{2^{L-1}}).
"""
from __future__ import annotations

import logging
import math
from typing import Iterable, List

import numpy as np

from app.schemas import RegularityReport, SchemeSpec
from core.schemes import Mask, Symbol, mask, symbol
from core.subdivide import SignalLevel

logger = logging.getLogger(__name__)

CONDITION_TOL = 1e-12
MAX_ITERATIONS = 24


def necessary_conditions(s: Symbol) -> bool:
    """a(1) = 2 and a(-1) = 0."""
    at_one = float(np.real(s(1.0)))
    at_minus_one = float(np.real(s(-1.0)))
    return abs(at_one - 2.0) <= CONDITION_TOL and abs(at_minus_one) <= CONDITION_TOL


def divide_out(s: Symbol, power: int) -> Symbol:
    """s(z) / (1+z)^power; raises DivisionRemainderError on a nonzero remainder."""
    if power < 0:
        raise ValueError("power must be non-negative")
    for _ in range(power):
        s = s.divide_by_one_plus_z()
    return s


def multiplicity_at_minus_one(s: Symbol) -> int:
    return s.multiplicity_at_minus_one()


def _residue_norm(coefficients: np.ndarray, first_index: int, period: int) -> float:
    residues = np.mod(np.arange(first_index, first_index + coefficients.size), period)
    sums = np.bincount(residues, weights=np.abs(coefficients), minlength=period)
    return float(sums.max())


def scheme_norm(s: Symbol) -> float:
    """‖S_s‖_∞: the larger absolute coefficient sum of the two parity classes."""
    return _residue_norm(np.asarray(s.coefficients, dtype=float), s.first_index, 2)


def iterated_norm(s: Symbol, L: int) -> float:
    """‖S_s^L‖_∞ from the coefficients of s(z) s(z²) ... s(z^{2^{L-1}})."""
    if L < 1:
        raise ValueError("L must be at least 1")
    if L > MAX_ITERATIONS:
        raise ValueError(f"L={L} exceeds the supported maximum of {MAX_ITERATIONS}")
    taps = np.asarray(s.coefficients, dtype=float)
    product, first = taps.copy(), s.first_index
    for level in range(1, L):
        stride = 2**level
        expanded = np.zeros(product.size + (taps.size - 1) * stride)
        for k, c in enumerate(taps):
            if c:
                expanded[k * stride : k * stride + product.size] += c * product
        product, first = expanded, first + s.first_index * stride
    return _residue_norm(product, first, 2**L)


def holder_lower_bound(m: Mask, L: int) -> RegularityReport:
    """Lower bound on the Hölder regularity of the limits of ``m``."""
    a = symbol(m)
    if not necessary_conditions(a):
        raise ValueError("mask violates a(1) = 2, a(-1) = 0")
    power = multiplicity_at_minus_one(a)
    b = divide_out(a, power).scale(2**power)
    norm = iterated_norm(b, L)
    bound = power - math.log2(norm) / L
    spec = m.spec
    logger.info(
        "Regularity %s: m=%d L=%d norm=%.6g bound=%.4f",
        spec.label() if spec else "mask", power, L, norm, bound,
    )
    return RegularityReport(
        family=spec.family if spec else None,
        n=spec.n if spec else None,
        degree=spec.degree if spec else None,
        m=power,
        L=L,
        iterated_norm=norm,
        lower_bound=bound,
    )


def regularity_table(family: str, ns: Iterable[int], degree: int, L: int) -> List[RegularityReport]:
    """One report per n, in the order given."""
    return [holder_lower_bound(mask(SchemeSpec(family=family, n=n, degree=degree)), L) for n in ns]


def forward_difference(signal: SignalLevel) -> SignalLevel:
    """(Δf)_i = f_{i+1} − f_i over the window; Δ of the padded δ is 1 at -1 and -1 at 0."""
    values = np.asarray(signal.values, dtype=float)
    if values.size < 2:
        raise ValueError("forward differences need at least two values")
    return SignalLevel(signal.level, signal.first_index, np.diff(values))
