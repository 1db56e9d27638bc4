"""Refinement masks and Laurent symbols of the least squares scheme families.

A mask ``a`` acts through f^{k+1}_i = Σ_j a_{i-2j} f^k_j. Every family is
made of two rules, one per output parity, each fitting a polynomial to a
fixed stencil of coarse values and evaluating it at a fixed point. Degree-1
masks have closed forms; all other masks come from evaluation filters.
"""
from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.schemas import MaskRecord, SchemeSpec
from core.errors import DivisionRemainderError
from core.lsqfit import NodeSet, evaluation_filter, exact_evaluation_filter

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
REMAINDER_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Symbol:
    """Laurent polynomial Σ a_j z^j with a_{first_index + j} = coefficients[j].

    ``exact`` holds the same coefficients as fractions when they are known
    exactly; arithmetic keeps it whenever every operand has it.
    """

    first_index: int
    coefficients: np.ndarray
    exact: Optional[Tuple[Fraction, ...]] = None

    @classmethod
    def from_fractions(cls, first_index: int, values: Sequence[Fraction]) -> "Symbol":
        exact = tuple(Fraction(v) for v in values)
        return cls(first_index, np.array([float(v) for v in exact]), exact)

    @property
    def last_index(self) -> int:
        return self.first_index + len(self.coefficients) - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.first_index, self.last_index + 1)

    def __len__(self) -> int:
        return len(self.coefficients)

    def __call__(self, z: complex | float):
        if self.exact is not None and isinstance(z, (int, Fraction)):
            z = Fraction(z)
            return sum((c * z ** int(k) for c, k in zip(self.exact, self.indices)), Fraction(0))
        value = complex(np.sum(self.coefficients * np.power(complex(z), self.indices)))
        return value.real if np.isreal(z) else value

    def coefficient(self, j: int) -> float:
        if self.first_index <= j <= self.last_index:
            return float(self.coefficients[j - self.first_index])
        return 0.0

    def scale(self, factor) -> "Symbol":
        exact = None
        if self.exact is not None and isinstance(factor, (int, Fraction)):
            exact = tuple(c * factor for c in self.exact)
        return Symbol(self.first_index, self.coefficients * float(factor), exact)

    def __mul__(self, other: "Symbol") -> "Symbol":
        exact = None
        if self.exact is not None and other.exact is not None:
            out = [Fraction(0)] * (len(self.exact) + len(other.exact) - 1)
            for i, a in enumerate(self.exact):
                if a:
                    for j, b in enumerate(other.exact):
                        out[i + j] += a * b
            exact = tuple(out)
        coeffs = np.convolve(self.coefficients, other.coefficients)
        return Symbol(self.first_index + other.first_index, coeffs, exact)

    def __add__(self, other: "Symbol") -> "Symbol":
        lo = min(self.first_index, other.first_index)
        hi = max(self.last_index, other.last_index)
        coeffs = np.zeros(hi - lo + 1)
        coeffs[self.first_index - lo : self.last_index - lo + 1] += self.coefficients
        coeffs[other.first_index - lo : other.last_index - lo + 1] += other.coefficients
        exact = None
        if self.exact is not None and other.exact is not None:
            out = [Fraction(0)] * (hi - lo + 1)
            for k, c in enumerate(self.exact):
                out[self.first_index - lo + k] += c
            for k, c in enumerate(other.exact):
                out[other.first_index - lo + k] += c
            exact = tuple(out)
        return Symbol(lo, coeffs, exact)

    def upsample(self, factor: int) -> "Symbol":
        """The symbol a(z^factor)."""
        if factor < 1:
            raise ValueError("upsampling factor must be positive")
        coeffs = np.zeros((len(self) - 1) * factor + 1)
        coeffs[::factor] = self.coefficients
        exact = None
        if self.exact is not None:
            out = [Fraction(0)] * len(coeffs)
            out[::factor] = self.exact
            exact = tuple(out)
        return Symbol(self.first_index * factor, coeffs, exact)

    def divide_by_one_plus_z(self) -> "Symbol":
        """Synthetic division by (1+z); raises if the remainder does not vanish."""
        if len(self) < 2:
            raise DivisionRemainderError("a monomial is not divisible by (1+z)")
        if self.exact is not None:
            quotient = [self.exact[0]]
            for c in self.exact[1:-1]:
                quotient.append(c - quotient[-1])
            remainder = self.exact[-1] - quotient[-1]
            if remainder != 0:
                raise DivisionRemainderError(f"(1+z) leaves remainder {remainder}")
            return Symbol.from_fractions(self.first_index, quotient)

        coeffs = self.coefficients
        quotient = np.empty(len(coeffs) - 1)
        quotient[0] = coeffs[0]
        for k in range(1, len(coeffs) - 1):
            quotient[k] = coeffs[k] - quotient[k - 1]
        remainder = coeffs[-1] - quotient[-1]
        scale = max(float(np.max(np.abs(coeffs))), 1.0)
        if abs(remainder) > REMAINDER_TOL * scale:
            raise DivisionRemainderError(f"(1+z) leaves remainder {remainder:.3e}")
        return Symbol(self.first_index, quotient)

    def multiplicity_at_minus_one(self) -> int:
        """Largest m such that (1+z)^m divides the symbol."""
        if not np.any(self.coefficients):
            raise ValueError("the zero symbol is divisible by every power of (1+z)")
        m, current = 0, self
        while len(current) > 1:
            try:
                current = current.divide_by_one_plus_z()
            except DivisionRemainderError:
                break
            m += 1
        return m


@dataclass(frozen=True, eq=False)
class Mask:
    """Finite refinement mask; index ``first_index + j`` holds ``coefficients[j]``."""

    first_index: int
    coefficients: np.ndarray
    exact: Optional[Tuple[Fraction, ...]] = None
    spec: Optional[SchemeSpec] = None

    @property
    def last_index(self) -> int:
        return self.first_index + len(self.coefficients) - 1

    def coefficient(self, j: int) -> float:
        if self.first_index <= j <= self.last_index:
            return float(self.coefficients[j - self.first_index])
        return 0.0

    def parity_sums(self) -> Tuple[float, float]:
        idx = np.arange(self.first_index, self.last_index + 1)
        even = float(np.sum(self.coefficients[idx % 2 == 0]))
        odd = float(np.sum(self.coefficients[idx % 2 != 0]))
        return even, odd

    def part(self, parity: int) -> np.ndarray:
        """Coefficients a_j with j ≡ parity (mod 2), in increasing j."""
        idx = np.arange(self.first_index, self.last_index + 1)
        return self.coefficients[idx % 2 == parity % 2]

    def denominator(self) -> Optional[int]:
        if self.exact is None:
            return None
        return functools.reduce(lcm, (c.denominator for c in self.exact), 1)

    def numerators(self) -> Optional[List[int]]:
        den = self.denominator()
        if den is None:
            return None
        return [int(c * den) for c in self.exact]

    def to_fraction_string(self) -> str:
        """``[3,4,3,4,3,4,3]/12`` for exact masks, a float list otherwise."""
        nums = self.numerators()
        if nums is None:
            return "[" + ",".join(repr(float(c)) for c in self.coefficients) + "]"
        return "[" + ",".join(str(v) for v in nums) + f"]/{self.denominator()}"

    def to_record(self) -> MaskRecord:
        return MaskRecord(
            family=self.spec.family if self.spec else None,
            n=self.spec.n if self.spec else None,
            degree=self.spec.degree if self.spec else None,
            first_index=self.first_index,
            numerators=self.numerators(),
            denominator=self.denominator(),
            coefficients=None if self.exact is not None else [float(c) for c in self.coefficients],
        )


@dataclass(frozen=True)
class RefinementRule:
    """Stencil of coarse offsets t = first..first+count-1 evaluated at ``point``.

    The weight of f_{i+t} lands on mask index ``phase - 2t``.
    """

    first: int
    count: int
    point: Fraction
    phase: int

    @property
    def offsets(self) -> range:
        return range(self.first, self.first + self.count)


def refinement_rules(spec: SchemeSpec) -> Tuple[RefinementRule, RefinementRule]:
    """The even-output and odd-output rules of a family, in coarse-offset coordinates."""
    n = spec.n
    half, quarter = Fraction(1, 2), Fraction(1, 4)
    two_n_stencil = (-n + 1, 2 * n)
    if spec.family == "primal_even":
        return (
            RefinementRule(-n + 1, 2 * n - 1, Fraction(0), 0),
            RefinementRule(*two_n_stencil, half, 1),
        )
    if spec.family == "primal_odd":
        return (
            RefinementRule(-n, 2 * n + 1, Fraction(0), 0),
            RefinementRule(*two_n_stencil, half, 1),
        )
    if spec.family == "dual_even":
        return (
            RefinementRule(*two_n_stencil, quarter, 0),
            RefinementRule(*two_n_stencil, 3 * quarter, 1),
        )
    return (
        RefinementRule(-n, 2 * n + 1, quarter, 0),
        RefinementRule(-n, 2 * n + 1, -quarter, -1),
    )


def _assemble(spec: SchemeSpec, entries: dict, exact: bool) -> Mask:
    lo, hi = spec.support
    if exact:
        values = [Fraction(entries.get(j, 0)) for j in range(lo, hi + 1)]
        return Mask(lo, np.array([float(v) for v in values]), tuple(values), spec)
    values = np.array([float(entries.get(j, 0.0)) for j in range(lo, hi + 1)])
    return Mask(lo, values, None, spec)


def closed_form_mask(spec: SchemeSpec) -> Mask:
    """Degree-1 masks from their explicit refinement rules."""
    if spec.degree != 1:
        raise ValueError("closed forms exist for degree 1 only")
    n = spec.n
    entries: dict = {}
    if spec.family in ("primal_even", "primal_odd"):
        even_lo = -n + 1 if spec.family == "primal_even" else -n
        even_count = 2 * n - 1 if spec.family == "primal_even" else 2 * n + 1
        for t in range(even_lo, even_lo + even_count):
            entries[-2 * t] = Fraction(1, even_count)
        for t in range(-n + 1, n + 1):
            entries[1 - 2 * t] = Fraction(1, 2 * n)
    elif spec.family == "dual_even":
        for j in range(-n + 1, n + 1):
            tilt = Fraction(6 * j - 3, 8 * n * n - 2)
            entries[-2 * j] = (1 - tilt) / (2 * n)
            entries[1 - 2 * j] = (1 + tilt) / (2 * n)
    else:
        for j in range(-n, n + 1):
            tilt = Fraction(3 * j, 4 * n * (n + 1))
            entries[-1 - 2 * j] = (1 - tilt) / (2 * n + 1)
            entries[-2 * j] = (1 + tilt) / (2 * n + 1)
    return _assemble(spec, entries, exact=True)


def derived_mask(spec: SchemeSpec, *, exact: bool = True) -> Mask:
    """Mask built from evaluation filters of the two refinement rules (any degree)."""
    entries: dict = {}
    for rule in refinement_rules(spec):
        # underdetermined rules interpolate: degree count-1 matches the
        # min-norm fit at nodes and is independent of the node frame
        degree = min(spec.degree, rule.count - 1)
        if exact:
            weights = exact_evaluation_filter(
                [Fraction(t) for t in rule.offsets], degree, rule.point
            )
        else:
            nodes = NodeSet(start=float(rule.first), step=1.0, count=rule.count)
            weights = evaluation_filter(nodes, degree, float(rule.point)).weights
        for t, w in zip(rule.offsets, weights):
            entries[rule.phase - 2 * t] = w
    return _assemble(spec, entries, exact)


@functools.lru_cache(maxsize=256)
def mask(spec: SchemeSpec) -> Mask:
    """Refinement mask of ``spec``: closed form at degree 1, filter-derived otherwise."""
    if spec.degree == 1:
        result = closed_form_mask(spec)
    else:
        try:
            result = derived_mask(spec, exact=True)
        except (ArithmeticError, ValueError) as exc:
            logger.warning("Exact mask derivation failed for %s (%s); using floating point", spec.label(), exc)
            result = derived_mask(spec, exact=False)
    logger.debug("Mask %s on [%d, %d]", spec.label(), result.first_index, result.last_index)
    return result


def symbol(m: Mask) -> Symbol:
    """The Laurent polynomial carrying the mask."""
    return Symbol(m.first_index, np.asarray(m.coefficients, dtype=float), m.exact)


def check_symmetry(m: Mask, spec: SchemeSpec) -> bool:
    """a(z) = a(1/z) for primal families, z·a(z) = a(1/z) for dual families."""
    shift = 1 if spec.is_dual else 0
    lo = min(m.first_index + shift, -m.last_index)
    hi = max(m.last_index + shift, -m.first_index)
    for j in range(lo, hi + 1):
        if abs(m.coefficient(j - shift) - m.coefficient(-j)) > SYMMETRY_TOL:
            return False
    return True
