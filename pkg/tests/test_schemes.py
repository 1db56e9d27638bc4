"""Masks of the four scheme families and their Laurent symbols."""
from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

from app.schemas import SchemeSpec
from core.errors import DivisionRemainderError
from core.schemes import (
    Symbol,
    check_symmetry,
    closed_form_mask,
    derived_mask,
    mask,
    refinement_rules,
    symbol,
)
from core.subdivide import SignalLevel, grid_offset, refine

FAMILIES = ("primal_even", "dual_even", "primal_odd", "dual_odd")

# degree-1 masks with their support start; the primal (2n+1)-point masks for
# n = 2, 3 carry the full [-2n, 2n] support
DEGREE_ONE_MASKS = [
    ("primal_even", 1, -1, [1, 2, 1], 2),
    ("primal_even", 2, -3, [3, 4, 3, 4, 3, 4, 3], 12),
    ("primal_even", 3, -5, [5, 6, 5, 6, 5, 6, 5, 6, 5, 6, 5], 30),
    ("dual_even", 1, -2, [1, 3, 3, 1], 4),
    ("dual_even", 2, -4, [7, 13, 9, 11, 11, 9, 13, 7], 40),
    ("dual_even", 3, -6, [55, 85, 61, 79, 67, 73, 73, 67, 79, 61, 85, 55], 420),
    ("primal_odd", 1, -2, [2, 3, 2, 3, 2], 6),
    ("primal_odd", 2, -4, [4, 5, 4, 5, 4, 5, 4, 5, 4], 20),
    ("primal_odd", 3, -6, [6, 7, 6, 7, 6, 7, 6, 7, 6, 7, 6, 7, 6], 42),
    ("dual_odd", 1, -3, [5, 11, 8, 8, 11, 5], 24),
    ("dual_odd", 2, -5, [6, 10, 7, 9, 8, 8, 9, 7, 10, 6], 40),
    ("dual_odd", 3, -7, [13, 19, 14, 18, 15, 17, 16, 16, 17, 15, 18, 14, 19, 13], 112),
]


def spec(family: str, n: int, degree: int = 1) -> SchemeSpec:
    return SchemeSpec(family=family, n=n, degree=degree)


def valid_specs(max_n: int = 4):
    for family in FAMILIES:
        for n in range(1, max_n + 1):
            s = spec(family, n)
            for d in range(1, s.max_degree + 1):
                yield spec(family, n, d)


class TestSchemeSpec:
    def test_hyphenated_family(self):
        assert spec("primal-even", 2).family == "primal_even"

    @pytest.mark.parametrize("family,n,degree", [("primal_even", 2, 4), ("dual_even", 1, 2), ("primal_odd", 1, 3), ("dual_odd", 2, 5)])
    def test_degree_bound(self, family, n, degree):
        with pytest.raises(ValidationError):
            spec(family, n, degree)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            spec("quadratic", 2)

    def test_zero_locality(self):
        with pytest.raises(ValueError):
            spec("primal_even", 0)

    def test_support(self):
        assert spec("primal_even", 3).support == (-5, 5)
        assert spec("dual_even", 3).support == (-6, 5)
        assert spec("primal_odd", 3).support == (-6, 6)
        assert spec("dual_odd", 3).support == (-7, 6)


class TestDegreeOneMasks:
    """Exact rational equality with the published degree-1 masks."""

    @pytest.mark.parametrize("family,n,first,numerators,denominator", DEGREE_ONE_MASKS)
    def test_closed_form(self, family, n, first, numerators, denominator):
        m = mask(spec(family, n))
        assert m.first_index == first
        assert m.exact == tuple(Fraction(v, denominator) for v in numerators)
        assert m.to_fraction_string() == "[" + ",".join(map(str, numerators)) + f"]/{denominator}"

    @pytest.mark.parametrize("family,n,first,numerators,denominator", DEGREE_ONE_MASKS)
    def test_filter_route_agrees(self, family, n, first, numerators, denominator):
        s = spec(family, n)
        assert derived_mask(s).exact == closed_form_mask(s).exact

    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize("n", range(1, 8))
    def test_strictly_positive(self, family, n):
        assert np.all(mask(spec(family, n)).coefficients > 0)

    def test_closed_form_needs_degree_one(self):
        with pytest.raises(ValueError):
            closed_form_mask(spec("primal_even", 3, 2))

    def test_record(self):
        record = mask(spec("dual_even", 1)).to_record()
        assert record.numerators == [1, 3, 3, 1]
        assert record.denominator == 4
        assert record.first_index == -2
        assert record.coefficients is None


class TestMaskInvariants:
    @pytest.mark.parametrize("s", list(valid_specs()), ids=lambda s: s.label())
    def test_parity_sums(self, s):
        even, odd = mask(s).parity_sums()
        assert even == pytest.approx(1.0, abs=1e-12)
        assert odd == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("s", list(valid_specs()), ids=lambda s: s.label())
    def test_support_and_symmetry(self, s):
        m = mask(s)
        assert (m.first_index, m.last_index) == s.support
        assert check_symmetry(m, s)

    def test_perturbed_mask_is_not_symmetric(self):
        s = spec("primal_even", 2)
        m = mask(s)
        coeffs = m.coefficients.copy()
        coeffs[0] += 1e-6
        assert check_symmetry(m, s)
        assert not check_symmetry(type(m)(m.first_index, coeffs), s)

    @pytest.mark.parametrize("n", range(1, 6))
    def test_even_and_odd_degree_collapse(self, n):
        for k in range(0, n):
            if 2 * k + 1 > 2 * n - 1 or 2 * k < 1:
                continue
            assert mask(spec("primal_even", n, 2 * k)).exact == mask(spec("primal_even", n, 2 * k + 1)).exact

    @pytest.mark.parametrize("n", range(2, 6))
    def test_interpolatory_even_rule(self, n):
        m = mask(spec("primal_even", n, 2 * n - 1))
        even = [m.exact[j - m.first_index] for j in range(m.first_index, m.last_index + 1) if j % 2 == 0]
        assert even == [Fraction(int(j == 0)) for j in range(m.first_index, m.last_index + 1) if j % 2 == 0]

    @pytest.mark.parametrize("n", [2, 3])
    def test_dubuc_deslauriers(self, n):
        m = mask(spec("primal_even", n, 2 * n - 1))
        nodes = np.arange(-n + 1, n + 1, dtype=float)
        expected = np.zeros(len(m.coefficients))
        expected[0 - m.first_index] = 1.0
        for k, t in enumerate(nodes):
            unit = np.eye(len(nodes))[k]
            weight = np.polyval(np.polyfit(nodes, unit, 2 * n - 1), 0.5)
            expected[int(1 - 2 * t) - m.first_index] = weight
        np.testing.assert_allclose(m.coefficients, expected, atol=1e-12)

    @pytest.mark.parametrize("n", range(1, 5))
    def test_top_degree_odd_rule_interpolates(self, n):
        """At degree 2n the midpoint rule of the odd family is the 2n-point interpolant."""
        top = mask(spec("primal_odd", n, 2 * n))
        interpolating = mask(spec("primal_even", n, 2 * n - 1))
        assert top.exact == (Fraction(0),) + interpolating.exact + (Fraction(0),)
        np.testing.assert_allclose(derived_mask(spec("primal_odd", n, 2 * n), exact=False).coefficients, top.coefficients, atol=1e-12)

    def test_top_degree_odd_rule_two_point(self):
        assert mask(spec("primal_odd", 1, 2)).to_fraction_string() == "[0,1,2,1,0]/2"

    def test_four_point_mask(self):
        m = mask(spec("primal_even", 2, 3))
        assert m.to_fraction_string() == "[-1,0,9,16,9,0,-1]/16"

    def test_dual_cubic_weights(self):
        m = mask(spec("dual_even", 2, 3))
        got = {j: m.exact[j - m.first_index] for j in (2, 0, -2, -4)}
        assert got == {2: Fraction(-7, 128), 0: Fraction(105, 128), -2: Fraction(35, 128), -4: Fraction(-5, 128)}

    @pytest.mark.parametrize(
        "s",
        [spec("primal_even", 3, 1), spec("primal_even", 3, 3), spec("dual_even", 2, 2), spec("primal_odd", 2, 3), spec("dual_odd", 2, 3)],
        ids=lambda s: s.label(),
    )
    def test_polynomial_reproduction(self, s):
        coeffs = np.arange(1, s.degree + 2, dtype=float) / 7.0
        j = np.arange(-15, 16)
        data = SignalLevel(0, -15, np.polyval(coeffs, j.astype(float)))
        out = refine(mask(s), data, boundary="valid")
        x = np.arange(out.first_index, out.last_index + 1) / 2.0 + grid_offset(s, 1)
        np.testing.assert_allclose(out.values, np.polyval(coeffs, x), atol=1e-9)

    def test_derived_float_route(self):
        s = spec("dual_odd", 3, 4)
        np.testing.assert_allclose(derived_mask(s, exact=False).coefficients, derived_mask(s).coefficients, atol=1e-12)


class TestRefinementRules:
    @pytest.mark.parametrize("family,counts", [("primal_even", (3, 4)), ("dual_even", (4, 4)), ("primal_odd", (5, 4)), ("dual_odd", (5, 5))])
    def test_stencil_sizes(self, family, counts):
        rules = refinement_rules(spec(family, 2))
        assert tuple(r.count for r in rules) == counts

    def test_dual_points(self):
        even, odd = refinement_rules(spec("dual_odd", 1))
        assert (even.point, odd.point) == (Fraction(1, 4), Fraction(-1, 4))


class TestSymbol:
    def test_linear_bspline_symbol(self):
        a = symbol(mask(spec("primal_even", 1)))
        assert a(Fraction(2)) == Fraction(9, 4)
        assert a(2.0) == pytest.approx((0.5 + 2.0 + 2.0) / 2.0)

    @pytest.mark.parametrize("s", list(valid_specs(3)), ids=lambda s: s.label())
    def test_values_at_plus_minus_one(self, s):
        a = symbol(mask(s))
        assert abs(a(-1.0)) <= 1e-12
        assert a(1.0) == pytest.approx(2.0, abs=1e-12)

    def test_complex_argument(self):
        a = symbol(mask(spec("primal_even", 2)))
        z = np.exp(0.3j)
        direct = sum(c * z**k for c, k in zip(a.coefficients, a.indices))
        assert a(z) == pytest.approx(direct)

    def test_arithmetic(self):
        one_plus_z = Symbol.from_fractions(0, [1, 1])
        square = one_plus_z * one_plus_z
        assert square.exact == (1, 2, 1)
        assert (square + one_plus_z).exact == (2, 3, 1)
        assert square.upsample(2).exact == (1, 0, 2, 0, 1)
        assert square.scale(Fraction(1, 2)).exact == (Fraction(1, 2), 1, Fraction(1, 2))
        assert square.divide_by_one_plus_z().exact == (1, 1)

    def test_float_division(self):
        s = Symbol(-1, np.array([0.25, 0.75, 0.75, 0.25]))
        np.testing.assert_allclose(s.divide_by_one_plus_z().coefficients, [0.25, 0.5, 0.25])
        with pytest.raises(DivisionRemainderError):
            Symbol(0, np.array([1.0, 2.0])).divide_by_one_plus_z()

    def test_exact_remainder(self):
        with pytest.raises(DivisionRemainderError):
            Symbol.from_fractions(0, [1, 0, 1]).divide_by_one_plus_z()

    def test_multiplicity(self):
        assert symbol(mask(spec("primal_even", 1))).multiplicity_at_minus_one() == 2
        assert symbol(mask(spec("dual_even", 1))).multiplicity_at_minus_one() == 3
