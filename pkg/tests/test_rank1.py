import math

import numpy as np
from scipy.special import sici

from u22lab.rank1 import (
    AffElement,
    LineFunction,
    almost_invariant_check,
    apply_U,
    gaussian_bump,
    left_indicator,
)

GRID = np.linspace(-8.0, 3.0, 100)


class TestAffineGroup:
    def test_identity(self):
        g = AffElement.identity()
        assert g.compose(AffElement(0.3, 1.2)) == AffElement(0.3, 1.2)

    def test_composition_law(self):
        g1, g2 = AffElement(0.5, 1.0), AffElement(-0.2, 2.0)
        out = g1.compose(g2)
        assert out.beta == 0.3
        assert abs(out.a - (1.0 + math.exp(0.5) * 2.0)) < 1e-15

    def test_associative(self, rng):
        for _ in range(50):
            a, b, c = (AffElement(*rng.standard_normal(2)) for _ in range(3))
            lhs = a.compose(b).compose(c)
            rhs = a.compose(b.compose(c))
            assert abs(lhs.beta - rhs.beta) < 1e-12
            assert abs(lhs.a - rhs.a) < 1e-12 * max(1.0, abs(lhs.a))

    def test_inverse(self, rng):
        g = AffElement(*rng.standard_normal(2))
        e = g.compose(g.inverse())
        assert abs(e.beta) < 1e-15 and abs(e.a) < 1e-14


class TestLineAction:
    def test_identity_action(self):
        f = gaussian_bump()
        out = apply_U(AffElement.identity(), f)
        assert np.array_equal(out(GRID), f(GRID))

    def test_pure_shift(self):
        f = gaussian_bump()
        out = apply_U(AffElement(0.7, 0.0), f)
        np.testing.assert_allclose(out(GRID), f(GRID + 0.7))

    def test_modulus_is_shifted_modulus(self, rng):
        g = AffElement(*rng.standard_normal(2))
        f = gaussian_bump()
        out = apply_U(g, f)
        np.testing.assert_allclose(np.abs(out(GRID)), np.abs(f(GRID + g.beta)), atol=1e-14)

    def test_homomorphism_pointwise(self, rng):
        f = LineFunction(lambda z: np.exp(-(z**2)) * (1.0 + 0.5j * z))
        worst = 0.0
        for _ in range(50):
            g1, g2 = AffElement(*rng.standard_normal(2)), AffElement(*rng.standard_normal(2))
            lhs = apply_U(g1, apply_U(g2, f))(GRID)
            rhs = apply_U(g1.compose(g2), f)(GRID)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        assert worst < 1e-12


class TestAlmostInvariantCheck:
    def test_indicator_witness_passes_all_conditions(self):
        report = almost_invariant_check(left_indicator(0.0), 0.0, a=0.75, b=2.0)
        assert report.all_hold
        assert report.support.holds
        assert report.not_square_integrable.holds
        assert report.character_difference.holds
        assert report.shift_difference.holds

    def test_shift_difference_value_is_shift_size(self):
        # for the indicator the difference is the indicator of a length-|a| interval
        for a in (0.3, 1.5, -0.8):
            report = almost_invariant_check(left_indicator(0.0), 0.0, a=a, b=1.0)
            assert abs(report.shift_difference.value - abs(a)) < 1e-6 * abs(a)

    def test_character_difference_against_cosine_integral(self):
        # integral of 4 sin^2(b u / 2) / u over (0, 1] = 2 (gamma + log b - Ci(b))
        b = 2.0
        report = almost_invariant_check(left_indicator(0.0), 0.0, a=0.5, b=b)
        _, ci_b = sici(b)
        expected = 2.0 * (np.euler_gamma + math.log(b) - ci_b)
        assert abs(report.character_difference.value - expected) < 1e-6 * expected

    def test_zero_character_parameter(self):
        report = almost_invariant_check(left_indicator(0.0), 0.0, a=0.5, b=0.0)
        assert report.character_difference.holds
        assert report.character_difference.value == 0.0

    def test_gaussian_control_fails_norm_condition(self):
        report = almost_invariant_check(gaussian_bump(), 0.0, a=0.5, b=2.0)
        assert report.not_square_integrable.holds is False
        assert not report.all_hold

    def test_gaussian_control_fails_support(self):
        report = almost_invariant_check(gaussian_bump(), 0.0, a=0.5, b=2.0)
        assert report.support.holds is False

    def test_nonzero_cutoff(self):
        report = almost_invariant_check(left_indicator(1.5), 1.5, a=0.4, b=1.0)
        assert report.all_hold
