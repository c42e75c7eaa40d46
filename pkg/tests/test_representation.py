import math

import numpy as np
import pytest

from u22lab.groups import (
    PElement,
    QElement,
    SkewHermitian2,
    TriangularS,
    p_to_q,
    q_multiply,
    q_to_p,
    random_p,
    random_q,
)
from u22lab.measures import PolarShellSampler, haar_measure, integrate_mc, nu_derivative_band, nu_measure, truncated_nu
from u22lab.orbits import OrbitLabel
from u22lab.points import SPoints, reference_points
from u22lab.representation import (
    CocycleVector,
    GroupFunction,
    apply_T,
    character_factor,
    coboundary,
    constant,
    default_test_set,
    difference,
    gram_matrix,
    inner_product,
    l2_norm,
    linear_combination,
    specialness_report,
    vacuum,
)

LABEL = OrbitLabel.PLUS_PLUS
LADDER = tuple(np.logspace(-1, -4, 7))


@pytest.fixture(scope="module")
def pts():
    return reference_points(100)


class TestVacuum:
    def test_value_at_identity(self):
        value = vacuum()(SPoints.single(TriangularS.identity()))[0]
        assert abs(value - math.exp(-math.sqrt(2.0) / 2.0)) < 1e-15
        assert abs(value - 0.4930686913952398) < 1e-15

    def test_tends_to_one_at_small_radius(self):
        radii = np.logspace(-1, -8, 8)
        pts = SPoints(radii / math.sqrt(2), radii / math.sqrt(2), np.zeros(8, complex))
        values = vacuum()(pts).real
        assert np.all(np.diff(values) > 0)
        assert values[-1] > 1 - 1e-7

    def test_monotone_decreasing_along_rays(self, pts):
        values = vacuum()(pts).real
        order = np.argsort(pts.norms())
        assert np.all(np.diff(values[order]) < 0)
        assert np.all((values > 0) & (values <= 1))


class TestApplyT:
    def test_identity_leaves_function_alone(self, pts):
        out = apply_T(QElement.identity(), LABEL, vacuum())
        assert np.array_equal(out(pts), vacuum()(pts))

    def test_character_part_preserves_modulus(self, pts, rng):
        q = QElement(TriangularS.identity(), SkewHermitian2(0.7, -0.3, 0.2 + 0.4j))
        out = apply_T(q, LABEL, vacuum())
        np.testing.assert_allclose(np.abs(out(pts)), np.abs(vacuum()(pts)), atol=1e-14)

    @pytest.mark.parametrize("label", list(OrbitLabel), ids=str)
    def test_homomorphism_pointwise(self, label, pts, rng):
        worst = 0.0
        for _ in range(50):
            q1, q2 = random_q(rng), random_q(rng)
            composed = apply_T(q1, label, apply_T(q2, label, vacuum()))
            direct = apply_T(q_multiply(q1, q2), label, vacuum())
            worst = max(worst, float(np.max(np.abs(composed(pts) - direct(pts)))))
        assert worst < 1e-11

    def test_translation_norm_within_derivative_band(self, rng):
        # the operator norm bound from the measure's derivative band
        s0 = TriangularS(1.7, 0.6, 0.4 - 0.2j)
        q = QElement(s0, SkewHermitian2.zero())
        sampler = PolarShellSampler(1e-3, 30.0)
        base = l2_norm(vacuum(), nu_measure(), sampler, 200_000, rng)
        moved = l2_norm(apply_T(q, LABEL, vacuum()), nu_measure(), sampler, 200_000, rng)
        _, hi = nu_derivative_band(s0)
        assert moved.real <= hi * base.real * 1.05

    def test_haar_measure_makes_translations_isometric(self, rng):
        from u22lab.measures import LogNormalSampler

        bump = GroupFunction(
            lambda pts: np.exp(-np.log(pts.r1) ** 2 - np.log(pts.r2) ** 2 - np.abs(pts.r) ** 2)
        )
        q = QElement(TriangularS(1.2, 0.9, 0.1 + 0.2j), SkewHermitian2.zero())
        sampler = LogNormalSampler(tau=1.2, sigma_r=1.2)
        base = integrate_mc(bump, haar_measure(), sampler, 300_000, rng, mode="square")
        moved = integrate_mc(apply_T(q, LABEL, bump), haar_measure(), sampler, 300_000, rng, mode="square")
        sigma = math.hypot(base.std_error, moved.std_error)
        assert abs(base.real - moved.real) < 3 * sigma


class TestCombinators:
    def test_linear_combination(self, pts):
        f, g = vacuum(), constant(2.0)
        combo = linear_combination([1.0, -0.5j], [f, g])
        np.testing.assert_allclose(combo(pts), f(pts) - 1j * np.ones(pts.size))

    def test_difference(self, pts):
        f = vacuum()
        assert np.max(np.abs(difference(f, f)(pts))) == 0.0

    def test_character_factor_modulus(self, pts, rng):
        from u22lab.groups import random_n

        values = character_factor(LABEL, random_n(rng))(pts)
        np.testing.assert_allclose(np.abs(values), 1.0, atol=1e-13)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            linear_combination([1.0], [vacuum(), vacuum()])


class TestCoboundary:
    def test_identity_gives_zero(self, pts):
        b = coboundary(QElement.identity(), LABEL)
        assert b.is_zero
        assert np.max(np.abs(b.evaluate(pts))) == 0.0

    def test_cocycle_identity_pointwise(self, pts, rng):
        # b(q1 q2) = T(q1) b(q2) + b(q1), evaluated as functions
        worst = 0.0
        for _ in range(50):
            q1, q2 = random_q(rng), random_q(rng)
            lhs = coboundary(q_multiply(q1, q2), LABEL).evaluate(pts)
            rhs = apply_T(q1, LABEL, coboundary(q2, LABEL).as_group_function())(pts)
            rhs = rhs + coboundary(q1, LABEL).evaluate(pts)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        assert worst < 1e-11

    def test_character_coboundary_vanishes_quadratically(self, rng):
        from u22lab.groups import random_n

        n = random_n(rng)
        q = QElement(TriangularS.identity(), n)
        b = coboundary(q, LABEL)
        radii = np.logspace(-1, -4, 7)
        pts = SPoints(radii * 0.6, radii * 0.6, radii * (0.3 + 0.3j))
        ratios = np.abs(b.evaluate(pts)) / radii**2
        assert np.all(ratios < 10.0 * max(1.0, n.norm()))

    def test_matches_operator_definition(self, pts, rng):
        q = random_q(rng)
        direct = coboundary(q, LABEL).evaluate(pts)
        via_ops = apply_T(q, LABEL, vacuum())(pts) - vacuum()(pts)
        np.testing.assert_allclose(direct, via_ops, atol=1e-14)

    def test_type_check(self):
        with pytest.raises(TypeError):
            coboundary(3.0, LABEL)


class TestCocycleVectorAlgebra:
    def test_canonical_merges_duplicates(self, rng):
        p = random_p(rng)
        v = CocycleVector(LABEL, ((1.0, p), (2.0, p)))
        merged = v.canonical()
        assert len(merged.terms) == 1
        assert merged.terms[0][0] == 3.0

    def test_canonical_drops_identity(self):
        v = CocycleVector(LABEL, ((1.0, PElement.identity()),))
        assert v.canonical().is_zero

    def test_add_and_subtract(self, pts, rng):
        v1 = coboundary(random_q(rng), LABEL)
        v2 = coboundary(random_q(rng), LABEL)
        total = v1 + v2
        np.testing.assert_allclose(
            total.evaluate(pts), v1.evaluate(pts) + v2.evaluate(pts), atol=1e-14
        )
        assert (v1 - v1).is_zero

    def test_label_mixing_rejected(self, rng):
        v1 = coboundary(random_q(rng), OrbitLabel.PLUS_PLUS)
        v2 = coboundary(random_q(rng), OrbitLabel.MINUS_MINUS)
        with pytest.raises(ValueError):
            v1 + v2


class TestNorms:
    def test_zero_function(self, rng):
        sampler = PolarShellSampler(1e-3, 10.0)
        est = l2_norm(constant(0.0), nu_measure(), sampler, 10_000, rng)
        assert est.real == 0.0

    def test_translation_coboundary_is_square_integrable(self, rng):
        from u22lab.measures import divergence_probe

        q = QElement(TriangularS(2.0, 1.0, 0.0), SkewHermitian2.zero())
        fn = coboundary(q, LABEL).as_group_function()
        verdict = divergence_probe(fn, nu_measure(), LADDER, 30.0, 100_000, rng)
        assert verdict.classification == "convergent"

    def test_conjugate_symmetry(self, rng):
        sampler = PolarShellSampler(1e-2, 10.0)
        f = coboundary(random_q(rng), LABEL).as_group_function()
        g = coboundary(random_q(rng), LABEL).as_group_function()
        ab = inner_product(f, g, nu_measure(), sampler, 50_000, np.random.default_rng(5))
        ba = inner_product(g, f, nu_measure(), sampler, 50_000, np.random.default_rng(5))
        assert abs(ab.value - np.conj(ba.value)) < 1e-12 * max(1.0, abs(ab.value))

    def test_cauchy_schwarz(self, rng):
        sampler = PolarShellSampler(1e-2, 10.0)
        for _ in range(5):
            f = coboundary(random_q(rng), LABEL).as_group_function()
            g = coboundary(random_q(rng), LABEL).as_group_function()
            seed = np.random.default_rng(7)
            fg = inner_product(f, g, nu_measure(), sampler, 50_000, seed)
            ff = l2_norm(f, nu_measure(), sampler, 50_000, np.random.default_rng(7))
            gg = l2_norm(g, nu_measure(), sampler, 50_000, np.random.default_rng(7))
            bound = math.sqrt(ff.real * gg.real)
            slack = 3 * (abs(fg.std_error) + ff.std_error + gg.std_error)
            assert abs(fg.value) <= bound + slack

    def test_vacuum_satisfies_membership_conditions(self, rng):
        # both defining integrals converge for every default test element
        from u22lab.measures import divergence_probe

        for q in default_test_set():
            fn = coboundary(q, LABEL).as_group_function()
            verdict = divergence_probe(fn, nu_measure(), LADDER, 30.0, 50_000, rng)
            assert verdict.classification == "convergent"


class TestGram:
    def test_single_element(self, rng):
        sampler = PolarShellSampler(1e-3, 30.0)
        gram, stderr = gram_matrix([random_p(rng)], LABEL, nu_measure(), sampler, 20_000, rng)
        assert gram.shape == (1, 1)
        assert gram[0, 0].real > 0
        assert abs(gram[0, 0].imag) < 1e-15

    def test_duplicate_rejected(self, rng):
        p = random_p(rng)
        sampler = PolarShellSampler(1e-3, 30.0)
        with pytest.raises(ValueError):
            gram_matrix([p, p], LABEL, nu_measure(), sampler, 20_000, rng)

    def test_identity_rejected(self, rng):
        sampler = PolarShellSampler(1e-3, 30.0)
        with pytest.raises(ValueError):
            gram_matrix([PElement.identity()], LABEL, nu_measure(), sampler, 20_000, rng)

    def test_near_duplicate_is_singular_within_error(self, rng):
        p = random_p(rng)
        q0 = p_to_q(p)
        p_shifted = q_to_p(
            QElement(TriangularS(q0.s.r1 * (1 + 1e-9), q0.s.r2, q0.s.r), q0.n)
        )
        sampler = PolarShellSampler(1e-3, 30.0)
        gram, stderr = gram_matrix([p, p_shifted], LABEL, nu_measure(), sampler, 50_000, rng)
        eigmin = float(np.linalg.eigvalsh(gram)[0])
        assert eigmin < 3 * float(np.linalg.norm(stderr)) + 1e-10

    def test_six_random_elements_independent(self, rng):
        p_list = [random_p(rng) for _ in range(6)]
        sampler = PolarShellSampler(1e-4, 30.0)
        gram, stderr = gram_matrix(p_list, LABEL, nu_measure(), sampler, 100_000, rng)
        assert np.linalg.norm(gram - gram.conj().T) < 1e-12
        eigmin = float(np.linalg.eigvalsh(gram)[0])
        assert eigmin > 0  # shared samples keep the estimate PSD
        assert eigmin > 3 * float(np.linalg.norm(stderr)) * 0.1  # coarse at this n


class TestSpecialness:
    def test_witness_confirmed(self, rng):
        report = specialness_report(
            default_test_set(), LABEL, nu_measure(), LADDER, 30.0, 100_000, rng
        )
        assert report.confirmed
        assert report.verdict == "special witness confirmed"
        assert report.vacuum_verdict.classification == "log-divergent"

    def test_truncated_control_is_not_special(self, rng):
        report = specialness_report(
            default_test_set(), LABEL, truncated_nu(1.0), LADDER, 30.0, 50_000, rng
        )
        assert not report.confirmed
        assert report.verdict == "not special (vacuum square-integrable)"

    def test_empty_set_rejected(self, rng):
        with pytest.raises(ValueError):
            specialness_report([], LABEL, nu_measure(), LADDER, 30.0, 10_000, rng)

    def test_missing_character_part_rejected(self, rng):
        translations = [q for q in default_test_set() if q.is_translation()]
        with pytest.raises(ValueError):
            specialness_report(translations, LABEL, nu_measure(), LADDER, 30.0, 10_000, rng)

    def test_missing_translation_part_rejected(self, rng):
        characters = [q for q in default_test_set() if q.is_character_direction()]
        with pytest.raises(ValueError):
            specialness_report(characters, LABEL, nu_measure(), LADDER, 30.0, 10_000, rng)
