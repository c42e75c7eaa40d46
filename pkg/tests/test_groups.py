import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from u22lab.groups import (
    CHAIN_TOL,
    InvariantViolation,
    KElement,
    NotFactorizable,
    NotInGroup,
    PElement,
    QElement,
    SkewHermitian2,
    TriangularS,
    U22Element,
    element_from_json,
    element_to_json,
    embed_n,
    embed_p,
    embed_s,
    is_in_u22,
    is_n_shaped,
    is_s_shaped,
    iwasawa_decompose,
    nested_q_commutator,
    p_from_matrix,
    p_to_q,
    q_inverse,
    q_multiply,
    q_to_p,
    random_k,
    random_n,
    random_p,
    random_q,
    random_s,
    random_u22,
    sigma_hat,
    structured_p_factor,
)
from u22lab.matrices import E4, SIGMA, adjoint, frob


class TestMembership:
    def test_identity(self):
        report = is_in_u22(np.eye(4))
        assert report.ok
        assert report.max_residual() == 0.0

    def test_sigma_is_member(self):
        assert is_in_u22(SIGMA).ok

    def test_diagonal_non_member(self):
        report = is_in_u22(np.diag([2.0, 1.0, 1.0, 1.0]))
        assert not report.ok
        assert report.block_unit > 0.01

    def test_u22element_rejects(self):
        with pytest.raises(NotInGroup):
            U22Element(np.diag([2.0, 1.0, 1.0, 1.0]))


class TestEmbeddings:
    def test_embed_zero_translation(self):
        assert frob(embed_n(SkewHermitian2.zero()).m - E4) == 0.0

    def test_embed_diagonal(self):
        g = embed_s(TriangularS(2.0, 1.0, 0.0))
        np.testing.assert_allclose(g.m, np.diag([0.5, 1.0, 2.0, 1.0]))

    def test_embed_p_block(self):
        x = np.array([[1j, 0.0], [0.0, 0.0]])
        g = embed_p(PElement(TriangularS.identity(), x))
        np.testing.assert_allclose(g.m[2:, :2], x)
        assert is_in_u22(g.m, 1e-12).ok

    def test_embeds_pass_membership(self, rng):
        for _ in range(50):
            assert is_in_u22(embed_s(random_s(rng)).m, 1e-12).ok
            assert is_in_u22(embed_n(random_n(rng)).m, 1e-12).ok
            assert is_in_u22(embed_p(random_p(rng)).m, 1e-12).ok

    def test_p_invariant_enforced(self):
        # sX* + Xs* != 0 for this pair
        with pytest.raises(InvariantViolation):
            PElement(TriangularS.identity(), np.array([[1.0, 0.0], [0.0, 0.0]]))


class TestCoordinateChange:
    def test_trivial(self):
        q = p_to_q(PElement.identity())
        assert q.s.distance(TriangularS.identity()) == 0.0
        assert q.n.norm() == 0.0

    def test_identity_s_gives_n_equals_x(self):
        x = np.array([[1j, 0.0], [0.0, 0.0]])
        q = p_to_q(PElement(TriangularS.identity(), x))
        np.testing.assert_allclose(q.n.matrix(), x)

    @given(st.integers(0, 2**32 - 1))
    def test_roundtrip(self, seed):
        p = random_p(np.random.default_rng(seed))
        back = q_to_p(p_to_q(p))
        assert p.distance(back) <= 1e-12 * max(1.0, p.s.norm() + frob(p.x))

    def test_image_is_skew(self, rng):
        for _ in range(100):
            q = p_to_q(random_p(rng))
            n = q.n.matrix()
            assert np.array_equal(n + adjoint(n), np.zeros((2, 2)))


class TestQMultiply:
    def test_translations_add(self, rng):
        n1, n2 = random_n(rng), random_n(rng)
        e = TriangularS.identity()
        out = q_multiply(QElement(e, n1), QElement(e, n2))
        assert out.n.distance(n1.add(n2)) == 0.0

    def test_conjugation_formula(self, rng):
        # (s, 0)(e, n) = (s, s n s*)
        s, n = random_s(rng), random_n(rng)
        out = q_multiply(
            QElement(s, SkewHermitian2.zero()), QElement(TriangularS.identity(), n)
        )
        expected = s.matrix() @ n.matrix() @ adjoint(s.matrix())
        np.testing.assert_allclose(out.n.matrix(), expected, atol=1e-13 * max(1, frob(expected)))

    def test_against_matrix_product(self, rng):
        for _ in range(200):
            q1, q2 = random_q(rng), random_q(rng)
            direct = q_multiply(q1, q2)
            via = p_to_q(p_from_matrix(q_to_p(q1).matrix() @ q_to_p(q2).matrix()))
            scale = max(1.0, direct.s.norm() + direct.n.norm())
            assert via.s.distance(direct.s) + via.n.distance(direct.n) <= 1e-12 * scale

    def test_inverse(self, rng):
        for _ in range(100):
            q = random_q(rng)
            e = q_multiply(q, q_inverse(q))
            assert e.s.distance(TriangularS.identity()) < 1e-13
            assert e.n.norm() < 1e-12 * max(1.0, q.n.norm())

    def test_n_part_exactly_skew(self, rng):
        q = q_multiply(random_q(rng), random_q(rng))
        n = q.n.matrix()
        assert np.array_equal(n + adjoint(n), np.zeros((2, 2)))


class TestStructuredFactor:
    def test_identity(self):
        p = structured_p_factor(np.eye(4))
        assert p.distance(PElement.identity()) == 0.0

    def test_diagonal(self):
        p = structured_p_factor(np.diag([0.25, 1.0, 4.0, 1.0]))
        np.testing.assert_allclose(p.matrix(), np.diag([0.5, 1.0, 2.0, 1.0]))

    def test_forward_build(self):
        x = np.array([[1j, 0.0], [0.0, 0.0]])
        p_true = PElement(TriangularS.identity(), x)
        m = p_true.matrix() @ adjoint(p_true.matrix())
        p = structured_p_factor(m)
        assert p.distance(p_true) < 1e-12

    def test_rejects_non_hermitian(self):
        bad = np.eye(4, dtype=complex)
        bad[0, 1] = 1.0
        with pytest.raises(NotFactorizable):
            structured_p_factor(bad)

    def test_rejects_wrong_sigma_relation(self):
        with pytest.raises(NotFactorizable):
            structured_p_factor(np.diag([2.0, 1.0, 1.0, 1.0]))

    def test_rejects_indefinite(self):
        with pytest.raises(NotFactorizable):
            structured_p_factor(np.diag([-0.25, 1.0, -4.0, 1.0]))

    def test_random_reconstruction(self, rng):
        for _ in range(200):
            p_true = random_p(rng)
            m = p_true.matrix() @ adjoint(p_true.matrix())
            p = structured_p_factor(m)
            assert p.distance(p_true) <= 1e-10 * max(1.0, p_true.s.norm() + frob(p_true.x))


class TestIwasawa:
    def test_p_element_input(self, rng):
        p0 = random_p(rng)
        p, k = iwasawa_decompose(embed_p(p0))
        assert p.distance(p0) < 1e-10 * max(1.0, p0.s.norm() + frob(p0.x))
        assert frob(k.m - E4) < 1e-10

    def test_sigma_input(self):
        p, k = iwasawa_decompose(U22Element(SIGMA))
        assert p.distance(PElement.identity()) < 1e-12
        np.testing.assert_allclose(k.m, SIGMA)
        np.testing.assert_allclose(k.alpha, np.zeros((2, 2)))
        np.testing.assert_allclose(k.beta, np.eye(2))

    def test_random_reconstruction(self, rng):
        for _ in range(200):
            g = random_u22(rng)
            p, k = iwasawa_decompose(g)
            assert frob(p.matrix() @ k.m - g.m) < 1e-10 * max(1.0, frob(g.m))

    def test_uniqueness_roundtrip(self, rng):
        for _ in range(200):
            p0, k0 = random_p(rng), random_k(rng)
            g = U22Element(p0.matrix() @ k0.m, tol=1e-9)
            p, k = iwasawa_decompose(g)
            assert p.distance(p0) <= 1e-10 * max(1.0, p0.s.norm() + frob(p0.x))
            assert frob(k.m - k0.m) <= 1e-10


class TestSigmaHat:
    def test_identity(self):
        assert sigma_hat(PElement.identity()).distance(PElement.identity()) == 0.0

    def test_diagonal_case(self):
        p = PElement(TriangularS(2.0, 1.0, 0.0), np.zeros((2, 2)))
        p_hat = sigma_hat(p)
        assert p_hat.s.distance(TriangularS(0.5, 1.0, 0.0)) < 1e-14
        assert frob(p_hat.x) < 1e-14

    def test_defining_relation(self, rng):
        for _ in range(50):
            p = random_p(rng)
            p_hat = sigma_hat(p)
            lhs = p_hat.matrix() @ adjoint(p_hat.matrix())
            rhs = SIGMA @ p.matrix() @ adjoint(p.matrix()) @ SIGMA
            assert frob(lhs - rhs) < 1e-10 * max(1.0, frob(rhs))

    def test_involution(self, rng):
        for _ in range(100):
            p = random_p(rng)
            back = sigma_hat(sigma_hat(p))
            assert back.distance(p) <= 1e-10 * max(1.0, p.s.norm() + frob(p.x))


class TestGroupClosure:
    def test_products_and_inverses(self, rng):
        for _ in range(100):
            g1, g2 = random_u22(rng), random_u22(rng)
            assert is_in_u22(g1.multiply(g2).m, CHAIN_TOL).ok
            assert is_in_u22(g1.inverse().m, CHAIN_TOL).ok

    def test_inverse_formula(self, rng):
        g = random_u22(rng)
        prod = g.multiply(g.inverse())
        assert frob(prod.m - E4) < 1e-13


class TestSubgroupShapes:
    def test_n_and_s_meet_only_at_identity(self, rng):
        assert is_n_shaped(E4) and is_s_shaped(E4)
        for _ in range(50):
            n = random_n(rng)
            if n.norm() > 1e-6:
                assert not is_s_shaped(embed_n(n).m)
            s = random_s(rng)
            if s.distance(TriangularS.identity()) > 1e-6:
                assert not is_n_shaped(embed_s(s).m)

    def test_shape_predicates(self, rng):
        assert is_n_shaped(embed_n(random_n(rng)).m)
        assert is_s_shaped(embed_s(random_s(rng)).m)


class TestDerivedSeries:
    def test_triangular_commutant_is_unipotent(self, rng):
        # commutators of diagonal-free elements have unit diagonal
        for _ in range(50):
            s1, s2 = random_s(rng), random_s(rng)
            comm = s1.multiply(s2).multiply(s1.inverse()).multiply(s2.inverse())
            assert abs(comm.r1 - 1.0) < 1e-12 and abs(comm.r2 - 1.0) < 1e-12

    def test_triangular_group_has_derived_length_two(self, rng):
        def comm(a, b):
            return a.multiply(b).multiply(a.inverse()).multiply(b.inverse())

        for _ in range(20):
            c1 = comm(random_s(rng), random_s(rng))
            c2 = comm(random_s(rng), random_s(rng))
            second = comm(c1, c2)
            assert second.distance(TriangularS.identity()) < 1e-12

    def test_triple_commutators_vanish(self, rng):
        worst = 0.0
        for _ in range(20):
            qs = [random_q(rng) for _ in range(8)]
            triple = nested_q_commutator(qs)
            worst = max(worst, frob(q_to_p(triple).matrix() - E4))
        assert worst < 1e-9

    def test_double_commutators_do_not(self, rng):
        best = 0.0
        for _ in range(20):
            qs = [random_q(rng) for _ in range(4)]
            double = nested_q_commutator(qs)
            best = max(best, frob(q_to_p(double).matrix() - E4))
        assert best > 1e-2

    def test_double_commutator_lands_in_translations(self, rng):
        # the second derived subgroup sits inside the additive part
        qs = [random_q(rng) for _ in range(4)]
        double = nested_q_commutator(qs)
        assert double.s.distance(TriangularS.identity()) < 1e-10


class TestSamplers:
    def test_deterministic_per_seed(self):
        assert random_s(5).distance(random_s(5)) == 0.0
        a, b = random_u22(9), random_u22(9)
        assert np.array_equal(a.m, b.m)

    def test_membership(self, rng):
        for _ in range(20):
            assert is_in_u22(random_u22(rng).m, 1e-10).ok
            random_k(rng)  # constructor validates

    def test_log_uniform_statistics(self):
        rng = np.random.default_rng(123)
        values = [math.log(random_s(rng).r1) for _ in range(10_000)]
        assert abs(np.mean(values)) < 0.05

    def test_k_blocks(self, rng):
        k = random_k(rng)
        np.testing.assert_allclose(k.m[:2, :2], k.m[2:, 2:])
        np.testing.assert_allclose(k.m[:2, 2:], k.m[2:, :2])
        assert frob(k.m @ adjoint(k.m) - E4) < 1e-12


class TestJson:
    @pytest.mark.parametrize("maker", [random_p, random_q, random_k, random_u22])
    def test_roundtrip(self, maker, rng):
        el = maker(rng)
        back = element_from_json(element_to_json(el))
        assert type(back) is type(el)
        if isinstance(el, (KElement, U22Element)):
            assert np.array_equal(back.m, el.m)
        elif isinstance(el, PElement):
            assert back.distance(el) == 0.0
        else:
            assert back.s.distance(el.s) == 0.0 and back.n.distance(el.n) == 0.0

    def test_kind_tags(self, rng):
        assert element_to_json(random_p(rng))["kind"] == "p"
        assert element_to_json(random_q(rng))["kind"] == "q"
        assert element_to_json(random_k(rng))["kind"] == "k"
        assert element_to_json(random_u22(rng))["kind"] == "u22"

    def test_bad_document(self):
        with pytest.raises(ValueError):
            element_from_json({"kind": "nope", "data": {}})
        with pytest.raises(ValueError):
            element_from_json({"data": {}})
