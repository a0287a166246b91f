"""Product couplings, bounded bilinear maps, extensions, factorization."""

from fractions import Fraction as F
from random import Random

import pytest

import mvprob as mv
from mvprob import independence
from mvprob.axioms import random_element
from mvprob.errors import InputError, NoLimitError
from mvprob.rationals import ONE

BOOL2 = mv.function_algebra(("x", "y"), mv.FiniteChain(1))
CH2 = mv.finite_chain(2)


def chain_state(algebra):
    n = algebra.carrier.n
    return mv.table_state(algebra, {F(k, n): F(k, n) for k in range(n + 1)})


def coupling(weights_a=(F(1, 2), F(1, 2))):
    s_a = mv.measure_state(BOOL2, mv.measure(("x", "y"), weights_a))
    s_b = chain_state(CH2)
    rep_a = mv.embed_l1(BOOL2, s_a)
    rep_b = mv.embed_l1(CH2, s_b)
    space = independence.space_of(rep_a, rep_b)
    return s_a, s_b, rep_a, rep_b, space


class TestProductSpace:
    def test_weights_multiply(self):
        mu = mv.measure(("x", "y"), (F(1, 2), F(1, 2)))
        nu = mv.measure(("p", "q"), (F(1, 3), F(2, 3)))
        space = mv.product_space(mu, nu)
        assert space.measure.atoms == ("(x,p)", "(x,q)", "(y,p)", "(y,q)")
        assert space.measure.weights == (F(1, 6), F(1, 3), F(1, 6), F(1, 3))

    def test_marginals_recover_the_factors(self):
        mu = mv.measure(("x", "y"), (F(1, 4), F(3, 4)))
        nu = mv.measure(("p", "q", "r"), (F(1, 2), F(1, 3), F(1, 6)))
        space = mv.product_space(mu, nu)
        left, right = independence.marginals(space)
        assert left == mu and right == nu

    def test_point_mass_factor_copies_the_other_side(self):
        mu = mv.measure(("x", "y"), (F(1, 4), F(3, 4)))
        point = mv.measure(("p",), (F(1),))
        space = mv.product_space(mu, point)
        assert space.measure.weights == mu.weights

    def test_uniform_times_uniform(self):
        uniform2 = mv.measure(("a", "b"), (F(1, 2), F(1, 2)))
        space = mv.product_space(uniform2, uniform2)
        assert space.measure.weights == tuple([F(1, 4)] * 4)


class TestTensor:
    MU = mv.measure(("x", "y"), (F(1, 2), F(1, 2)))
    NU = mv.measure(("p", "q"), (F(1, 3), F(2, 3)))

    def setup_method(self):
        self.space = mv.product_space(self.MU, self.NU)
        self.left = mv.function_algebra(("x", "y"))
        self.right = mv.function_algebra(("p", "q"))

    def test_pointwise_products(self):
        f = mv.element(self.left, ("1", "0"))
        g = mv.element(self.right, ("1/2", "1/2"))
        assert mv.tensor(self.space, f, g).payload == (F(1, 2), F(1, 2), F(0), F(0))

    def test_unit_tensor_unit(self):
        assert mv.tensor(
            self.space, mv.one(self.left), mv.one(self.right)
        ) == mv.one(self.space.algebra)

    def test_integral_identity(self):
        f = mv.element(self.left, ("1", "0"))
        g = mv.element(self.right, ("1/2", "1/2"))
        paired = mv.tensor(self.space, f, g)
        assert mv.eval_state(self.space.state, paired) == F(1, 4)

    def test_integral_identity_random(self):
        rng = Random(21)
        left_state = mv.measure_state(self.left, self.MU)
        right_state = mv.measure_state(self.right, self.NU)
        for _ in range(10_000):
            f = random_element(rng, self.left)
            g = random_element(rng, self.right)
            assert mv.eval_state(
                self.space.state, mv.tensor(self.space, f, g)
            ) == mv.eval_state(left_state, f) * mv.eval_state(right_state, g)

    def test_nonnegativity_is_inherited(self):
        f = mv.element(self.left, ("1/3", "0"))
        g = mv.element(self.right, ("0", "2/3"))
        assert all(v >= 0 for v in mv.tensor(self.space, f, g).payload)

    def test_space_mismatch(self):
        other = mv.function_algebra(("p", "q", "r"))
        with pytest.raises(InputError):
            mv.tensor(self.space, mv.one(other), mv.one(self.right))


class TestIndependenceIdentity:
    def test_exhaustive_pairs(self):
        s_a, s_b, rep_a, rep_b, space = coupling()
        for a in mv.core.enumerate_carrier(BOOL2):
            for b in mv.core.enumerate_carrier(CH2):
                paired = mv.beta(space, rep_a, rep_b, a, b)
                assert mv.eval_state(space.state, paired) == mv.eval_state(
                    s_a, a
                ) * mv.eval_state(s_b, b)

    def test_unit_marginal(self):
        s_a, _, rep_a, rep_b, space = coupling()
        for a in mv.core.enumerate_carrier(BOOL2):
            paired = mv.beta(space, rep_a, rep_b, a, mv.one(CH2))
            assert mv.eval_state(space.state, paired) == mv.eval_state(s_a, a)


class TestBilinearChecks:
    def test_beta_is_bilinear_with_bound_one(self):
        _, _, rep_a, rep_b, space = coupling()
        gamma = mv.beta_bilinear(space, rep_a, rep_b)
        report = mv.check_bilinear(gamma, bound=1)
        assert report.passed

    def test_state_product_is_bilinear(self):
        s_a, s_b, *_ = coupling()
        gamma = mv.state_product_bilinear(s_a, s_b)
        assert mv.check_bilinear(gamma, bound=1).passed

    def test_join_fixture_fails_additivity(self):
        s = chain_state(CH2)
        gamma = mv.bilinear_map(s, s, s, mv.join, bound=None, validate=False)
        report = mv.check_bilinear(gamma)
        assert not report.passed
        assert report.witness[0] in ("left-linearity", "right-linearity")

    def test_construction_rejects_non_bilinear(self):
        s = chain_state(CH2)
        with pytest.raises(InputError):
            mv.bilinear_map(s, s, s, mv.join)

    def test_understated_bound_fails(self):
        # same pairing, but integrated against a lopsided state: the
        # claimed K = 1 is too small, K = 2 is enough
        s_a, s_b, rep_a, rep_b, space = coupling()
        weights = (F(1),) + (F(0),) * (len(space.measure.atoms) - 1)
        skew = mv.measure_state(
            space.algebra, mv.measure(space.measure.atoms, weights)
        )
        gamma = mv.bilinear_map(
            s_a,
            s_b,
            skew,
            lambda a, b: mv.beta(space, rep_a, rep_b, a, b),
            bound=None,
            validate=False,
        )
        assert not mv.check_bilinear(gamma, bound=1).passed
        assert mv.check_bilinear(gamma, bound=2).passed

    def test_bimorphism_option(self):
        # the one-dimensional product is a bimorphism; the pairing need not be
        chain1 = mv.finite_chain(1)
        s = chain_state(chain1)
        gamma = mv.bilinear_map(s, s, s, mv.prod, bound=1)
        assert mv.check_bilinear(gamma, bound=1, bimorphism=True).passed


class TestLinearExtension:
    def test_identity_extends_to_the_identity(self):
        sigma = mv.linear_map(CH2, CH2, lambda a: a)
        ext = mv.extend_linear_divisible(sigma)
        third = mv.element(ext.domain, ("1/3",))
        assert independence.apply_hull_linear(ext, third).payload == (F(1, 3),)

    def test_zero_maps_to_zero(self):
        sigma = mv.linear_map(CH2, CH2, lambda a: a)
        ext = mv.extend_linear_divisible(sigma)
        assert independence.apply_hull_linear(ext, mv.zero(ext.domain)) == mv.zero(
            ext.codomain
        )

    def test_decomposition_independence(self):
        # 1/2 in the hull decomposes as (1 + 0)/2 and as (1/2 + 1/2)/2;
        # the averaging formula gives the same value over both, and it
        # is the extension's value
        sigma = mv.linear_map(CH2, CH2, lambda a: a)
        ext = mv.extend_linear_divisible(sigma)
        half = mv.element(ext.domain, ("1/2",))
        image = independence.apply_hull_linear(ext, half).payload

        def average(parts):
            vectors = [
                mv.core.ambient_vector(
                    mv.core.embed_in_ambient(independence.apply_linear(sigma, p))
                )
                for p in parts
            ]
            n = len(parts)
            return tuple(sum(col) / n for col in zip(*vectors))

        first = average([mv.one(CH2), mv.zero(CH2)])
        second = average([mv.element(CH2, "1/2"), mv.element(CH2, "1/2")])
        assert image == first == second

    def test_restriction_recovers_the_map(self):
        source = mv.function_algebra(("x", "y"), mv.FiniteChain(2))
        sigma = mv.linear_map(source, CH2, lambda a: mv.element(CH2, a.payload[0]))
        ext = mv.extend_linear_divisible(sigma)
        for a in mv.core.enumerate_carrier(source):
            assert independence.apply_hull_linear(
                ext, mv.core.embed_in_ambient(a)
            ) == mv.core.embed_in_ambient(mv.independence.apply_linear(sigma, a))

    def test_non_linear_rejected(self):
        with pytest.raises(InputError):
            mv.linear_map(CH2, CH2, lambda a: mv.odot(a, a))


class TestBilinearExtension:
    def test_degenerate_decomposition_restricts_to_the_map(self):
        s_a, s_b, rep_a, rep_b, space = coupling()
        gamma = mv.beta_bilinear(space, rep_a, rep_b)
        ext = mv.extend_bilinear_divisible(gamma)
        for a in mv.core.enumerate_carrier(BOOL2):
            for b in mv.core.enumerate_carrier(CH2):
                extended = independence.apply_hull_bilinear(
                    ext, mv.core.embed_in_ambient(a), mv.core.embed_in_ambient(b)
                )
                direct = mv.core.embed_in_ambient(mv.independence.apply_bilinear(gamma, a, b))
                assert extended == direct

    def test_boolean_product_at_half(self):
        chain1 = mv.finite_chain(1)
        s = chain_state(chain1)
        gamma = mv.bilinear_map(s, s, s, mv.prod, bound=1)
        ext = mv.extend_bilinear_divisible(gamma)
        half = mv.element(ext.left, ("1/2",))
        assert independence.apply_hull_bilinear(
            ext, half, mv.element(ext.right, ("1/2",))
        ).payload == (F(1, 4),)

    def test_bound_preserved_on_random_hull_pairs(self):
        s_a, s_b, rep_a, rep_b, space = coupling()
        gamma = mv.beta_bilinear(space, rep_a, rep_b)
        ext = mv.extend_bilinear_divisible(gamma)
        extended_left = mv.extend_state_divisible(s_a)
        extended_right = mv.extend_state_divisible(s_b)
        cod_state = space.state
        rng = Random(33)
        for _ in range(1000):
            f = random_element(rng, ext.left)
            g = random_element(rng, ext.right)
            value = independence.apply_hull_bilinear(ext, f, g)
            level = mv.eval_state(cod_state, value)
            cap = min(
                gamma.bound
                * mv.eval_state(extended_left, f)
                * mv.eval_state(extended_right, g),
                ONE,
            )
            assert level <= cap

    def test_unbounded_rejected(self):
        s_a, s_b, rep_a, rep_b, space = coupling()
        gamma = mv.bilinear_map(
            s_a, s_b, space.state,
            lambda a, b: mv.beta(space, rep_a, rep_b, a, b),
            bound=None,
        )
        with pytest.raises(InputError):
            mv.extend_bilinear_divisible(gamma)


class TestLipschitz:
    def test_equal_arguments_give_zero(self):
        s_a, s_b, rep_a, rep_b, space = coupling()
        gamma = mv.beta_bilinear(space, rep_a, rep_b)
        a = mv.element(BOOL2, ("1", "0"))
        b = mv.element(CH2, "1/2")
        assert mv.states.rho(
            gamma.codomain,
            independence.apply_bilinear(gamma, a, b),
            independence.apply_bilinear(gamma, a, b),
        ) == 0

    def test_sampled_quadruples(self):
        s_a, s_b, rep_a, rep_b, space = coupling()
        gamma = mv.beta_bilinear(space, rep_a, rep_b)
        report = mv.lipschitz_check(gamma, samples=500, seed=8)
        assert report.passed and report.checks == 500

    def test_state_product_quadruples(self):
        s_a, s_b, *_ = coupling()
        gamma = mv.state_product_bilinear(s_a, s_b)
        assert mv.lipschitz_check(gamma, samples=500, seed=9).passed


class TestFactorization:
    def gammas(self):
        s_a, s_b, rep_a, rep_b, space = coupling()
        yield "beta", mv.beta_bilinear(space, rep_a, rep_b), rep_a, rep_b, space
        yield (
            "state-product",
            mv.state_product_bilinear(s_a, s_b),
            rep_a,
            rep_b,
            space,
        )
        yield (
            "left-scaling",
            mv.left_scaling_bilinear(rep_a, s_b),
            rep_a,
            rep_b,
            space,
        )

    def test_triangle_and_uniqueness_for_three_fixtures(self):
        for name, gamma, rep_a, rep_b, space in self.gammas():
            rep_c = mv.embed_l1(gamma.codomain.algebra, gamma.codomain)
            fact = mv.factorize(gamma, space, rep_a, rep_b, rep_c)
            report = mv.verify_factorization(
                fact, gamma, rep_a, rep_b, rep_c, samples=120, seed=5
            )
            assert report.passed, name

    def test_pairing_factors_through_the_identity(self):
        _, _, rep_a, rep_b, space = coupling()
        gamma = mv.beta_bilinear(space, rep_a, rep_b)
        rep_c = mv.embed_l1(space.algebra, space.state)
        fact = mv.factorize(gamma, space, rep_a, rep_b, rep_c)
        size = len(space.measure.atoms)
        for i, image in enumerate(fact.omega.images):
            assert image == tuple(ONE if j == i else F(0) for j in range(size))

    def test_state_product_factors_through_integration(self):
        s_a, s_b, rep_a, rep_b, space = coupling()
        gamma = mv.state_product_bilinear(s_a, s_b)
        rep_c = mv.embed_l1(gamma.codomain.algebra, gamma.codomain)
        fact = mv.factorize(gamma, space, rep_a, rep_b, rep_c)
        rng = Random(14)
        for _ in range(200):
            h = independence._random_product_element(rng, space.algebra)
            value = independence.apply_atom_linear(fact.omega, h)
            assert value.payload == (mv.eval_state(space.state, h),)

    def test_non_faithful_states_rejected(self):
        s_a, s_b, rep_a, rep_b, space = coupling(weights_a=(F(1), F(0)))
        gamma = mv.state_product_bilinear(s_a, s_b)
        rep_c = mv.embed_l1(gamma.codomain.algebra, gamma.codomain)
        with pytest.raises(InputError):
            mv.factorize(gamma, space, rep_a, rep_b, rep_c)

    def test_unbounded_rejected(self):
        s_a, s_b, rep_a, rep_b, space = coupling()
        gamma = mv.bilinear_map(
            s_a, s_b, space.state,
            lambda a, b: mv.beta(space, rep_a, rep_b, a, b),
            bound=None,
        )
        rep_c = mv.embed_l1(space.algebra, space.state)
        with pytest.raises(InputError):
            mv.factorize(gamma, space, rep_a, rep_b, rep_c)


class TestStabilizingExtension:
    def setup_method(self):
        s_a, s_b, rep_a, rep_b, space = coupling()
        self.gamma = mv.beta_bilinear(space, rep_a, rep_b)

    def test_constant_sequences(self):
        a = mv.element(BOOL2, ("1", "0"))
        b = mv.element(CH2, "1/2")
        value = mv.extend_bilinear_stabilizing(self.gamma, [a, a], [b, b])
        assert value == independence.apply_bilinear(self.gamma, a, b)

    def test_tail_stabilization(self):
        a0 = mv.element(BOOL2, ("0", "0"))
        a1 = mv.element(BOOL2, ("1", "0"))
        b = mv.element(CH2, "1")
        value = mv.extend_bilinear_stabilizing(
            self.gamma, [a0, a1, a1, a1], [b, b, b, b]
        )
        assert value == independence.apply_bilinear(self.gamma, a1, b)

    def test_alternating_raises(self):
        a0 = mv.element(BOOL2, ("0", "0"))
        a1 = mv.element(BOOL2, ("1", "0"))
        b = mv.element(CH2, "1")
        with pytest.raises(NoLimitError):
            mv.extend_bilinear_stabilizing(
                self.gamma, [a0, a1, a0, a1], [b, b, b, b]
            )
