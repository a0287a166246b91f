"""Operation semantics on every carrier, checked against independent oracles."""

import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import mvprob as mv
from mvprob.core import ChangPair
from mvprob.errors import InputError

U = mv.standard_unit()
C = mv.chang()

unit_fractions = st.fractions(min_value=0, max_value=1, max_denominator=50)


def u(x) -> mv.Element:
    return mv.element(U, F(x))


# ---------------------------------------------------------------------------
# Independent oracle for the Chang algebra: the lexicographic group Z x Z
# with unit (1, 0), truncated to [0, unit].  Python tuple comparison is
# lexicographic, which is exactly the order we need.
# ---------------------------------------------------------------------------

LEX_UNIT = (1, 0)


def to_lex(p: ChangPair):
    return (0, p.k) if p.side == "lower" else (1, -p.k)


def from_lex(v) -> ChangPair:
    i, j = v
    if i == 0:
        assert j >= 0
        return ChangPair("lower", j)
    assert i == 1 and j <= 0
    return ChangPair("upper", -j)


def lex_oplus(x: ChangPair, y: ChangPair) -> ChangPair:
    total = tuple(a + b for a, b in zip(to_lex(x), to_lex(y)))
    return from_lex(min(total, LEX_UNIT))


def lex_neg(x: ChangPair) -> ChangPair:
    return from_lex(tuple(a - b for a, b in zip(LEX_UNIT, to_lex(x))))


def chang_elements(bound=6):
    for side in ("lower", "upper"):
        for k in range(bound + 1):
            yield mv.Element(C, ChangPair(side, k))


class TestChangAgainstLexOracle:
    def test_oplus_matches_oracle(self):
        for a, b in itertools.product(chang_elements(), repeat=2):
            assert mv.oplus(a, b).payload == lex_oplus(a.payload, b.payload)

    def test_neg_matches_oracle(self):
        for a in chang_elements():
            assert mv.neg(a).payload == lex_neg(a.payload)

    def test_order_matches_lexicographic_order(self):
        for a, b in itertools.product(chang_elements(), repeat=2):
            assert mv.leq(a, b) == (to_lex(a.payload) <= to_lex(b.payload))

    def test_examples(self):
        assert mv.oplus(mv.lower(C, 2), mv.lower(C, 3)).payload == ChangPair("lower", 5)
        assert mv.neg(mv.lower(C, 4)).payload == ChangPair("upper", 4)
        assert mv.dist(mv.lower(C, 2), mv.upper(C, 3)).payload == ChangPair("upper", 5)


# ---------------------------------------------------------------------------
# Standard carrier
# ---------------------------------------------------------------------------


class TestStandardUnit:
    def test_oplus_truncates(self):
        assert mv.oplus(u("1/2"), u("7/10")).payload == F(1)

    def test_zero_neutral(self):
        assert mv.oplus(mv.zero(U), u("3/7")) == u("3/7")

    def test_neg(self):
        assert mv.neg(u("3/10")).payload == F(7, 10)
        assert mv.neg(mv.zero(U)) == mv.one(U)

    def test_odot(self):
        # evaluate the defining term the long way
        a, b = F(3, 10), F(4, 5)
        expected = 1 - min((1 - a) + (1 - b), F(1))
        assert mv.odot(u(a), u(b)).payload == expected == F(1, 10)

    def test_order_is_numeric(self):
        assert mv.leq(u("1/3"), u("1/2"))
        assert not mv.leq(u("1/2"), u("1/3"))

    def test_lattice_bounds(self):
        a = u("2/5")
        assert mv.join(a, mv.zero(U)) == a
        assert mv.meet(a, mv.one(U)) == a

    def test_dist(self):
        assert mv.dist(u("3/10"), u("4/5")).payload == F(1, 2)
        assert mv.dist(a := u("9/11"), a).payload == 0

    def test_partial_add(self):
        assert mv.partial_add(u("1/3"), u("1/2")).payload == F(5, 6)
        assert mv.partial_add(u("2/3"), u("1/2")) is None
        a = u("4/9")
        assert mv.partial_add(a, mv.zero(U)) == a

    def test_nat_mul(self):
        assert mv.nat_mul(3, u("1/4")).payload == F(3, 4)
        assert mv.nat_mul(4, u("1/4")).payload == F(1)
        assert mv.nat_mul(5, u("1/4")) is None

    def test_nat_oplus(self):
        assert mv.nat_oplus(5, u("1/4")).payload == F(1)
        a = u("2/7")
        assert mv.nat_oplus(1, a) == a

    def test_scalar_mul(self):
        a = u("5/7")
        assert mv.scalar_mul(F(1), a) == a
        assert mv.scalar_mul(F(1, 2), u("1/3")).payload == F(1, 6)

    def test_prod(self):
        assert mv.prod(u("1/2"), u("1/2")).payload == F(1, 4)
        a = u("3/8")
        assert mv.prod(a, mv.one(U)) == a


@settings(max_examples=300)
@given(unit_fractions, unit_fractions)
def test_characteristic_identity_on_standard_unit(x, y):
    a, b = u(x), u(y)
    lhs = mv.oplus(mv.neg(mv.oplus(mv.neg(a), b)), b)
    rhs = mv.oplus(mv.neg(mv.oplus(mv.neg(b), a)), a)
    assert lhs == rhs


@settings(max_examples=300)
@given(unit_fractions, unit_fractions)
def test_join_meet_are_max_min(x, y):
    assert mv.join(u(x), u(y)).payload == max(x, y)
    assert mv.meet(u(x), u(y)).payload == min(x, y)


@settings(max_examples=300)
@given(unit_fractions, unit_fractions)
def test_de_morgan(x, y):
    a, b = u(x), u(y)
    assert mv.meet(a, b) == mv.neg(mv.join(mv.neg(a), mv.neg(b)))


@settings(max_examples=300)
@given(unit_fractions, unit_fractions)
def test_dist_is_absolute_difference(x, y):
    assert mv.dist(u(x), u(y)).payload == abs(x - y)


@settings(max_examples=200)
@given(unit_fractions, unit_fractions, unit_fractions)
def test_dist_triangle(x, y, z):
    a, b, c = u(x), u(y), u(z)
    direct = mv.dist(a, c)
    assert mv.leq(direct, mv.oplus(mv.dist(a, b), mv.dist(b, c)))


@settings(max_examples=300)
@given(unit_fractions, st.integers(min_value=1, max_value=9))
def test_nat_oplus_truncates(x, n):
    assert mv.nat_oplus(n, u(x)).payload == min(n * x, F(1))


@settings(max_examples=300)
@given(unit_fractions)
def test_involution(x):
    assert mv.neg(mv.neg(u(x))) == u(x)


# ---------------------------------------------------------------------------
# Chains, exhaustively
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3, 5])
class TestChainExhaustive:
    def test_partial_add_cancellation(self, n):
        algebra = mv.finite_chain(n)
        pool = mv.core.enumerate_carrier(algebra)
        for a, b, c in itertools.product(pool, repeat=3):
            ac = mv.partial_add(a, c)
            bc = mv.partial_add(b, c)
            if ac is not None and bc is not None and ac == bc:
                assert a == b

    def test_join_is_least_upper_bound(self, n):
        algebra = mv.finite_chain(n)
        pool = mv.core.enumerate_carrier(algebra)
        for a, b in itertools.product(pool, repeat=2):
            j = mv.join(a, b)
            assert mv.leq(a, j) and mv.leq(b, j)
            for c in pool:
                if mv.leq(a, c) and mv.leq(b, c):
                    assert mv.leq(j, c)

    def test_nat_mul_agrees_with_scaling(self, n):
        algebra = mv.finite_chain(n)
        for a in mv.core.enumerate_carrier(algebra):
            for m in range(1, 2 * n + 2):
                result = mv.nat_mul(m, a)
                if m * a.payload <= 1:
                    assert result is not None and result.payload == m * a.payload
                else:
                    assert result is None


# ---------------------------------------------------------------------------
# Function algebras: pointwise behaviour
# ---------------------------------------------------------------------------


class TestFunctionAlgebra:
    FA = mv.function_algebra(("x", "y"))

    def test_dist_pointwise(self):
        a = mv.element(self.FA, ("1", "0"))
        b = mv.element(self.FA, ("0", "1"))
        assert mv.dist(a, b).payload == (F(1), F(1))

    def test_scalar_pointwise(self):
        a = mv.element(self.FA, ("1", "1/2"))
        assert mv.scalar_mul(F(1, 2), a).payload == (F(1, 2), F(1, 4))

    def test_prod_pointwise(self):
        a = mv.element(self.FA, ("1", "0"))
        b = mv.element(self.FA, ("1/2", "1/2"))
        assert mv.prod(a, b).payload == (F(1, 2), F(0))

    def test_chain_valued_levels_enforced(self):
        chain_fa = mv.function_algebra(("p",), mv.FiniteChain(2))
        with pytest.raises(InputError):
            mv.element(chain_fa, ("1/3",))


# ---------------------------------------------------------------------------
# Signature and shape errors
# ---------------------------------------------------------------------------


class TestErrors:
    def test_carrier_mismatch(self):
        with pytest.raises(InputError):
            mv.oplus(u("1/2"), mv.element(mv.finite_chain(2), "1/2"))

    def test_no_scalar_action_on_chains(self):
        with pytest.raises(InputError):
            mv.scalar_mul(F(1, 2), mv.element(mv.finite_chain(2), "1/2"))

    def test_no_product_on_chang(self):
        with pytest.raises(InputError):
            mv.prod(mv.lower(C, 1), mv.lower(C, 1))

    def test_chain_product_closure_guard(self):
        with pytest.raises(InputError):
            mv.Algebra(mv.FiniteChain(2), internal_product=True)
        assert mv.finite_chain(1).internal_product

    def test_out_of_range_values(self):
        with pytest.raises(InputError):
            mv.element(U, F(3, 2))
        with pytest.raises(InputError):
            mv.element(U, F(-1, 2))

    def test_vector_arity(self):
        FA = mv.function_algebra(("x", "y"))
        with pytest.raises(InputError):
            mv.element(FA, ("1/2",))

    def test_floats_rejected(self):
        # exactness is the point: binary floats never enter
        with pytest.raises(InputError):
            mv.element(U, 0.5)
        with pytest.raises(InputError):
            mv.element(mv.function_algebra(("x",)), (0.25,))

    def test_negative_literals_rejected(self):
        with pytest.raises(InputError):
            mv.element(U, "-1/2")
