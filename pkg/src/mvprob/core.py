"""Carriers and the many-valued algebra operations.

Four carriers are supported:

* ``StandardUnit`` -- the rational unit interval with truncated addition,
* ``FiniteChain(n)`` -- the chain {0, 1/n, ..., 1},
* ``FunctionAlgebra`` -- functions from a finite atom set into one of the
  two carriers above, with pointwise operations,
* ``Chang`` -- the algebra of infinitesimals k*eps and co-infinitesimals
  1 - k*eps, the standard example with a nonzero radical.

Only truncated addition and the involution are defined per carrier; the
lattice, distance, and partial-addition operations are derived from them
by the usual term definitions, so every carrier shares one code path.
All values are exact rationals and every operation is a pure function on
immutable data: elements can be shared freely between threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import InputError, UnsupportedCarrierError
from .rationals import ONE, ZERO, format_rational, parse_unit, require_unit

# ---------------------------------------------------------------------------
# Carriers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StandardUnit:
    """The rational unit interval [0, 1]."""


@dataclass(frozen=True)
class FiniteChain:
    """The (n+1)-element chain {0, 1/n, ..., n/n}."""

    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise InputError("chain parameter must be an integer >= 1")


@dataclass(frozen=True)
class FunctionAlgebra:
    """Functions from named atoms into a value carrier, pointwise ops."""

    atoms: tuple[str, ...]
    value: Union[StandardUnit, FiniteChain]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise InputError("function algebra needs at least one atom")
        if len(set(self.atoms)) != len(self.atoms):
            raise InputError(f"duplicate atom names in {self.atoms}")
        if not isinstance(self.value, (StandardUnit, FiniteChain)):
            raise InputError("value carrier must be StandardUnit or FiniteChain")


@dataclass(frozen=True)
class Chang:
    """Lower elements k*eps and upper elements 1 - k*eps."""


Carrier = Union[StandardUnit, FiniteChain, FunctionAlgebra, Chang]

LOWER = "lower"
UPPER = "upper"


@dataclass(frozen=True)
class ChangPair:
    """Chang payload: ``lower k`` is k*eps, ``upper k`` is 1 - k*eps."""

    side: str
    k: int

    def __post_init__(self) -> None:
        if self.side not in (LOWER, UPPER):
            raise InputError(f"Chang side must be 'lower' or 'upper', got {self.side!r}")
        if not isinstance(self.k, int) or self.k < 0:
            raise InputError("Chang index must be a natural number")


Payload = Union[Fraction, tuple[Fraction, ...], ChangPair]


def _product_closed(carrier: Carrier) -> bool:
    # pointwise multiplication leaves the carrier iff the values do
    if isinstance(carrier, StandardUnit):
        return True
    if isinstance(carrier, FiniteChain):
        return carrier.n == 1
    if isinstance(carrier, FunctionAlgebra):
        return _product_closed(carrier.value)
    return False


def _divisible(carrier: Carrier) -> bool:
    if isinstance(carrier, StandardUnit):
        return True
    if isinstance(carrier, FunctionAlgebra):
        return isinstance(carrier.value, StandardUnit)
    return False


@dataclass(frozen=True)
class Algebra:
    """A carrier together with its signature flags."""

    carrier: Carrier
    internal_product: bool = False
    scalar_action: bool = False

    def __post_init__(self) -> None:
        if self.internal_product and not _product_closed(self.carrier):
            raise InputError(f"carrier {self.carrier} does not close under products")
        if self.scalar_action and not _divisible(self.carrier):
            raise InputError(f"carrier {self.carrier} is not divisible")


def standard_unit() -> Algebra:
    return Algebra(StandardUnit(), internal_product=True, scalar_action=True)


def finite_chain(n: int) -> Algebra:
    carrier = FiniteChain(n)
    return Algebra(carrier, internal_product=_product_closed(carrier))


def function_algebra(
    atoms: Sequence[str],
    value: Union[StandardUnit, FiniteChain, None] = None,
    internal_product: Optional[bool] = None,
    scalar_action: Optional[bool] = None,
) -> Algebra:
    """Build a function algebra; flags default to everything the carrier permits."""
    carrier = FunctionAlgebra(tuple(atoms), StandardUnit() if value is None else value)
    if internal_product is None:
        internal_product = _product_closed(carrier)
    if scalar_action is None:
        scalar_action = _divisible(carrier)
    return Algebra(carrier, internal_product=internal_product, scalar_action=scalar_action)


def chang() -> Algebra:
    return Algebra(Chang())


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------


def _coerce_value(carrier: Union[StandardUnit, FiniteChain], raw) -> Fraction:
    if isinstance(raw, str):
        raw = parse_unit(raw)
    elif isinstance(raw, int):
        raw = Fraction(raw)
    value = require_unit(raw)
    if isinstance(carrier, FiniteChain) and (value * carrier.n).denominator != 1:
        raise InputError(f"{value} is not a level of the {carrier.n}-chain")
    return value


def _coerce_payload(carrier: Carrier, raw) -> Payload:
    if isinstance(carrier, (StandardUnit, FiniteChain)):
        return _coerce_value(carrier, raw)
    if isinstance(carrier, FunctionAlgebra):
        if isinstance(raw, (str, Fraction, int, ChangPair)):
            raise InputError("function algebra elements need one value per atom")
        values = tuple(_coerce_value(carrier.value, v) for v in raw)
        if len(values) != len(carrier.atoms):
            raise InputError(
                f"expected {len(carrier.atoms)} values, got {len(values)}"
            )
        return values
    if isinstance(carrier, Chang):
        if not isinstance(raw, ChangPair):
            raise InputError("Chang elements are ChangPair payloads")
        return raw
    raise UnsupportedCarrierError(f"unknown carrier {carrier!r}")


@dataclass(frozen=True)
class Element:
    """A carrier-tagged value."""

    algebra: Algebra
    payload: Payload

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "payload", _coerce_payload(self.algebra.carrier, self.payload)
        )


def element(algebra: Algebra, payload) -> Element:
    return Element(algebra, payload)


def zero(algebra: Algebra) -> Element:
    carrier = algebra.carrier
    if isinstance(carrier, FunctionAlgebra):
        return Element(algebra, (ZERO,) * len(carrier.atoms))
    if isinstance(carrier, Chang):
        return Element(algebra, ChangPair(LOWER, 0))
    return Element(algebra, ZERO)


def one(algebra: Algebra) -> Element:
    carrier = algebra.carrier
    if isinstance(carrier, FunctionAlgebra):
        return Element(algebra, (ONE,) * len(carrier.atoms))
    if isinstance(carrier, Chang):
        return Element(algebra, ChangPair(UPPER, 0))
    return Element(algebra, ONE)


def const(algebra: Algebra, value) -> Element:
    """The constant function (or plain value on scalar carriers)."""
    carrier = algebra.carrier
    if isinstance(carrier, FunctionAlgebra):
        v = _coerce_value(carrier.value, value)
        return Element(algebra, (v,) * len(carrier.atoms))
    return Element(algebra, value)


def indicator(algebra: Algebra, atom: str) -> Element:
    carrier = algebra.carrier
    if not isinstance(carrier, FunctionAlgebra):
        raise InputError("indicator elements need a function algebra")
    if atom not in carrier.atoms:
        raise InputError(f"unknown atom {atom!r}")
    return Element(
        algebra, tuple(ONE if a == atom else ZERO for a in carrier.atoms)
    )


def lower(algebra: Algebra, k: int) -> Element:
    return Element(algebra, ChangPair(LOWER, k))


def upper(algebra: Algebra, k: int) -> Element:
    return Element(algebra, ChangPair(UPPER, k))


def format_element(e: Element) -> str:
    p = e.payload
    if isinstance(p, ChangPair):
        return f"{p.side}({p.k})"
    if isinstance(p, tuple):
        return "(" + ",".join(format_rational(v) for v in p) + ")"
    return format_rational(p)


def atoms_of(algebra: Algebra) -> tuple[str, ...]:
    if not isinstance(algebra.carrier, FunctionAlgebra):
        raise InputError("algebra has no atoms")
    return algebra.carrier.atoms


# ---------------------------------------------------------------------------
# Primitive operations: truncated addition and involution
# ---------------------------------------------------------------------------


def _same_algebra(a: Element, b: Element) -> Algebra:
    if a.algebra != b.algebra:
        raise InputError(
            f"carrier mismatch: {a.algebra.carrier} vs {b.algebra.carrier}"
        )
    return a.algebra


def _chang_oplus(x: ChangPair, y: ChangPair) -> ChangPair:
    # truncated sum in the lexicographic group Z x Z with unit (1, 0)
    if x.side == LOWER and y.side == LOWER:
        return ChangPair(LOWER, x.k + y.k)
    if x.side == UPPER and y.side == UPPER:
        return ChangPair(UPPER, 0)
    low, up = (x, y) if x.side == LOWER else (y, x)
    return ChangPair(UPPER, max(up.k - low.k, 0))


def oplus(a: Element, b: Element) -> Element:
    algebra = _same_algebra(a, b)
    pa, pb = a.payload, b.payload
    if isinstance(pa, ChangPair):
        return Element(algebra, _chang_oplus(pa, pb))
    if isinstance(pa, tuple):
        return Element(algebra, tuple(min(x + y, ONE) for x, y in zip(pa, pb)))
    return Element(algebra, min(pa + pb, ONE))


def neg(a: Element) -> Element:
    p = a.payload
    if isinstance(p, ChangPair):
        flipped = UPPER if p.side == LOWER else LOWER
        return Element(a.algebra, ChangPair(flipped, p.k))
    if isinstance(p, tuple):
        return Element(a.algebra, tuple(ONE - v for v in p))
    return Element(a.algebra, ONE - p)


# ---------------------------------------------------------------------------
# Derived operations
# ---------------------------------------------------------------------------


def odot(a: Element, b: Element) -> Element:
    return neg(oplus(neg(a), neg(b)))


def leq(a: Element, b: Element) -> bool:
    algebra = _same_algebra(a, b)
    return oplus(neg(a), b) == one(algebra)


def join(a: Element, b: Element) -> Element:
    return oplus(neg(oplus(neg(a), b)), b)


def meet(a: Element, b: Element) -> Element:
    return neg(join(neg(a), neg(b)))


def dist(a: Element, b: Element) -> Element:
    return oplus(odot(a, neg(b)), odot(b, neg(a)))


def partial_add(a: Element, b: Element) -> Optional[Element]:
    """Truncation-free sum; ``None`` marks the undefined case a > b*."""
    if not leq(a, neg(b)):
        return None
    return oplus(a, b)


def nat_mul(n: int, a: Element) -> Optional[Element]:
    """n-fold partial sum a + ... + a, undefined as soon as a step is."""
    if n < 1:
        raise InputError("nat_mul needs n >= 1")
    acc: Optional[Element] = a
    for _ in range(n - 1):
        acc = partial_add(acc, a)
        if acc is None:
            return None
    return acc


def nat_oplus(n: int, a: Element) -> Element:
    if n < 1:
        raise InputError("nat_oplus needs n >= 1")
    acc = a
    for _ in range(n - 1):
        acc = oplus(acc, a)
    return acc


def scalar_mul(alpha: Fraction, a: Element) -> Element:
    if not a.algebra.scalar_action:
        raise InputError("algebra has no scalar action")
    alpha = require_unit(alpha if isinstance(alpha, Fraction) else Fraction(alpha))
    p = a.payload
    if isinstance(p, tuple):
        return Element(a.algebra, tuple(alpha * v for v in p))
    return Element(a.algebra, alpha * p)


def prod(a: Element, b: Element) -> Element:
    algebra = _same_algebra(a, b)
    if not algebra.internal_product:
        raise InputError("algebra has no internal product")
    pa, pb = a.payload, b.payload
    if isinstance(pa, tuple):
        return Element(algebra, tuple(x * y for x, y in zip(pa, pb)))
    return Element(algebra, pa * pb)


# ---------------------------------------------------------------------------
# Carrier enumeration
# ---------------------------------------------------------------------------


def is_finite(algebra: Algebra) -> bool:
    carrier = algebra.carrier
    if isinstance(carrier, FiniteChain):
        return True
    if isinstance(carrier, FunctionAlgebra):
        return isinstance(carrier.value, FiniteChain)
    return False


def carrier_size(algebra: Algebra) -> Optional[int]:
    carrier = algebra.carrier
    if isinstance(carrier, FiniteChain):
        return carrier.n + 1
    if isinstance(carrier, FunctionAlgebra) and isinstance(carrier.value, FiniteChain):
        return (carrier.value.n + 1) ** len(carrier.atoms)
    return None


def _chain_levels(chain: FiniteChain) -> list[Fraction]:
    return [Fraction(k, chain.n) for k in range(chain.n + 1)]


def enumerate_carrier(algebra: Algebra) -> list[Element]:
    """All elements of a finite carrier, in lexicographic payload order."""
    carrier = algebra.carrier
    if isinstance(carrier, FiniteChain):
        return [Element(algebra, v) for v in _chain_levels(carrier)]
    if isinstance(carrier, FunctionAlgebra) and isinstance(carrier.value, FiniteChain):
        levels = _chain_levels(carrier.value)
        return [
            Element(algebra, combo)
            for combo in itertools.product(levels, repeat=len(carrier.atoms))
        ]
    raise UnsupportedCarrierError(f"carrier {carrier} is not finite")


# ---------------------------------------------------------------------------
# Divisible ambient (shared by the hull and the state-extension machinery)
# ---------------------------------------------------------------------------

CHAIN_HULL_ATOM = "x0"


def divisible_ambient(algebra: Algebra) -> Algebra:
    """The rational function algebra a semisimple carrier embeds into.

    Chains get a single synthetic atom; function algebras keep theirs.
    """
    carrier = algebra.carrier
    if isinstance(carrier, FiniteChain):
        return function_algebra((CHAIN_HULL_ATOM,))
    if isinstance(carrier, FunctionAlgebra):
        return function_algebra(carrier.atoms)
    if isinstance(carrier, StandardUnit):
        return function_algebra((CHAIN_HULL_ATOM,))
    raise UnsupportedCarrierError(f"carrier {carrier} has no divisible ambient")


def embed_in_ambient(a: Element) -> Element:
    """Value-preserving retyping of ``a`` into its divisible ambient."""
    ambient = divisible_ambient(a.algebra)
    p = a.payload
    if isinstance(p, tuple):
        return Element(ambient, p)
    return Element(ambient, (p,))


def ambient_vector(a: Element) -> tuple[Fraction, ...]:
    p = a.payload
    if isinstance(p, tuple):
        return p
    if isinstance(p, Fraction):
        return (p,)
    raise InputError("Chang elements have no ambient vector")


def scaled_atom_basis(algebra: Algebra) -> tuple[int, list[Element]]:
    """The elements (1/n) * indicator_x together with the scale n.

    Every element of the carrier is an exact partial sum of these, which
    is what the divisible-extension formulas reduce to.
    """
    carrier = algebra.carrier
    if isinstance(carrier, FiniteChain):
        n = carrier.n
        return n, [Element(algebra, Fraction(1, n))]
    if isinstance(carrier, FunctionAlgebra):
        n = carrier.value.n if isinstance(carrier.value, FiniteChain) else 1
        unit = Fraction(1, n)
        basis = [
            Element(
                algebra,
                tuple(unit if a == atom else ZERO for a in carrier.atoms),
            )
            for atom in carrier.atoms
        ]
        return n, basis
    raise UnsupportedCarrierError(f"carrier {carrier} has no atom basis")


def atom_indicator_elements(algebra: Algebra) -> list[Element]:
    """Source elements whose ambient images are the atom indicators."""
    carrier = algebra.carrier
    if isinstance(carrier, FiniteChain):
        return [one(algebra)]
    if isinstance(carrier, FunctionAlgebra):
        return [indicator(algebra, atom) for atom in carrier.atoms]
    raise UnsupportedCarrierError(f"carrier {carrier} has no atom indicators")
