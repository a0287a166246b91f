"""States, the state pseudo-metric, and the null-ideal quotient.

A state is a normalized linear functional given by one of four rules:
integration against a discrete measure, the identity on the rational
interval, the first lexicographic coordinate on the Chang algebra, or an
explicit value table on a finite carrier.  Table rules are checked for
linearity exhaustively when constructed; invalid tables are rejected,
never repaired.

The quotient operation collapses pairs at pseudo-distance zero.  A
genuine metric completion can leave the rational carrier, so instead of
approximating limits the quotient result carries a completeness flag
(true exactly when the quotient carrier is finite) and the sequence
machinery accepts only sequences that stabilize.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Union

from . import core, spectra
from .core import Algebra, Chang, Element, FunctionAlgebra, StandardUnit
from .errors import InputError
from .rationals import ONE, ZERO, require_unit

# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiscreteMeasure:
    """A normalized weight vector over named atoms."""

    atoms: tuple[str, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.atoms) != len(self.weights) or not self.atoms:
            raise InputError("measure needs one weight per atom")
        if len(set(self.atoms)) != len(self.atoms):
            raise InputError("duplicate atoms in measure")
        for w in self.weights:
            require_unit(w)
        if sum(self.weights) != ONE:
            raise InputError(f"weights sum to {sum(self.weights)}, not 1")

    def weight(self, atom: str) -> Fraction:
        return self.weights[self.atoms.index(atom)]


def measure(atoms, weights) -> DiscreteMeasure:
    ws = tuple(w if isinstance(w, Fraction) else Fraction(w) for w in weights)
    return DiscreteMeasure(tuple(atoms), ws)


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeasureRule:
    measure: DiscreteMeasure


@dataclass(frozen=True)
class IdentityRule:
    pass


@dataclass(frozen=True)
class FirstCoordinateRule:
    pass


@dataclass(frozen=True)
class TableRule:
    values: tuple[tuple[core.Payload, Fraction], ...]


Rule = Union[MeasureRule, IdentityRule, FirstCoordinateRule, TableRule]


@dataclass(frozen=True)
class State:
    algebra: Algebra
    rule: Rule


def measure_state(algebra: Algebra, mu: DiscreteMeasure) -> State:
    carrier = algebra.carrier
    if not isinstance(carrier, FunctionAlgebra):
        raise InputError("measure states live on function algebras")
    if carrier.atoms != mu.atoms:
        raise InputError(f"measure atoms {mu.atoms} do not match {carrier.atoms}")
    return State(algebra, MeasureRule(mu))


def identity_state(algebra: Algebra) -> State:
    if not isinstance(algebra.carrier, StandardUnit):
        raise InputError("the identity state lives on the standard carrier")
    return State(algebra, IdentityRule())


def chang_state(algebra: Algebra) -> State:
    if not isinstance(algebra.carrier, Chang):
        raise InputError("the first-coordinate state lives on the Chang algebra")
    return State(algebra, FirstCoordinateRule())


def table_state(algebra: Algebra, values: dict) -> State:
    """Build a state from an explicit table, verifying linearity.

    ``values`` maps payloads (or anything `element` coerces) to unit
    rationals; every element of the finite carrier must be covered.
    """
    if not core.is_finite(algebra):
        raise InputError("table states need a finite carrier")
    table: dict[core.Payload, Fraction] = {}
    for raw_key, raw_value in values.items():
        key = core.element(algebra, raw_key).payload
        value = require_unit(
            raw_value if isinstance(raw_value, Fraction) else Fraction(raw_value)
        )
        table[key] = value
    elements = core.enumerate_carrier(algebra)
    missing = [e for e in elements if e.payload not in table]
    if missing:
        raise InputError(f"table misses {core.format_element(missing[0])}")
    if table[core.one(algebra).payload] != ONE:
        raise InputError("a state must send 1 to 1")
    for a in elements:
        for b in elements:
            if core.leq(a, core.neg(b)):
                total = table[core.oplus(a, b).payload]
                if total != table[a.payload] + table[b.payload]:
                    raise InputError(
                        "table is not linear at "
                        f"{core.format_element(a)} + {core.format_element(b)}"
                    )
    canonical = tuple(sorted(table.items()))
    return State(algebra, TableRule(canonical))


@lru_cache(maxsize=None)
def _table_dict(rule: TableRule) -> dict:
    return dict(rule.values)


def eval_state(s: State, a: Element) -> Fraction:
    if a.algebra != s.algebra:
        raise InputError("element does not belong to the state's algebra")
    rule = s.rule
    if isinstance(rule, MeasureRule):
        return sum(
            (v * w for v, w in zip(a.payload, rule.measure.weights)), ZERO
        )
    if isinstance(rule, IdentityRule):
        return a.payload
    if isinstance(rule, FirstCoordinateRule):
        return ZERO if a.payload.side == core.LOWER else ONE
    return _table_dict(rule)[a.payload]


@dataclass(frozen=True)
class FaithfulnessReport:
    faithful: bool
    witness: Optional[Element]  # a nonzero element sent to 0, if any


def is_faithful(s: State) -> FaithfulnessReport:
    rule = s.rule
    if isinstance(rule, MeasureRule):
        for atom, w in zip(rule.measure.atoms, rule.measure.weights):
            if w == ZERO:
                return FaithfulnessReport(False, core.indicator(s.algebra, atom))
        return FaithfulnessReport(True, None)
    if isinstance(rule, IdentityRule):
        return FaithfulnessReport(True, None)
    if isinstance(rule, FirstCoordinateRule):
        return FaithfulnessReport(False, core.lower(s.algebra, 1))
    z = core.zero(s.algebra)
    for a in core.enumerate_carrier(s.algebra):
        if a != z and eval_state(s, a) == ZERO:
            return FaithfulnessReport(False, a)
    return FaithfulnessReport(True, None)


def rho(s: State, a: Element, b: Element) -> Fraction:
    """The state pseudo-metric: the state of the distance term."""
    return eval_state(s, core.dist(a, b))


# ---------------------------------------------------------------------------
# Extension to the divisible ambient
# ---------------------------------------------------------------------------


def extend_state_divisible(s: State) -> State:
    """Extend a state to the rational function algebra over the carrier.

    The extension is rationally homogeneous, so it is forced on the
    scaled atom basis and is integration against the measure
    mu(x) = n * s((1/n) * indicator_x).  Restricting it along the ambient
    embedding recovers ``s`` exactly.
    """
    carrier = s.algebra.carrier
    if isinstance(carrier, Chang):
        raise InputError("the Chang algebra is not semisimple; extend its quotient")
    if isinstance(carrier, StandardUnit):
        ambient = core.divisible_ambient(s.algebra)
        mu = DiscreteMeasure(core.atoms_of(ambient), (ONE,))
        return measure_state(ambient, mu)
    scale, basis = core.scaled_atom_basis(s.algebra)
    weights = tuple(scale * eval_state(s, u) for u in basis)
    assert sum(weights) == ONE
    ambient = core.divisible_ambient(s.algebra)
    return measure_state(ambient, DiscreteMeasure(core.atoms_of(ambient), weights))


# ---------------------------------------------------------------------------
# Quotient by the null ideal
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StateQuotient:
    algebra: Algebra
    state: State
    project: Callable[[Element], Element]
    complete: bool  # the quotient is rho-complete iff its carrier is finite


def _identity_quotient(algebra: Algebra, s: State) -> StateQuotient:
    return StateQuotient(algebra, s, lambda a: a, core.is_finite(algebra))


def _restrict_measure_quotient(s: State, mu: DiscreteMeasure) -> StateQuotient:
    carrier = s.algebra.carrier
    keep = tuple(i for i, w in enumerate(mu.weights) if w != ZERO)
    if len(keep) == len(mu.atoms):
        return _identity_quotient(s.algebra, s)
    atoms = tuple(mu.atoms[i] for i in keep)
    target = core.function_algebra(atoms, carrier.value)
    restricted = DiscreteMeasure(atoms, tuple(mu.weights[i] for i in keep))

    def project(a: Element) -> Element:
        return Element(target, tuple(a.payload[i] for i in keep))

    return StateQuotient(
        target, measure_state(target, restricted), project, core.is_finite(target)
    )


def state_quotient(algebra: Algebra, s: State) -> StateQuotient:
    """Collapse pairs at pseudo-distance zero; the result is faithful.

    The original state factors through the projection exactly, and the
    projection is injective iff the state was already faithful.
    """
    if s.algebra != algebra:
        raise InputError("state does not live on the given algebra")
    rule = s.rule
    if isinstance(rule, MeasureRule):
        return _restrict_measure_quotient(s, rule.measure)
    if isinstance(rule, IdentityRule):
        return _identity_quotient(algebra, s)
    if isinstance(rule, FirstCoordinateRule):
        target = core.finite_chain(1)
        quotient_state = table_state(target, {ZERO: ZERO, ONE: ONE})

        def project(a: Element) -> Element:
            return Element(target, ZERO if a.payload.side == core.LOWER else ONE)

        return StateQuotient(target, quotient_state, project, True)

    # explicit table on a finite carrier: quotient by the null ideal
    null = frozenset(
        a.payload
        for a in core.enumerate_carrier(algebra)
        if eval_state(s, a) == ZERO
    )
    if null == frozenset({core.zero(algebra).payload}):
        return _identity_quotient(algebra, s)
    result = spectra.quotient(algebra, spectra.ideal(algebra, null))
    values: dict[core.Payload, Fraction] = {}
    for a in core.enumerate_carrier(algebra):
        image = result.project(a)
        value = eval_state(s, a)
        if values.setdefault(image.payload, value) != value:
            raise AssertionError("state does not factor through the null ideal")
    quotient_state = table_state(result.algebra, values)
    return StateQuotient(result.algebra, quotient_state, result.project, True)


# ---------------------------------------------------------------------------
# Stabilizing sequences
# ---------------------------------------------------------------------------


def sequence_limit(s: State, seq: list[Element]) -> Optional[Element]:
    """The stable tail value of a sequence, or ``None``.

    A sequence stabilizes when its last two or more entries sit at
    pseudo-distance zero from each other; the first entry of that tail
    is returned.  Anything else (including a single-entry list, which
    shows no repetition) yields ``None``.
    """
    if len(seq) < 2:
        return None
    for a in seq:
        if a.algebra != s.algebra:
            raise InputError("sequence entries must live on the state's algebra")
    anchor = seq[-1]
    start = len(seq) - 1
    while start > 0 and rho(s, seq[start - 1], anchor) == ZERO:
        start -= 1
    if start > len(seq) - 2:
        return None
    return seq[start]
