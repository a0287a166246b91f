"""Product spaces, bilinear maps, and the universal factorization.

Two represented algebras are coupled through the product of their
measures: the pairing sends (f, g) to the pointwise product function on
atom pairs, and integrating a pairing against the product measure
factors into the product of the integrals, which is the independence
identity.  Bounded bilinear maps extend to the divisible hulls by
averaging, satisfy an exact Lipschitz bound, and factor uniquely
through the pairing by a linear map determined on atom indicators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Callable, Optional

from . import core, representation, states
from .core import Algebra, Element
from .errors import InputError, NoLimitError
from .rationals import ONE, ZERO, random_unit
from .representation import MeasureRepresentation
from .states import DiscreteMeasure, State

# ---------------------------------------------------------------------------
# Product spaces
# ---------------------------------------------------------------------------


def pair_atom(x: str, y: str) -> str:
    return f"({x},{y})"


@dataclass(frozen=True)
class ProductSpace:
    left: DiscreteMeasure
    right: DiscreteMeasure
    algebra: Algebra  # function algebra on the lexicographic atom pairs
    measure: DiscreteMeasure  # product weights
    state: State  # integration against the product weights


def product_space(mu_a: DiscreteMeasure, mu_b: DiscreteMeasure) -> ProductSpace:
    atoms = tuple(
        pair_atom(x, y) for x in mu_a.atoms for y in mu_b.atoms
    )
    weights = tuple(
        wx * wy for wx in mu_a.weights for wy in mu_b.weights
    )
    algebra = core.function_algebra(atoms)
    lam = DiscreteMeasure(atoms, weights)
    return ProductSpace(mu_a, mu_b, algebra, lam, states.measure_state(algebra, lam))


def marginals(space: ProductSpace) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """Recompute both marginals of the product measure from scratch."""
    nb = len(space.right.atoms)
    left = tuple(
        sum(space.measure.weights[i * nb : (i + 1) * nb], ZERO)
        for i in range(len(space.left.atoms))
    )
    right = tuple(
        sum((space.measure.weights[i * nb + j] for i in range(len(space.left.atoms))), ZERO)
        for j in range(nb)
    )
    return (
        DiscreteMeasure(space.left.atoms, left),
        DiscreteMeasure(space.right.atoms, right),
    )


def tensor(space: ProductSpace, f: Element, g: Element) -> Element:
    """The pairing (f, g) -> f(x) * g(y) on atom pairs."""
    if core.atoms_of(f.algebra) != space.left.atoms:
        raise InputError("left factor does not live on the left component space")
    if core.atoms_of(g.algebra) != space.right.atoms:
        raise InputError("right factor does not live on the right component space")
    values = tuple(vx * vy for vx in f.payload for vy in g.payload)
    return Element(space.algebra, values)


def space_of(rep_a: MeasureRepresentation, rep_b: MeasureRepresentation) -> ProductSpace:
    return product_space(rep_a.measure, rep_b.measure)


def beta(
    space: ProductSpace,
    rep_a: MeasureRepresentation,
    rep_b: MeasureRepresentation,
    a: Element,
    b: Element,
) -> Element:
    """Pair two source elements through their representations."""
    if space.left != rep_a.measure or space.right != rep_b.measure:
        raise InputError("product space was built from different representations")
    return tensor(
        space, representation.represent(rep_a, a), representation.represent(rep_b, b)
    )


# ---------------------------------------------------------------------------
# Bilinear maps with verified structure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BilinearMap:
    """A bilinear table on a pair of finite domains.

    ``bound`` is the claimed constant K of the state inequality
    s_C(gamma(a, b)) <= min(K * s_A(a) * s_B(b), 1).
    """

    left: State
    right: State
    codomain: State
    table: tuple[tuple[tuple[core.Payload, core.Payload], Element], ...]
    bound: Optional[int]


def _lookup(gamma: BilinearMap) -> dict:
    return dict(gamma.table)


def apply_bilinear(gamma: BilinearMap, a: Element, b: Element) -> Element:
    if a.algebra != gamma.left.algebra or b.algebra != gamma.right.algebra:
        raise InputError("arguments do not match the bilinear map's domains")
    return _lookup(gamma)[(a.payload, b.payload)]


def bilinear_map(
    left: State,
    right: State,
    codomain: State,
    fn: Callable[[Element, Element], Element],
    bound: Optional[int] = None,
    validate: bool = True,
) -> BilinearMap:
    """Materialize ``fn`` over the finite domains.

    With ``validate`` the linearity of both slots (on every defined
    partial sum) and the claimed bound are verified up front; fixtures
    that are meant to be broken pass ``validate=False`` and go through
    `check_bilinear` instead.
    """
    for s in (left, right):
        if not core.is_finite(s.algebra):
            raise InputError("bilinear tables need finite domains")
    table = tuple(
        ((a.payload, b.payload), fn(a, b))
        for a in core.enumerate_carrier(left.algebra)
        for b in core.enumerate_carrier(right.algebra)
    )
    for (_, _), value in table:
        if value.algebra != codomain.algebra:
            raise InputError("bilinear values must land in the codomain algebra")
    gamma = BilinearMap(left, right, codomain, table, bound)
    if validate:
        report = check_bilinear(gamma, bound=bound)
        if not report.passed:
            raise InputError(f"not bilinear: {report.witness}")
    return gamma


@dataclass(frozen=True)
class BilinearReport:
    passed: bool
    checks: int
    witness: Optional[tuple[str, ...]]


def check_bilinear(
    gamma: BilinearMap,
    bound: Optional[int] = None,
    bimorphism: bool = False,
) -> BilinearReport:
    """Verify slotwise linearity, optionally the bound and lattice laws."""
    lookup = _lookup(gamma)
    lefts = core.enumerate_carrier(gamma.left.algebra)
    rights = core.enumerate_carrier(gamma.right.algebra)
    checks = 0

    def value(a, b):
        return lookup[(a.payload, b.payload)]

    for a, a2 in itertools.product(lefts, repeat=2):
        if not core.leq(a, core.neg(a2)):
            continue
        for b in rights:
            checks += 1
            total = value(core.oplus(a, a2), b)
            parts = core.partial_add(value(a, b), value(a2, b))
            if parts is None or parts != total:
                return BilinearReport(
                    False,
                    checks,
                    (
                        "left-linearity",
                        core.format_element(a),
                        core.format_element(a2),
                        core.format_element(b),
                    ),
                )
    for b, b2 in itertools.product(rights, repeat=2):
        if not core.leq(b, core.neg(b2)):
            continue
        for a in lefts:
            checks += 1
            total = value(a, core.oplus(b, b2))
            parts = core.partial_add(value(a, b), value(a, b2))
            if parts is None or parts != total:
                return BilinearReport(
                    False,
                    checks,
                    (
                        "right-linearity",
                        core.format_element(a),
                        core.format_element(b),
                        core.format_element(b2),
                    ),
                )
    if bound is not None:
        if bound < 1:
            return BilinearReport(False, checks, ("bound", str(bound)))
        for a in lefts:
            sa = states.eval_state(gamma.left, a)
            for b in rights:
                checks += 1
                level = states.eval_state(
                    gamma.codomain, value(a, b)
                )
                cap = min(bound * sa * states.eval_state(gamma.right, b), ONE)
                if level > cap:
                    return BilinearReport(
                        False,
                        checks,
                        ("bound", core.format_element(a), core.format_element(b)),
                    )
    if bimorphism:
        for a, a2 in itertools.product(lefts, repeat=2):
            for b in rights:
                checks += 1
                if value(core.join(a, a2), b) != core.join(value(a, b), value(a2, b)):
                    return BilinearReport(
                        False, checks,
                        ("left-join", core.format_element(a), core.format_element(a2),
                         core.format_element(b)),
                    )
                if value(core.meet(a, a2), b) != core.meet(value(a, b), value(a2, b)):
                    return BilinearReport(
                        False, checks,
                        ("left-meet", core.format_element(a), core.format_element(a2),
                         core.format_element(b)),
                    )
        for b, b2 in itertools.product(rights, repeat=2):
            for a in lefts:
                checks += 1
                if value(a, core.join(b, b2)) != core.join(value(a, b), value(a, b2)):
                    return BilinearReport(
                        False, checks,
                        ("right-join", core.format_element(a), core.format_element(b),
                         core.format_element(b2)),
                    )
                if value(a, core.meet(b, b2)) != core.meet(value(a, b), value(a, b2)):
                    return BilinearReport(
                        False, checks,
                        ("right-meet", core.format_element(a), core.format_element(b),
                         core.format_element(b2)),
                    )
    return BilinearReport(True, checks, None)


# ---------------------------------------------------------------------------
# Built-in bilinear maps
# ---------------------------------------------------------------------------


def beta_bilinear(
    space: ProductSpace,
    rep_a: MeasureRepresentation,
    rep_b: MeasureRepresentation,
) -> BilinearMap:
    """The pairing itself, as a bilinear map into the product algebra."""
    return bilinear_map(
        rep_a.state,
        rep_b.state,
        space.state,
        lambda a, b: beta(space, rep_a, rep_b, a, b),
        bound=1,
    )


def state_product_bilinear(left: State, right: State) -> BilinearMap:
    """(a, b) -> the constant s_A(a) * s_B(b) on a one-atom algebra."""
    target = core.function_algebra(("pt",))
    cod = states.measure_state(target, DiscreteMeasure(("pt",), (ONE,)))
    return bilinear_map(
        left,
        right,
        cod,
        lambda a, b: Element(
            target, (states.eval_state(left, a) * states.eval_state(right, b),)
        ),
        bound=1,
    )


def left_scaling_bilinear(rep_a: MeasureRepresentation, right: State) -> BilinearMap:
    """(a, b) -> s_B(b) scaled copy of the represented left element."""
    cod = states.measure_state(rep_a.target, rep_a.measure)
    return bilinear_map(
        rep_a.state,
        right,
        cod,
        lambda a, b: core.scalar_mul(
            states.eval_state(right, b), representation.represent(rep_a, a)
        ),
        bound=1,
    )


# ---------------------------------------------------------------------------
# Linear maps and divisible extensions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearMap:
    domain: Algebra
    codomain: Algebra
    table: tuple[tuple[core.Payload, Element], ...]


def apply_linear(sigma: LinearMap, a: Element) -> Element:
    if a.algebra != sigma.domain:
        raise InputError("argument does not match the linear map's domain")
    return dict(sigma.table)[a.payload]


def linear_map(
    domain: Algebra,
    codomain: Algebra,
    fn: Callable[[Element], Element],
    validate: bool = True,
) -> LinearMap:
    if not core.is_finite(domain):
        raise InputError("linear tables need a finite domain")
    elements = core.enumerate_carrier(domain)
    table = tuple((a.payload, fn(a)) for a in elements)
    lookup = dict(table)
    if validate:
        for a in elements:
            for b in elements:
                if core.leq(a, core.neg(b)):
                    image = core.partial_add(lookup[a.payload], lookup[b.payload])
                    if image is None or image != lookup[core.oplus(a, b).payload]:
                        raise InputError(
                            "not linear at "
                            f"{core.format_element(a)} + {core.format_element(b)}"
                        )
    return LinearMap(domain, codomain, table)


@dataclass(frozen=True)
class HullLinearMap:
    """The unique rational-linear extension of a linear map to the hulls.

    ``columns[x]`` is n times the ambient image of the map at the scaled
    atom base, so applying the extension is one rational combination:
    every hull element f decomposes as sum_x (n f(x)) * (1_x / n).
    """

    domain: Algebra
    codomain: Algebra
    columns: tuple[tuple[Fraction, ...], ...]


def extend_linear_divisible(sigma: LinearMap) -> HullLinearMap:
    scale, basis = core.scaled_atom_basis(sigma.domain)
    columns = tuple(
        tuple(scale * v for v in core.ambient_vector(apply_linear(sigma, u)))
        for u in basis
    )
    return HullLinearMap(
        core.divisible_ambient(sigma.domain),
        core.divisible_ambient(sigma.codomain),
        columns,
    )


def apply_hull_linear(ext: HullLinearMap, f: Element) -> Element:
    if f.algebra != ext.domain:
        raise InputError("argument does not live on the extension's domain")
    width = len(ext.columns[0])
    acc = [ZERO] * width
    for coefficient, column in zip(f.payload, ext.columns):
        for i in range(width):
            acc[i] += coefficient * column[i]
    assert all(v <= ONE for v in acc)
    return Element(ext.codomain, tuple(acc))


@dataclass(frozen=True)
class HullBilinearMap:
    """Divisible extension of a bounded bilinear map, on indicator grids.

    ``grid[x][y]`` is the ambient image of the map at the indicator
    pair; bilinearity makes the extension the double rational
    combination of those images, and it keeps the same bound.
    """

    left: Algebra
    right: Algebra
    codomain: Algebra
    grid: tuple[tuple[tuple[Fraction, ...], ...], ...]
    bound: int


def extend_bilinear_divisible(gamma: BilinearMap) -> HullBilinearMap:
    if gamma.bound is None:
        raise InputError("only bounded bilinear maps extend to the hulls")
    left_units = core.atom_indicator_elements(gamma.left.algebra)
    right_units = core.atom_indicator_elements(gamma.right.algebra)
    grid = tuple(
        tuple(
            core.ambient_vector(apply_bilinear(gamma, ex, ey))
            for ey in right_units
        )
        for ex in left_units
    )
    return HullBilinearMap(
        core.divisible_ambient(gamma.left.algebra),
        core.divisible_ambient(gamma.right.algebra),
        core.divisible_ambient(gamma.codomain.algebra),
        grid,
        gamma.bound,
    )


def apply_hull_bilinear(ext: HullBilinearMap, f: Element, g: Element) -> Element:
    if f.algebra != ext.left or g.algebra != ext.right:
        raise InputError("arguments do not live on the extension's domains")
    width = len(ext.grid[0][0])
    acc = [ZERO] * width
    for cf, row in zip(f.payload, ext.grid):
        if cf == ZERO:
            continue
        for cg, cell in zip(g.payload, row):
            if cg == ZERO:
                continue
            scale = cf * cg
            for i in range(width):
                acc[i] += scale * cell[i]
    assert all(v <= ONE for v in acc)
    return Element(ext.codomain, tuple(acc))


# ---------------------------------------------------------------------------
# Lipschitz continuity of bounded bilinear maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LipschitzReport:
    passed: bool
    checks: int
    witness: Optional[tuple[str, ...]]


def lipschitz_check(gamma: BilinearMap, samples: int, seed: int) -> LipschitzReport:
    """Exactly verify the continuity estimate on sampled quadruples.

    The codomain pseudo-distance of a pair of values is bounded by the
    truncated K-multiple of the truncated sum of the argument
    pseudo-distances.
    """
    if gamma.bound is None:
        raise InputError("the Lipschitz estimate needs a bound")
    rng = Random(seed)
    lefts = core.enumerate_carrier(gamma.left.algebra)
    rights = core.enumerate_carrier(gamma.right.algebra)
    checks = 0
    for _ in range(samples):
        a, a2 = rng.choice(lefts), rng.choice(lefts)
        b, b2 = rng.choice(rights), rng.choice(rights)
        checks += 1
        lhs = states.rho(
            gamma.codomain,
            apply_bilinear(gamma, a, b),
            apply_bilinear(gamma, a2, b2),
        )
        inner = min(
            states.rho(gamma.left, a, a2) + states.rho(gamma.right, b, b2), ONE
        )
        rhs = min(gamma.bound * inner, ONE)
        if lhs > rhs:
            return LipschitzReport(
                False,
                checks,
                tuple(
                    core.format_element(e) for e in (a, a2, b, b2)
                ),
            )
    return LipschitzReport(True, checks, None)


# ---------------------------------------------------------------------------
# Factorization through the product space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AtomLinearMap:
    """A linear map off the product algebra, determined on atom indicators."""

    domain: Algebra
    codomain: Algebra
    images: tuple[tuple[Fraction, ...], ...]  # one vector per product atom


def apply_atom_linear(omega: AtomLinearMap, h: Element) -> Element:
    if h.algebra != omega.domain:
        raise InputError("argument does not live on the map's domain")
    width = len(omega.images[0])
    acc = [ZERO] * width
    for coefficient, image in zip(h.payload, omega.images):
        if coefficient == ZERO:
            continue
        for i in range(width):
            acc[i] += coefficient * image[i]
    assert all(v <= ONE for v in acc)
    return Element(omega.codomain, tuple(acc))


@dataclass(frozen=True)
class Factorization:
    omega: AtomLinearMap
    space: ProductSpace
    bound: int


def factorize(
    gamma: BilinearMap,
    space: ProductSpace,
    rep_a: MeasureRepresentation,
    rep_b: MeasureRepresentation,
    rep_c: MeasureRepresentation,
) -> Factorization:
    """Produce the linear map completing the pairing triangle.

    On the indicator of an atom pair the map must take the represented
    value of gamma at the indicator sources; rational linearity then
    determines it on the whole product algebra, and composing with the
    pairing recovers gamma exactly.
    """
    if gamma.bound is None:
        raise InputError("factorization needs a bounded map")
    for rep, s in ((rep_a, gamma.left), (rep_b, gamma.right), (rep_c, gamma.codomain)):
        if rep.state != s:
            raise InputError("representations must be built from the map's states")
        if not rep.injective:
            raise InputError("factorization needs faithful states")
    if space.left != rep_a.measure or space.right != rep_b.measure:
        raise InputError("product space was built from different representations")
    images = tuple(
        tuple(
            representation.represent(
                rep_c, apply_bilinear(gamma, ex, ey)
            ).payload
        )
        for ex in rep_a.atom_elements
        for ey in rep_b.atom_elements
    )
    omega = AtomLinearMap(space.algebra, rep_c.target, images)
    return Factorization(omega, space, gamma.bound)


@dataclass(frozen=True)
class FactorizationReport:
    passed: bool
    pairs_checked: int
    linearity_checks: int
    bound_checks: int
    uniqueness_checks: int
    witness: Optional[tuple[str, ...]]


def _random_product_element(rng: Random, algebra: Algebra) -> Element:
    return Element(
        algebra, tuple(random_unit(rng) for _ in core.atoms_of(algebra))
    )


def verify_factorization(
    fact: Factorization,
    gamma: BilinearMap,
    rep_a: MeasureRepresentation,
    rep_b: MeasureRepresentation,
    rep_c: MeasureRepresentation,
    samples: int = 200,
    seed: int = 0,
) -> FactorizationReport:
    """Certify the factorization: triangle, linearity, bound, uniqueness.

    Uniqueness is certified on the rational span: an independently
    constructed candidate (through the divisible extension of gamma,
    a different computation route) must agree on every atom indicator
    and then on sampled rational combinations.
    """
    omega, space = fact.omega, fact.space
    sc = states.measure_state(rep_c.target, rep_c.measure)

    pairs = 0
    for a in core.enumerate_carrier(gamma.left.algebra):
        for b in core.enumerate_carrier(gamma.right.algebra):
            pairs += 1
            through = apply_atom_linear(omega, beta(space, rep_a, rep_b, a, b))
            direct = representation.represent(rep_c, apply_bilinear(gamma, a, b))
            if through != direct:
                return FactorizationReport(
                    False, pairs, 0, 0, 0,
                    ("triangle", core.format_element(a), core.format_element(b)),
                )

    rng = Random(seed)
    linearity = bound_checks = 0
    for _ in range(samples):
        h = _random_product_element(rng, space.algebra)
        room = core.neg(h)
        h2 = Element(
            space.algebra,
            tuple(random_unit(rng) * v for v in room.payload),
        )
        linearity += 1
        total = apply_atom_linear(omega, core.oplus(h, h2))
        parts = core.partial_add(
            apply_atom_linear(omega, h), apply_atom_linear(omega, h2)
        )
        if parts is None or parts != total:
            return FactorizationReport(
                False, pairs, linearity, 0, 0,
                ("linearity", core.format_element(h), core.format_element(h2)),
            )
        bound_checks += 1
        level = states.eval_state(sc, apply_atom_linear(omega, h))
        cap = min(fact.bound * states.eval_state(space.state, h), ONE)
        if level > cap:
            return FactorizationReport(
                False, pairs, linearity, bound_checks, 0,
                ("bound", core.format_element(h)),
            )

    ext = extend_bilinear_divisible(gamma)
    alternate = tuple(
        tuple(
            apply_hull_bilinear(
                ext,
                core.indicator(ext.left, x),
                core.indicator(ext.right, y),
            ).payload[i]
            for i in rep_c.keep
        )
        for x in core.atoms_of(ext.left)
        for y in core.atoms_of(ext.right)
    )
    uniqueness = 0
    candidate = AtomLinearMap(omega.domain, omega.codomain, alternate)
    for i in range(len(omega.images)):
        uniqueness += 1
        if omega.images[i] != candidate.images[i]:
            return FactorizationReport(
                False, pairs, linearity, bound_checks, uniqueness,
                ("indicator-agreement", space.measure.atoms[i]),
            )
    for _ in range(samples):
        h = _random_product_element(rng, space.algebra)
        uniqueness += 1
        if apply_atom_linear(omega, h) != apply_atom_linear(candidate, h):
            return FactorizationReport(
                False, pairs, linearity, bound_checks, uniqueness,
                ("span-agreement", core.format_element(h)),
            )
    return FactorizationReport(True, pairs, linearity, bound_checks, uniqueness, None)


# ---------------------------------------------------------------------------
# Extension along stabilizing sequences
# ---------------------------------------------------------------------------


def extend_bilinear_stabilizing(
    gamma: BilinearMap, seq_a: list[Element], seq_b: list[Element]
) -> Element:
    """Value of the map on a pair of stabilizing sequences."""
    limit_a = states.sequence_limit(gamma.left, seq_a)
    limit_b = states.sequence_limit(gamma.right, seq_b)
    if limit_a is None or limit_b is None:
        raise NoLimitError("a sequence does not stabilize under its state metric")
    return apply_bilinear(gamma, limit_a, limit_b)
