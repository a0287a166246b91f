"""Finite-difference moment analysis and power-mean inequality checks.

Everything here is exact: difference tables and reconstruction masses
are rational arithmetic, the feasibility search is a phase-one simplex
pivoting on fractions (Bland's rule, so it terminates), and fractional
powers are handled by outward rational enclosures rather than floats.
A comparison that cannot be decided at the requested enclosure width is
reported as inconclusive, never guessed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import core, representation, states
from .core import Element, FunctionAlgebra, StandardUnit
from .errors import InputError
from .rationals import ONE, ZERO, format_rational, parse_rational, require_unit
from .states import DiscreteMeasure, State

MAX_FIT_MOMENTS = 6  # highest moment index the feasibility search accepts
MAX_FIT_GRID = 64
DEFAULT_PRECISION = 64  # enclosure width 2**-64


# ---------------------------------------------------------------------------
# Moment sequences and difference tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentSequence:
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise InputError("a moment sequence needs at least one entry")
        for v in self.values:
            require_unit(v)

    @property
    def order(self) -> int:
        return len(self.values) - 1


def moment_sequence(raw: Sequence) -> MomentSequence:
    values = []
    for v in raw:
        if isinstance(v, str):
            v = parse_rational(v)
        elif isinstance(v, int):
            v = Fraction(v)
        values.append(v)
    return MomentSequence(tuple(values))


@dataclass(frozen=True)
class DeltaTable:
    """The full forward-difference triangle of a moment sequence."""

    rows: tuple[tuple[Fraction, ...], ...]  # rows[r][k] for r + k <= order

    def entry(self, r: int, k: int) -> Fraction:
        return self.rows[r][k]


def delta_table(m: MomentSequence) -> DeltaTable:
    rows = [tuple(m.values)]
    while len(rows[-1]) > 1:
        prev = rows[-1]
        rows.append(tuple(prev[k + 1] - prev[k] for k in range(len(prev) - 1)))
    return DeltaTable(tuple(rows))


def binomial_delta(m: MomentSequence, r: int, k: int) -> Fraction:
    """(-1)^r times the r-th difference at k, via the binomial expansion.

    Kept separate from the recursive table so the two can cross-check.
    """
    return sum(
        (
            Fraction(math.comb(r, h)) * (-1) ** h * m.values[k + h]
            for h in range(r + 1)
        ),
        ZERO,
    )


@dataclass(frozen=True)
class HausdorffReport:
    ok: bool
    reason: Optional[str] = None  # "m0" or "sign"
    position: Optional[tuple[int, int]] = None


def check_hausdorff(m: MomentSequence) -> HausdorffReport:
    """Decide complete monotonicity: m0 = 1 and (-1)^r * delta >= 0.

    Failures report the lexicographically first offending (r, k).
    """
    if m.values[0] != ONE:
        return HausdorffReport(False, "m0", None)
    table = delta_table(m)
    for r in range(m.order + 1):
        sign = 1 if r % 2 == 0 else -1
        for k in range(m.order - r + 1):
            if sign * table.entry(r, k) < 0:
                return HausdorffReport(False, "sign", (r, k))
    return HausdorffReport(True)


# ---------------------------------------------------------------------------
# Measures on rational grids
# ---------------------------------------------------------------------------


def grid_measure(points: Sequence[Fraction], weights: Sequence[Fraction]) -> DiscreteMeasure:
    """A measure whose atom names are the rational grid points."""
    for p in points:
        require_unit(p)
    return states.measure([format_rational(p) for p in points], weights)


def grid_points(mu: DiscreteMeasure) -> tuple[Fraction, ...]:
    points = tuple(parse_rational(atom) for atom in mu.atoms)
    for p in points:
        require_unit(p)
    return points


def moments_of_measure(mu: DiscreteMeasure, order: int) -> MomentSequence:
    """Power moments of a grid measure, exactly."""
    if order < 0:
        raise InputError("order must be nonnegative")
    points = grid_points(mu)
    values = tuple(
        sum((p**k * w for p, w in zip(points, mu.weights)), ZERO)
        for k in range(order + 1)
    )
    return MomentSequence(values)


def hausdorff_reconstruct(m: MomentSequence, grid: int) -> DiscreteMeasure:
    """Binomial reconstruction of a measure on {0, 1/N, ..., 1}.

    Masses are binom(N, j) * (-1)^(N-j) * delta^(N-j) m_j; under the
    moment condition they are nonnegative and sum to one exactly, and
    the zeroth and first moments of the result match the input exactly.
    """
    report = check_hausdorff(m)
    if not report.ok:
        raise InputError("sequence fails the moment condition")
    if grid < 1:
        raise InputError("grid size must be at least 1")
    if grid + 1 > len(m.values):
        raise InputError(f"grid {grid} needs at least {grid + 1} moments")
    table = delta_table(m)
    masses = tuple(
        Fraction(math.comb(grid, j)) * (-1) ** (grid - j) * table.entry(grid - j, j)
        for j in range(grid + 1)
    )
    assert all(w >= 0 for w in masses) and sum(masses) == ONE
    return grid_measure([Fraction(j, grid) for j in range(grid + 1)], masses)


# ---------------------------------------------------------------------------
# Exact feasibility search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    feasible: bool
    measure: Optional[DiscreteMeasure]
    certificate: Optional[tuple[Fraction, ...]]  # Farkas row multipliers


def _phase_one(matrix: list[list[Fraction]], rhs: list[Fraction]):
    """Minimize the artificial total for A w = b, w >= 0 (all b >= 0).

    Returns ``(solution, None)`` on feasibility or ``(None, y)`` with a
    verified Farkas certificate: y.A <= 0 componentwise and y.b > 0.
    """
    rows, cols = len(matrix), len(matrix[0])
    tableau = [matrix[i] + [ONE if j == i else ZERO for j in range(rows)] + [rhs[i]]
               for i in range(rows)]
    basis = list(range(cols, cols + rows))
    # phase-one costs: 0 on structurals, 1 on artificials, priced out
    obj = [ZERO] * cols + [ONE] * rows + [ZERO]
    for i in range(rows):
        obj = [o - t for o, t in zip(obj, tableau[i])]

    while True:
        entering = next((j for j in range(cols + rows) if obj[j] < 0), None)
        if entering is None:
            break
        best_ratio, leaving = None, None
        for i in range(rows):
            coeff = tableau[i][entering]
            if coeff > 0:
                ratio = tableau[i][-1] / coeff
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leaving])
                ):
                    best_ratio, leaving = ratio, i
        if leaving is None:
            raise AssertionError("phase one is bounded below by zero")
        pivot = tableau[leaving][entering]
        tableau[leaving] = [v / pivot for v in tableau[leaving]]
        for i in range(rows):
            if i != leaving and tableau[i][entering] != 0:
                factor = tableau[i][entering]
                tableau[i] = [v - factor * p for v, p in zip(tableau[i], tableau[leaving])]
        if obj[entering] != 0:
            factor = obj[entering]
            obj = [v - factor * p for v, p in zip(obj, tableau[leaving])]
        basis[leaving] = entering

    optimum = -obj[-1]
    if optimum == 0:
        solution = [ZERO] * cols
        for i, var in enumerate(basis):
            if var < cols:
                solution[var] = tableau[i][-1]
        return solution, None
    yvec = tuple(ONE - obj[cols + i] for i in range(rows))
    assert sum((y * b for y, b in zip(yvec, rhs)), ZERO) > 0
    for j in range(cols):
        dot = sum((yvec[i] * matrix[i][j] for i in range(rows)), ZERO)
        assert dot <= 0
    return None, yvec


def moment_fit_lp(m: MomentSequence, grid: int) -> FitResult:
    """Search a grid measure with the given moments, or certify none exists.

    Equality constraints: total mass one plus one row per moment index.
    Solved by exact rational pivoting; no floating point anywhere.
    """
    if m.order > MAX_FIT_MOMENTS:
        raise InputError(f"at most {MAX_FIT_MOMENTS + 1} moments are supported")
    if not 1 <= grid <= MAX_FIT_GRID:
        raise InputError(f"grid size must be between 1 and {MAX_FIT_GRID}")
    points = [Fraction(j, grid) for j in range(grid + 1)]
    matrix = [[ONE] * len(points)]
    rhs = [ONE]
    for k in range(m.order + 1):
        matrix.append([p**k for p in points])
        rhs.append(m.values[k])
    solution, certificate = _phase_one(matrix, rhs)
    if solution is None:
        return FitResult(False, None, certificate)
    mu = grid_measure(points, solution)
    assert moments_of_measure(mu, m.order).values == m.values
    return FitResult(True, mu, None)


# ---------------------------------------------------------------------------
# Outward rational enclosures for fractional powers
# ---------------------------------------------------------------------------


def _root_bounds(y: Fraction, n: int, bits: int) -> tuple[Fraction, Fraction]:
    # dyadic bisection for the n-th root of y in [0, 1]
    if y in (ZERO, ONE):
        return y, y
    lo, hi = ZERO, ONE
    for _ in range(bits):
        mid = (lo + hi) / 2
        if mid**n <= y:
            lo = mid
        else:
            hi = mid
    return lo, hi


def pow_bounds(x: Fraction, exponent: Fraction, bits: int = DEFAULT_PRECISION):
    """Enclose x**exponent for x in [0, 1], exponent >= 0, outward-rounded."""
    require_unit(x)
    if exponent < 0:
        raise InputError("exponent must be nonnegative")
    if exponent.denominator == 1:
        exact = x ** int(exponent)
        return exact, exact
    powered = x**exponent.numerator
    return _root_bounds(powered, exponent.denominator, bits)


def _interval_mul(a: tuple[Fraction, Fraction], b: tuple[Fraction, Fraction]):
    return a[0] * b[0], a[1] * b[1]  # all quantities nonnegative here


def _interval_pow(iv: tuple[Fraction, Fraction], exponent: Fraction, bits: int):
    lo, _ = pow_bounds(iv[0], exponent, bits)
    _, hi = pow_bounds(min(iv[1], ONE), exponent, bits)
    return lo, hi


# ---------------------------------------------------------------------------
# The power-mean inequality check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HolderReport:
    verdict: str  # "pass" | "fail" | "inconclusive"
    mode: str  # "exact" | "interval"
    lhs: Fraction
    rhs_low: Fraction
    rhs_high: Fraction


def _pointwise_data(s: State, a: Element):
    carrier = s.algebra.carrier
    if isinstance(carrier, FunctionAlgebra):
        return list(a.payload), list(representation.kroupa_panti(s).weights)
    if isinstance(carrier, StandardUnit):
        return [a.payload], [ONE]
    raise InputError("pointwise evaluation needs a function algebra carrier")


def _power_state_bounds(s: State, a: Element, exponent: Fraction, bits: int):
    if exponent.denominator == 1:
        power = a
        for _ in range(int(exponent) - 1):
            power = core.prod(power, a)
        exact = states.eval_state(s, power)
        return exact, exact
    values, weights = _pointwise_data(s, a)
    lo = hi = ZERO
    for v, w in zip(values, weights):
        b_lo, b_hi = pow_bounds(v, exponent, bits)
        lo += w * b_lo
        hi += w * b_hi
    return lo, hi


def holder_check(
    s: State,
    a: Element,
    b: Element,
    p: Fraction,
    q: Fraction,
    precision: int = DEFAULT_PRECISION,
) -> HolderReport:
    """Check s(a.b) <= s(a^p)^(1/p) * s(b^q)^(1/q).

    The conjugate pair must satisfy 1/p + 1/q = 1 exactly.  With
    p = q = 2 both sides are squared and compared in rationals; any
    other pair goes through outward enclosures of the fractional powers
    and may come back inconclusive at the requested precision, which is
    the honest answer when the enclosures overlap.
    """
    if a.algebra != s.algebra or b.algebra != s.algebra:
        raise InputError("elements must live on the state's algebra")
    if not s.algebra.internal_product:
        raise InputError("the inequality needs an internal product")
    p, q = Fraction(p), Fraction(q)
    if p < 1 or q < 1 or Fraction(1, 1) / p + Fraction(1, 1) / q != ONE:
        raise InputError("exponents must be conjugate: 1/p + 1/q = 1 with p, q >= 1")

    lhs = states.eval_state(s, core.prod(a, b))
    if p == 2 and q == 2:
        sa = states.eval_state(s, core.prod(a, a))
        sb = states.eval_state(s, core.prod(b, b))
        verdict = "pass" if lhs * lhs <= sa * sb else "fail"
        return HolderReport(verdict, "exact", lhs, sa * sb, sa * sb)

    sa_iv = _power_state_bounds(s, a, p, precision)
    sb_iv = _power_state_bounds(s, b, q, precision)
    rhs = _interval_mul(
        _interval_pow(sa_iv, 1 / p, precision), _interval_pow(sb_iv, 1 / q, precision)
    )
    if lhs <= rhs[0]:
        verdict = "pass"
    elif lhs > rhs[1]:
        verdict = "fail"
    else:
        verdict = "inconclusive"
    return HolderReport(verdict, "interval", lhs, rhs[0], rhs[1])
