"""The batch document format: named algebras, elements, measures, states,
moment sequences, and bilinear-map specifications.

One JSON-shaped structure serves every command.  Rational literals are
``p`` or ``p/q`` strings (decimals are rejected), every reference is
resolved at load time, and serialization is canonical so that a parsed
document survives a round trip byte-for-byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from . import core, states
from .axioms import TableAlgebra
from .core import Algebra, Chang, ChangPair, Element, FiniteChain, FunctionAlgebra, StandardUnit
from .errors import InputError
from .rationals import format_rational, parse_unit
from .states import DiscreteMeasure, State

FORMAT_VERSION = "1"

AlgebraLike = Union[Algebra, TableAlgebra]


@dataclass(frozen=True)
class BilinearSpec:
    """Declarative bilinear map; commands resolve it against live states."""

    kind: str  # "beta" | "state-product" | "left-scaling" | "table"
    left: str
    right: str
    codomain: Optional[str] = None
    bound: Optional[int] = None
    entries: tuple[tuple[tuple[core.Payload, core.Payload], core.Payload], ...] = ()


@dataclass(frozen=True)
class Document:
    version: str
    algebras: dict[str, AlgebraLike] = field(default_factory=dict)
    elements: dict[str, Element] = field(default_factory=dict)
    measures: dict[str, DiscreteMeasure] = field(default_factory=dict)
    states: dict[str, State] = field(default_factory=dict)
    moments: dict[str, tuple[Fraction, ...]] = field(default_factory=dict)
    bilinear: dict[str, BilinearSpec] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Element text: the payload grammar used by table keys and witnesses
# ---------------------------------------------------------------------------


def parse_element_text(algebra: Algebra, text: str) -> Element:
    carrier = algebra.carrier
    if isinstance(carrier, FunctionAlgebra):
        if not (text.startswith("(") and text.endswith(")")):
            raise InputError(f"function elements look like (p/q,...), got {text!r}")
        parts = text[1:-1].split(",")
        return core.element(algebra, [parse_unit(p) for p in parts])
    if isinstance(carrier, Chang):
        for side in (core.LOWER, core.UPPER):
            if text.startswith(side + "(") and text.endswith(")"):
                return Element(algebra, ChangPair(side, int(text[len(side) + 1 : -1])))
        raise InputError(f"Chang elements look like lower(k)/upper(k), got {text!r}")
    return core.element(algebra, parse_unit(text))


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise InputError(f"{where}: missing field {key!r}")
    return mapping[key]


def _parse_value_carrier(raw, where: str):
    if raw in (None, "standard"):
        return StandardUnit()
    if isinstance(raw, int):
        return FiniteChain(raw)
    raise InputError(f"{where}: value carrier must be 'standard' or a chain size")


def _parse_algebra(name: str, raw: dict) -> AlgebraLike:
    where = f"algebras.{name}"
    kind = _require(raw, "kind", where)
    if kind == "standard":
        return Algebra(
            StandardUnit(),
            internal_product=raw.get("product", True),
            scalar_action=raw.get("scalars", True),
        )
    if kind == "chain":
        n = _require(raw, "n", where)
        carrier = FiniteChain(n)
        return Algebra(carrier, internal_product=raw.get("product", n == 1))
    if kind == "function":
        atoms = tuple(_require(raw, "atoms", where))
        value = _parse_value_carrier(raw.get("value"), where)
        return core.function_algebra(
            atoms,
            value,
            internal_product=raw.get("product"),
            scalar_action=raw.get("scalars"),
        )
    if kind == "chang":
        return core.chang()
    if kind == "table":
        names = tuple(_require(raw, "elements", where))
        index = {n: i for i, n in enumerate(names)}

        def resolve(entry: str) -> int:
            if entry not in index:
                raise InputError(f"{where}: unknown element {entry!r}")
            return index[entry]

        oplus = tuple(
            tuple(resolve(v) for v in row) for row in _require(raw, "oplus", where)
        )
        neg = tuple(resolve(v) for v in _require(raw, "neg", where))
        prod = raw.get("prod")
        if prod is not None:
            prod = tuple(tuple(resolve(v) for v in row) for row in prod)
        return TableAlgebra(
            names, oplus, neg, zero=resolve(raw.get("zero", names[0])), prod_table=prod
        )
    raise InputError(f"{where}: unknown kind {kind!r}")


def _parse_element(name: str, raw: dict, algebras: dict) -> Element:
    where = f"elements.{name}"
    algebra = _resolve_algebra(_require(raw, "algebra", where), algebras, where)
    carrier = algebra.carrier
    if isinstance(carrier, Chang):
        return Element(
            algebra, ChangPair(_require(raw, "side", where), _require(raw, "k", where))
        )
    if isinstance(carrier, FunctionAlgebra):
        values = [parse_unit(v) for v in _require(raw, "values", where)]
        return core.element(algebra, values)
    return core.element(algebra, parse_unit(_require(raw, "value", where)))


def _resolve_algebra(name: str, algebras: dict, where: str) -> Algebra:
    if name not in algebras:
        raise InputError(f"{where}: unknown algebra {name!r}")
    algebra = algebras[name]
    if isinstance(algebra, TableAlgebra):
        raise InputError(f"{where}: table algebras only support axiom checks")
    return algebra


def _parse_measure(name: str, raw: dict) -> DiscreteMeasure:
    where = f"measures.{name}"
    atoms = tuple(_require(raw, "atoms", where))
    weights = tuple(parse_unit(w) for w in _require(raw, "weights", where))
    return DiscreteMeasure(atoms, weights)


def _parse_state(name: str, raw: dict, algebras: dict, measures: dict) -> State:
    where = f"states.{name}"
    algebra = _resolve_algebra(_require(raw, "algebra", where), algebras, where)
    rule = _require(raw, "rule", where)
    if rule == "measure":
        measure_name = _require(raw, "measure", where)
        if measure_name not in measures:
            raise InputError(f"{where}: unknown measure {measure_name!r}")
        return states.measure_state(algebra, measures[measure_name])
    if rule == "identity":
        return states.identity_state(algebra)
    if rule == "first-coordinate":
        return states.chang_state(algebra)
    if rule == "table":
        table = {
            parse_element_text(algebra, key).payload: parse_unit(value)
            for key, value in _require(raw, "values", where).items()
        }
        return states.table_state(algebra, table)
    raise InputError(f"{where}: unknown rule {rule!r}")


def _parse_bilinear(name: str, raw: dict, doc_states: dict, algebras: dict) -> BilinearSpec:
    where = f"bilinear.{name}"
    kind = _require(raw, "kind", where)
    left = _require(raw, "left", where)
    right = _require(raw, "right", where)
    for ref in (left, right):
        if ref not in doc_states:
            raise InputError(f"{where}: unknown state {ref!r}")
    if kind in ("beta", "state-product", "left-scaling"):
        return BilinearSpec(kind, left, right)
    if kind == "table":
        codomain = _require(raw, "codomain", where)
        if codomain not in doc_states:
            raise InputError(f"{where}: unknown state {codomain!r}")
        left_algebra = doc_states[left].algebra
        right_algebra = doc_states[right].algebra
        cod_algebra = doc_states[codomain].algebra
        entries = []
        for key, value in _require(raw, "entries", where).items():
            try:
                a_text, b_text = key.split(";")
            except ValueError:
                raise InputError(f"{where}: entry keys look like '<a>;<b>'") from None
            entries.append(
                (
                    (
                        parse_element_text(left_algebra, a_text).payload,
                        parse_element_text(right_algebra, b_text).payload,
                    ),
                    parse_element_text(cod_algebra, value).payload,
                )
            )
        return BilinearSpec(
            kind, left, right, codomain, raw.get("bound"), tuple(sorted(entries, key=repr))
        )
    raise InputError(f"{where}: unknown kind {kind!r}")


def parse_document(raw: dict) -> Document:
    if not isinstance(raw, dict):
        raise InputError("document must be a mapping")
    version = raw.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise InputError(f"unsupported format version {version!r}")
    known = {"version", "algebras", "elements", "measures", "states", "moments", "bilinear"}
    for key in raw:
        if key not in known:
            raise InputError(f"unknown document section {key!r}")
    algebras = {
        name: _parse_algebra(name, spec)
        for name, spec in raw.get("algebras", {}).items()
    }
    measures = {
        name: _parse_measure(name, spec)
        for name, spec in raw.get("measures", {}).items()
    }
    elements = {
        name: _parse_element(name, spec, algebras)
        for name, spec in raw.get("elements", {}).items()
    }
    doc_states = {
        name: _parse_state(name, spec, algebras, measures)
        for name, spec in raw.get("states", {}).items()
    }
    moments = {
        name: tuple(parse_unit(v) for v in values)
        for name, values in raw.get("moments", {}).items()
    }
    bilinear = {
        name: _parse_bilinear(name, spec, doc_states, algebras)
        for name, spec in raw.get("bilinear", {}).items()
    }
    return Document(version, algebras, elements, measures, doc_states, moments, bilinear)


# ---------------------------------------------------------------------------
# Canonical serialization
# ---------------------------------------------------------------------------


def _serialize_value_carrier(carrier) -> Union[str, int]:
    return "standard" if isinstance(carrier, StandardUnit) else carrier.n


def serialize_algebra(algebra: AlgebraLike) -> dict:
    if isinstance(algebra, TableAlgebra):
        spec = {
            "kind": "table",
            "elements": list(algebra.names),
            "zero": algebra.names[algebra.zero],
            "oplus": [[algebra.names[v] for v in row] for row in algebra.oplus_table],
            "neg": [algebra.names[v] for v in algebra.neg_table],
        }
        if algebra.prod_table is not None:
            spec["prod"] = [[algebra.names[v] for v in row] for row in algebra.prod_table]
        return spec
    carrier = algebra.carrier
    if isinstance(carrier, StandardUnit):
        return {
            "kind": "standard",
            "product": algebra.internal_product,
            "scalars": algebra.scalar_action,
        }
    if isinstance(carrier, FiniteChain):
        return {"kind": "chain", "n": carrier.n, "product": algebra.internal_product}
    if isinstance(carrier, FunctionAlgebra):
        return {
            "kind": "function",
            "atoms": list(carrier.atoms),
            "value": _serialize_value_carrier(carrier.value),
            "product": algebra.internal_product,
            "scalars": algebra.scalar_action,
        }
    return {"kind": "chang"}


def _serialize_element(e: Element, algebras: dict) -> dict:
    name = _algebra_name(e.algebra, algebras)
    if isinstance(e.payload, ChangPair):
        return {"algebra": name, "side": e.payload.side, "k": e.payload.k}
    if isinstance(e.payload, tuple):
        return {"algebra": name, "values": [format_rational(v) for v in e.payload]}
    return {"algebra": name, "value": format_rational(e.payload)}


def _algebra_name(algebra: Algebra, algebras: dict) -> str:
    for name, candidate in algebras.items():
        if candidate == algebra:
            return name
    raise InputError("element refers to an algebra missing from the document")


def _state_name(state: State, doc: Document) -> str:
    for name, candidate in doc.states.items():
        if candidate == state:
            return name
    raise InputError("bilinear spec refers to a state missing from the document")


def _serialize_state(s: State, doc: Document) -> dict:
    name = _algebra_name(s.algebra, doc.algebras)
    rule = s.rule
    if isinstance(rule, states.MeasureRule):
        for measure_name, candidate in doc.measures.items():
            if candidate == rule.measure:
                return {"algebra": name, "rule": "measure", "measure": measure_name}
        raise InputError("state refers to a measure missing from the document")
    if isinstance(rule, states.IdentityRule):
        return {"algebra": name, "rule": "identity"}
    if isinstance(rule, states.FirstCoordinateRule):
        return {"algebra": name, "rule": "first-coordinate"}
    values = {
        core.format_element(Element(s.algebra, payload)): format_rational(v)
        for payload, v in rule.values
    }
    return {"algebra": name, "rule": "table", "values": values}


def _serialize_bilinear(spec: BilinearSpec, doc: Document) -> dict:
    raw: dict = {"kind": spec.kind, "left": spec.left, "right": spec.right}
    if spec.kind == "table":
        raw["codomain"] = spec.codomain
        raw["bound"] = spec.bound
        left_algebra = doc.states[spec.left].algebra
        right_algebra = doc.states[spec.right].algebra
        cod_algebra = doc.states[spec.codomain].algebra
        raw["entries"] = {
            ";".join(
                (
                    core.format_element(Element(left_algebra, pa)),
                    core.format_element(Element(right_algebra, pb)),
                )
            ): core.format_element(Element(cod_algebra, pc))
            for (pa, pb), pc in spec.entries
        }
    return raw


def serialize_document(doc: Document) -> dict:
    return {
        "version": doc.version,
        "algebras": {n: serialize_algebra(a) for n, a in doc.algebras.items()},
        "elements": {n: _serialize_element(e, doc.algebras) for n, e in doc.elements.items()},
        "measures": {
            n: {"atoms": list(m.atoms), "weights": [format_rational(w) for w in m.weights]}
            for n, m in doc.measures.items()
        },
        "states": {n: _serialize_state(s, doc) for n, s in doc.states.items()},
        "moments": {
            n: [format_rational(v) for v in values] for n, values in doc.moments.items()
        },
        "bilinear": {n: _serialize_bilinear(s, doc) for n, s in doc.bilinear.items()},
    }
