"""Synchronic and diachronic relations between messages.

A relation spec names the message-type pairs it may connect and a
quantifier-free constraint over the pair's slot fillers. Applying the specs
to a message list is a pair filter: a relation instance is emitted for an
ordered pair (a, b) when the pair is admissible for the relation's axis and
the constraint holds.

Admissibility fixes edge direction and guarantees the resulting graph is
acyclic: synchronic edges connect different sources at equal reference time,
oriented by lexicographic source order; diachronic edges connect one source
across strictly increasing reference time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .domain import Message, MessageTypeSpec, Ontology, SpecError, subsumes

SYNCHRONIC = "synchronic"
DIACHRONIC = "diachronic"

_CONNECTIVES = {"and", "or", "not"}
_ATOMS = {"eq", "neq", "isa", "true"}


@dataclass(frozen=True)
class SlotRef:
    """Reference to a slot of the pair: side "a" (first) or "b" (second)."""

    side: str
    slot: str


@dataclass(frozen=True)
class ConstraintExpr:
    """Constraint tree node.

    ``op`` is one of: true; eq / neq (refs holds two slot references);
    isa (refs holds one reference, concept the required concept);
    and / or / not (children holds the operands).
    """

    op: str
    refs: tuple[SlotRef, ...] = ()
    concept: str | None = None
    children: tuple[ConstraintExpr, ...] = ()


TRUE = ConstraintExpr("true")


@dataclass(frozen=True)
class RelationSpec:
    """A named synchronic or diachronic relation over message-type pairs."""

    name: str
    rel_type: str
    pairs: frozenset[tuple[str, str]]
    constraint: ConstraintExpr


@dataclass(frozen=True)
class RelationInstance:
    """A materialized relation edge between two message ids."""

    spec: str
    rel_type: str
    from_id: str
    to_id: str


def _parse_ref(text: object, context: str) -> SlotRef:
    if not isinstance(text, str) or "." not in text:
        raise SpecError(f"{context}: slot reference must look like 'a.slot', got {text!r}")
    side, slot = text.split(".", 1)
    if side not in ("a", "b") or not slot:
        raise SpecError(f"{context}: slot reference must look like 'a.slot', got {text!r}")
    return SlotRef(side, slot)


def _check_ref(
    ref: SlotRef,
    pairs: frozenset[tuple[str, str]],
    specs: Mapping[str, MessageTypeSpec],
    context: str,
) -> None:
    index = 0 if ref.side == "a" else 1
    for pair in sorted(pairs):
        type_name = pair[index]
        if ref.slot not in specs[type_name].slot_names():
            raise SpecError(
                f"{context}: slot {ref.slot!r} absent from message type {type_name!r}"
            )


def compile_constraint(
    node: dict | None,
    pairs: frozenset[tuple[str, str]],
    specs: Mapping[str, MessageTypeSpec],
    ontology: Ontology,
    context: str = "constraint",
) -> ConstraintExpr:
    """Compile a nested {"op", "args"} tree, validating slots and concepts."""
    if node is None:
        return TRUE
    if not isinstance(node, dict) or not isinstance(node.get("op"), str):
        raise SpecError(f"{context}: malformed expression node: {node!r}")
    op = node["op"]
    args = node.get("args", [])
    if op not in _CONNECTIVES | _ATOMS:
        raise SpecError(f"{context}: unknown operator {op!r}")
    if op == "true":
        if args:
            raise SpecError(f"{context}: 'true' takes no arguments")
        return TRUE
    if op in ("eq", "neq"):
        if len(args) != 2:
            raise SpecError(f"{context}: {op!r} takes two slot references")
        refs = tuple(_parse_ref(a, context) for a in args)
        for ref in refs:
            _check_ref(ref, pairs, specs, context)
        return ConstraintExpr(op, refs=refs)
    if op == "isa":
        if len(args) != 2:
            raise SpecError(f"{context}: 'isa' takes a slot reference and a concept")
        ref = _parse_ref(args[0], context)
        _check_ref(ref, pairs, specs, context)
        concept = args[1]
        if not isinstance(concept, str) or not ontology.has_concept(concept):
            raise SpecError(f"{context}: unknown concept {concept!r}")
        return ConstraintExpr(op, refs=(ref,), concept=concept)
    # connectives
    if op == "not" and len(args) != 1:
        raise SpecError(f"{context}: 'not' takes exactly one operand")
    if op in ("and", "or") and not args:
        raise SpecError(f"{context}: {op!r} needs at least one operand")
    children = tuple(
        compile_constraint(a, pairs, specs, ontology, context) for a in args
    )
    return ConstraintExpr(op, children=children)


def compile_relation_spec(
    document: dict,
    specs: Mapping[str, MessageTypeSpec],
    ontology: Ontology,
) -> RelationSpec:
    """Compile one relation entry: {"name","type","pairs","constraint"?}."""
    name = document.get("name")
    if not isinstance(name, str) or not name:
        raise SpecError(f"relation spec needs a name: {document!r}")
    rel_type = document.get("type")
    if rel_type not in (SYNCHRONIC, DIACHRONIC):
        raise SpecError(
            f"relation {name!r}: type must be '{SYNCHRONIC}' or '{DIACHRONIC}', "
            f"got {rel_type!r}"
        )
    raw_pairs = document.get("pairs", [])
    if not raw_pairs:
        raise SpecError(f"relation {name!r}: needs at least one message-type pair")
    pairs: set[tuple[str, str]] = set()
    for pair in raw_pairs:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise SpecError(f"relation {name!r}: malformed pair {pair!r}")
        for type_name in pair:
            if type_name not in specs:
                raise SpecError(
                    f"relation {name!r}: unknown message type {type_name!r}"
                )
        pairs.add((pair[0], pair[1]))
    constraint = compile_constraint(
        document.get("constraint"), frozenset(pairs), specs, ontology,
        context=f"relation {name!r}",
    )
    return RelationSpec(name, rel_type, frozenset(pairs), constraint)


def load_relation_specs(
    documents: Sequence[dict],
    specs: Mapping[str, MessageTypeSpec],
    ontology: Ontology,
) -> tuple[RelationSpec, ...]:
    relations: list[RelationSpec] = []
    seen: set[str] = set()
    for document in documents:
        spec = compile_relation_spec(document, specs, ontology)
        if spec.name in seen:
            raise SpecError(f"duplicate relation name: {spec.name!r}")
        seen.add(spec.name)
        relations.append(spec)
    return tuple(relations)


def _slot_value(
    ref: SlotRef, a: Message, b: Message, specs: Mapping[str, MessageTypeSpec]
) -> str:
    message = a if ref.side == "a" else b
    return message.args[specs[message.type].slot_position(ref.slot)]


def eval_constraint(
    expr: ConstraintExpr,
    a: Message,
    b: Message,
    ontology: Ontology,
    specs: Mapping[str, MessageTypeSpec],
) -> bool:
    """Standard boolean semantics; eq/neq compare instance identifiers,
    isa checks the instance's concept against the required concept."""
    if expr.op == "true":
        return True
    if expr.op == "eq":
        return _slot_value(expr.refs[0], a, b, specs) == _slot_value(
            expr.refs[1], a, b, specs
        )
    if expr.op == "neq":
        return _slot_value(expr.refs[0], a, b, specs) != _slot_value(
            expr.refs[1], a, b, specs
        )
    if expr.op == "isa":
        instance = _slot_value(expr.refs[0], a, b, specs)
        return subsumes(ontology, expr.concept, ontology.concept_of(instance))
    if expr.op == "and":
        return all(eval_constraint(c, a, b, ontology, specs) for c in expr.children)
    if expr.op == "or":
        return any(eval_constraint(c, a, b, ontology, specs) for c in expr.children)
    if expr.op == "not":
        return not eval_constraint(expr.children[0], a, b, ontology, specs)
    raise SpecError(f"unknown operator {expr.op!r}")


def admissible(rel_type: str, a: Message, b: Message) -> bool:
    """Axis rule for an ordered pair: synchronic needs different sources at
    equal ref_time with sources in lexicographic order; diachronic needs one
    source with strictly increasing ref_time."""
    if rel_type == SYNCHRONIC:
        return a.source < b.source and a.ref_time == b.ref_time
    if rel_type == DIACHRONIC:
        return a.source == b.source and a.ref_time < b.ref_time
    raise SpecError(f"unknown relation type {rel_type!r}")


def apply_relations(
    messages: Sequence[Message],
    relation_specs: Sequence[RelationSpec],
    ontology: Ontology,
    specs: Mapping[str, MessageTypeSpec],
) -> list[RelationInstance]:
    """Materialize relation instances over every admissible ordered pair.

    Output is sorted by (spec name, from id, to id); each (spec, ordered
    pair) is considered once, so duplicates are impossible.
    """
    out: list[RelationInstance] = []
    for spec in relation_specs:
        for a in messages:
            for b in messages:
                if a.id == b.id:
                    continue
                if (a.type, b.type) not in spec.pairs:
                    continue
                if not admissible(spec.rel_type, a, b):
                    continue
                if eval_constraint(spec.constraint, a, b, ontology, specs):
                    out.append(RelationInstance(spec.name, spec.rel_type, a.id, b.id))
    out.sort(key=lambda r: (r.spec, r.from_id, r.to_id))
    return out
