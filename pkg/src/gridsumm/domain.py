"""Domain layer: ontology, message type specifications, and message validation.

The ontology is a single-parent concept forest plus a table of named
instances (surface identifier -> concept). Message types declare ordered
slots; each slot names the concept its filler must fall under. Everything
here is immutable after loading, so all operations are pure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping


class SpecError(Exception):
    """A specification document failed schema or consistency checks."""


class OntologyError(SpecError):
    """Ontology defect: parse failure, isa cycle, or dangling reference."""


@dataclass(frozen=True)
class Concept:
    """A named concept, optionally attached to a parent concept (isa link)."""

    name: str
    parent: str | None = None


@dataclass(frozen=True)
class Ontology:
    """Concept forest plus the instance table drawn on by message arguments."""

    concepts: dict[str, Concept]
    instances: dict[str, str]

    def has_concept(self, name: str) -> bool:
        return name in self.concepts

    def concept_of(self, instance: str) -> str:
        try:
            return self.instances[instance]
        except KeyError:
            raise OntologyError(f"unknown instance: {instance!r}") from None


@dataclass(frozen=True)
class MessageTypeSpec:
    """A message type: name plus ordered (slot name, required concept) pairs."""

    name: str
    slots: tuple[tuple[str, str], ...]

    def slot_names(self) -> tuple[str, ...]:
        return tuple(slot for slot, _ in self.slots)

    def slot_position(self, slot: str) -> int:
        for i, (name, _) in enumerate(self.slots):
            if name == slot:
                return i
        raise SpecError(f"message type {self.name!r} has no slot {slot!r}")

    def slot_concept(self, slot: str) -> str:
        return self.slots[self.slot_position(slot)][1]


@dataclass(frozen=True)
class Message:
    """A typed action with ontology-instance arguments and emission metadata.

    ``pub_time`` is when the originating document appeared, ``ref_time`` the
    time frame the content is about; both are nonnegative integers in
    corpus-defined units. ``token_length`` is the token count of the sentence
    the message was extracted from.
    """

    id: str
    type: str
    args: tuple[str, ...]
    source: str
    pub_time: int
    ref_time: int
    doc_id: str
    token_length: int


@dataclass(frozen=True)
class Violation:
    """One failed message check; ``slot`` is None for non-slot problems."""

    slot: str | None
    reason: str


@dataclass(frozen=True)
class MessageValidation:
    ok: bool
    violations: tuple[Violation, ...] = ()


def _as_document(document: str | dict) -> dict:
    """Accept a parsed spec document or its JSON text."""
    if isinstance(document, dict):
        return document
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as e:
        raise OntologyError(
            f"parse error at line {e.lineno} column {e.colno}: {e.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise OntologyError("spec document must be a JSON object")
    return doc


def _check_acyclic(concepts: Mapping[str, Concept]) -> None:
    safe: set[str] = set()
    for start in concepts:
        path: list[str] = []
        node: str | None = start
        while node is not None and node not in safe:
            if node in path:
                cycle = path[path.index(node):] + [node]
                raise OntologyError("isa cycle: " + " -> ".join(cycle))
            path.append(node)
            node = concepts[node].parent
        safe.update(path)


def load_ontology(document: str | dict) -> Ontology:
    """Parse and validate the ontology portion of a spec document.

    Expected shape: ``{"concepts": [{"name", "parent"?}, ...],
    "instances": {surface: concept}}``. Raises OntologyError on parse
    failures, duplicate or dangling names, and isa cycles.
    """
    doc = _as_document(document)
    concepts: dict[str, Concept] = {}
    for entry in doc.get("concepts", []):
        if not isinstance(entry, dict) or not isinstance(entry.get("name"), str):
            raise OntologyError(f"malformed concept entry: {entry!r}")
        name = entry["name"]
        parent = entry.get("parent")
        if parent is not None and not isinstance(parent, str):
            raise OntologyError(f"concept {name!r} has malformed parent: {parent!r}")
        if name in concepts:
            raise OntologyError(f"duplicate concept: {name!r}")
        concepts[name] = Concept(name, parent)
    for concept in concepts.values():
        if concept.parent is not None and concept.parent not in concepts:
            raise OntologyError(
                f"concept {concept.name!r} has unknown parent {concept.parent!r}"
            )
    _check_acyclic(concepts)

    instances: dict[str, str] = {}
    raw_instances = doc.get("instances", {})
    if not isinstance(raw_instances, dict):
        raise OntologyError("instances must be a surface -> concept mapping")
    for surface, concept_name in sorted(raw_instances.items()):
        if not isinstance(surface, str) or not isinstance(concept_name, str):
            raise OntologyError(f"malformed instance entry: {surface!r}")
        if concept_name not in concepts:
            raise OntologyError(
                f"instance {surface!r} maps to unknown concept {concept_name!r}"
            )
        instances[surface] = concept_name
    return Ontology(concepts, instances)


def load_message_types(
    document: str | dict, ontology: Ontology
) -> dict[str, MessageTypeSpec]:
    """Parse the ``message_types`` section against a loaded ontology."""
    doc = _as_document(document)
    specs: dict[str, MessageTypeSpec] = {}
    for entry in doc.get("message_types", []):
        if not isinstance(entry, dict) or not isinstance(entry.get("name"), str):
            raise SpecError(f"malformed message type entry: {entry!r}")
        name = entry["name"]
        if name in specs:
            raise SpecError(f"duplicate message type: {name!r}")
        slots: list[tuple[str, str]] = []
        seen_slots: set[str] = set()
        for slot_entry in entry.get("slots", []):
            if (
                not isinstance(slot_entry, dict)
                or not isinstance(slot_entry.get("slot"), str)
                or not isinstance(slot_entry.get("concept"), str)
            ):
                raise SpecError(f"malformed slot in message type {name!r}: {slot_entry!r}")
            slot, concept = slot_entry["slot"], slot_entry["concept"]
            if slot in seen_slots:
                raise SpecError(f"duplicate slot {slot!r} in message type {name!r}")
            if not ontology.has_concept(concept):
                raise SpecError(
                    f"slot {slot!r} of message type {name!r} names unknown concept {concept!r}"
                )
            seen_slots.add(slot)
            slots.append((slot, concept))
        specs[name] = MessageTypeSpec(name, tuple(slots))
    return specs


def ontology_document(
    ontology: Ontology, message_types: Mapping[str, MessageTypeSpec] | None = None
) -> dict:
    """Serialize an ontology (and optionally message types) back to spec form."""
    concepts = []
    for name in sorted(ontology.concepts):
        concept = ontology.concepts[name]
        entry: dict = {"name": name}
        if concept.parent is not None:
            entry["parent"] = concept.parent
        concepts.append(entry)
    doc: dict = {
        "concepts": concepts,
        "instances": dict(sorted(ontology.instances.items())),
    }
    if message_types is not None:
        doc["message_types"] = [
            {
                "name": name,
                "slots": [
                    {"slot": slot, "concept": concept}
                    for slot, concept in message_types[name].slots
                ],
            }
            for name in sorted(message_types)
        ]
    return doc


def subsumes(ontology: Ontology, ancestor: str, descendant: str) -> bool:
    """True iff ``ancestor`` is reachable from ``descendant`` via parent links.

    Reflexive: every concept subsumes itself. Raises OntologyError for
    unknown concept names.
    """
    for name in (ancestor, descendant):
        if name not in ontology.concepts:
            raise OntologyError(f"unknown concept: {name!r}")
    node: str | None = descendant
    seen: set[str] = set()
    while node is not None:
        if node == ancestor:
            return True
        if node in seen:  # defensive; load_ontology guarantees acyclicity
            raise OntologyError(f"isa cycle at concept {node!r}")
        seen.add(node)
        node = ontology.concepts[node].parent
    return False


def validate_message(
    ontology: Ontology, specs: Mapping[str, MessageTypeSpec], message: Message
) -> MessageValidation:
    """Check a message against its type spec and the ontology.

    Returns ok=True when the type is known, the arity matches, every
    argument is a known instance whose concept falls under the slot's
    concept, and both times are nonnegative.
    """
    violations: list[Violation] = []
    if message.pub_time < 0:
        violations.append(Violation(None, f"negative pub_time: {message.pub_time}"))
    if message.ref_time < 0:
        violations.append(Violation(None, f"negative ref_time: {message.ref_time}"))

    spec = specs.get(message.type)
    if spec is None:
        violations.append(Violation(None, f"unknown message type: {message.type!r}"))
        return MessageValidation(False, tuple(violations))
    if len(message.args) != len(spec.slots):
        violations.append(
            Violation(
                None,
                f"arity mismatch: got {len(message.args)} args, "
                f"type {spec.name!r} has {len(spec.slots)} slots",
            )
        )
        return MessageValidation(False, tuple(violations))

    for (slot, required), arg in zip(spec.slots, message.args):
        concept = ontology.instances.get(arg)
        if concept is None:
            violations.append(Violation(slot, f"unknown instance: {arg!r}"))
        elif not subsumes(ontology, required, concept):
            violations.append(
                Violation(
                    slot,
                    f"instance {arg!r} has concept {concept!r}, "
                    f"slot requires {required!r}",
                )
            )
    return MessageValidation(not violations, tuple(violations))
