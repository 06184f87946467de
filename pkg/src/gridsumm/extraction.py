"""Rule-based message extraction from raw documents.

The extractor is deliberately simple and deterministic: whitespace and
punctuation tokenization, sentence splitting on terminal punctuation with a
configurable abbreviation list, longest-match gazetteer entity recognition,
and trigger-word patterns that bind slots to nearby entity mentions.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .domain import (
    Message,
    MessageTypeSpec,
    Ontology,
    SpecError,
    subsumes,
    validate_message,
)

DEFAULT_ABBREVIATIONS = frozenset(
    {"Mr.", "Mrs.", "Ms.", "Dr.", "Prof.", "St.", "vs.", "etc.", "e.g.", "i.e."}
)

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")

SELECTION_RULES = ("first-left-of-trigger", "first-right-of-trigger", "nth-in-sentence")


@dataclass(frozen=True)
class Document:
    """One source document; ``sentences`` is filled by preprocess.

    ``ref_time`` overrides the default reference time (the publication time)
    for the whole document; ``sentence_ref_times`` overrides it per sentence
    index on top of that.
    """

    doc_id: str
    source: str
    pub_time: int
    raw: str
    sentences: tuple[tuple[str, ...], ...] = ()
    ref_time: int | None = None
    sentence_ref_times: dict[int, int] = field(default_factory=dict)


@dataclass(frozen=True)
class Gazetteer:
    """Surface form -> ontology instance identifier."""

    entries: dict[str, str]


@dataclass(frozen=True)
class SlotBinding:
    """How one slot of a pattern picks its mention relative to the trigger."""

    slot: str
    concept: str
    rule: str
    nth: int = 1


@dataclass(frozen=True)
class TriggerPattern:
    """Emit one message of ``message_type`` per sentence containing a trigger."""

    message_type: str
    triggers: frozenset[str]
    bindings: tuple[SlotBinding, ...]


@dataclass(frozen=True)
class Mention:
    """A recognized entity: sentence index, token span [start, end), instance."""

    sentence: int
    start: int
    end: int
    instance: str


def tokenize(sentence: str) -> tuple[str, ...]:
    """Split into word tokens and single-character punctuation tokens."""
    return tuple(_TOKEN_RE.findall(sentence))


def split_sentences(
    raw: str, abbreviations: Iterable[str] = DEFAULT_ABBREVIATIONS
) -> list[str]:
    """Split text on . ! ? followed by whitespace (or end of text).

    A period is not a boundary when the chunk it terminates (e.g. "Mr.")
    is in the abbreviation list.
    """
    abbrev = frozenset(abbreviations)
    sentences: list[str] = []
    buf: list[str] = []
    for i, ch in enumerate(raw):
        buf.append(ch)
        if ch in ".!?":
            nxt = raw[i + 1] if i + 1 < len(raw) else " "
            if not nxt.isspace():
                continue
            if ch == ".":
                chunks = "".join(buf).rsplit(None, 1)
                if chunks and chunks[-1] in abbrev:
                    continue
            sentence = "".join(buf).strip()
            if sentence:
                sentences.append(sentence)
            buf = []
    tail = "".join(buf).strip()
    if tail:
        sentences.append(tail)
    return sentences


def preprocess_text(
    raw: str, abbreviations: Iterable[str] = DEFAULT_ABBREVIATIONS
) -> tuple[tuple[str, ...], ...]:
    """Sentence-split and tokenize raw text. Empty text yields no sentences."""
    return tuple(tokenize(s) for s in split_sentences(raw, abbreviations))


def preprocess(
    doc: Document, abbreviations: Iterable[str] = DEFAULT_ABBREVIATIONS
) -> Document:
    """Return a copy of ``doc`` with sentences filled in."""
    return replace(doc, sentences=preprocess_text(doc.raw, abbreviations))


def load_corpus_document(document: str | dict) -> Document:
    """Load one corpus file: {"doc_id","source","pub_time","text",
    "ref_time"?, "sentence_ref_times"?}."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise SpecError(
                f"corpus parse error at line {e.lineno} column {e.colno}: {e.msg}"
            ) from None
    if not isinstance(document, dict):
        raise SpecError("corpus document must be a JSON object")
    for key, kind in (("doc_id", str), ("source", str), ("pub_time", int), ("text", str)):
        if not isinstance(document.get(key), kind):
            raise SpecError(f"corpus document missing or malformed field {key!r}")
    if document["pub_time"] < 0:
        raise SpecError(f"negative pub_time in document {document['doc_id']!r}")
    ref_time = document.get("ref_time")
    if ref_time is not None and (not isinstance(ref_time, int) or ref_time < 0):
        raise SpecError(f"malformed ref_time in document {document['doc_id']!r}")
    sentence_ref_times: dict[int, int] = {}
    for key, value in document.get("sentence_ref_times", {}).items():
        try:
            index = int(key)
        except (TypeError, ValueError):
            raise SpecError(
                f"malformed sentence_ref_times key {key!r} in {document['doc_id']!r}"
            ) from None
        if not isinstance(value, int) or value < 0:
            raise SpecError(
                f"malformed sentence_ref_times value for {key!r} in {document['doc_id']!r}"
            )
        sentence_ref_times[index] = value
    return Document(
        doc_id=document["doc_id"],
        source=document["source"],
        pub_time=document["pub_time"],
        raw=document["text"],
        ref_time=ref_time,
        sentence_ref_times=sentence_ref_times,
    )


def corpus_document(doc: Document) -> dict:
    """Serialize a document back to the corpus file format."""
    payload: dict = {
        "doc_id": doc.doc_id,
        "source": doc.source,
        "pub_time": doc.pub_time,
        "text": doc.raw,
    }
    if doc.ref_time is not None:
        payload["ref_time"] = doc.ref_time
    if doc.sentence_ref_times:
        payload["sentence_ref_times"] = {
            str(index): value for index, value in sorted(doc.sentence_ref_times.items())
        }
    return payload


def load_gazetteer(entries: Mapping[str, str], ontology: Ontology) -> Gazetteer:
    """Validate that every gazetteer target is a known ontology instance."""
    for surface, instance in entries.items():
        if instance not in ontology.instances:
            raise SpecError(
                f"gazetteer entry {surface!r} maps to unknown instance {instance!r}"
            )
    return Gazetteer(dict(entries))


def load_patterns(
    entries: Sequence[dict],
    specs: Mapping[str, MessageTypeSpec],
    ontology: Ontology,
) -> tuple[TriggerPattern, ...]:
    """Parse trigger patterns; bindings must cover the type's slots exactly."""
    patterns: list[TriggerPattern] = []
    for entry in entries:
        message_type = entry.get("message_type")
        spec = specs.get(message_type)
        if spec is None:
            raise SpecError(f"pattern names unknown message type: {message_type!r}")
        triggers = entry.get("triggers", [])
        if not triggers or not all(isinstance(t, str) for t in triggers):
            raise SpecError(f"pattern for {message_type!r} needs trigger lexemes")
        bindings: list[SlotBinding] = []
        for binding in entry.get("bindings", []):
            slot = binding.get("slot")
            concept = binding.get("concept")
            rule = binding.get("rule")
            nth = binding.get("n", 1)
            if slot not in spec.slot_names():
                raise SpecError(
                    f"pattern for {message_type!r} binds unknown slot {slot!r}"
                )
            if not ontology.has_concept(concept):
                raise SpecError(
                    f"binding for slot {slot!r} names unknown concept {concept!r}"
                )
            if rule not in SELECTION_RULES:
                raise SpecError(f"unknown selection rule {rule!r} for slot {slot!r}")
            if not isinstance(nth, int) or nth < 1:
                raise SpecError(f"selection index for slot {slot!r} must be >= 1")
            bindings.append(SlotBinding(slot, concept, rule, nth))
        bound = [b.slot for b in bindings]
        if sorted(bound) != sorted(spec.slot_names()):
            raise SpecError(
                f"pattern for {message_type!r} must bind every slot exactly once, "
                f"got {bound!r}"
            )
        patterns.append(
            TriggerPattern(message_type, frozenset(triggers), tuple(bindings))
        )
    return tuple(patterns)


def recognize_entities(
    doc: Document, gazetteer: Gazetteer, ontology: Ontology
) -> list[Mention]:
    """Longest-match, left-to-right, non-overlapping gazetteer lookup."""
    table: dict[tuple[str, ...], str] = {}
    for surface in sorted(gazetteer.entries):
        instance = gazetteer.entries[surface]
        if instance not in ontology.instances:
            raise SpecError(f"gazetteer instance {instance!r} not in ontology")
        table[tokenize(surface)] = instance
    if not table:
        return []
    longest = max(len(key) for key in table)
    mentions: list[Mention] = []
    for si, tokens in enumerate(doc.sentences):
        i = 0
        while i < len(tokens):
            for width in range(min(longest, len(tokens) - i), 0, -1):
                instance = table.get(tuple(tokens[i:i + width]))
                if instance is not None:
                    mentions.append(Mention(si, i, i + width, instance))
                    i += width
                    break
            else:
                i += 1
    return mentions


def _ref_time(doc: Document, sentence: int) -> int:
    default = doc.ref_time if doc.ref_time is not None else doc.pub_time
    return doc.sentence_ref_times.get(sentence, default)


def _bind_slot(
    binding: SlotBinding,
    trigger_index: int,
    candidates: list[Mention],
) -> Mention | None:
    if binding.rule == "first-left-of-trigger":
        left = [m for m in candidates if m.end <= trigger_index]
        return left[-1] if left else None
    if binding.rule == "first-right-of-trigger":
        right = [m for m in candidates if m.start > trigger_index]
        return right[0] if right else None
    # nth-in-sentence
    return candidates[binding.nth - 1] if len(candidates) >= binding.nth else None


def extract_messages(
    doc: Document,
    mentions: Sequence[Mention],
    patterns: Sequence[TriggerPattern],
    specs: Mapping[str, MessageTypeSpec],
    ontology: Ontology,
    diagnostics: list[str] | None = None,
) -> list[Message]:
    """Apply trigger patterns to a preprocessed document.

    For each sentence and pattern, the first trigger occurrence anchors the
    slot bindings over that sentence's mentions; a message is emitted only
    when every slot binds to a concept-compatible mention and the result
    validates. At most one message per (sentence, pattern). Failed bindings
    are skipped, with reasons appended to ``diagnostics`` when provided.
    """
    out: list[Message] = []
    for si, tokens in enumerate(doc.sentences):
        sentence_mentions = sorted(
            (m for m in mentions if m.sentence == si), key=lambda m: m.start
        )
        for pi, pattern in enumerate(patterns):
            trigger_index = next(
                (k for k, tok in enumerate(tokens) if tok in pattern.triggers), None
            )
            if trigger_index is None:
                continue
            args: list[str] = []
            for binding in pattern.bindings:
                candidates = [
                    m
                    for m in sentence_mentions
                    if subsumes(ontology, binding.concept, ontology.concept_of(m.instance))
                ]
                mention = _bind_slot(binding, trigger_index, candidates)
                if mention is None:
                    if diagnostics is not None:
                        diagnostics.append(
                            f"{doc.doc_id}/s{si}/{pattern.message_type}: "
                            f"slot {binding.slot} unbound"
                        )
                    args = []
                    break
                args.append(mention.instance)
            if len(args) != len(pattern.bindings):
                continue
            message = Message(
                id=f"{doc.doc_id}.{si}.{pi}",
                type=pattern.message_type,
                args=tuple(args),
                source=doc.source,
                pub_time=doc.pub_time,
                ref_time=_ref_time(doc, si),
                doc_id=doc.doc_id,
                token_length=len(tokens),
            )
            result = validate_message(ontology, specs, message)
            if not result.ok:
                if diagnostics is not None:
                    reasons = "; ".join(v.reason for v in result.violations)
                    diagnostics.append(
                        f"{doc.doc_id}/s{si}/{pattern.message_type}: invalid: {reasons}"
                    )
                continue
            out.append(message)
    return out


def extract_corpus(
    docs: Sequence[Document],
    gazetteer: Gazetteer,
    patterns: Sequence[TriggerPattern],
    specs: Mapping[str, MessageTypeSpec],
    ontology: Ontology,
    diagnostics: list[str] | None = None,
) -> list[Message]:
    """Extract from every document, merged in doc_id order."""
    messages: list[Message] = []
    for doc in sorted(docs, key=lambda d: d.doc_id):
        if not doc.sentences and doc.raw.strip():
            raise ValueError(f"document {doc.doc_id!r} was not preprocessed")
        mentions = recognize_entities(doc, gazetteer, ontology)
        messages.extend(
            extract_messages(doc, mentions, patterns, specs, ontology, diagnostics)
        )
    return messages
