"""Synthetic multi-source evolving-event corpora with planted ground truth.

Scenarios plant information clusters with chosen document support so the
redundancy model's behavior is verifiable end to end: generated sentences
use a small built-in match-report domain (gazetteer-known entities around a
trigger word), which the reference extractor recovers with zero noise. An
optional drop probability per planted sentence exercises degraded
extraction, and an optional diffusion process grows one piece of
information's support over time.

Generation is deterministic from the scenario seed; the same config yields
byte-identical corpora.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .content import shade
from .extraction import Document

EMISSIONS = ("synchronous", "asynchronous")
EVOLUTIONS = ("linear", "nonlinear")


class ScenarioError(Exception):
    """Scenario config is malformed or infeasible."""


@dataclass(frozen=True)
class SentenceTemplate:
    """A message type with a rendering template the extractor can invert."""

    message_type: str
    slots: tuple[tuple[str, str], ...]
    instance_concepts: tuple[str, ...]
    trigger: str
    rules: tuple[str, ...]
    text: str

    def render(self, args: Sequence[str]) -> str:
        return self.text.format(*args)


TEMPLATES: dict[str, SentenceTemplate] = {
    "score": SentenceTemplate(
        message_type="score",
        slots=(("scorer", "Person"), ("team", "Team")),
        instance_concepts=("Player", "Team"),
        trigger="scored",
        rules=("first-left-of-trigger", "first-right-of-trigger"),
        text="{0} scored for {1}.",
    ),
    "win": SentenceTemplate(
        message_type="win",
        slots=(("team", "Team"),),
        instance_concepts=("Team",),
        trigger="won",
        rules=("first-left-of-trigger",),
        text="{0} won the match.",
    ),
}

_FILLER_ADJECTIVES = ("restless", "quiet", "patient", "weary", "eager", "anxious")
_FILLER_VERBS = ("murmured", "waited", "watched", "lingered", "shuffled", "paced")
_FILLER_PLACES = ("stands", "gates", "concourse", "terraces", "fences", "rails")


@dataclass(frozen=True)
class PlantedCluster:
    """Plant one message in ``support`` randomly chosen sources at a frame."""

    timeframe: int
    support: int
    message_type: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class DiffusionConfig:
    """One piece of information spreading from a seed source over time.

    Each timeframe, every source that has not yet adopted the information
    picks it up with probability ``adoption_rate``, independently.
    """

    seed_source: str
    adoption_rate: float
    message_type: str = "score"
    args: tuple[str, ...] = ("Newsome", "Citywide")


@dataclass(frozen=True)
class ScenarioConfig:
    n_sources: int
    timeframes: int
    emission: str = "synchronous"
    evolution: str = "linear"
    planted_clusters: tuple[PlantedCluster, ...] = ()
    diffusion: DiffusionConfig | None = None
    rng_seed: int = 0
    filler_sentences: int = 2
    drop_rate: float = 0.0

    def __post_init__(self) -> None:
        if self.n_sources < 1:
            raise ScenarioError(f"n_sources must be >= 1, got {self.n_sources}")
        if self.timeframes < 1:
            raise ScenarioError(f"timeframes must be >= 1, got {self.timeframes}")
        if self.emission not in EMISSIONS:
            raise ScenarioError(f"unknown emission mode: {self.emission!r}")
        if self.evolution not in EVOLUTIONS:
            raise ScenarioError(f"unknown evolution mode: {self.evolution!r}")
        if self.filler_sentences < 0:
            raise ScenarioError("filler_sentences must be >= 0")
        if not 0 <= self.drop_rate <= 1:
            raise ScenarioError(f"drop_rate must be in [0, 1], got {self.drop_rate}")
        names = set(source_names(self.n_sources))
        for planted in self.planted_clusters:
            template = TEMPLATES.get(planted.message_type)
            if template is None:
                raise ScenarioError(f"unknown message template: {planted.message_type!r}")
            if len(planted.args) != len(template.slots):
                raise ScenarioError(
                    f"template {planted.message_type!r} takes {len(template.slots)} "
                    f"args, got {len(planted.args)}"
                )
            if not 1 <= planted.timeframe <= self.timeframes:
                raise ScenarioError(
                    f"planted timeframe {planted.timeframe} outside 1..{self.timeframes}"
                )
            if not 1 <= planted.support <= self.n_sources:
                raise ScenarioError(
                    f"planted support {planted.support} outside 1..{self.n_sources}"
                )
        if self.diffusion is not None:
            if self.diffusion.seed_source not in names:
                raise ScenarioError(
                    f"diffusion seed source {self.diffusion.seed_source!r} unknown"
                )
            if not 0 <= self.diffusion.adoption_rate <= 1:
                raise ScenarioError("diffusion adoption_rate must be in [0, 1]")
            if self.diffusion.message_type not in TEMPLATES:
                raise ScenarioError(
                    f"unknown message template: {self.diffusion.message_type!r}"
                )
            if self.emission != "synchronous":
                raise ScenarioError("diffusion scenarios require synchronous emission")


@dataclass(frozen=True)
class PlantedMessage:
    """One intended planting of a message in one document (pre-noise)."""

    doc_id: str
    source: str
    pub_time: int
    ref_time: int
    message_type: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class ExpectedCluster:
    """A cluster the pipeline must recover from the emitted corpus."""

    message_type: str
    args: tuple[str, ...]
    ref_time: int
    support: frozenset[str]
    p: Fraction


@dataclass(frozen=True)
class GroundTruth:
    n_documents: int
    clusters: tuple[ExpectedCluster, ...]
    planted_messages: tuple[PlantedMessage, ...]
    diffusion_adopters: tuple[frozenset[str], ...] | None = None

    def diffusion_supports(self) -> tuple[int, ...] | None:
        if self.diffusion_adopters is None:
            return None
        return tuple(len(adopters) for adopters in self.diffusion_adopters)


def source_names(n_sources: int) -> tuple[str, ...]:
    return tuple(f"src{i:02d}" for i in range(n_sources))


def doc_name(source: str, timeframe: int) -> str:
    return f"{source}-t{timeframe:02d}"


def load_scenario(document: str | dict) -> ScenarioConfig:
    """Parse a scenario config JSON document."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise ScenarioError(
                f"scenario parse error at line {e.lineno} column {e.colno}: {e.msg}"
            ) from None
    if not isinstance(document, dict):
        raise ScenarioError("scenario config must be a JSON object")
    planted = []
    for entry in document.get("planted_clusters", []):
        message = entry.get("message", {})
        planted.append(
            PlantedCluster(
                timeframe=entry.get("timeframe", 1),
                support=entry.get("support", 1),
                message_type=message.get("type", ""),
                args=tuple(message.get("args", [])),
            )
        )
    diffusion = None
    if document.get("diffusion") is not None:
        entry = document["diffusion"]
        kwargs = {}
        if "message" in entry:
            kwargs["message_type"] = entry["message"].get("type", "")
            kwargs["args"] = tuple(entry["message"].get("args", []))
        diffusion = DiffusionConfig(
            seed_source=entry.get("seed_source", ""),
            adoption_rate=entry.get("adoption_rate", 0.0),
            **kwargs,
        )
    try:
        return ScenarioConfig(
            n_sources=document.get("n_sources", 1),
            timeframes=document.get("timeframes", 1),
            emission=document.get("emission", "synchronous"),
            evolution=document.get("evolution", "linear"),
            planted_clusters=tuple(planted),
            diffusion=diffusion,
            rng_seed=document.get("rng_seed", 0),
            filler_sentences=document.get("filler_sentences", 2),
            drop_rate=document.get("drop_rate", 0.0),
        )
    except TypeError as e:
        raise ScenarioError(f"malformed scenario config: {e}") from None


def scenario_spec_document(config: ScenarioConfig) -> dict:
    """Build the domain spec (ontology, types, gazetteer, patterns,
    relations) that makes the generated corpus extractable."""
    instances: dict[str, str] = {}
    plantings: list[tuple[str, tuple[str, ...]]] = [
        (p.message_type, p.args) for p in config.planted_clusters
    ]
    if config.diffusion is not None:
        plantings.append((config.diffusion.message_type, config.diffusion.args))
    for message_type, args in plantings:
        template = TEMPLATES[message_type]
        for arg, concept in zip(args, template.instance_concepts):
            if instances.get(arg, concept) != concept:
                raise ScenarioError(
                    f"instance {arg!r} used with conflicting concepts "
                    f"({instances[arg]!r} vs {concept!r})"
                )
            instances[arg] = concept
    return {
        "concepts": [
            {"name": "Person"},
            {"name": "Player", "parent": "Person"},
            {"name": "Team"},
        ],
        "instances": dict(sorted(instances.items())),
        "message_types": [
            {
                "name": name,
                "slots": [
                    {"slot": slot, "concept": concept}
                    for slot, concept in TEMPLATES[name].slots
                ],
            }
            for name in sorted(TEMPLATES)
        ],
        "gazetteer": {surface: surface for surface in sorted(instances)},
        "patterns": [
            {
                "message_type": name,
                "triggers": [TEMPLATES[name].trigger],
                "bindings": [
                    {"slot": slot, "concept": concept, "rule": rule}
                    for (slot, concept), rule in zip(
                        TEMPLATES[name].slots, TEMPLATES[name].rules
                    )
                ],
            }
            for name in sorted(TEMPLATES)
        ],
        "relations": [
            {
                "name": "agreement",
                "type": "synchronic",
                "pairs": [["score", "score"]],
                "constraint": {
                    "op": "and",
                    "args": [
                        {"op": "eq", "args": ["a.scorer", "b.scorer"]},
                        {"op": "eq", "args": ["a.team", "b.team"]},
                    ],
                },
            },
            {
                "name": "outcome_agreement",
                "type": "synchronic",
                "pairs": [["win", "win"]],
                "constraint": {"op": "eq", "args": ["a.team", "b.team"]},
            },
            {
                "name": "development",
                "type": "diachronic",
                "pairs": [
                    ["score", "score"],
                    ["score", "win"],
                    ["win", "score"],
                    ["win", "win"],
                ],
                "constraint": {"op": "eq", "args": ["a.team", "b.team"]},
            },
        ],
    }


def diffusion_supports(
    sources: Sequence[str],
    timeframes: int,
    adoption_rate: float,
    seed_source: str,
    rng: random.Random,
) -> list[frozenset[str]]:
    """Adopter sets per timeframe; support is monotone non-decreasing."""
    adopters = {seed_source}
    trajectory = [frozenset(adopters)]
    for _ in range(timeframes - 1):
        newcomers = {
            source
            for source in sources
            if source not in adopters and rng.random() < adoption_rate
        }
        adopters |= newcomers
        trajectory.append(frozenset(adopters))
    return trajectory


def _filler(rng: random.Random) -> str:
    return (
        f"The {rng.choice(_FILLER_ADJECTIVES)} crowd "
        f"{rng.choice(_FILLER_VERBS)} near the {rng.choice(_FILLER_PLACES)}."
    )


def generate(config: ScenarioConfig) -> tuple[list[Document], GroundTruth]:
    """Emit the scenario's corpus and its ground truth.

    One document per (source, timeframe) under synchronous emission; under
    asynchronous emission each source covers a seed-derived random subset
    of the timeframes. Raises ScenarioError when a planted cluster wants
    more support than there are documents at its timeframe.
    """
    rng = random.Random(config.rng_seed)
    sources = source_names(config.n_sources)
    frames = list(range(1, config.timeframes + 1))

    if config.evolution == "linear":
        active = frames
    else:
        active = sorted(rng.sample(frames, rng.randint(1, len(frames))))

    coverage: dict[str, list[int]] = {}
    for source in sources:
        if config.emission == "synchronous":
            coverage[source] = list(active)
        else:
            coverage[source] = sorted(rng.sample(active, rng.randint(1, len(active))))

    # planted sentence placements, realized (post-noise) cluster supports,
    # and the pre-noise planting record
    placements: dict[tuple[str, int], list[tuple[str, tuple[str, ...]]]] = {}
    realized: dict[tuple[str, tuple[str, ...], int], set[str]] = {}
    planted_messages: list[PlantedMessage] = []

    def plant(source: str, frame: int, message_type: str, args: tuple[str, ...]) -> None:
        planted_messages.append(
            PlantedMessage(
                doc_id=doc_name(source, frame),
                source=source,
                pub_time=frame,
                ref_time=frame,
                message_type=message_type,
                args=args,
            )
        )
        if config.drop_rate > 0 and rng.random() < config.drop_rate:
            return
        placements.setdefault((source, frame), []).append((message_type, args))
        realized.setdefault((message_type, args, frame), set()).add(
            doc_name(source, frame)
        )

    for planted in config.planted_clusters:
        if planted.timeframe not in active:
            raise ScenarioError(
                f"planted timeframe {planted.timeframe} is inactive in this scenario"
            )
        available = sorted(s for s in sources if planted.timeframe in coverage[s])
        if planted.support > len(available):
            raise ScenarioError(
                f"planted support {planted.support} exceeds {len(available)} "
                f"available documents at timeframe {planted.timeframe}"
            )
        chosen = sorted(rng.sample(available, planted.support))
        for source in chosen:
            plant(source, planted.timeframe, planted.message_type, planted.args)

    adopters_by_frame: list[frozenset[str]] | None = None
    if config.diffusion is not None:
        adopters_by_frame = diffusion_supports(
            sources,
            config.timeframes,
            config.diffusion.adoption_rate,
            config.diffusion.seed_source,
            rng,
        )
        for frame, adopters in zip(frames, adopters_by_frame):
            if frame not in active:
                continue
            for source in sorted(adopters):
                plant(source, frame, config.diffusion.message_type,
                      config.diffusion.args)

    documents: list[Document] = []
    for source in sources:
        for frame in coverage[source]:
            sentences = [
                TEMPLATES[message_type].render(args)
                for message_type, args in placements.get((source, frame), [])
            ]
            fillers = [_filler(rng) for _ in range(config.filler_sentences)]
            body = fillers[:1] + sentences + fillers[1:]
            documents.append(
                Document(
                    doc_id=doc_name(source, frame),
                    source=source,
                    pub_time=frame,
                    raw=" ".join(body),
                )
            )
    documents.sort(key=lambda d: d.doc_id)

    n_documents = len(documents)
    clusters = []
    for (message_type, args, frame), support in realized.items():
        clusters.append(
            ExpectedCluster(
                message_type=message_type,
                args=args,
                ref_time=frame,
                support=frozenset(support),
                p=Fraction(len(support), n_documents),
            )
        )
    clusters.sort(key=lambda c: (-c.p, c.ref_time, c.message_type, c.args))

    return documents, GroundTruth(
        n_documents=n_documents,
        clusters=tuple(clusters),
        planted_messages=tuple(
            sorted(planted_messages, key=lambda m: (m.doc_id, m.message_type, m.args))
        ),
        diffusion_adopters=(
            tuple(adopters_by_frame) if adopters_by_frame is not None else None
        ),
    )


def diffuse(config: ScenarioConfig) -> tuple[list[Document], GroundTruth]:
    """Generate a corpus for a diffusion scenario (diffusion must be set)."""
    if config.diffusion is None:
        raise ScenarioError("diffuse requires a diffusion config")
    return generate(config)


def ground_truth_document(truth: GroundTruth) -> dict:
    """JSON-ready ground truth dump."""
    doc: dict = {
        "n_documents": truth.n_documents,
        "clusters": [
            {
                "type": c.message_type,
                "args": list(c.args),
                "ref_time": c.ref_time,
                "support": sorted(c.support),
                "p": float(c.p),
                "shade": shade(c),
            }
            for c in truth.clusters
        ],
        "planted_messages": [
            {
                "doc_id": m.doc_id,
                "source": m.source,
                "pub_time": m.pub_time,
                "ref_time": m.ref_time,
                "type": m.message_type,
                "args": list(m.args),
            }
            for m in truth.planted_messages
        ],
    }
    supports = truth.diffusion_supports()
    if supports is not None:
        doc["diffusion"] = {
            "supports": list(supports),
            "adopters": [sorted(a) for a in truth.diffusion_adopters or ()],
        }
    return doc
