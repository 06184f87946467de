from __future__ import annotations

import copy

import pytest

from gridsumm.cli import SpecBundle, load_spec_bundle
from gridsumm.domain import Message, load_message_types, load_ontology

# Hostage-incident topic: a three-concept forest with one instance per leaf,
# used wherever a small fixed subsumption structure is needed.
HOSTAGE_SPEC = {
    "concepts": [
        {"name": "Person"},
        {"name": "Offender", "parent": "Person"},
        {"name": "Hostage", "parent": "Person"},
    ],
    "instances": {"alice": "Offender", "bob": "Hostage", "carol": "Person"},
    "message_types": [
        {
            "name": "meet",
            "slots": [
                {"slot": "x", "concept": "Person"},
                {"slot": "y", "concept": "Person"},
            ],
        },
        {
            "name": "negotiate",
            "slots": [
                {"slot": "offender", "concept": "Offender"},
                {"slot": "hostage", "concept": "Hostage"},
                {"slot": "mediator", "concept": "Person"},
            ],
        },
    ],
}

# Match-report topic: full spec with gazetteer, patterns and relations, used
# for extraction and pipeline tests.
FOOTBALL_SPEC = {
    "concepts": [
        {"name": "Person"},
        {"name": "Player", "parent": "Person"},
        {"name": "Team"},
    ],
    "instances": {
        "Rooney": "Player",
        "Ronaldo": "Player",
        "United": "Team",
        "Arsenal": "Team",
        "New York": "Team",
        "York": "Team",
    },
    "message_types": [
        {
            "name": "score",
            "slots": [
                {"slot": "scorer", "concept": "Person"},
                {"slot": "team", "concept": "Team"},
            ],
        },
        {"name": "win", "slots": [{"slot": "team", "concept": "Team"}]},
    ],
    "gazetteer": {
        "Rooney": "Rooney",
        "Ronaldo": "Ronaldo",
        "United": "United",
        "Arsenal": "Arsenal",
        "New York": "New York",
        "York": "York",
    },
    "patterns": [
        {
            "message_type": "score",
            "triggers": ["scored"],
            "bindings": [
                {"slot": "scorer", "concept": "Person", "rule": "first-left-of-trigger"},
                {"slot": "team", "concept": "Team", "rule": "first-right-of-trigger"},
            ],
        },
        {
            "message_type": "win",
            "triggers": ["won"],
            "bindings": [
                {"slot": "team", "concept": "Team", "rule": "first-left-of-trigger"}
            ],
        },
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
            "name": "development",
            "type": "diachronic",
            "pairs": [["score", "score"], ["score", "win"], ["win", "score"], ["win", "win"]],
            "constraint": {"op": "eq", "args": ["a.team", "b.team"]},
        },
    ],
}


def hostage_doc() -> dict:
    return copy.deepcopy(HOSTAGE_SPEC)


def football_doc() -> dict:
    return copy.deepcopy(FOOTBALL_SPEC)


@pytest.fixture
def hostage_ontology():
    return load_ontology(hostage_doc())


@pytest.fixture
def hostage_types(hostage_ontology):
    return load_message_types(hostage_doc(), hostage_ontology)


@pytest.fixture
def football() -> SpecBundle:
    return load_spec_bundle(football_doc())


def make_message(
    id: str = "m1",
    type: str = "score",
    args: tuple[str, ...] = ("Rooney", "United"),
    source: str = "BBC",
    pub_time: int = 0,
    ref_time: int | None = None,
    doc_id: str | None = None,
    token_length: int = 5,
) -> Message:
    return Message(
        id=id,
        type=type,
        args=args,
        source=source,
        pub_time=pub_time,
        ref_time=ref_time if ref_time is not None else pub_time,
        doc_id=doc_id if doc_id is not None else f"{source}-d1",
        token_length=token_length,
    )
