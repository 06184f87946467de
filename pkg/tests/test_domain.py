from __future__ import annotations

import json
import random
from collections import defaultdict

import pytest

from gridsumm.domain import (
    OntologyError,
    load_message_types,
    load_ontology,
    ontology_document,
    subsumes,
    validate_message,
)

from conftest import hostage_doc, make_message

# Full subsumption table for the Person/Offender/Hostage forest, enumerated
# by hand from the parent links: only reflexive pairs and Person-over-leaf
# pairs hold.
SUBSUMPTION_TABLE = {
    ("Person", "Person"): True,
    ("Person", "Offender"): True,
    ("Person", "Hostage"): True,
    ("Offender", "Person"): False,
    ("Offender", "Offender"): True,
    ("Offender", "Hostage"): False,
    ("Hostage", "Person"): False,
    ("Hostage", "Offender"): False,
    ("Hostage", "Hostage"): True,
}


def test_load_minimal_ontology():
    ontology = load_ontology(
        {"concepts": [{"name": "Person"}], "instances": {"Rooney": "Person"}}
    )
    assert len(ontology.concepts) == 1
    assert ontology.instances == {"Rooney": "Person"}


def test_load_three_concept_forest(hostage_ontology):
    assert set(hostage_ontology.concepts) == {"Person", "Offender", "Hostage"}
    assert hostage_ontology.concepts["Offender"].parent == "Person"
    assert hostage_ontology.concepts["Person"].parent is None


def test_cycle_in_isa_is_rejected():
    doc = {"concepts": [{"name": "A", "parent": "B"}, {"name": "B", "parent": "A"}]}
    with pytest.raises(OntologyError, match="cycle"):
        load_ontology(doc)
    with pytest.raises(OntologyError, match="A"):
        load_ontology(doc)


def test_parse_error_reports_line():
    with pytest.raises(OntologyError, match=r"line \d+"):
        load_ontology('{"concepts": [\n  {"name": }\n]}')


def test_dangling_parent_and_instance():
    with pytest.raises(OntologyError, match="parent"):
        load_ontology({"concepts": [{"name": "A", "parent": "Nope"}]})
    with pytest.raises(OntologyError, match="unknown concept"):
        load_ontology({"concepts": [{"name": "A"}], "instances": {"x": "Nope"}})


def test_duplicate_concept_rejected():
    with pytest.raises(OntologyError, match="duplicate"):
        load_ontology({"concepts": [{"name": "A"}, {"name": "A"}]})


def test_subsumes_examples(hostage_ontology):
    assert subsumes(hostage_ontology, "Person", "Offender") is True
    assert subsumes(hostage_ontology, "Person", "Person") is True
    assert subsumes(hostage_ontology, "Offender", "Person") is False


def test_subsumes_unknown_concept(hostage_ontology):
    with pytest.raises(OntologyError, match="unknown concept"):
        subsumes(hostage_ontology, "Person", "Ghost")


def test_subsumption_table(hostage_ontology):
    for (ancestor, descendant), expected in SUBSUMPTION_TABLE.items():
        assert subsumes(hostage_ontology, ancestor, descendant) is expected


def _random_forest_doc(rng: random.Random, size: int) -> dict:
    concepts = [{"name": "c0"}]
    for i in range(1, size):
        entry: dict = {"name": f"c{i}"}
        if rng.random() < 0.8:
            entry["parent"] = f"c{rng.randrange(i)}"
        concepts.append(entry)
    instances = {
        f"i{k}": f"c{rng.randrange(size)}" for k in range(rng.randrange(size))
    }
    return {"concepts": concepts, "instances": instances}


def _reaches_via_child_links(doc: dict, ancestor: str, descendant: str) -> bool:
    """Independent oracle: search downward over child links from ancestor."""
    children = defaultdict(list)
    for entry in doc["concepts"]:
        if entry.get("parent") is not None:
            children[entry["parent"]].append(entry["name"])
    frontier, seen = [ancestor], set()
    while frontier:
        node = frontier.pop()
        if node == descendant:
            return True
        if node in seen:
            continue
        seen.add(node)
        frontier.extend(children[node])
    return False


def test_subsumes_matches_naive_reachability():
    rng = random.Random(20240)
    for _ in range(50):
        doc = _random_forest_doc(rng, rng.randint(2, 12))
        ontology = load_ontology(doc)
        names = sorted(ontology.concepts)
        for ancestor in names:
            for descendant in names:
                assert subsumes(ontology, ancestor, descendant) == \
                    _reaches_via_child_links(doc, ancestor, descendant)


def test_subsumes_is_transitive():
    rng = random.Random(99)
    for _ in range(20):
        ontology = load_ontology(_random_forest_doc(rng, 8))
        names = sorted(ontology.concepts)
        for a in names:
            for b in names:
                for c in names:
                    if subsumes(ontology, a, b) and subsumes(ontology, b, c):
                        assert subsumes(ontology, a, c)


def test_ontology_round_trip(hostage_ontology, hostage_types):
    doc = ontology_document(hostage_ontology, hostage_types)
    reloaded = load_ontology(json.dumps(doc))
    assert reloaded == hostage_ontology
    assert load_message_types(doc, reloaded) == hostage_types


def test_ontology_round_trip_randomized():
    rng = random.Random(7)
    for _ in range(30):
        doc = _random_forest_doc(rng, rng.randint(1, 10))
        ontology = load_ontology(doc)
        assert load_ontology(json.dumps(ontology_document(ontology))) == ontology


def test_validate_ok(hostage_ontology, hostage_types):
    message = make_message(type="meet", args=("alice", "bob"))
    assert validate_message(hostage_ontology, hostage_types, message).ok


def test_validate_arity_mismatch(hostage_ontology, hostage_types):
    message = make_message(type="negotiate", args=("alice", "bob"))
    result = validate_message(hostage_ontology, hostage_types, message)
    assert not result.ok
    assert any("arity" in v.reason for v in result.violations)


def test_validate_unknown_type(hostage_ontology, hostage_types):
    result = validate_message(
        hostage_ontology, hostage_types, make_message(type="ransom", args=())
    )
    assert not result.ok
    assert any("unknown message type" in v.reason for v in result.violations)


def test_validate_concept_violation_names_slot(hostage_ontology, hostage_types):
    # offender slot requires Offender; bob is a Hostage, and per the frozen
    # subsumption table Offender does not subsume Hostage
    message = make_message(type="negotiate", args=("bob", "bob", "carol"))
    result = validate_message(hostage_ontology, hostage_types, message)
    assert not result.ok
    assert [v.slot for v in result.violations] == ["offender"]


def test_validate_negative_times(hostage_ontology, hostage_types):
    message = make_message(type="meet", args=("alice", "bob"), pub_time=-1, ref_time=2)
    result = validate_message(hostage_ontology, hostage_types, message)
    assert not result.ok
    assert any("pub_time" in v.reason for v in result.violations)


def _naive_accepts(doc: dict, message) -> bool:
    """Brute-force checker working straight off the raw spec dicts."""
    parents = {c["name"]: c.get("parent") for c in doc["concepts"]}
    instances = doc.get("instances", {})
    types = {
        t["name"]: [(s["slot"], s["concept"]) for s in t["slots"]]
        for t in doc.get("message_types", [])
    }
    if message.pub_time < 0 or message.ref_time < 0:
        return False
    if message.type not in types:
        return False
    slots = types[message.type]
    if len(message.args) != len(slots):
        return False
    for (_, required), arg in zip(slots, message.args):
        if arg not in instances:
            return False
        concept = instances[arg]
        chain = []
        while concept is not None:
            chain.append(concept)
            concept = parents[concept]
        if required not in chain:
            return False
    return True


def test_validate_matches_brute_force(hostage_ontology, hostage_types):
    rng = random.Random(41)
    doc = hostage_doc()
    type_names = ["meet", "negotiate", "ransom"]
    arg_pool = ["alice", "bob", "carol", "dave"]
    for i in range(500):
        message = make_message(
            id=f"m{i}",
            type=rng.choice(type_names),
            args=tuple(rng.choice(arg_pool) for _ in range(rng.randint(0, 4))),
            pub_time=rng.randint(-1, 3),
            ref_time=rng.randint(-1, 3),
        )
        expected = _naive_accepts(doc, message)
        assert validate_message(hostage_ontology, hostage_types, message).ok == expected
