from __future__ import annotations

import json
import random

import pytest

from gridsumm.domain import SpecError, validate_message
from gridsumm.extraction import (
    Document,
    corpus_document,
    extract_corpus,
    extract_messages,
    load_corpus_document,
    load_patterns,
    preprocess,
    preprocess_text,
    recognize_entities,
)
from gridsumm.cli import load_spec_bundle
from gridsumm.simulator import (
    PlantedCluster,
    ScenarioConfig,
    generate,
    scenario_spec_document,
)

from conftest import football_doc


def _doc(text: str, doc_id: str = "d1", source: str = "BBC", pub_time: int = 1,
         **kwargs) -> Document:
    return preprocess(
        Document(doc_id=doc_id, source=source, pub_time=pub_time, raw=text, **kwargs)
    )


def test_preprocess_two_sentences():
    sentences = preprocess_text("Rooney scored. United won.")
    assert sentences == (("Rooney", "scored", "."), ("United", "won", "."))


def test_preprocess_empty():
    assert preprocess_text("") == ()
    assert preprocess_text("   \n ") == ()


def test_preprocess_abbreviation():
    # hand-tokenized fixture: "Mr." must not end the sentence
    assert preprocess_text("Mr. Smith left.", abbreviations={"Mr."}) == (
        ("Mr", ".", "Smith", "left", "."),
    )
    assert preprocess_text("Mr. Smith left.", abbreviations=()) == (
        ("Mr", "."),
        ("Smith", "left", "."),
    )


def test_preprocess_question_and_exclamation():
    sentences = preprocess_text("Who won?! United did! Really.")
    assert sentences == (
        ("Who", "won", "?", "!"),
        ("United", "did", "!"),
        ("Really", "."),
    )


def test_recognize_single_mention(football):
    doc = _doc("Rooney scored")
    mentions = recognize_entities(doc, football.gazetteer, football.ontology)
    assert len(mentions) == 1
    mention = mentions[0]
    assert (mention.sentence, mention.start, mention.end) == (0, 0, 1)
    assert mention.instance == "Rooney"


def test_recognize_longest_match(football):
    doc = _doc("New York won")
    mentions = recognize_entities(doc, football.gazetteer, football.ontology)
    assert [(m.start, m.end, m.instance) for m in mentions] == [(0, 2, "New York")]


def test_recognize_no_hits(football):
    doc = _doc("nothing to see here .")
    assert recognize_entities(doc, football.gazetteer, football.ontology) == []


def test_extract_binding_trace(football):
    # hand trace: trigger "scored" at token 1; Person mention left is Rooney,
    # Team mention right is United
    doc = _doc("Rooney scored for United.")
    mentions = recognize_entities(doc, football.gazetteer, football.ontology)
    messages = extract_messages(
        doc, mentions, football.patterns, football.message_types, football.ontology
    )
    assert len(messages) == 1
    message = messages[0]
    assert message.type == "score"
    assert message.args == ("Rooney", "United")
    assert message.source == "BBC"
    assert message.pub_time == 1
    assert message.ref_time == 1
    assert message.token_length == 5


def test_extract_no_trigger_no_message(football):
    doc = _doc("Rooney passed to United.")
    mentions = recognize_entities(doc, football.gazetteer, football.ontology)
    assert extract_messages(
        doc, mentions, football.patterns, football.message_types, football.ontology
    ) == []


def test_extract_unbound_slot_diagnostic(football):
    # trigger present but no Person mention left of it
    doc = _doc("They scored for United.")
    mentions = recognize_entities(doc, football.gazetteer, football.ontology)
    diagnostics: list[str] = []
    messages = extract_messages(
        doc, mentions, football.patterns, football.message_types,
        football.ontology, diagnostics,
    )
    assert messages == []
    assert any("slot scorer unbound" in line for line in diagnostics)


def test_extract_nearest_mention_wins(football):
    # two Person mentions left of the trigger: the nearest one binds
    doc = _doc("Ronaldo and Rooney scored for United.")
    mentions = recognize_entities(doc, football.gazetteer, football.ontology)
    messages = extract_messages(
        doc, mentions, football.patterns, football.message_types, football.ontology
    )
    assert [m.args for m in messages] == [("Rooney", "United")]


def test_extract_one_message_per_sentence_and_pattern(football):
    # two triggers in one sentence: first occurrence anchors, one message
    doc = _doc("Rooney scored and scored for United.")
    mentions = recognize_entities(doc, football.gazetteer, football.ontology)
    messages = extract_messages(
        doc, mentions, football.patterns, football.message_types, football.ontology
    )
    assert len(messages) == 1


def test_extract_nth_in_sentence_rule(football):
    doc = football_doc()
    doc["patterns"] = [
        {
            "message_type": "score",
            "triggers": ["scored"],
            "bindings": [
                {"slot": "scorer", "concept": "Person", "rule": "nth-in-sentence", "n": 1},
                {"slot": "team", "concept": "Team", "rule": "nth-in-sentence", "n": 2},
            ],
        }
    ]
    bundle = load_spec_bundle(doc)
    document = _doc("Rooney scored against Arsenal for United.")
    mentions = recognize_entities(document, bundle.gazetteer, bundle.ontology)
    messages = extract_messages(
        document, mentions, bundle.patterns, bundle.message_types, bundle.ontology
    )
    assert [m.args for m in messages] == [("Rooney", "United")]


def test_ref_time_overrides(football):
    doc = _doc(
        "Rooney scored for United. Rooney scored for United.",
        pub_time=9,
        ref_time=4,
        sentence_ref_times={1: 2},
    )
    mentions = recognize_entities(doc, football.gazetteer, football.ontology)
    messages = extract_messages(
        doc, mentions, football.patterns, football.message_types, football.ontology
    )
    assert [m.ref_time for m in messages] == [4, 2]
    assert all(m.pub_time == 9 for m in messages)


def test_pattern_must_cover_slots(football):
    doc = football_doc()
    doc["patterns"] = [
        {
            "message_type": "score",
            "triggers": ["scored"],
            "bindings": [
                {"slot": "scorer", "concept": "Person", "rule": "first-left-of-trigger"}
            ],
        }
    ]
    with pytest.raises(SpecError, match="every slot"):
        load_spec_bundle(doc)


def test_load_corpus_document_round_trip():
    payload = {
        "doc_id": "d1",
        "source": "BBC",
        "pub_time": 3,
        "text": "Rooney scored for United.",
        "ref_time": 2,
        "sentence_ref_times": {"0": 1},
    }
    doc = load_corpus_document(json.dumps(payload))
    assert doc.doc_id == "d1"
    assert doc.ref_time == 2
    assert doc.sentence_ref_times == {0: 1}
    assert corpus_document(doc) == payload


def test_load_corpus_document_errors():
    with pytest.raises(SpecError, match="doc_id"):
        load_corpus_document({"source": "BBC", "pub_time": 0, "text": ""})
    with pytest.raises(SpecError, match="line"):
        load_corpus_document("{not json")


def test_extraction_deterministic(football):
    docs = [
        _doc("Rooney scored for United. United won the match.", doc_id="a"),
        _doc("Ronaldo scored for Arsenal.", doc_id="b", source="CNN"),
    ]
    first = extract_corpus(
        docs, football.gazetteer, football.patterns, football.message_types,
        football.ontology,
    )
    second = extract_corpus(
        list(reversed(docs)), football.gazetteer, football.patterns,
        football.message_types, football.ontology,
    )
    assert first == second
    assert first  # non-trivial fixture


def _random_planted(rng: random.Random, n_sources: int, timeframes: int) -> PlantedCluster:
    message_type = rng.choice(["score", "win"])
    args = ("Alpha", "Beta") if message_type == "score" else ("Beta",)
    return PlantedCluster(
        timeframe=rng.randint(1, timeframes),
        support=rng.randint(1, n_sources),
        message_type=message_type,
        args=args,
    )


def test_extracted_messages_always_validate():
    # randomized scenario corpora, including dropped sentences
    rng = random.Random(2024)
    for trial in range(15):
        n_sources = rng.randint(1, 4)
        timeframes = rng.randint(1, 3)
        config = ScenarioConfig(
            n_sources=n_sources,
            timeframes=timeframes,
            planted_clusters=tuple(
                _random_planted(rng, n_sources, timeframes)
                for _ in range(rng.randint(0, 3))
            ),
            rng_seed=trial,
            drop_rate=rng.choice([0.0, 0.3]),
        )
        docs, _ = generate(config)
        bundle = load_spec_bundle(scenario_spec_document(config))
        processed = [preprocess(d) for d in docs]
        messages = extract_corpus(
            processed, bundle.gazetteer, bundle.patterns, bundle.message_types,
            bundle.ontology,
        )
        assert messages or not config.planted_clusters or config.drop_rate > 0
        for message in messages:
            assert validate_message(
                bundle.ontology, bundle.message_types, message
            ).ok


def test_self_evaluation_is_perfect(football):
    from gridsumm.evaluation import match_messages, precision, recall

    docs = [
        _doc("Rooney scored for United. United won the match.", doc_id="a"),
        _doc("Ronaldo scored for Arsenal.", doc_id="b", source="CNN"),
    ]
    messages = extract_corpus(
        docs, football.gazetteer, football.patterns, football.message_types,
        football.ontology,
    )
    counts = match_messages(messages, messages)
    assert precision(counts) == 100.0
    assert recall(counts) == 100.0
