"""Content determination for multi-document summarization of evolving events.

Typed messages extracted from multi-source document streams are connected
by synchronic and diachronic relations into a grid (a DAG); cross-document
information redundancy drives a budgeted greedy selection whose output is
the vertex-induced sub-grid.
"""

from .content import (
    CorpusStats,
    InformationCluster,
    Selection,
    SelectionConfig,
    cluster_information,
    compute_budget,
    representative,
    select,
    shade,
    subgrid,
)
from .domain import (
    Concept,
    Message,
    MessageTypeSpec,
    Ontology,
    OntologyError,
    SpecError,
    load_message_types,
    load_ontology,
    subsumes,
    validate_message,
)
from .evaluation import (
    EvalReport,
    MatchCounts,
    evaluate_run,
    f_measure,
    match_messages,
    precision,
    recall,
)
from .extraction import (
    Document,
    Gazetteer,
    TriggerPattern,
    extract_corpus,
    extract_messages,
    preprocess,
    preprocess_text,
    recognize_entities,
)
from .grid import Grid, GridError, build_grid, check_grid, export_grid, load_grid
from .sdr import (
    ConstraintExpr,
    RelationInstance,
    RelationSpec,
    apply_relations,
    compile_relation_spec,
    eval_constraint,
)
from .simulator import GroundTruth, ScenarioConfig, ScenarioError, diffuse, generate

__version__ = "0.1.0"

__all__ = [
    "Concept",
    "ConstraintExpr",
    "CorpusStats",
    "Document",
    "EvalReport",
    "Gazetteer",
    "Grid",
    "GridError",
    "GroundTruth",
    "InformationCluster",
    "MatchCounts",
    "Message",
    "MessageTypeSpec",
    "Ontology",
    "OntologyError",
    "RelationInstance",
    "RelationSpec",
    "ScenarioConfig",
    "ScenarioError",
    "Selection",
    "SelectionConfig",
    "SpecError",
    "TriggerPattern",
    "apply_relations",
    "build_grid",
    "check_grid",
    "cluster_information",
    "compile_relation_spec",
    "compute_budget",
    "diffuse",
    "evaluate_run",
    "eval_constraint",
    "export_grid",
    "extract_corpus",
    "extract_messages",
    "f_measure",
    "generate",
    "load_grid",
    "load_message_types",
    "load_ontology",
    "match_messages",
    "precision",
    "preprocess",
    "preprocess_text",
    "recall",
    "recognize_entities",
    "representative",
    "select",
    "shade",
    "subgrid",
    "subsumes",
    "validate_message",
]
