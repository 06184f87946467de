"""Command-line orchestration of the summarization pipeline.

Subcommands: validate (check spec documents), simulate (emit a synthetic
corpus with ground truth), pipeline (preprocess -> extract -> relations ->
grid -> cluster -> select -> subgrid), evaluate (score a predicted grid
against gold), export (re-serialize a grid dump).

Logs go to standard error; data goes to files only. Exit codes: 0 success,
1 validation failure, 2 I/O failure, 3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from .content import (
    InformationCluster,
    Selection,
    SelectionConfig,
    cluster_information,
    compute_budget,
    corpus_stats,
    select,
    selection_report,
    subgrid,
)
from .domain import (
    Message,
    MessageTypeSpec,
    Ontology,
    SpecError,
    load_message_types,
    load_ontology,
)
from .evaluation import evaluate_run, report_document, report_table
from .extraction import (
    DEFAULT_ABBREVIATIONS,
    Document,
    Gazetteer,
    TriggerPattern,
    corpus_document,
    extract_corpus,
    load_corpus_document,
    load_gazetteer,
    load_patterns,
    preprocess,
)
from .grid import Grid, GridError, build_grid, export_grid, load_grid
from .sdr import RelationInstance, RelationSpec, apply_relations, load_relation_specs
from .simulator import (
    ScenarioError,
    generate,
    ground_truth_document,
    load_scenario,
    scenario_spec_document,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INTERNAL = 3


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


@dataclass(frozen=True)
class SpecBundle:
    """Everything one spec document declares about a topic."""

    ontology: Ontology
    message_types: dict[str, MessageTypeSpec]
    gazetteer: Gazetteer
    patterns: tuple[TriggerPattern, ...]
    relations: tuple[RelationSpec, ...]


def load_spec_bundle(document: str | dict) -> SpecBundle:
    ontology = load_ontology(document)
    if isinstance(document, str):
        document = json.loads(document)
    message_types = load_message_types(document, ontology)
    gazetteer = load_gazetteer(document.get("gazetteer", {}), ontology)
    patterns = load_patterns(document.get("patterns", []), message_types, ontology)
    relations = load_relation_specs(
        document.get("relations", []), message_types, ontology
    )
    return SpecBundle(ontology, message_types, gazetteer, patterns, relations)


def load_spec_bundle_file(path: Path) -> SpecBundle:
    return load_spec_bundle(path.read_text(encoding="utf-8"))


@dataclass(frozen=True)
class RunManifest:
    """Resolved run inputs: spec, corpus files, output dir, selection knobs."""

    spec_path: Path
    corpus_paths: tuple[Path, ...]
    out_dir: Path
    selection: SelectionConfig
    seed: int
    abbreviations: frozenset[str]


def load_manifest(
    path: Path,
    compression_rate: float | None = None,
    normalization: str | None = None,
    seed: int | None = None,
    out: Path | None = None,
) -> RunManifest:
    """Load a manifest file; flags override its fields. Relative paths are
    resolved against the manifest's directory."""
    doc = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise SpecError(f"{path}: manifest must be a JSON object")
    base = path.resolve().parent

    spec_entry = doc.get("spec")
    if not isinstance(spec_entry, str):
        raise SpecError(f"{path}: manifest needs a 'spec' path")
    spec_path = base / spec_entry
    if not spec_path.is_file():
        raise FileNotFoundError(f"spec file not found: {spec_path}")

    corpus_entry = doc.get("corpus")
    corpus_paths: list[Path]
    if isinstance(corpus_entry, str):
        corpus_dir = base / corpus_entry
        if not corpus_dir.is_dir():
            raise FileNotFoundError(f"corpus directory not found: {corpus_dir}")
        corpus_paths = sorted(corpus_dir.glob("*.json"))
    elif isinstance(corpus_entry, list):
        corpus_paths = [base / entry for entry in corpus_entry]
        for corpus_path in corpus_paths:
            if not corpus_path.is_file():
                raise FileNotFoundError(f"corpus file not found: {corpus_path}")
    else:
        raise SpecError(f"{path}: manifest needs a 'corpus' directory or file list")

    selection = SelectionConfig(
        compression_rate=(
            compression_rate
            if compression_rate is not None
            else float(doc.get("compression_rate", 1.0))
        ),
        normalization=(
            normalization
            if normalization is not None
            else doc.get("normalization", "global")
        ),
    )
    return RunManifest(
        spec_path=spec_path,
        corpus_paths=tuple(corpus_paths),
        out_dir=(out if out is not None else base / doc.get("out", "out")),
        selection=selection,
        seed=seed if seed is not None else int(doc.get("seed", 0)),
        abbreviations=frozenset(doc.get("abbreviations", DEFAULT_ABBREVIATIONS)),
    )


@dataclass
class PipelineResult:
    documents: list[Document]
    messages: list[Message]
    relations: list[RelationInstance]
    grid: Grid
    clusters: list[InformationCluster]
    selection: Selection
    subgrid: Grid
    diagnostics: list[str]
    n: int
    budget: int


def run_pipeline(
    bundle: SpecBundle,
    documents: Sequence[Document],
    config: SelectionConfig,
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
    trace: list[str] | None = None,
) -> PipelineResult:
    """Run all pipeline stages in memory; ``trace`` records stage names."""
    stages = trace if trace is not None else []

    stages.append("preprocess")
    docs = sorted(
        (preprocess(doc, abbreviations) for doc in documents),
        key=lambda d: d.doc_id,
    )

    stages.append("extract")
    diagnostics: list[str] = []
    messages = extract_corpus(
        docs, bundle.gazetteer, bundle.patterns, bundle.message_types,
        bundle.ontology, diagnostics,
    )

    stages.append("relations")
    relations = apply_relations(
        messages, bundle.relations, bundle.ontology, bundle.message_types
    )

    stages.append("grid")
    full_grid = build_grid(messages, relations)

    stages.append("cluster")
    doc_times = {doc.doc_id: doc.pub_time for doc in docs}
    clusters = cluster_information(messages, doc_times, config.normalization)

    stages.append("select")
    budget = compute_budget(corpus_stats(docs), config) if docs else 0
    selection = select(clusters, budget, config, full_grid.nodes)

    stages.append("subgrid")
    sub = subgrid(full_grid, selection)

    return PipelineResult(
        documents=docs,
        messages=messages,
        relations=relations,
        grid=full_grid,
        clusters=clusters,
        selection=selection,
        subgrid=sub,
        diagnostics=diagnostics,
        n=len(docs),
        budget=budget,
    )


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    _log(f"wrote {path}")


def cmd_validate(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.config)
    load_spec_bundle_file(manifest.spec_path)
    for corpus_path in manifest.corpus_paths:
        load_corpus_document(corpus_path.read_text(encoding="utf-8"))
    _log(
        f"ok: spec {manifest.spec_path} and {len(manifest.corpus_paths)} "
        f"corpus file(s) are valid"
    )
    return EXIT_OK


def cmd_pipeline(args: argparse.Namespace) -> int:
    manifest = load_manifest(
        args.config,
        compression_rate=args.compression_rate,
        normalization=args.normalization,
        seed=args.seed,
        out=args.out,
    )
    trace = ["load"]
    try:
        bundle = load_spec_bundle_file(manifest.spec_path)
        trace.append("corpus")
        documents = [
            load_corpus_document(path.read_text(encoding="utf-8"))
            for path in manifest.corpus_paths
        ]
        result = run_pipeline(
            bundle, documents, manifest.selection, manifest.abbreviations, trace
        )
    except Exception as e:
        _log(f"pipeline failed at stage {trace[-1]}: {e}")
        raise

    for line in result.diagnostics:
        _log(f"skip: {line}")
    _log(
        f"grid: {len(result.grid.nodes)} node(s), {len(result.grid.edges)} edge(s); "
        f"selected {len(result.selection.picks)}/{len(result.clusters)} cluster(s), "
        f"spent {result.selection.spent}/{result.budget} tokens"
    )
    out = manifest.out_dir
    _write(out / "grid.json", export_grid(result.grid, "json"))
    _write(out / "grid.dot", export_grid(result.grid, "dot"))
    _write(
        out / "selection.json",
        _dump_json(
            selection_report(
                result.clusters,
                result.selection,
                manifest.selection,
                result.n,
                result.grid.nodes,
            )
        ),
    )
    _write(out / "subgrid.json", export_grid(result.subgrid, "json"))
    _write(out / "subgrid.dot", export_grid(result.subgrid, "dot"))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    config = load_scenario(args.config.read_text(encoding="utf-8"))
    if args.seed is not None:
        config = replace(config, rng_seed=args.seed)
    documents, truth = generate(config)
    out: Path = args.out
    _write(out / "spec.json", _dump_json(scenario_spec_document(config)))
    for doc in documents:
        _write(out / "corpus" / f"{doc.doc_id}.json", _dump_json(corpus_document(doc)))
    _write(out / "ground_truth.json", _dump_json(ground_truth_document(truth)))
    _write(
        out / "manifest.json",
        _dump_json(
            {
                "spec": "spec.json",
                "corpus": "corpus",
                "out": "run",
                "compression_rate": 1.0,
                "normalization": "global",
                "seed": config.rng_seed,
            }
        ),
    )
    _log(f"simulated {len(documents)} document(s), {len(truth.clusters)} cluster(s)")
    return EXIT_OK


def _load_grid_file(path: Path) -> Grid:
    try:
        return load_grid(path.read_text(encoding="utf-8"))
    except GridError as e:
        # invalid user input, not an internal breach
        raise SpecError(f"{path}: {e}") from None


def cmd_evaluate(args: argparse.Namespace) -> int:
    gold = _load_grid_file(args.gold)
    predicted = _load_grid_file(args.predicted)
    report = evaluate_run(gold, predicted)
    table = report_table(report)
    out: Path = args.out
    _write(out / "report.json", _dump_json(report_document(report)))
    _write(out / "report.txt", table)
    _log(table.rstrip("\n"))
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    grid = _load_grid_file(args.grid)
    _write(args.out / f"grid.{args.format}", export_grid(grid, args.format))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridsumm",
        description=(
            "Content determination for multi-document summaries of evolving "
            "events: extract typed messages, connect them into a grid, and "
            "select a budget-respecting sub-grid."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check spec and corpus documents")
    p_validate.add_argument("--config", type=Path, required=True, help="run manifest")
    p_validate.set_defaults(func=cmd_validate)

    p_simulate = sub.add_parser("simulate", help="emit a synthetic corpus")
    p_simulate.add_argument("--config", type=Path, required=True, help="scenario JSON")
    p_simulate.add_argument("--out", type=Path, required=True, help="output directory")
    p_simulate.add_argument("--seed", type=int, default=None, help="override rng seed")
    p_simulate.set_defaults(func=cmd_simulate)

    p_pipeline = sub.add_parser("pipeline", help="run the full pipeline")
    p_pipeline.add_argument("--config", type=Path, required=True, help="run manifest")
    p_pipeline.add_argument("--compression-rate", type=float, default=None)
    p_pipeline.add_argument(
        "--normalization", choices=["global", "per-timeframe"], default=None
    )
    p_pipeline.add_argument("--seed", type=int, default=None)
    p_pipeline.add_argument("--out", type=Path, default=None, help="output directory")
    p_pipeline.set_defaults(func=cmd_pipeline)

    p_evaluate = sub.add_parser("evaluate", help="score predicted grid against gold")
    p_evaluate.add_argument("--gold", type=Path, required=True, help="gold grid JSON")
    p_evaluate.add_argument(
        "--predicted", type=Path, required=True, help="predicted grid JSON"
    )
    p_evaluate.add_argument("--out", type=Path, required=True, help="output directory")
    p_evaluate.set_defaults(func=cmd_evaluate)

    p_export = sub.add_parser("export", help="re-serialize a grid dump")
    p_export.add_argument("--grid", type=Path, required=True, help="grid JSON file")
    p_export.add_argument("--format", choices=["dot", "json"], default="dot")
    p_export.add_argument("--out", type=Path, required=True, help="output directory")
    p_export.set_defaults(func=cmd_export)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as e:
        _log(f"error: {e}")
        return EXIT_IO
    except (SpecError, ScenarioError, ValueError) as e:
        _log(f"error: {e}")
        return EXIT_VALIDATION
    except GridError as e:
        _log(f"internal error: {e}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
