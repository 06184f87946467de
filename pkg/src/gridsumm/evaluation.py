"""Precision / recall / F-measure scoring of predicted grids against gold.

Matching is exact-tuple and one-to-one: a predicted message matches a gold
message with the same (doc_id, type, args, ref_time); a predicted relation
matches on (relation name, from message key, to message key). Percentages
throughout.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .domain import Message
from .grid import Grid


@dataclass(frozen=True)
class MatchCounts:
    tp: int
    fp: int
    fn: int


@dataclass(frozen=True)
class MetricRow:
    precision: float
    recall: float
    f_measure: float


@dataclass(frozen=True)
class EvalReport:
    messages: MetricRow
    sdrs: MetricRow


def message_key(message: Message) -> tuple:
    return (message.doc_id, message.type, message.args, message.ref_time)


def _match_keys(gold: Iterable[Hashable], predicted: Iterable[Hashable]) -> MatchCounts:
    """Greedy one-to-one matching of equal keys (multiset intersection)."""
    gold_counts = Counter(gold)
    predicted_counts = Counter(predicted)
    tp = sum(
        min(count, gold_counts[key]) for key, count in predicted_counts.items()
    )
    return MatchCounts(
        tp=tp,
        fp=sum(predicted_counts.values()) - tp,
        fn=sum(gold_counts.values()) - tp,
    )


def match_messages(
    gold: Sequence[Message], predicted: Sequence[Message]
) -> MatchCounts:
    return _match_keys(
        (message_key(m) for m in gold), (message_key(m) for m in predicted)
    )


def precision(counts: MatchCounts) -> float:
    """100 * tp / (tp + fp); 0 when nothing was predicted."""
    denominator = counts.tp + counts.fp
    return 100.0 * counts.tp / denominator if denominator else 0.0


def recall(counts: MatchCounts) -> float:
    """100 * tp / (tp + fn); 0 when there is no gold."""
    denominator = counts.tp + counts.fn
    return 100.0 * counts.tp / denominator if denominator else 0.0


def f_measure(pr: float, rc: float) -> float:
    """Harmonic mean of precision and recall, in percentage points."""
    return 2.0 * pr * rc / (pr + rc) if pr + rc else 0.0


def metric_row(counts: MatchCounts) -> MetricRow:
    pr, rc = precision(counts), recall(counts)
    return MetricRow(pr, rc, f_measure(pr, rc))


def _relation_keys(grid: Grid) -> list[tuple]:
    return [
        (edge.spec, message_key(grid.nodes[edge.from_id]),
         message_key(grid.nodes[edge.to_id]))
        for edge in grid.edges
    ]


def evaluate_run(gold: Grid, predicted: Grid) -> EvalReport:
    """Score a predicted grid against a gold grid over the same corpus."""
    message_counts = match_messages(
        list(gold.nodes.values()), list(predicted.nodes.values())
    )
    relation_counts = _match_keys(_relation_keys(gold), _relation_keys(predicted))
    return EvalReport(
        messages=metric_row(message_counts), sdrs=metric_row(relation_counts)
    )


def report_document(report: EvalReport) -> dict:
    return {
        "messages": {
            "precision": report.messages.precision,
            "recall": report.messages.recall,
            "f_measure": report.messages.f_measure,
        },
        "sdrs": {
            "precision": report.sdrs.precision,
            "recall": report.sdrs.recall,
            "f_measure": report.sdrs.f_measure,
        },
    }


def report_table(report: EvalReport) -> str:
    """Two-row aligned text table (Messages / SDRs x Pr / Rc / FM)."""
    rows = [("Messages", report.messages), ("SDRs", report.sdrs)]
    lines = [f"{'':<10}{'Pr':>10}{'Rc':>10}{'FM':>10}"]
    for label, row in rows:
        lines.append(
            f"{label:<10}"
            f"{row.precision:>9.2f}%"
            f"{row.recall:>9.2f}%"
            f"{row.f_measure:>9.2f}%"
        )
    return "\n".join(lines) + "\n"
