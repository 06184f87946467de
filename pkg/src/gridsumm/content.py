"""Content determination: redundancy scoring and budgeted selection.

Messages carrying the same information across documents are grouped into
clusters; a cluster's probability of entering the summary is the share of
corpus documents supporting it. Selection walks the clusters in decreasing
probability and keeps every cluster that still fits the token budget
(skip-and-continue), then the chosen representatives induce the sub-grid.

Information identity is exact message equivalence: same type, same ordered
argument instances, same reference time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .domain import Message
from .grid import Grid, build_grid

BLACK = "black"
GREY = "grey"
WHITE = "white"

NORMALIZATIONS = ("global", "per-timeframe")


@dataclass(frozen=True)
class InformationCluster:
    """One equivalence class of messages with its document support.

    ``cost`` is the minimum originating-sentence length over members, a
    proxy for what the cluster would add to an extractive summary. ``p`` is
    |support| / n as an exact rational.
    """

    id: str
    members: tuple[str, ...]
    support: frozenset[str]
    cost: int
    p: Fraction


@dataclass(frozen=True)
class CorpusStats:
    """Document count and summed token length of the corpus."""

    n: int
    total_length: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"corpus must contain at least one document, got n={self.n}")
        if self.total_length < 0:
            raise ValueError(f"negative total_length: {self.total_length}")


@dataclass(frozen=True)
class SelectionConfig:
    """Compression rate in (0, 1] plus selection policy knobs."""

    compression_rate: float
    policy: str = "skip-and-continue"
    normalization: str = "global"

    def __post_init__(self) -> None:
        if not 0 < self.compression_rate <= 1:
            raise ValueError(
                f"compression rate must be in (0, 1], got {self.compression_rate}"
            )
        if self.policy != "skip-and-continue":
            raise ValueError(f"unknown selection policy: {self.policy!r}")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"unknown normalization: {self.normalization!r}")


@dataclass(frozen=True)
class Selection:
    """Chosen clusters in selection order: (cluster id, representative id)."""

    picks: tuple[tuple[str, str], ...]
    spent: int
    budget: int


def corpus_stats(documents: Sequence) -> CorpusStats:
    """Stats over preprocessed documents (anything with .sentences)."""
    total = sum(len(tokens) for doc in documents for tokens in doc.sentences)
    return CorpusStats(n=len(documents), total_length=total)


def cluster_key(message: Message) -> tuple[str, tuple[str, ...], int]:
    return (message.type, message.args, message.ref_time)


def cluster_id(message: Message) -> str:
    return f"{message.type}({','.join(message.args)})@t{message.ref_time}"


def cluster_information(
    messages: Sequence[Message],
    doc_times: Mapping[str, int],
    normalization: str = "global",
) -> list[InformationCluster]:
    """Partition messages into information clusters, scored and sorted.

    ``doc_times`` maps every corpus document id to its publication time; its
    size is the document count n. Under per-timeframe normalization the
    denominator is instead the number of documents published in the
    cluster's time frame (never smaller than the support itself, so p stays
    in [0, 1]). Clusters come back sorted by (-p, ref_time, id).
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization: {normalization!r}")
    groups: dict[tuple[str, tuple[str, ...], int], list[Message]] = {}
    for message in messages:
        if message.doc_id not in doc_times:
            raise ValueError(
                f"message {message.id!r} cites unknown document {message.doc_id!r}"
            )
        groups.setdefault(cluster_key(message), []).append(message)

    n = len(doc_times)
    clusters: list[tuple[InformationCluster, int]] = []
    for (_, _, ref_time), members in groups.items():
        support = frozenset(m.doc_id for m in members)
        if normalization == "per-timeframe":
            in_frame = sum(1 for t in doc_times.values() if t == ref_time)
            denominator = max(in_frame, len(support))
        else:
            denominator = n
        cluster = InformationCluster(
            id=cluster_id(members[0]),
            members=tuple(sorted(m.id for m in members)),
            support=support,
            cost=min(m.token_length for m in members),
            p=Fraction(len(support), denominator),
        )
        clusters.append((cluster, ref_time))
    clusters.sort(key=lambda pair: (-pair[0].p, pair[1], pair[0].id))
    return [cluster for cluster, _ in clusters]


def shade(cluster: InformationCluster) -> str:
    """Black: shared by all documents; white: a single document; grey between."""
    if cluster.p == 1:
        return BLACK
    if len(cluster.support) == 1:
        return WHITE
    return GREY


def compute_budget(stats: CorpusStats, config: SelectionConfig) -> int:
    """Token budget: floor(compression rate x total corpus length)."""
    return math.floor(config.compression_rate * stats.total_length)


def representative(
    cluster: InformationCluster, messages: Mapping[str, Message] | Iterable[Message]
) -> str:
    """Earliest-published member; ties broken by source, then message id."""
    lookup = messages if isinstance(messages, Mapping) else {m.id: m for m in messages}
    members = [lookup[member_id] for member_id in cluster.members]
    best = min(members, key=lambda m: (m.pub_time, m.source, m.id))
    return best.id


def select(
    clusters: Sequence[InformationCluster],
    budget: int,
    config: SelectionConfig,
    messages: Mapping[str, Message] | Iterable[Message],
) -> Selection:
    """Greedy traversal in cluster order; a cluster that does not fit is
    skipped and the traversal continues."""
    lookup = messages if isinstance(messages, Mapping) else {m.id: m for m in messages}
    picks: list[tuple[str, str]] = []
    spent = 0
    for cluster in clusters:
        if spent + cluster.cost <= budget:
            picks.append((cluster.id, representative(cluster, lookup)))
            spent += cluster.cost
    return Selection(tuple(picks), spent, budget)


def subgrid(grid: Grid, selection: Selection) -> Grid:
    """Vertex-induced subgraph on the selected representatives."""
    keep = {rep for _, rep in selection.picks}
    nodes = [grid.nodes[node_id] for node_id in sorted(keep)]
    edges = [e for e in grid.edges if e.from_id in keep and e.to_id in keep]
    return build_grid(nodes, edges)


def selection_report(
    clusters: Sequence[InformationCluster],
    selection: Selection,
    config: SelectionConfig,
    n: int,
    messages: Mapping[str, Message] | Iterable[Message],
) -> dict:
    """JSON-ready report: every cluster in traversal order plus the echoes."""
    lookup = messages if isinstance(messages, Mapping) else {m.id: m for m in messages}
    picked = {picked_id for picked_id, _ in selection.picks}
    records = []
    for cluster in clusters:
        records.append(
            {
                "id": cluster.id,
                "p": float(cluster.p),
                "shade": shade(cluster),
                "cost": cluster.cost,
                "representative": representative(cluster, lookup),
                "members": list(cluster.members),
                "support": sorted(cluster.support),
                "selected": cluster.id in picked,
            }
        )
    return {
        "c": config.compression_rate,
        "n": n,
        "normalization": config.normalization,
        "policy": config.policy,
        "budget": selection.budget,
        "spent": selection.spent,
        "clusters": records,
    }
