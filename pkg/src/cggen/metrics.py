"""Dataset variability statistics: node counts, label counts, arity mix."""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Sequence

from .core import ConceptualGraph
from .errors import ConfigError


@dataclass(frozen=True, eq=False)
class DatasetStats:
    """Per-dataset averages: nodes per CG, unique labels per CG, arity counts.

    Unique labels count concept types, relation types and markers together;
    stddevs are population standard deviations over the dataset. Arity
    counts are the mean number of relation nodes of each arity per CG.
    """

    cg_count: int
    nb_nodes_mean: float
    nb_nodes_stddev: float
    nb_labels_mean: float
    nb_labels_stddev: float
    arity_counts: dict[int, float]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DatasetStats):
            return NotImplemented
        return (
            self.cg_count == other.cg_count
            and self.nb_nodes_mean == other.nb_nodes_mean
            and self.nb_nodes_stddev == other.nb_nodes_stddev
            and self.nb_labels_mean == other.nb_labels_mean
            and self.nb_labels_stddev == other.nb_labels_stddev
            and self.arity_counts == other.arity_counts
        )


def compute_stats(dataset: Sequence[ConceptualGraph]) -> DatasetStats:
    """Recount nodes, labels and per-arity relation nodes over a dataset."""
    if not dataset:
        raise ConfigError("dataset must be non-empty")

    node_counts: list[int] = []
    label_counts: list[int] = []
    arity_totals: dict[int, list[int]] = {}

    for graph in dataset:
        node_counts.append(graph.size)
        labels: set[str] = set()
        per_arity: dict[int, int] = {}
        for node in graph.concepts.values():
            labels.add(node.type_id)
            if node.marker is not None:
                labels.add(node.marker)
        for node in graph.relations.values():
            labels.add(node.type_id)
            arity = len(node.args)
            per_arity[arity] = per_arity.get(arity, 0) + 1
        label_counts.append(len(labels))
        for arity, count in per_arity.items():
            arity_totals.setdefault(arity, [])
        for arity in arity_totals:
            arity_totals[arity].append(per_arity.get(arity, 0))

    # Backfill zeros for graphs seen before an arity first appeared.
    n = len(dataset)
    for arity, counts in arity_totals.items():
        if len(counts) < n:
            arity_totals[arity] = [0] * (n - len(counts)) + counts

    return DatasetStats(
        cg_count=n,
        nb_nodes_mean=statistics.fmean(node_counts),
        nb_nodes_stddev=statistics.pstdev(node_counts),
        nb_labels_mean=statistics.fmean(label_counts),
        nb_labels_stddev=statistics.pstdev(label_counts),
        arity_counts={
            arity: statistics.fmean(counts) for arity, counts in sorted(arity_totals.items())
        },
    )


def stats_table(stats: DatasetStats) -> str:
    """One table row per dataset, higher arities as extra columns."""
    arities = sorted(set(stats.arity_counts) | {1, 2, 3})
    headers = ["NbN (avg ± sd)", "NbL (avg ± sd)"] + [f"Ar{a}" for a in arities]
    row = [
        f"{stats.nb_nodes_mean:.1f} ± {stats.nb_nodes_stddev:.1f}",
        f"{stats.nb_labels_mean:.1f} ± {stats.nb_labels_stddev:.1f}",
    ] + [f"{stats.arity_counts.get(a, 0.0):.1f}" for a in arities]
    widths = [max(len(h), len(v)) for h, v in zip(headers, row)]
    header_line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    value_line = "  ".join(v.ljust(w) for v, w in zip(row, widths))
    return f"{header_line}\n{value_line}"
