"""The generation loop: instantiate components, specialize, join, repeat.

Each output graph starts empty and absorbs uniformly drawn gamma-CG
instances until it reaches the configured minimum node count. Instances are
specialized label by label (only labels that were type variables, at most
``max_spe`` downward steps each) and joined in: concept nodes sharing an
individual marker collapse to one node that keeps the most specific of the
types and inherits both neighborhoods.

Dataset generation derives one independent RNG stream per output index from
the seed, so results are reproducible and independent of scheduling.
"""

from __future__ import annotations

import hashlib
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import (
    ConceptNode,
    ConceptualGraph,
    Marker,
    RelationNode,
    Vocabulary,
    _walk_down,
    is_subtype,
    most_specific,
    validate_graph,
)
from .errors import ConfigError, GenerationError, InstantiationError, StructureError
from .gamma import (
    TARGET_CONCEPT_TYPE,
    GammaCG,
    instantiate_detailed,
    validate_domain,
)

POLICY_ARITY_ONLY = "arity-only"
POLICY_SIGNATURE_COMPATIBLE = "signature-compatible"

# Attempts per component draw before the gamma-CG is set aside for this CG.
INSTANTIATION_RETRIES = 16
# Hard cap on component draws per CG; trips only on inputs that cannot grow.
_MAX_DRAWS_PER_CG = 100_000


def derive_rng(seed: int, *parts: object) -> random.Random:
    """An independent stream keyed by (seed, parts), stable across platforms."""
    material = ":".join([str(seed), *(str(part) for part in parts)])
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


@dataclass(frozen=True)
class GeneratorConfig:
    """Stopping conditions and policies of the generation loop."""

    max_cgs: int
    min_size: int
    max_spe: int = 0
    seed: int = 0
    relation_domain_policy: str = POLICY_SIGNATURE_COMPATIBLE

    def __post_init__(self) -> None:
        if self.max_cgs < 1:
            raise ConfigError("max_cgs must be >= 1")
        if self.min_size < 1:
            raise ConfigError("min_size must be >= 1")
        if self.max_spe < 0:
            raise ConfigError("max_spe must be >= 0")
        if self.relation_domain_policy not in (
            POLICY_ARITY_ONLY,
            POLICY_SIGNATURE_COMPATIBLE,
        ):
            raise ConfigError(
                f"unknown relation domain policy {self.relation_domain_policy!r}"
            )


class MarkerMint:
    """Mints fresh individual markers on top of a vocabulary's registry.

    Minted ids live in a caller-chosen namespace so that independently
    minted sets (one per generated CG) never collide and can be merged into
    the vocabulary in any order.
    """

    def __init__(self, vocab: Vocabulary, namespace: str = "mint") -> None:
        self._vocab = vocab
        self._namespace = namespace
        self._counter = 0
        self.minted: dict[str, Marker] = {}
        self._all = dict(vocab.markers)

    @property
    def markers(self) -> Mapping[str, Marker]:
        return self._all

    def mint(self, concept_type: str) -> str:
        self._vocab.concepts.require(concept_type)
        while True:
            candidate = f"{self._namespace}-m{self._counter}"
            self._counter += 1
            if candidate not in self._all:
                break
        marker = Marker(candidate, concept_type)
        self.minted[candidate] = marker
        self._all[candidate] = marker
        return candidate

    def extended_vocabulary(self) -> Vocabulary:
        return self._vocab.with_markers(sorted(self.minted.values(), key=lambda m: m.marker_id))


@dataclass(frozen=True)
class ComponentDraw:
    """Provenance of one component absorbed into a generated CG."""

    gamma_name: str
    assignments: tuple[tuple[str, str], ...]
    specialisations: tuple[tuple[str, int], ...]
    merged: tuple[tuple[str, str, str], ...]
    skipped_merges: tuple[tuple[str, str, str], ...]


@dataclass(frozen=True)
class GenerationProvenance:
    cg_index: int
    draws: tuple[ComponentDraw, ...]


@dataclass(frozen=True)
class DatasetResult:
    """Generated graphs, their provenance, and the marker-extended vocabulary."""

    graphs: tuple[ConceptualGraph, ...]
    provenances: tuple[GenerationProvenance, ...]
    vocabulary: Vocabulary


class _Assembler:
    """Folds graphs into a growing union, merging coreferent concept nodes.

    Each absorbed concept either merges into an already-present node with
    the same marker (keeping the most specific of the two types) or is added
    as-is; candidates with an incomparable type leave the pair unmerged, so
    a marker may legitimately sit on several nodes. Relation nodes are
    always added, with argument references redirected to merged nodes.
    """

    def __init__(self, vocab: Vocabulary) -> None:
        self._vocab = vocab
        self._concepts: dict[str, ConceptNode] = {}
        self._relations: dict[str, RelationNode] = {}
        self._by_marker: dict[str, list[str]] = {}

    @property
    def size(self) -> int:
        return len(self._concepts) + len(self._relations)

    def _fold(
        self,
        node: ConceptNode,
        merged: list[tuple[str, str, str]],
        skipped: list[tuple[str, str, str]],
    ) -> str:
        if node.marker is None:
            self._concepts[node.node_id] = node
            return node.node_id
        candidates = self._by_marker.setdefault(node.marker, [])
        for kept_id in candidates:
            kept = self._concepts[kept_id]
            winner = most_specific(self._vocab.concepts, kept.type_id, node.type_id)
            if winner is None:
                skipped.append((node.marker, kept_id, node.node_id))
                continue
            if winner != kept.type_id:
                self._concepts[kept_id] = ConceptNode(kept_id, winner, node.marker)
            merged.append((node.marker, kept_id, node.node_id))
            return kept_id
        self._concepts[node.node_id] = node
        candidates.append(node.node_id)
        return node.node_id

    def absorb(
        self, graph: ConceptualGraph
    ) -> tuple[tuple[tuple[str, str, str], ...], tuple[tuple[str, str, str], ...]]:
        """Fold one graph in; its node ids must not collide with prior ones."""
        merged: list[tuple[str, str, str]] = []
        skipped: list[tuple[str, str, str]] = []
        redirects: dict[str, str] = {}
        for node in graph.concepts.values():
            final = self._fold(node, merged, skipped)
            if final != node.node_id:
                redirects[node.node_id] = final
        for node in graph.relations.values():
            self._relations[node.node_id] = RelationNode(
                node.node_id, node.type_id, tuple(redirects.get(a, a) for a in node.args)
            )
        return tuple(merged), tuple(skipped)

    def snapshot(self) -> ConceptualGraph:
        return ConceptualGraph(dict(self._concepts), dict(self._relations))


def _join_with_report(
    vocab: Vocabulary, base: ConceptualGraph, addition: ConceptualGraph
) -> tuple[ConceptualGraph, tuple[tuple[str, str, str], ...], tuple[tuple[str, str, str], ...]]:
    """Join two graphs with disjoint node-id sets, reporting addition merges."""
    assembler = _Assembler(vocab)
    assembler.absorb(base)
    merged, skipped = assembler.absorb(addition)
    return assembler.snapshot(), merged, skipped


def join(vocab: Vocabulary, gc: ConceptualGraph, g: ConceptualGraph) -> ConceptualGraph:
    """Union of two graphs merging concept nodes that share a marker.

    The merged node keeps the most specific of the two types and both
    neighborhoods' argument references are redirected to it; unmarked nodes
    never merge. Colliding node ids on the right-hand graph are renamed.
    """
    taken = set(gc.concepts) | set(gc.relations)
    renames: dict[str, str] = {}
    for node_id in list(g.concepts) + list(g.relations):
        if node_id in taken:
            suffix = 1
            while f"{node_id}~{suffix}" in taken:
                suffix += 1
            renames[node_id] = f"{node_id}~{suffix}"
            taken.add(renames[node_id])
        else:
            taken.add(node_id)
    if renames:
        g = _remap_ids(g, renames)
    joined, _, _ = _join_with_report(vocab, gc, g)
    return joined


def _remap_ids(graph: ConceptualGraph, mapping: dict[str, str]) -> ConceptualGraph:
    concepts = {}
    for node in graph.concepts.values():
        new_id = mapping.get(node.node_id, node.node_id)
        concepts[new_id] = ConceptNode(new_id, node.type_id, node.marker)
    relations = {}
    for node in graph.relations.values():
        new_id = mapping.get(node.node_id, node.node_id)
        relations[new_id] = RelationNode(
            new_id, node.type_id, tuple(mapping.get(a, a) for a in node.args)
        )
    return ConceptualGraph(concepts, relations)


def _specialise_component(
    vocab: Vocabulary,
    graph: ConceptualGraph,
    type_slots: Sequence[tuple[str, str]],
    max_spe: int,
    rng: random.Random,
) -> tuple[ConceptualGraph, tuple[tuple[str, int], ...]]:
    """Walk each type-variable label 0..max_spe steps down its hierarchy.

    Relation labels only step to children whose signatures stay satisfied
    by the node's current argument types; concept labels may take any
    downward step (descending preserves every constraint).
    """
    concept_types = {nid: node.type_id for nid, node in graph.concepts.items()}
    relation_types = {nid: node.type_id for nid, node in graph.relations.items()}
    steps_taken: list[tuple[str, int]] = []

    for kind, node_id in type_slots:
        moves = rng.randint(0, max_spe)
        if kind == TARGET_CONCEPT_TYPE:
            final, taken = _walk_down(vocab.concepts, concept_types[node_id], moves, rng)
            concept_types[node_id] = final
        else:
            hierarchy = vocab.relation_hierarchy(relation_types[node_id])
            arg_types = [concept_types[a] for a in graph.relations[node_id].args]
            current = relation_types[node_id]
            taken = 0
            for _ in range(moves):
                compatible = [
                    child
                    for child in hierarchy.children_of(current)
                    if all(
                        is_subtype(vocab.concepts, arg_type, restriction)
                        for arg_type, restriction in zip(
                            arg_types, vocab.signature_of(child).restrictions
                        )
                    )
                ]
                if not compatible:
                    break
                current = compatible[rng.randrange(len(compatible))]
                taken += 1
            relation_types[node_id] = current
        steps_taken.append((f"{kind}:{node_id}", taken))

    concepts = {
        nid: ConceptNode(nid, concept_types[nid], node.marker)
        for nid, node in graph.concepts.items()
    }
    relations = {
        nid: RelationNode(nid, relation_types[nid], node.args)
        for nid, node in graph.relations.items()
    }
    return ConceptualGraph(concepts, relations), tuple(steps_taken)


class _IdAllocator:
    """Sequential node ids local to one generated CG."""

    def __init__(self) -> None:
        self._concepts = 0
        self._relations = 0

    def remap(self, graph: ConceptualGraph) -> tuple[ConceptualGraph, dict[str, str]]:
        mapping: dict[str, str] = {}
        for node_id in graph.concepts:
            mapping[node_id] = f"c{self._concepts}"
            self._concepts += 1
        for node_id in graph.relations:
            mapping[node_id] = f"r{self._relations}"
            self._relations += 1
        return _remap_ids(graph, mapping), mapping


def generate_one(
    vocab: Vocabulary,
    gamma_set: Sequence[GammaCG],
    config: GeneratorConfig,
    rng: random.Random,
    *,
    mint: MarkerMint | None = None,
) -> tuple[ConceptualGraph, GenerationProvenance]:
    """Build one CG of at least ``config.min_size`` nodes.

    Draws gamma-CGs uniformly with replacement; a gamma-CG failing
    instantiation INSTANTIATION_RETRIES times is skipped for this CG.
    """
    if not gamma_set:
        raise ConfigError("gamma_set must be non-empty")
    if mint is None:
        mint = MarkerMint(vocab, "gen")

    allocator = _IdAllocator()
    assembler = _Assembler(vocab)
    draws: list[ComponentDraw] = []
    failures = [0] * len(gamma_set)
    skipped_gammas: set[int] = set()
    total_draws = 0

    while assembler.size < config.min_size:
        total_draws += 1
        if total_draws > _MAX_DRAWS_PER_CG:
            raise GenerationError("generation is not making progress towards min_size")
        index = rng.randrange(len(gamma_set))
        if index in skipped_gammas:
            if len(skipped_gammas) == len(gamma_set):
                raise GenerationError("every gamma-CG failed instantiation repeatedly")
            continue
        gcg = gamma_set[index]
        try:
            outcome = instantiate_detailed(vocab, gcg, rng, mint=mint)
        except InstantiationError:
            failures[index] += 1
            if failures[index] >= INSTANTIATION_RETRIES:
                skipped_gammas.add(index)
                if len(skipped_gammas) == len(gamma_set):
                    raise GenerationError("every gamma-CG failed instantiation repeatedly")
            continue

        specialized, steps = _specialise_component(
            vocab, outcome.graph, outcome.type_slots, config.max_spe, rng
        )
        component, _ = allocator.remap(specialized)
        merged, skipped = assembler.absorb(component)
        draws.append(
            ComponentDraw(
                gamma_name=gcg.name,
                assignments=outcome.assignments,
                specialisations=steps,
                merged=merged,
                skipped_merges=skipped,
            )
        )

    return assembler.snapshot(), GenerationProvenance(cg_index=0, draws=tuple(draws))


def _generate_indexed(
    vocab: Vocabulary,
    gamma_set: Sequence[GammaCG],
    config: GeneratorConfig,
    index: int,
) -> tuple[ConceptualGraph, GenerationProvenance, tuple[Marker, ...]]:
    rng = derive_rng(config.seed, "cg", index)
    mint = MarkerMint(vocab, f"cg{index}")
    graph, provenance = generate_one(vocab, gamma_set, config, rng, mint=mint)
    minted = tuple(sorted(mint.minted.values(), key=lambda m: m.marker_id))
    return graph, GenerationProvenance(cg_index=index, draws=provenance.draws), minted


def validate_inputs(vocab: Vocabulary, gamma_set: Sequence[GammaCG]) -> list[str]:
    """Lines describing why the inputs are unusable; empty when they are fine."""
    problems: list[str] = []
    for gcg in gamma_set:
        report = validate_graph(vocab, gcg.graph)
        problems.extend(f"{gcg.name}: {line}" for line in report.lines())
        for variable in gcg.variables:
            report = validate_domain(vocab, gcg, variable)
            problems.extend(f"{gcg.name}: {line}" for line in report.lines())
    return problems


def generate_dataset(
    vocab: Vocabulary,
    gamma_set: Sequence[GammaCG],
    config: GeneratorConfig,
    *,
    jobs: int = 1,
) -> DatasetResult:
    """Generate exactly ``config.max_cgs`` graphs.

    Graph ``i`` is produced from a stream derived from (seed, i), so output
    is identical for any ``jobs`` value. Markers minted while generating are
    merged into the returned vocabulary in canonical (sorted) order.
    """
    if not gamma_set:
        raise ConfigError("gamma_set must be non-empty")
    problems = validate_inputs(vocab, gamma_set)
    if problems:
        raise StructureError("invalid generator inputs:\n" + "\n".join(problems))

    indices = range(config.max_cgs)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(
                pool.map(lambda i: _generate_indexed(vocab, gamma_set, config, i), indices)
            )
    else:
        results = [_generate_indexed(vocab, gamma_set, config, i) for i in indices]

    graphs = tuple(graph for graph, _, _ in results)
    provenances = tuple(provenance for _, provenance, _ in results)
    minted: list[Marker] = []
    for _, _, markers in results:
        minted.extend(markers)
    vocabulary = vocab.with_markers(sorted(minted, key=lambda m: m.marker_id))
    return DatasetResult(graphs, provenances, vocabulary)
