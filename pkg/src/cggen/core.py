"""Vocabulary and conceptual-graph data model.

A vocabulary bundles a concept-type hierarchy, one relation-type hierarchy
per arity, a signature per relation type and a registry of individual
markers. Conceptual graphs are bipartite labeled multigraphs: concept nodes
carry a type and an optional marker, relation nodes carry a type and an
ordered argument list of concept node ids (the same concept may fill several
positions).

All values are immutable after construction; construction validates the
structural invariants and precomputes the order closures, so the subtype
checks used everywhere else are O(1) set lookups.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import (
    ArityError,
    StructureError,
    UnknownIdentifierError,
    VocabularyError,
)

CONCEPT = "concept"
RELATION = "relation"


@dataclass(frozen=True, eq=False)
class TypeHierarchy:
    """A partially ordered set of types stored as a direct-parent DAG.

    ``parents`` maps every type id to its direct parents; the root maps to
    an empty tuple. Auto-generated hierarchies are trees, hand-authored ones
    may be DAGs. The transitive closure is computed eagerly at construction.
    """

    kind: str
    root: str
    labels: dict[str, str]
    parents: dict[str, tuple[str, ...]]
    arity: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in (CONCEPT, RELATION):
            raise VocabularyError(f"unknown hierarchy kind {self.kind!r}")
        if self.kind == RELATION:
            if self.arity is None or self.arity < 1:
                raise VocabularyError("relation hierarchies need a positive arity")
        elif self.arity is not None:
            raise VocabularyError("concept hierarchies carry no arity")
        if self.root not in self.labels:
            raise VocabularyError(f"root {self.root!r} is not a member type")
        if set(self.parents) != set(self.labels):
            raise VocabularyError("parents and labels must cover the same type ids")
        seen_labels: dict[str, str] = {}
        for type_id, label in self.labels.items():
            if label in seen_labels:
                raise VocabularyError(
                    f"duplicate label {label!r} on {seen_labels[label]!r} and {type_id!r}"
                )
            seen_labels[label] = type_id
        for type_id, parent_ids in self.parents.items():
            if type_id == self.root:
                if parent_ids:
                    raise VocabularyError(f"root {self.root!r} must have no parents")
                continue
            if not parent_ids:
                raise VocabularyError(f"type {type_id!r} has no parent")
            for parent in parent_ids:
                if parent not in self.labels:
                    raise VocabularyError(
                        f"type {type_id!r} references unknown parent {parent!r}"
                    )

        ancestors: dict[str, frozenset[str]] = {}

        def resolve(type_id: str, trail: tuple[str, ...]) -> frozenset[str]:
            if type_id in trail:
                cycle = " -> ".join(trail + (type_id,))
                raise VocabularyError(f"cycle in hierarchy order: {cycle}")
            cached = ancestors.get(type_id)
            if cached is not None:
                return cached
            acc: set[str] = set()
            for parent in self.parents[type_id]:
                acc.add(parent)
                acc |= resolve(parent, trail + (type_id,))
            result = frozenset(acc)
            ancestors[type_id] = result
            return result

        for type_id in self.labels:
            resolve(type_id, ())
            if type_id != self.root and self.root not in ancestors[type_id]:
                raise VocabularyError(f"type {type_id!r} does not reach root")

        children: dict[str, list[str]] = {type_id: [] for type_id in self.labels}
        for type_id, parent_ids in self.parents.items():
            for parent in parent_ids:
                children[parent].append(type_id)
        depths: dict[str, int] = {self.root: 0}
        frontier = [self.root]
        while frontier:
            nxt: list[str] = []
            for node in frontier:
                for child in children[node]:
                    if child not in depths:
                        depths[child] = depths[node] + 1
                        nxt.append(child)
            frontier = nxt

        descendants: dict[str, set[str]] = {type_id: set() for type_id in self.labels}
        for type_id, ups in ancestors.items():
            for up in ups:
                descendants[up].add(type_id)

        object.__setattr__(self, "_ancestors", ancestors)
        object.__setattr__(
            self,
            "_children",
            {type_id: tuple(sorted(kids)) for type_id, kids in children.items()},
        )
        object.__setattr__(self, "_depths", depths)
        object.__setattr__(
            self,
            "_descendants",
            {type_id: frozenset(down) for type_id, down in descendants.items()},
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TypeHierarchy):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.root == other.root
            and self.arity == other.arity
            and self.labels == other.labels
            and self.parents == other.parents
        )

    def __contains__(self, type_id: str) -> bool:
        return type_id in self.labels

    def require(self, type_id: str) -> None:
        if type_id not in self.labels:
            raise UnknownIdentifierError(
                f"unknown {self.kind} type {type_id!r}"
            )

    def label_of(self, type_id: str) -> str:
        self.require(type_id)
        return self.labels[type_id]

    def type_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.labels))

    def ancestors_of(self, type_id: str) -> frozenset[str]:
        """Proper ancestors (the type itself is excluded)."""
        self.require(type_id)
        return self._ancestors[type_id]  # type: ignore[attr-defined]

    def descendants_of(self, type_id: str) -> frozenset[str]:
        """Proper descendants (the type itself is excluded)."""
        self.require(type_id)
        return self._descendants[type_id]  # type: ignore[attr-defined]

    def children_of(self, type_id: str) -> tuple[str, ...]:
        self.require(type_id)
        return self._children[type_id]  # type: ignore[attr-defined]

    def depth_of(self, type_id: str) -> int:
        """Shortest distance from the root (0 for the root itself)."""
        self.require(type_id)
        return self._depths[type_id]  # type: ignore[attr-defined]

    def max_depth(self) -> int:
        return max(self._depths.values())  # type: ignore[attr-defined]


def is_subtype(hierarchy: TypeHierarchy, a: str, b: str) -> bool:
    """True iff a <= b: a equals b or descends from b in the hierarchy."""
    hierarchy.require(a)
    hierarchy.require(b)
    return a == b or b in hierarchy.ancestors_of(a)


def most_specific(hierarchy: TypeHierarchy, a: str, b: str) -> str | None:
    """The lower of two comparable types; None when they are incomparable."""
    if is_subtype(hierarchy, a, b):
        return a
    if is_subtype(hierarchy, b, a):
        return b
    return None


def random_descendant(
    hierarchy: TypeHierarchy, type_id: str, steps: int, rng: random.Random
) -> str:
    """Walk at most ``steps`` edges down from ``type_id``.

    The number of moves is drawn uniformly in [0, steps] before walking;
    each edge is chosen uniformly among the current node's children and the
    walk stops early at a leaf. The result is always <= ``type_id``.
    """
    hierarchy.require(type_id)
    if steps < 0:
        raise ValueError("steps must be >= 0")
    moves = rng.randint(0, steps)
    current, _taken = _walk_down(hierarchy, type_id, moves, rng)
    return current


def _walk_down(
    hierarchy: TypeHierarchy, type_id: str, moves: int, rng: random.Random
) -> tuple[str, int]:
    current = type_id
    taken = 0
    for _ in range(moves):
        kids = hierarchy.children_of(current)
        if not kids:
            break
        current = kids[rng.randrange(len(kids))]
        taken += 1
    return current, taken


@dataclass(frozen=True)
class Signature:
    """Per relation type, the ordered concept-type restrictions of its arguments."""

    relation_type: str
    restrictions: tuple[str, ...]


@dataclass(frozen=True)
class Marker:
    """An individual marker and the concept type it instantiates."""

    marker_id: str
    type_id: str


@dataclass(frozen=True, eq=False)
class Vocabulary:
    """The ontological bundle: concept types, relation types, signatures, markers."""

    concepts: TypeHierarchy
    relations: dict[int, TypeHierarchy]
    signatures: dict[str, Signature]
    markers: dict[str, Marker] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.concepts.kind != CONCEPT:
            raise VocabularyError("concepts must be a concept hierarchy")
        arity_by_type: dict[str, int] = {}
        for arity, hierarchy in self.relations.items():
            if hierarchy.kind != RELATION or hierarchy.arity != arity:
                raise VocabularyError(f"relation hierarchy under key {arity} is inconsistent")
            for type_id in hierarchy.labels:
                if type_id in arity_by_type or type_id in self.concepts.labels:
                    raise VocabularyError(f"type id {type_id!r} is not unique in the vocabulary")
                arity_by_type[type_id] = arity

        concept_labels = set(self.concepts.labels.values())
        for hierarchy in self.relations.values():
            overlap = concept_labels & set(hierarchy.labels.values())
            if overlap:
                raise VocabularyError(
                    f"concept and relation label sets overlap: {sorted(overlap)}"
                )

        if set(self.signatures) != set(arity_by_type):
            missing = sorted(set(arity_by_type) - set(self.signatures))
            extra = sorted(set(self.signatures) - set(arity_by_type))
            raise VocabularyError(
                f"signatures must cover relation types exactly (missing {missing}, extra {extra})"
            )
        for type_id, signature in self.signatures.items():
            if signature.relation_type != type_id:
                raise VocabularyError(f"signature under {type_id!r} names {signature.relation_type!r}")
            arity = arity_by_type[type_id]
            if len(signature.restrictions) != arity:
                raise VocabularyError(
                    f"signature of {type_id!r} has {len(signature.restrictions)} "
                    f"restrictions for arity {arity}"
                )
            for restriction in signature.restrictions:
                if restriction not in self.concepts.labels:
                    raise VocabularyError(
                        f"signature of {type_id!r} references unknown concept {restriction!r}"
                    )

        # Monotonicity: r' <= r implies pointwise restriction(r') <= restriction(r).
        for hierarchy in self.relations.values():
            for sub in hierarchy.labels:
                for sup in hierarchy.ancestors_of(sub):
                    sub_sig = self.signatures[sub].restrictions
                    sup_sig = self.signatures[sup].restrictions
                    for position, (below, above) in enumerate(zip(sub_sig, sup_sig)):
                        if not is_subtype(self.concepts, below, above):
                            raise VocabularyError(
                                f"non-monotone signature: {sub!r} <= {sup!r} but position "
                                f"{position} has {below!r} !<= {above!r}"
                            )

        for marker in self.markers.values():
            if marker.type_id not in self.concepts.labels:
                raise VocabularyError(
                    f"marker {marker.marker_id!r} has unknown type {marker.type_id!r}"
                )

        object.__setattr__(self, "_arity_by_type", arity_by_type)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return (
            self.concepts == other.concepts
            and self.relations == other.relations
            and self.signatures == other.signatures
            and self.markers == other.markers
        )

    def has_relation_type(self, type_id: str) -> bool:
        return type_id in self._arity_by_type  # type: ignore[attr-defined]

    def arity_of(self, relation_type: str) -> int:
        arity = self._arity_by_type.get(relation_type)  # type: ignore[attr-defined]
        if arity is None:
            raise UnknownIdentifierError(f"unknown relation type {relation_type!r}")
        return arity

    def relation_hierarchy(self, relation_type: str) -> TypeHierarchy:
        return self.relations[self.arity_of(relation_type)]

    def relation_type_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._arity_by_type))  # type: ignore[attr-defined]

    def signature_of(self, relation_type: str) -> Signature:
        self.arity_of(relation_type)
        return self.signatures[relation_type]

    def marker_type(self, marker_id: str) -> str:
        marker = self.markers.get(marker_id)
        if marker is None:
            raise UnknownIdentifierError(f"unknown marker {marker_id!r}")
        return marker.type_id

    def with_markers(self, extra: "list[Marker] | tuple[Marker, ...]") -> "Vocabulary":
        """A copy of this vocabulary with additional markers registered."""
        merged = dict(self.markers)
        for marker in extra:
            if marker.marker_id in merged:
                raise VocabularyError(f"marker {marker.marker_id!r} already registered")
            merged[marker.marker_id] = marker
        return Vocabulary(self.concepts, self.relations, self.signatures, merged)


def restriction_for(vocab: Vocabulary, relation_type: str, position: int) -> str:
    """The concept-type restriction at ``position`` of a relation signature."""
    signature = vocab.signature_of(relation_type)
    if not 0 <= position < len(signature.restrictions):
        raise ArityError(
            f"position {position} out of range for {relation_type!r} "
            f"(arity {len(signature.restrictions)})"
        )
    return signature.restrictions[position]


@dataclass(frozen=True)
class ConceptNode:
    """A concept node: a type plus an optional individual marker."""

    node_id: str
    type_id: str
    marker: str | None = None


@dataclass(frozen=True)
class RelationNode:
    """A relation node: a type plus its ordered concept arguments."""

    node_id: str
    type_id: str
    args: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class ConceptualGraph:
    """A bipartite labeled multigraph of concept and relation nodes.

    Edges are materialized as the relation nodes' argument lists; positions
    are 0-based. Node ids are unique across both node kinds and every
    argument must reference a concept node of the same graph.
    """

    concepts: dict[str, ConceptNode]
    relations: dict[str, RelationNode]

    def __post_init__(self) -> None:
        for node_id, node in self.concepts.items():
            if node.node_id != node_id:
                raise StructureError(f"concept key {node_id!r} names node {node.node_id!r}")
        for node_id, node in self.relations.items():
            if node.node_id != node_id:
                raise StructureError(f"relation key {node_id!r} names node {node.node_id!r}")
        overlap = set(self.concepts) & set(self.relations)
        if overlap:
            raise StructureError(f"node ids used for both kinds: {sorted(overlap)}")
        for node in self.relations.values():
            for arg in node.args:
                if arg not in self.concepts:
                    raise StructureError(
                        f"relation {node.node_id!r} references missing concept {arg!r}"
                    )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConceptualGraph):
            return NotImplemented
        return self.concepts == other.concepts and self.relations == other.relations

    @classmethod
    def empty(cls) -> "ConceptualGraph":
        return cls({}, {})

    @property
    def size(self) -> int:
        """Node count: concepts plus relations."""
        return len(self.concepts) + len(self.relations)

    def incidences(self, concept_id: str) -> tuple[tuple[str, int], ...]:
        """(relation id, position) pairs where the concept fills an argument."""
        if concept_id not in self.concepts:
            raise UnknownIdentifierError(f"unknown concept node {concept_id!r}")
        hits: list[tuple[str, int]] = []
        for rel_id in sorted(self.relations):
            for position, arg in enumerate(self.relations[rel_id].args):
                if arg == concept_id:
                    hits.append((rel_id, position))
        return tuple(hits)


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        return [f"{v.code} {v.subject}: {v.message}" for v in self.violations]


def validate_graph(vocab: Vocabulary, graph: ConceptualGraph) -> ValidationReport:
    """Check every label of a graph against the vocabulary.

    Violations are report entries, never exceptions: unknown types or
    markers, argument lists not matching the relation arity, argument types
    breaking a signature restriction, and marked nodes whose type is not a
    subtype of the marker's assigned type.
    """
    violations: list[Violation] = []

    for node_id in sorted(graph.concepts):
        node = graph.concepts[node_id]
        if node.type_id not in vocab.concepts:
            violations.append(
                Violation("unknown-concept-type", node_id, f"type {node.type_id!r} not in vocabulary")
            )
            continue
        if node.marker is not None:
            marker = vocab.markers.get(node.marker)
            if marker is None:
                violations.append(
                    Violation("unknown-marker", node_id, f"marker {node.marker!r} not in vocabulary")
                )
            elif not is_subtype(vocab.concepts, node.type_id, marker.type_id):
                violations.append(
                    Violation(
                        "marker-type-violation",
                        node_id,
                        f"type {node.type_id!r} is not <= marker type {marker.type_id!r}",
                    )
                )

    for node_id in sorted(graph.relations):
        node = graph.relations[node_id]
        if not vocab.has_relation_type(node.type_id):
            violations.append(
                Violation("unknown-relation-type", node_id, f"type {node.type_id!r} not in vocabulary")
            )
            continue
        arity = vocab.arity_of(node.type_id)
        if len(node.args) != arity:
            violations.append(
                Violation(
                    "arity-mismatch",
                    node_id,
                    f"{len(node.args)} arguments for arity-{arity} type {node.type_id!r}",
                )
            )
            continue
        for position, arg in enumerate(node.args):
            concept = graph.concepts[arg]
            if concept.type_id not in vocab.concepts:
                continue  # already reported on the concept node
            restriction = restriction_for(vocab, node.type_id, position)
            if not is_subtype(vocab.concepts, concept.type_id, restriction):
                violations.append(
                    Violation(
                        "signature-violation",
                        node_id,
                        f"argument {position} ({arg!r}: {concept.type_id!r}) "
                        f"is not <= restriction {restriction!r}",
                    )
                )

    return ValidationReport(tuple(violations))
