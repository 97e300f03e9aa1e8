"""Independent brute-force oracles used to cross-check library results.

Everything here works directly off the raw parent maps and node lists,
never off the library's precomputed closures or domain functions.
"""

from __future__ import annotations

import re
from collections import Counter

from cggen import ConceptualGraph, GammaCG, TypeHierarchy, Vocabulary


def brute_reaches(parents: dict[str, tuple[str, ...]], a: str, b: str) -> bool:
    """True iff b is reachable from a by repeatedly following parent edges."""
    if a == b:
        return True
    frontier = [a]
    seen = {a}
    while frontier:
        node = frontier.pop()
        for parent in parents[node]:
            if parent == b:
                return True
            if parent not in seen:
                seen.add(parent)
                frontier.append(parent)
    return False


def brute_subtype(hierarchy: TypeHierarchy, a: str, b: str) -> bool:
    return brute_reaches(hierarchy.parents, a, b)


def arity_of(vocab: Vocabulary, relation_type: str) -> int:
    for arity, hierarchy in vocab.relations.items():
        if relation_type in hierarchy.labels:
            return arity
    raise KeyError(relation_type)


def brute_relation_domain(vocab: Vocabulary, gcg: GammaCG, node_id: str) -> set[str]:
    """All relation types of the same arity as the node's current type."""
    node = gcg.graph.relations[node_id]
    arity = arity_of(vocab, node.type_id)
    return {
        candidate
        for hierarchy in vocab.relations.values()
        for candidate in hierarchy.labels
        if arity_of(vocab, candidate) == arity
    }


def brute_concept_domain(vocab: Vocabulary, gcg: GammaCG, node_id: str) -> set[str]:
    """Concept types t with t <= restriction for every incident argument slot."""
    constraints: list[str] = []
    for rel_id, relation in gcg.graph.relations.items():
        for position, arg in enumerate(relation.args):
            if arg == node_id:
                constraints.append(vocab.signatures[relation.type_id].restrictions[position])
    return {
        candidate
        for candidate in vocab.concepts.labels
        if all(brute_subtype(vocab.concepts, candidate, c) for c in constraints)
    }


def brute_marker_domain(vocab: Vocabulary, gcg: GammaCG, node_id: str) -> set[str]:
    """Markers whose assigned type is <= the type of the node's marker."""
    current = vocab.markers[gcg.graph.concepts[node_id].marker]
    return {
        marker_id
        for marker_id, marker in vocab.markers.items()
        if brute_subtype(vocab.concepts, marker.type_id, current.type_id)
    }


def recount_stats(dataset: list[ConceptualGraph]) -> dict:
    """Plain recount of NbN/NbL means and stddevs plus per-arity means."""
    nbn = []
    nbl = []
    per_arity: list[Counter] = []
    for graph in dataset:
        nbn.append(len(graph.concepts) + len(graph.relations))
        labels = set()
        counter: Counter = Counter()
        for node in graph.concepts.values():
            labels.add(node.type_id)
            if node.marker is not None:
                labels.add(node.marker)
        for node in graph.relations.values():
            labels.add(node.type_id)
            counter[len(node.args)] += 1
        nbl.append(len(labels))
        per_arity.append(counter)

    def mean(xs):
        return sum(xs) / len(xs)

    def pstdev(xs):
        m = mean(xs)
        return (sum((x - m) ** 2 for x in xs) / len(xs)) ** 0.5

    arities = sorted({a for counter in per_arity for a in counter})
    return {
        "cg_count": len(dataset),
        "nb_nodes_mean": mean(nbn),
        "nb_nodes_stddev": pstdev(nbn),
        "nb_labels_mean": mean(nbl),
        "nb_labels_stddev": pstdev(nbl),
        "arity_counts": {a: mean([c.get(a, 0) for c in per_arity]) for a in arities},
    }


_NODE_RE = re.compile(r'^\s*"(?P<id>(?:[^"\\]|\\.)*)" \[shape=(?P<shape>box|ellipse), label="(?:[^"\\]|\\.)*"\];$')
_EDGE_RE = re.compile(r'^\s*"(?P<a>(?:[^"\\]|\\.)*)" -- "(?P<b>(?:[^"\\]|\\.)*)" \[label="(?P<pos>\d+)"\];$')


def parse_dot(text: str) -> tuple[dict[str, str], list[tuple[str, str, int]]]:
    """Structural check of the exported graph description.

    Returns (node id -> shape, edge list). Raises ValueError on any line
    that is not a valid node statement, edge statement, header or footer.
    """
    lines = text.splitlines()
    if not lines or lines[0] != "graph cg {" or lines[-1] != "}":
        raise ValueError("missing graph header/footer")
    nodes: dict[str, str] = {}
    edges: list[tuple[str, str, int]] = []
    for line in lines[1:-1]:
        node = _NODE_RE.match(line)
        if node:
            nodes[node.group("id")] = node.group("shape")
            continue
        edge = _EDGE_RE.match(line)
        if edge:
            edges.append((edge.group("a"), edge.group("b"), int(edge.group("pos"))))
            continue
        raise ValueError(f"unparseable statement: {line!r}")
    for a, b, _ in edges:
        if a not in nodes or b not in nodes:
            raise ValueError("edge references undeclared node")
    return nodes, edges
