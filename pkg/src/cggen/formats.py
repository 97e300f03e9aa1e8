"""Canonical JSON documents for vocabularies, gamma-CGs, CGs and datasets.

Every document embeds a formatVersion; loaders reject unknown major
versions. Saves order types by label, markers by id and nodes by id, so
saving the same value twice produces identical bytes. Generic concept nodes
serialize their marker as an explicit null. Edge positions are 0-based in
documents, diagnostics and DOT labels alike.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from .core import (
    CONCEPT,
    RELATION,
    ConceptNode,
    ConceptualGraph,
    Marker,
    RelationNode,
    Signature,
    TypeHierarchy,
    Vocabulary,
    validate_graph,
)
from .errors import FormatError, StructureError, VocabularyError
from .gamma import GammaCG, Variable, VariableTarget, validate_domain
from .generator import ComponentDraw, DatasetResult, GenerationProvenance, GeneratorConfig
from .metrics import DatasetStats, compute_stats

FORMAT_VERSION = "1.0.0"

VOCABULARY_FILE = "vocabulary.json"
GAMMA_DIR = "gamma"
DATASET_DIR = "dataset"
MANIFEST_FILE = "manifest.json"
PROVENANCE_FILE = "provenance.json"


def _dump(path: Path, document: dict[str, Any]) -> None:
    path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")


def _parse(path: Path) -> dict[str, Any]:
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise FormatError(f"{path}: no such file")
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")
    if not isinstance(document, dict):
        raise FormatError(f"{path}: top-level value must be an object")
    return document


def _check_header(document: dict[str, Any], path: Path, kind: str) -> None:
    version = document.get("formatVersion")
    if not isinstance(version, str):
        raise FormatError(f"{path}: missing formatVersion")
    major = version.split(".", 1)[0]
    ours = FORMAT_VERSION.split(".", 1)[0]
    if major != ours:
        raise FormatError(f"{path}: unsupported major version {version!r}")
    if document.get("kind") != kind:
        raise FormatError(f"{path}: expected kind {kind!r}, found {document.get('kind')!r}")


def _field(document: dict[str, Any], key: str, expected: type, path: Path, where: str = "") -> Any:
    context = f"{where}." if where else ""
    if key not in document:
        raise FormatError(f"{path}: missing field {context}{key}")
    value = document[key]
    if not isinstance(value, expected):
        raise FormatError(
            f"{path}: field {context}{key} must be {expected.__name__}, "
            f"found {type(value).__name__}"
        )
    return value


def _hierarchy_doc(hierarchy: TypeHierarchy, signatures: dict[str, Signature] | None) -> dict[str, Any]:
    types = []
    for type_id in sorted(hierarchy.labels, key=lambda t: hierarchy.labels[t]):
        entry: dict[str, Any] = {
            "id": type_id,
            "label": hierarchy.labels[type_id],
            "parents": sorted(hierarchy.parents[type_id]),
        }
        if signatures is not None:
            entry["signature"] = list(signatures[type_id].restrictions)
        types.append(entry)
    return {"root": hierarchy.root, "types": types}


def save_vocabulary(path: "str | Path", vocab: Vocabulary) -> None:
    document = {
        "formatVersion": FORMAT_VERSION,
        "kind": "vocabulary",
        "conceptTypes": _hierarchy_doc(vocab.concepts, None),
        "relationTypes": [
            {"arity": arity, **_hierarchy_doc(vocab.relations[arity], vocab.signatures)}
            for arity in sorted(vocab.relations)
        ],
        "markers": [
            {"id": marker.marker_id, "type": marker.type_id}
            for marker in sorted(vocab.markers.values(), key=lambda m: m.marker_id)
        ],
    }
    _dump(Path(path), document)


def _load_hierarchy(
    entry: dict[str, Any], kind: str, arity: int | None, path: Path, where: str
) -> tuple[TypeHierarchy, dict[str, Signature]]:
    root = _field(entry, "root", str, path, where)
    types = _field(entry, "types", list, path, where)
    labels: dict[str, str] = {}
    parents: dict[str, tuple[str, ...]] = {}
    signatures: dict[str, Signature] = {}
    for index, raw in enumerate(types):
        spot = f"{where}.types[{index}]"
        if not isinstance(raw, dict):
            raise FormatError(f"{path}: {spot} must be an object")
        type_id = _field(raw, "id", str, path, spot)
        labels[type_id] = _field(raw, "label", str, path, spot)
        parents[type_id] = tuple(_field(raw, "parents", list, path, spot))
        if kind == RELATION:
            restrictions = _field(raw, "signature", list, path, spot)
            if arity is not None and len(restrictions) != arity:
                raise VocabularyError(
                    f"{path}: {spot}.signature has {len(restrictions)} entries for arity {arity}"
                )
            signatures[type_id] = Signature(type_id, tuple(restrictions))
    try:
        hierarchy = TypeHierarchy(kind, root, labels, parents, arity=arity)
    except VocabularyError as exc:
        raise VocabularyError(f"{path}: {where}: {exc}") from exc
    return hierarchy, signatures


def load_vocabulary(path: "str | Path") -> Vocabulary:
    path = Path(path)
    document = _parse(path)
    _check_header(document, path, "vocabulary")
    concepts, _ = _load_hierarchy(
        _field(document, "conceptTypes", dict, path), CONCEPT, None, path, "conceptTypes"
    )
    relations: dict[int, TypeHierarchy] = {}
    signatures: dict[str, Signature] = {}
    for index, entry in enumerate(_field(document, "relationTypes", list, path)):
        where = f"relationTypes[{index}]"
        if not isinstance(entry, dict):
            raise FormatError(f"{path}: {where} must be an object")
        arity = _field(entry, "arity", int, path, where)
        hierarchy, sigs = _load_hierarchy(entry, RELATION, arity, path, where)
        if arity in relations:
            raise FormatError(f"{path}: duplicate relation hierarchy for arity {arity}")
        relations[arity] = hierarchy
        signatures.update(sigs)
    markers: dict[str, Marker] = {}
    for index, entry in enumerate(_field(document, "markers", list, path)):
        where = f"markers[{index}]"
        if not isinstance(entry, dict):
            raise FormatError(f"{path}: {where} must be an object")
        marker_id = _field(entry, "id", str, path, where)
        markers[marker_id] = Marker(marker_id, _field(entry, "type", str, path, where))
    try:
        return Vocabulary(concepts, relations, signatures, markers)
    except VocabularyError as exc:
        raise VocabularyError(f"{path}: {exc}") from exc


def _graph_doc(graph: ConceptualGraph) -> dict[str, Any]:
    return {
        "concepts": [
            {
                "id": node.node_id,
                "type": node.type_id,
                "marker": node.marker,
            }
            for node in sorted(graph.concepts.values(), key=lambda n: n.node_id)
        ],
        "relations": [
            {"id": node.node_id, "type": node.type_id, "args": list(node.args)}
            for node in sorted(graph.relations.values(), key=lambda n: n.node_id)
        ],
    }


def _load_graph(document: dict[str, Any], path: Path) -> ConceptualGraph:
    concepts: dict[str, ConceptNode] = {}
    for index, entry in enumerate(_field(document, "concepts", list, path)):
        where = f"concepts[{index}]"
        if not isinstance(entry, dict):
            raise FormatError(f"{path}: {where} must be an object")
        node_id = _field(entry, "id", str, path, where)
        marker = entry.get("marker")
        if marker is not None and not isinstance(marker, str):
            raise FormatError(f"{path}: {where}.marker must be a string or null")
        concepts[node_id] = ConceptNode(node_id, _field(entry, "type", str, path, where), marker)
    relations: dict[str, RelationNode] = {}
    for index, entry in enumerate(_field(document, "relations", list, path)):
        where = f"relations[{index}]"
        if not isinstance(entry, dict):
            raise FormatError(f"{path}: {where} must be an object")
        node_id = _field(entry, "id", str, path, where)
        args = tuple(_field(entry, "args", list, path, where))
        relations[node_id] = RelationNode(node_id, _field(entry, "type", str, path, where), args)
    try:
        return ConceptualGraph(concepts, relations)
    except StructureError as exc:
        raise StructureError(f"{path}: {exc}") from exc


def save_cg(path: "str | Path", graph: ConceptualGraph) -> None:
    document = {"formatVersion": FORMAT_VERSION, "kind": "cg", **_graph_doc(graph)}
    _dump(Path(path), document)


def load_cg(path: "str | Path") -> ConceptualGraph:
    path = Path(path)
    document = _parse(path)
    _check_header(document, path, "cg")
    return _load_graph(document, path)


def save_gamma_cg(path: "str | Path", gcg: GammaCG) -> None:
    document = {
        "formatVersion": FORMAT_VERSION,
        "kind": "gamma-cg",
        "name": gcg.name,
        **_graph_doc(gcg.graph),
        "variables": [
            {
                "name": variable.name,
                "target": {"kind": variable.target.kind, "node": variable.target.node_id},
                "domain": list(variable.domain),
            }
            for variable in gcg.variables
        ],
    }
    _dump(Path(path), document)


def load_gamma_cg(path: "str | Path", vocab: Vocabulary | None = None) -> GammaCG:
    """Load a gamma-CG; with ``vocab`` the labels and domains are validated."""
    path = Path(path)
    document = _parse(path)
    _check_header(document, path, "gamma-cg")
    graph = _load_graph(document, path)
    variables: list[Variable] = []
    for index, entry in enumerate(_field(document, "variables", list, path)):
        where = f"variables[{index}]"
        if not isinstance(entry, dict):
            raise FormatError(f"{path}: {where} must be an object")
        target = _field(entry, "target", dict, path, where)
        try:
            variables.append(
                Variable(
                    _field(entry, "name", str, path, where),
                    VariableTarget(
                        _field(target, "kind", str, path, f"{where}.target"),
                        _field(target, "node", str, path, f"{where}.target"),
                    ),
                    tuple(_field(entry, "domain", list, path, where)),
                )
            )
        except StructureError as exc:
            raise StructureError(f"{path}: {where}: {exc}") from exc
    try:
        gcg = GammaCG(_field(document, "name", str, path), graph, tuple(variables))
    except StructureError as exc:
        raise StructureError(f"{path}: {exc}") from exc
    if vocab is not None:
        problems = validate_graph(vocab, graph).lines()
        for variable in gcg.variables:
            problems.extend(validate_domain(vocab, gcg, variable).lines())
        if problems:
            raise StructureError(f"{path}: " + "; ".join(problems))
    return gcg


def _stats_doc(stats: DatasetStats) -> dict[str, Any]:
    return {
        "cgCount": stats.cg_count,
        "nbNodes": {"mean": stats.nb_nodes_mean, "stddev": stats.nb_nodes_stddev},
        "nbLabels": {"mean": stats.nb_labels_mean, "stddev": stats.nb_labels_stddev},
        "arityCounts": {str(a): mean for a, mean in sorted(stats.arity_counts.items())},
    }


def _load_stats(document: dict[str, Any], path: Path) -> DatasetStats:
    nodes = _field(document, "nbNodes", dict, path, "stats")
    labels = _field(document, "nbLabels", dict, path, "stats")
    arity = _field(document, "arityCounts", dict, path, "stats")
    return DatasetStats(
        cg_count=_field(document, "cgCount", int, path, "stats"),
        nb_nodes_mean=float(nodes["mean"]),
        nb_nodes_stddev=float(nodes["stddev"]),
        nb_labels_mean=float(labels["mean"]),
        nb_labels_stddev=float(labels["stddev"]),
        arity_counts={int(k): float(v) for k, v in arity.items()},
    )


def _config_doc(config: GeneratorConfig) -> dict[str, Any]:
    return {
        "maxCGs": config.max_cgs,
        "minSize": config.min_size,
        "maxSpe": config.max_spe,
        "seed": config.seed,
        "relationDomainPolicy": config.relation_domain_policy,
    }


def _provenance_doc(provenances: Sequence[GenerationProvenance]) -> dict[str, Any]:
    return {
        "formatVersion": FORMAT_VERSION,
        "kind": "provenance",
        "perCG": [
            {
                "index": provenance.cg_index,
                "draws": [
                    {
                        "gamma": draw.gamma_name,
                        "assignments": {name: value for name, value in draw.assignments},
                        "specialisations": {slot: steps for slot, steps in draw.specialisations},
                        "merged": [list(entry) for entry in draw.merged],
                        "skippedMerges": [list(entry) for entry in draw.skipped_merges],
                    }
                    for draw in provenance.draws
                ],
            }
            for provenance in provenances
        ],
    }


@dataclass(frozen=True)
class LoadedDataset:
    graphs: tuple[ConceptualGraph, ...]
    files: tuple[str, ...]
    config: dict[str, Any]
    stats: DatasetStats
    provenances: tuple[GenerationProvenance, ...] | None


def save_dataset(
    directory: "str | Path",
    graphs: Sequence[ConceptualGraph],
    *,
    config: GeneratorConfig,
    provenances: Sequence[GenerationProvenance] | None = None,
    stats: DatasetStats | None = None,
) -> None:
    """Write one document per CG plus the manifest (and provenance if given)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if stats is None:
        stats = compute_stats(graphs)
    if stats.cg_count != len(graphs):
        raise FormatError(
            f"stats cover {stats.cg_count} CGs but {len(graphs)} were given"
        )
    file_names = [f"cg-{index:04d}.json" for index in range(len(graphs))]
    for name, graph in zip(file_names, graphs):
        save_cg(directory / name, graph)
    manifest: dict[str, Any] = {
        "formatVersion": FORMAT_VERSION,
        "kind": "dataset-manifest",
        "config": _config_doc(config),
        "stats": _stats_doc(stats),
        "cgFiles": file_names,
        "provenanceFile": PROVENANCE_FILE if provenances is not None else None,
    }
    _dump(directory / MANIFEST_FILE, manifest)
    if provenances is not None:
        _dump(directory / PROVENANCE_FILE, _provenance_doc(provenances))


def load_dataset(directory: "str | Path") -> LoadedDataset:
    directory = Path(directory)
    manifest_path = directory / MANIFEST_FILE
    manifest = _parse(manifest_path)
    _check_header(manifest, manifest_path, "dataset-manifest")
    file_names = _field(manifest, "cgFiles", list, manifest_path)
    stats = _load_stats(_field(manifest, "stats", dict, manifest_path), manifest_path)
    if stats.cg_count != len(file_names):
        raise FormatError(
            f"{manifest_path}: cgFiles lists {len(file_names)} files "
            f"for cgCount {stats.cg_count}"
        )
    graphs = tuple(load_cg(directory / name) for name in file_names)
    provenances: tuple[GenerationProvenance, ...] | None = None
    provenance_file = manifest.get("provenanceFile")
    if provenance_file:
        document = _parse(directory / provenance_file)
        _check_header(document, directory / provenance_file, "provenance")
        loaded = []
        for entry in _field(document, "perCG", list, directory / provenance_file):
            draws = tuple(
                ComponentDraw(
                    gamma_name=draw["gamma"],
                    assignments=tuple(draw["assignments"].items()),
                    specialisations=tuple(
                        (slot, int(steps)) for slot, steps in draw["specialisations"].items()
                    ),
                    merged=tuple(tuple(item) for item in draw["merged"]),
                    skipped_merges=tuple(tuple(item) for item in draw["skippedMerges"]),
                )
                for draw in entry["draws"]
            )
            loaded.append(GenerationProvenance(cg_index=int(entry["index"]), draws=draws))
        provenances = tuple(loaded)
    return LoadedDataset(
        graphs=graphs,
        files=tuple(file_names),
        config=_field(manifest, "config", dict, manifest_path),
        stats=stats,
        provenances=provenances,
    )


def save_result(directory: "str | Path", result: DatasetResult, gammas: Sequence[GammaCG]) -> None:
    """Write a self-contained output directory: vocabulary, gamma-CGs, dataset."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_vocabulary(directory / VOCABULARY_FILE, result.vocabulary)
    gamma_dir = directory / GAMMA_DIR
    gamma_dir.mkdir(exist_ok=True)
    for gcg in gammas:
        save_gamma_cg(gamma_dir / f"{gcg.name}.json", gcg)


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(graph: ConceptualGraph) -> str:
    """Render a CG for graphviz: concepts are boxes, relations are ellipses.

    Concept labels read "type : marker" ("type : *" for generic nodes) and
    every edge carries its 0-based argument position.
    """
    lines = ["graph cg {"]
    for node in sorted(graph.concepts.values(), key=lambda n: n.node_id):
        text = f"{node.type_id} : {node.marker if node.marker is not None else '*'}"
        lines.append(
            f'  "{_dot_escape(node.node_id)}" [shape=box, label="{_dot_escape(text)}"];'
        )
    for node in sorted(graph.relations.values(), key=lambda n: n.node_id):
        lines.append(
            f'  "{_dot_escape(node.node_id)}" [shape=ellipse, label="{_dot_escape(node.type_id)}"];'
        )
    for node in sorted(graph.relations.values(), key=lambda n: n.node_id):
        for position, arg in enumerate(node.args):
            lines.append(
                f'  "{_dot_escape(node.node_id)}" -- "{_dot_escape(arg)}" [label="{position}"];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
