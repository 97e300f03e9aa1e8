"""Command-line front end.

Subcommands: generate, auto-voc, auto-gcg, auto-var, validate, stats,
export-dot. Exit codes: 0 success, 1 validation failure, 2 configuration or
parse error. Every behavior is a thin shell over the library.
"""

from __future__ import annotations

import argparse
import secrets
import shutil
import sys
from pathlib import Path
from typing import Any, Sequence

from . import formats
from .autogen import (
    AutoGcgConfig,
    AutoVarConfig,
    AutoVocConfig,
    ParamSpec,
    auto_gamma_cgs,
    auto_variables,
    auto_vocabulary,
)
from .core import Vocabulary, validate_graph
from .errors import CggenError, ConfigError, FormatError, StructureError, VocabularyError
from .gamma import GammaCG, validate_domain
from .generator import (
    POLICY_SIGNATURE_COMPATIBLE,
    GeneratorConfig,
    derive_rng,
    generate_dataset,
)
from .metrics import compute_stats, stats_table

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2


def _check_keys(section: dict[str, Any], allowed: set[str], label: str) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {label}: {', '.join(unknown)}")


def _param(value: Any, label: str) -> ParamSpec:
    if isinstance(value, bool):
        raise ConfigError(f"{label} must be a number or {{mean, stddev}}")
    if isinstance(value, (int, float)):
        return ParamSpec.fixed(float(value))
    if isinstance(value, dict):
        _check_keys(value, {"mean", "stddev"}, label)
        if "mean" not in value:
            raise ConfigError(f"{label} needs a mean")
        return ParamSpec.normal(float(value["mean"]), float(value.get("stddev", 0.0)))
    raise ConfigError(f"{label} must be a number or {{mean, stddev}}")


def _section(doc: dict[str, Any], name: str) -> dict[str, Any]:
    value = doc.get(name)
    if not isinstance(value, dict):
        raise ConfigError(f"config section {name!r} is missing or not an object")
    return value


def _auto_voc_config(section: dict[str, Any]) -> AutoVocConfig:
    _check_keys(
        section,
        {"conceptDepth", "relationDepth", "maxChildren", "markersPerType", "arities"},
        "autoVoc",
    )
    for key in ("conceptDepth", "relationDepth", "maxChildren", "markersPerType"):
        if key not in section:
            raise ConfigError(f"autoVoc.{key} is required")
    arities = section.get("arities", [1, 2, 3])
    if not isinstance(arities, list) or not all(isinstance(a, int) for a in arities):
        raise ConfigError("autoVoc.arities must be a list of integers")
    return AutoVocConfig(
        concept_depth=_param(section["conceptDepth"], "autoVoc.conceptDepth"),
        relation_depth=_param(section["relationDepth"], "autoVoc.relationDepth"),
        max_children=_param(section["maxChildren"], "autoVoc.maxChildren"),
        markers_per_type=_param(section["markersPerType"], "autoVoc.markersPerType"),
        arities=tuple(arities),
    )


def _auto_gcg_config(section: dict[str, Any]) -> AutoGcgConfig:
    _check_keys(section, {"count", "minSize"}, "autoGcg")
    for key in ("count", "minSize"):
        if key not in section:
            raise ConfigError(f"autoGcg.{key} is required")
    return AutoGcgConfig(
        count=_param(section["count"], "autoGcg.count"),
        min_size=_param(section["minSize"], "autoGcg.minSize"),
    )


def _auto_var_config(section: dict[str, Any]) -> AutoVarConfig:
    allowed = {
        "conceptVars",
        "relationVars",
        "markerVars",
        "valuesPerVariable",
        "specialisations",
    }
    _check_keys(section, allowed, "autoVar")
    for key in allowed:
        if key not in section:
            raise ConfigError(f"autoVar.{key} is required")
    return AutoVarConfig(
        concept_vars=_param(section["conceptVars"], "autoVar.conceptVars"),
        relation_vars=_param(section["relationVars"], "autoVar.relationVars"),
        marker_vars=_param(section["markerVars"], "autoVar.markerVars"),
        values_per_variable=_param(section["valuesPerVariable"], "autoVar.valuesPerVariable"),
        specialisations=_param(section["specialisations"], "autoVar.specialisations"),
    )


def _generator_config(section: dict[str, Any], seed: int) -> GeneratorConfig:
    _check_keys(section, {"maxCGs", "minSize", "maxSpe", "relationDomainPolicy"}, "generator")
    for key in ("maxCGs", "minSize"):
        if key not in section or not isinstance(section[key], int):
            raise ConfigError(f"generator.{key} must be an integer")
    policy = section.get("relationDomainPolicy", POLICY_SIGNATURE_COMPATIBLE)
    return GeneratorConfig(
        max_cgs=section["maxCGs"],
        min_size=section["minSize"],
        max_spe=int(section.get("maxSpe", 0)),
        seed=seed,
        relation_domain_policy=policy,
    )


def _load_config_doc(config_path: str) -> tuple[dict[str, Any], Path]:
    path = Path(config_path)
    doc = formats._parse(path)
    _check_keys(
        doc,
        {"seed", "autoVoc", "autoGcg", "autoVar", "generator", "inputs"},
        "config document",
    )
    inputs = doc.get("inputs")
    if inputs is not None:
        if not isinstance(inputs, dict):
            raise ConfigError("config section 'inputs' must be an object")
        _check_keys(inputs, {"vocabulary", "gammas"}, "inputs")
    return doc, path.parent


def _resolve_seed(doc: dict[str, Any], override: int | None) -> int:
    if override is not None:
        return override
    seed = doc.get("seed")
    if seed is not None:
        if not isinstance(seed, int):
            raise ConfigError("seed must be an integer")
        return seed
    return secrets.randbits(63)


def _resolve_vocabulary(
    doc: dict[str, Any], base: Path, seed: int
) -> Vocabulary:
    inputs = doc.get("inputs", {})
    file_source = inputs.get("vocabulary") if isinstance(inputs, dict) else None
    has_auto = "autoVoc" in doc
    if bool(file_source) == has_auto:
        raise ConfigError("exactly one vocabulary source is required (inputs.vocabulary or autoVoc)")
    if file_source:
        return formats.load_vocabulary(base / file_source)
    config = _auto_voc_config(_section(doc, "autoVoc"))
    return auto_vocabulary(config, derive_rng(seed, "auto-voc"))


def _gamma_paths(source: Any, base: Path) -> list[Path]:
    if isinstance(source, str):
        directory = base / source
        if not directory.is_dir():
            raise ConfigError(f"inputs.gammas directory {directory} does not exist")
        paths = sorted(directory.glob("*.json"))
        if not paths:
            raise ConfigError(f"inputs.gammas directory {directory} holds no .json files")
        return paths
    if isinstance(source, list) and all(isinstance(p, str) for p in source):
        return [base / p for p in source]
    raise ConfigError("inputs.gammas must be a directory or a list of files")


def _resolve_gammas(
    doc: dict[str, Any], base: Path, seed: int, vocab: Vocabulary
) -> tuple[list[GammaCG], Vocabulary]:
    inputs = doc.get("inputs", {})
    file_source = inputs.get("gammas") if isinstance(inputs, dict) else None
    has_auto = "autoGcg" in doc
    if bool(file_source) == has_auto:
        raise ConfigError("exactly one gamma-CG source is required (inputs.gammas or autoGcg)")
    if file_source:
        gammas = [formats.load_gamma_cg(path) for path in _gamma_paths(file_source, base)]
        return gammas, vocab
    config = _auto_gcg_config(_section(doc, "autoGcg"))
    result = auto_gamma_cgs(vocab, config, derive_rng(seed, "auto-gcg"))
    return list(result.gammas), result.vocabulary


def _apply_auto_var(
    doc: dict[str, Any],
    gammas: list[GammaCG],
    vocab: Vocabulary,
    seed: int,
    policy: str,
) -> list[GammaCG]:
    if "autoVar" not in doc:
        return gammas
    config = _auto_var_config(_section(doc, "autoVar"))
    result = auto_variables(
        vocab,
        gammas,
        config,
        derive_rng(seed, "auto-var"),
        signature_compatible=(policy == POLICY_SIGNATURE_COMPATIBLE),
    )
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return list(result.gammas)


class _OutputDir:
    """Creates the output directory; removes what it wrote on failure."""

    def __init__(self, out: str) -> None:
        self.path = Path(out)
        if self.path.exists():
            if not self.path.is_dir() or any(self.path.iterdir()):
                raise ConfigError(f"output directory {self.path} exists and is not empty")
            self.created = False
        else:
            self.path.mkdir(parents=True)
            self.created = True

    def cleanup(self) -> None:
        if self.created:
            shutil.rmtree(self.path, ignore_errors=True)
        else:
            for child in self.path.iterdir():
                if child.is_dir():
                    shutil.rmtree(child, ignore_errors=True)
                else:
                    child.unlink(missing_ok=True)


def _cmd_generate(args: argparse.Namespace) -> int:
    doc, base = _load_config_doc(args.config)
    seed = _resolve_seed(doc, args.seed)
    vocab = _resolve_vocabulary(doc, base, seed)
    gammas, vocab = _resolve_gammas(doc, base, seed, vocab)
    config = _generator_config(_section(doc, "generator"), seed)
    gammas = _apply_auto_var(doc, gammas, vocab, seed, config.relation_domain_policy)

    result = generate_dataset(vocab, gammas, config, jobs=args.jobs)
    stats = compute_stats(result.graphs)

    out = _OutputDir(args.out)
    try:
        formats.save_result(out.path, result, gammas)
        formats.save_dataset(
            out.path / formats.DATASET_DIR,
            result.graphs,
            config=config,
            provenances=result.provenances,
            stats=stats,
        )
    except Exception:
        out.cleanup()
        raise
    print(f"seed: {seed}")
    print(stats_table(stats))
    return EXIT_OK


def _cmd_auto_voc(args: argparse.Namespace) -> int:
    doc, _base = _load_config_doc(args.config)
    seed = _resolve_seed(doc, args.seed)
    config = _auto_voc_config(_section(doc, "autoVoc"))
    vocab = auto_vocabulary(config, derive_rng(seed, "auto-voc"))
    out = _OutputDir(args.out)
    try:
        formats.save_vocabulary(out.path / formats.VOCABULARY_FILE, vocab)
    except Exception:
        out.cleanup()
        raise
    print(f"seed: {seed}")
    print(f"wrote {out.path / formats.VOCABULARY_FILE}")
    return EXIT_OK


def _cmd_auto_gcg(args: argparse.Namespace) -> int:
    doc, base = _load_config_doc(args.config)
    seed = _resolve_seed(doc, args.seed)
    vocab = _resolve_vocabulary(doc, base, seed)
    config = _auto_gcg_config(_section(doc, "autoGcg"))
    result = auto_gamma_cgs(vocab, config, derive_rng(seed, "auto-gcg"))
    out = _OutputDir(args.out)
    try:
        formats.save_vocabulary(out.path / formats.VOCABULARY_FILE, result.vocabulary)
        gamma_dir = out.path / formats.GAMMA_DIR
        gamma_dir.mkdir(exist_ok=True)
        for gcg in result.gammas:
            formats.save_gamma_cg(gamma_dir / f"{gcg.name}.json", gcg)
    except Exception:
        out.cleanup()
        raise
    print(f"seed: {seed}")
    print(f"wrote {len(result.gammas)} gamma-CGs to {out.path / formats.GAMMA_DIR}")
    return EXIT_OK


def _cmd_auto_var(args: argparse.Namespace) -> int:
    doc, base = _load_config_doc(args.config)
    seed = _resolve_seed(doc, args.seed)
    vocab = _resolve_vocabulary(doc, base, seed)
    inputs = doc.get("inputs", {})
    source = inputs.get("gammas") if isinstance(inputs, dict) else None
    if not source:
        raise ConfigError("auto-var needs inputs.gammas")
    gammas = [formats.load_gamma_cg(path) for path in _gamma_paths(source, base)]
    config = _auto_var_config(_section(doc, "autoVar"))
    result = auto_variables(vocab, gammas, config, derive_rng(seed, "auto-var"))
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    out = _OutputDir(args.out)
    try:
        formats.save_vocabulary(out.path / formats.VOCABULARY_FILE, vocab)
        gamma_dir = out.path / formats.GAMMA_DIR
        gamma_dir.mkdir(exist_ok=True)
        for gcg in result.gammas:
            formats.save_gamma_cg(gamma_dir / f"{gcg.name}.json", gcg)
    except Exception:
        out.cleanup()
        raise
    print(f"seed: {seed}")
    print(f"wrote {len(result.gammas)} gamma-CGs to {out.path / formats.GAMMA_DIR}")
    return EXIT_OK


def _validate_directory(directory: Path, diagnostics: list[str]) -> None:
    vocab_path = directory / formats.VOCABULARY_FILE
    vocab = formats.load_vocabulary(vocab_path)
    gamma_dir = directory / formats.GAMMA_DIR
    if gamma_dir.is_dir():
        for path in sorted(gamma_dir.glob("*.json")):
            gcg = formats.load_gamma_cg(path)
            report = validate_graph(vocab, gcg.graph)
            diagnostics.extend(f"{path}: {line}" for line in report.lines())
            for variable in gcg.variables:
                report = validate_domain(vocab, gcg, variable)
                diagnostics.extend(f"{path}: {line}" for line in report.lines())
    dataset_dir = directory / formats.DATASET_DIR
    if dataset_dir.is_dir():
        loaded = formats.load_dataset(dataset_dir)
        for name, graph in zip(loaded.files, loaded.graphs):
            report = validate_graph(vocab, graph)
            diagnostics.extend(f"{dataset_dir / name}: {line}" for line in report.lines())


def _cmd_validate(args: argparse.Namespace) -> int:
    diagnostics: list[str] = []
    vocab: Vocabulary | None = None
    if args.vocab:
        vocab = formats.load_vocabulary(args.vocab)
    for raw in args.paths:
        path = Path(raw)
        try:
            if path.is_dir():
                _validate_directory(path, diagnostics)
                continue
            doc = formats._parse(path)
            kind = doc.get("kind")
            if kind == "vocabulary":
                formats.load_vocabulary(path)
            elif kind in ("cg", "gamma-cg"):
                if vocab is None:
                    raise ConfigError(f"{path}: --vocab is required to validate a {kind} file")
                if kind == "cg":
                    graph = formats.load_cg(path)
                    report = validate_graph(vocab, graph)
                    diagnostics.extend(f"{path}: {line}" for line in report.lines())
                else:
                    gcg = formats.load_gamma_cg(path)
                    report = validate_graph(vocab, gcg.graph)
                    diagnostics.extend(f"{path}: {line}" for line in report.lines())
                    for variable in gcg.variables:
                        report = validate_domain(vocab, gcg, variable)
                        diagnostics.extend(f"{path}: {line}" for line in report.lines())
            else:
                raise ConfigError(f"{path}: cannot validate documents of kind {kind!r}")
        except (VocabularyError, StructureError) as exc:
            diagnostics.append(str(exc))
    for line in diagnostics:
        print(line)
    return EXIT_VALIDATION if diagnostics else EXIT_OK


def _cmd_stats(args: argparse.Namespace) -> int:
    loaded = formats.load_dataset(Path(args.dataset))
    stats = compute_stats(loaded.graphs)
    print(stats_table(stats))
    return EXIT_OK


def _cmd_export_dot(args: argparse.Namespace) -> int:
    graph = formats.load_cg(args.cg)
    text = formats.export_dot(graph)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cggen",
        description="Generate synthetic conceptual-graph datasets from ontological constraints.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_out(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", required=True, help="output directory (must be empty or absent)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")

    p = sub.add_parser("generate", help="run the full pipeline and write a dataset")
    add_config_out(p)
    p.add_argument("--jobs", type=int, default=1, help="generate CGs with this many workers")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("auto-voc", help="generate a random vocabulary")
    add_config_out(p)
    p.set_defaults(func=_cmd_auto_voc)

    p = sub.add_parser("auto-gcg", help="generate random gamma-CGs from a vocabulary")
    add_config_out(p)
    p.set_defaults(func=_cmd_auto_gcg)

    p = sub.add_parser("auto-var", help="attach random variables to gamma-CGs")
    add_config_out(p)
    p.set_defaults(func=_cmd_auto_var)

    p = sub.add_parser("validate", help="validate vocabularies, gamma-CGs, CGs or output dirs")
    p.add_argument("paths", nargs="+", help="files or output directories")
    p.add_argument("--vocab", default=None, help="vocabulary for standalone CG/gamma files")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("stats", help="recompute and print dataset statistics")
    p.add_argument("dataset", help="dataset directory (holds manifest.json)")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("export-dot", help="render a CG as graphviz text")
    p.add_argument("cg", help="CG document")
    p.add_argument("--out", default=None, help="output file (stdout when omitted)")
    p.set_defaults(func=_cmd_export_dot)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (VocabularyError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CggenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def console_main() -> None:
    raise SystemExit(main())
