"""cggen: synthetic conceptual-graph datasets from ontological constraints.

The pipeline: a vocabulary (type hierarchies, relation signatures,
individual markers) plus a set of gamma-CGs (graphs with label variables)
drive a generation loop that instantiates, specializes and joins components
into CGs of a requested minimum size. Vocabularies, gamma-CGs and variables
can each be generated automatically from a handful of numeric parameters.
"""

from .autogen import (
    AutoGcgConfig,
    AutoGcgResult,
    AutoVarConfig,
    AutoVarResult,
    AutoVocConfig,
    ParamSpec,
    auto_gamma_cgs,
    auto_variables,
    auto_vocabulary,
    sample_param,
)
from .core import (
    CONCEPT,
    RELATION,
    ConceptNode,
    ConceptualGraph,
    Marker,
    RelationNode,
    Signature,
    TypeHierarchy,
    ValidationReport,
    Violation,
    Vocabulary,
    is_subtype,
    most_specific,
    random_descendant,
    restriction_for,
    validate_graph,
)
from .errors import (
    ArityError,
    CggenError,
    ConfigError,
    FormatError,
    GenerationError,
    InstantiationError,
    StructureError,
    UnknownIdentifierError,
    VocabularyError,
)
from .formats import (
    export_dot,
    load_cg,
    load_dataset,
    load_gamma_cg,
    load_vocabulary,
    save_cg,
    save_dataset,
    save_gamma_cg,
    save_vocabulary,
)
from .gamma import (
    TARGET_CONCEPT_TYPE,
    TARGET_MARKER,
    TARGET_RELATION_TYPE,
    GammaCG,
    Variable,
    VariableTarget,
    concept_type_domain,
    instantiate,
    marker_domain,
    relation_type_domain,
    validate_domain,
)
from .generator import (
    POLICY_ARITY_ONLY,
    POLICY_SIGNATURE_COMPATIBLE,
    DatasetResult,
    GenerationProvenance,
    GeneratorConfig,
    MarkerMint,
    derive_rng,
    generate_dataset,
    generate_one,
    join,
)
from .metrics import DatasetStats, compute_stats, stats_table

__version__ = "0.1.0"

__all__ = [
    "AutoGcgConfig",
    "AutoGcgResult",
    "AutoVarConfig",
    "AutoVarResult",
    "AutoVocConfig",
    "ParamSpec",
    "auto_gamma_cgs",
    "auto_variables",
    "auto_vocabulary",
    "sample_param",
    "CONCEPT",
    "RELATION",
    "ConceptNode",
    "ConceptualGraph",
    "Marker",
    "RelationNode",
    "Signature",
    "TypeHierarchy",
    "ValidationReport",
    "Violation",
    "Vocabulary",
    "is_subtype",
    "most_specific",
    "random_descendant",
    "restriction_for",
    "validate_graph",
    "ArityError",
    "CggenError",
    "ConfigError",
    "FormatError",
    "GenerationError",
    "InstantiationError",
    "StructureError",
    "UnknownIdentifierError",
    "VocabularyError",
    "export_dot",
    "load_cg",
    "load_dataset",
    "load_gamma_cg",
    "load_vocabulary",
    "save_cg",
    "save_dataset",
    "save_gamma_cg",
    "save_vocabulary",
    "TARGET_CONCEPT_TYPE",
    "TARGET_MARKER",
    "TARGET_RELATION_TYPE",
    "GammaCG",
    "Variable",
    "VariableTarget",
    "concept_type_domain",
    "instantiate",
    "marker_domain",
    "relation_type_domain",
    "validate_domain",
    "POLICY_ARITY_ONLY",
    "POLICY_SIGNATURE_COMPATIBLE",
    "DatasetResult",
    "GenerationProvenance",
    "GeneratorConfig",
    "MarkerMint",
    "derive_rng",
    "generate_dataset",
    "generate_one",
    "join",
    "DatasetStats",
    "compute_stats",
    "stats_table",
]
