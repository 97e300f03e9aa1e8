"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration and parse problems
(ConfigError, FormatError) exit 2, validation failures exit 1.
"""


class CggenError(Exception):
    """Base class for all package errors."""


class UnknownIdentifierError(CggenError):
    """A type id, marker id or node id does not exist where required."""


class ArityError(CggenError):
    """An argument position or argument list does not match a relation arity."""


class StructureError(CggenError):
    """A graph or gamma-CG value violates a structural invariant."""


class VocabularyError(CggenError):
    """A vocabulary or hierarchy violates one of its invariants."""


class ConfigError(CggenError):
    """A configuration value or combination of values is invalid."""


class InstantiationError(CggenError):
    """A variable has an empty effective domain at draw time."""


class GenerationError(CggenError):
    """Generation cannot make progress (all components exhausted)."""


class FormatError(CggenError):
    """A document cannot be parsed or carries an unsupported version."""
