"""Exception types shared across the package."""


class AnchorPathError(Exception):
    """Base class for all package-specific errors."""


class ParseError(AnchorPathError):
    """A data file line could not be parsed."""

    def __init__(self, path, line_number, message):
        super().__init__(f"{path}:{line_number}: {message}")
        self.path = str(path)
        self.line_number = line_number


class EmptyGraphError(AnchorPathError):
    """A triple file produced no triples."""


class AlreadyAugmentedError(AnchorPathError):
    """Inverse augmentation was requested on an already-augmented graph."""


class UnknownEntityError(AnchorPathError, KeyError):
    """An entity handle or surface string does not resolve in the graph."""


class UnknownRelationError(AnchorPathError, KeyError):
    """A relation handle or surface string does not resolve in the graph."""


class ContractError(AnchorPathError):
    """An operation was called outside its documented precondition."""


class GenerationError(AnchorPathError):
    """Training-pair generation could not satisfy its contract."""


class EncoderTransportError(AnchorPathError):
    """The remote encoder could not be reached or answered incorrectly."""

    def __init__(self, message, attempts):
        super().__init__(f"{message} (after {attempts} attempt(s))")
        self.attempts = attempts


class ValidationError(AnchorPathError):
    """An input artifact violated a structural invariant."""


class ConfigError(AnchorPathError):
    """A run configuration is incomplete or out of range."""
