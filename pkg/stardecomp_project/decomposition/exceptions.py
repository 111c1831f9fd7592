"""
Exception hierarchy for the decomposition engine.
"""


class DecompositionError(Exception):
    """Base class for every engine failure."""


class DiagramError(DecompositionError):
    """Structural misuse of a diagram: dangling ids, arity mismatch, bad boundaries."""


class OracleLimitError(DecompositionError):
    """The diagram has more boundary wires than the oracle is allowed to contract."""


class StaleMatchError(DecompositionError):
    """A rewrite site no longer matches the diagram it is applied to."""


class RuleError(DecompositionError):
    """A decomposition rule was requested or applied outside its domain."""


class CliffordStarStateError(RuleError):
    """The requested star state is Clifford and needs no decomposition."""


class NoStarEdgeError(DecompositionError):
    """Dynamic decomposition was asked for a vertex without star edges."""


class DepthGuardError(DecompositionError):
    """A term-tree path took more decomposition actions than stars available."""


class DecompositionTimeout(DecompositionError):
    """The cooperative deadline of a decomposition run passed."""


class CircuitError(DecompositionError):
    """A circuit or gate failed validation."""


class FixtureFormatError(DecompositionError):
    """A fixture or serialized document could not be parsed."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
