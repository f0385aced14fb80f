"""Exception types shared across the package.

Argument-level problems derive from ValueError and map to CLI exit code 2;
evaluation-domain failures derive from DomainError and map to exit code 3.
"""


class GridMismatchError(ValueError):
    """States do not share the same momentum grid or mass."""


class TruncationError(ValueError):
    """Momentum grid too narrow for the requested packet."""


class DegenerateStateError(ValueError):
    """Superposition collapsed to the zero state."""


class ScenarioError(ValueError):
    """Scenario file is malformed or violates a precondition."""


class CoverageError(ValueError):
    """Outcome ensemble does not capture enough total probability."""


class DomainError(ValueError):
    """Input is outside the mathematical domain of the operation."""


class ZeroProbabilityOutcomeError(DomainError):
    """Conditioning on an outcome whose amplitude is below the floor."""


class CausalOrderError(DomainError):
    """Evaluation time lies after the final measurement time."""


class NodeError(DomainError):
    """Current field vanishes at the requested point."""
