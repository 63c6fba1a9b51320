"""
Exception hierarchy shared by the solver modules and the CLI.

Every error carries the process exit code the CLI reports for it:

    2  scenario file missing or unreadable
    3  scenario schema violation
    4  invariant or hypothesis violation
    5  solver infeasibility / non-interior equilibrium
    6  property verification failure
"""

from typing import List, Optional


class FairnessSolverError(Exception):
    """Base class for all solver errors."""

    exit_code = 1


class ScenarioFileError(FairnessSolverError):
    exit_code = 2


class SchemaError(FairnessSolverError):
    """Scenario document does not match the expected structure."""

    exit_code = 3

    def __init__(self, problems: List[str]):
        self.problems = list(problems)
        super().__init__("Schema violation:\n  - " + "\n  - ".join(self.problems))


class InvariantError(FairnessSolverError):
    """A value object was constructed with parameters outside its domain."""

    exit_code = 4

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("Invariant violation:\n  - " + "\n  - ".join(self.problems))


class HypothesisError(FairnessSolverError):
    """The premises of a structural check do not hold for this scenario."""

    exit_code = 4


class DomainError(FairnessSolverError, ValueError):
    """Argument outside the mathematical domain of the operation."""

    exit_code = 4


class SolverError(FairnessSolverError):
    exit_code = 5


class NonInteriorEquilibrium(SolverError):
    """Police equilibrium has no root strictly inside the capacity segment."""


class InfeasibleError(FairnessSolverError):
    """A fairness constraint cannot be met."""

    exit_code = 5

    def __init__(self, message: str, notion: Optional[str] = None):
        self.notion = notion
        prefix = f"[{notion}] " if notion else ""
        super().__init__(f"{prefix}{message}")


class VerificationFailure(FairnessSolverError):
    """A property whose hypotheses hold failed its conclusion."""

    exit_code = 6
