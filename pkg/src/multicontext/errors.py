"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations


class MCMError(Exception):
    exit_code = 1
    code = "error"


class ValidationError(MCMError):
    """One or more invariants of the input objects do not hold."""

    exit_code = 2
    code = "validation"

    def __init__(self, problems, code: str | None = None):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        if code is not None:
            self.code = code
        super().__init__("; ".join(self.problems))


class ScopeError(ValidationError):
    code = "scope"

    def __init__(self, message: str):
        super().__init__([message])


class InconsistentModelError(MCMError):
    exit_code = 3
    code = "inconsistent"


class ImpossibleEvidenceError(MCMError):
    exit_code = 4
    code = "impossible_evidence"


class BudgetExceededError(MCMError):
    exit_code = 5
    code = "budget_exceeded"
