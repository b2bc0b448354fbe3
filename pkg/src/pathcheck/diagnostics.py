"""Located, categorized diagnostics shared by every pipeline stage."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

CATEGORIES = (
    "lex",
    "parse",
    "scope",
    "type-mismatch",
    "unsolved-hole",
    "not-convertible",
    "step-budget",
    "usage",
)


@dataclass(frozen=True)
class Loc:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    category: str
    location: Optional[Loc]
    message: str
    expected: Optional[str] = None
    actual: Optional[str] = None

    def __post_init__(self) -> None:
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown diagnostic category {self.category!r}")

    def render(self) -> str:
        where = f"{self.location}: " if self.location else ""
        out = f"{where}{self.category}: {self.message}"
        if self.expected is not None:
            out += f"\n  expected: {self.expected}"
        if self.actual is not None:
            out += f"\n  actual:   {self.actual}"
        return out


class CheckError(Exception):
    """Raised by any stage to abort the current declaration with a diagnostic."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.render())
        self.diagnostic = diagnostic


class StepBudgetExceeded(CheckError):
    def __init__(self, limit: int):
        CheckError.__init__(
            self,
            Diagnostic(
                "step-budget",
                None,
                f"reduction exceeded the step budget of {limit} "
                "(this signals a checker bug, not a proof error)",
            ),
        )
