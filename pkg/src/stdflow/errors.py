"""Exception hierarchy with machine-readable codes and CLI exit statuses."""

from __future__ import annotations


class StdfError(Exception):
    code = "EINTERNAL"
    exit_status = 1


class ParseError(StdfError):
    """Malformed input record; carries the 1-based line number."""

    code = "EPARSE"
    exit_status = 4

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(StdfError):
    code = "EVALIDATION"
    exit_status = 4


class QueryError(StdfError):
    code = "EQUERY"
    exit_status = 2


class InfeasibleQueryError(QueryError):
    code = "EINFEASIBLE"


class BudgetExceededError(StdfError):
    """Exact enumeration would exceed the subset budget; use peeling instead."""

    code = "EBUDGET"
    exit_status = 3
