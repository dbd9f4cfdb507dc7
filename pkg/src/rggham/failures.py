"""Failure vocabulary shared by the construction pipeline and the CLI."""

from __future__ import annotations

import enum
from typing import Any


class FailureReason(enum.Enum):
    """Why the cycle construction gave up on an instance.

    The reasons are mutually exclusive with a returned cycle and are stable
    identifiers: the CLI maps them to exit codes 10 + enum position.
    """

    DISCONNECTED = "Disconnected"
    HOOK_MISSING = "HookMissing"
    LEDGER_EXHAUSTED = "LedgerExhausted"
    EDGE_TOO_LONG = "EdgeTooLong"
    RADIUS_DEGENERATE = "RadiusDegenerate"

    @property
    def exit_code(self) -> int:
        return 10 + list(FailureReason).index(self)


class ConstructionError(Exception):
    """Raised when the pipeline cannot produce a Hamiltonian cycle.

    Carries a FailureReason plus a context dict naming the square/cell/edge
    where the construction stopped. Harnesses catch this and record it; it is
    never allowed to escape as a crash.
    """

    def __init__(self, reason: FailureReason, context: dict[str, Any] | None = None):
        self.reason = reason
        self.context = dict(context or {})
        super().__init__(f"{reason.value}: {self.context}")

    def to_json(self) -> dict[str, Any]:
        return {"reason": self.reason.value, "context": self.context}
