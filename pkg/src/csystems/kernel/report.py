"""Check reports and the recorder that fills them."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from .handles import DomainError, WindowOverflow

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"

# counterexamples kept per report; the failure count in stats is exact
MAX_EXAMPLES = 8


@dataclass
class CheckReport:
    name: str
    status: str
    counterexamples: list[dict] = field(default_factory=list)
    cases: int = 0
    stats: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "counterexamples": self.counterexamples,
            "cases": self.cases,
            "stats": dict(sorted(self.stats.items())),
        }


class Recorder:
    """Accumulates cases for one named check.

    A case that raises :class:`WindowOverflow` is outside the window and is
    counted under ``stats["out_of_window"]`` instead of being judged.  A case
    that raises :class:`DomainError` is a failure: the structure did not
    even produce the value the property talks about.
    """

    def __init__(self, name: str, cs, max_examples: int = MAX_EXAMPLES):
        self.name = name
        self.cs = cs
        self.max_examples = max_examples
        self.cases = 0
        self.failures = 0
        self.undecided = 0
        self.counterexamples: list[dict] = []
        self.stats: dict[str, Any] = {}

    def note(self, key: str, amount: int = 1) -> None:
        self.stats[key] = self.stats.get(key, 0) + amount

    def flag(self, key: str, value: Any = True) -> None:
        self.stats[key] = value

    def fail(self, condition: str, inputs: Any, expected: Any, actual: Any) -> None:
        self.failures += 1
        self.note(f"failures[{condition}]")
        if len(self.counterexamples) < self.max_examples:
            self.counterexamples.append(
                {
                    "condition": condition,
                    "inputs": self.cs.describe(inputs),
                    "expected": self.cs.describe(expected),
                    "actual": self.cs.describe(actual),
                }
            )

    def expect(self, condition: str, inputs: Any, thunk: Callable[[], tuple[Any, Any]]) -> bool:
        """Evaluate ``thunk() -> (expected, actual)`` as one case."""
        try:
            expected, actual = thunk()
        except WindowOverflow:
            self.note("out_of_window")
            return True
        except DomainError as exc:
            self.cases += 1
            self.fail(condition, inputs, "defined", f"error: {exc}")
            return False
        self.cases += 1
        if expected == actual:
            return True
        self.fail(condition, inputs, expected, actual)
        return False

    def holds(self, condition: str, inputs: Any, thunk: Callable[[], bool]) -> bool:
        return self.expect(condition, inputs, lambda: (True, bool(thunk())))

    def undecidable(self, reason: str) -> None:
        self.undecided += 1
        self.note(f"undecided[{reason}]")

    def report(self) -> CheckReport:
        if self.counterexamples:
            status = FAIL
        elif self.cases == 0 or self.undecided:
            status = SKIPPED
        else:
            status = PASS
        return CheckReport(self.name, status, list(self.counterexamples), self.cases, dict(self.stats))
