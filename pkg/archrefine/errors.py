# Copyright 2024 The archrefine Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#            http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
`errors.py`
Exceptions, source spans and diagnostics.
"""

from dataclasses import dataclass
from typing import Any, Optional


@dataclass(frozen=True)
class SourceSpan:
    """Location of a parsed entity (1-based lines and columns)."""

    file: str
    line: int
    column: int
    end_line: int
    end_column: int

    def contains(self, other: "SourceSpan") -> bool:
        """Check whether `other` nests inside this span."""
        start = (self.line, self.column)
        end = (self.end_line, self.end_column)
        return (
            other.file == self.file
            and start <= (other.line, other.column)
            and (other.end_line, other.end_column) <= end
        )

    def merge(self, other: "SourceSpan") -> "SourceSpan":
        """Smallest span covering both spans."""
        start = min((self.line, self.column), (other.line, other.column))
        end = max(
            (self.end_line, self.end_column), (other.end_line, other.end_column)
        )
        return SourceSpan(self.file, start[0], start[1], end[0], end[1])

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    """A message attached to a source span.

    Args:
        severity (str): 'error' or 'warning'.
        message (str): Human-readable message.
        span (SourceSpan): Where the problem is.
        reference (str, optional): Consistency condition ('condition 2') or
            rule name ('add-output-channel') the message refers to.
    """

    severity: str
    message: str
    span: SourceSpan
    reference: Optional[str] = None

    def __str__(self) -> str:
        ref = f" [{self.reference}]" if self.reference else ""
        return f"{self.span}: {self.severity}: {self.message}{ref}"


class ArchRefineError(Exception):
    """Base class of all archrefine errors."""


class StreamError(ArchRefineError):
    """Invalid operation on a stream prefix or named stream tuple."""


class OutOfRangeError(StreamError):
    """Truncation beyond the available prefix length."""


class UnknownChannelError(StreamError):
    """Channel not in the domain of a named stream tuple."""


class JoinError(StreamError):
    """Overlapping domains or unequal lengths on join."""


class InterfaceError(ArchRefineError):
    """Channel sets do not match the expected interface."""


class AdaptionError(InterfaceError):
    """Interface adaption preconditions violated."""


class MachineError(ArchRefineError):
    """Ill-formed machine definition."""


class CompositionError(ArchRefineError):
    """Behaviors cannot be composed."""


class BudgetError(ArchRefineError):
    """Enumeration would exceed the configured budget."""


class ConsistencyError(ArchRefineError):
    """System violates one or more consistency conditions."""

    def __init__(self, violations: list):
        self.violations = violations
        lines = "; ".join(str(v) for v in violations)
        super().__init__(f"Inconsistent system: {lines}")


class ParseError(ArchRefineError):
    """Syntax or declaration error in a DSL or script file."""

    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic
        super().__init__(str(diagnostic))


class RuleRejected(ArchRefineError):
    """A refinement rule premise failed.

    Args:
        rule (str): Rule name.
        message (str): Reason for the rejection.
        ledger (ObligationLedger, optional): Obligations recorded so far,
            including the failed one.
        witness (Witness, optional): Counterexample.
    """

    def __init__(
        self,
        rule: str,
        message: str,
        ledger: Any = None,
        witness: Any = None,
    ):
        self.rule = rule
        self.message = message
        self.ledger = ledger
        self.witness = witness
        super().__init__(f"{rule}: {message}")


class ScriptError(ArchRefineError):
    """A refinement script aborted at step `index` (0-based).

    Args:
        index (int): Index of the rejected step.
        rule (str): Rule name of the rejected step.
        message (str): Reason for the rejection.
        ledger (ObligationLedger): Obligations of all steps up to the
            rejected one.
        system (System): Last accepted system.
        witness (Witness, optional): Counterexample of the failed premise.
    """

    def __init__(  # noqa: PLR0913
        self,
        index: int,
        rule: str,
        message: str,
        ledger: Any = None,
        system: Any = None,
        witness: Any = None,
    ):
        self.index = index
        self.rule = rule
        self.message = message
        self.ledger = ledger
        self.system = system
        self.witness = witness
        super().__init__(f"step {index} ({rule}) rejected: {message}")
