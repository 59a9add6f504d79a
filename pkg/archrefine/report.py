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
`report.py`
Report utilities.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Optional

from archrefine import utils
from archrefine.constants import (
    ASSUMED,
    COLORED_OUTPUT,
    DISCHARGED,
    EXIT_FAILED,
    FAILED,
    Colors,
)
from archrefine.errors import ScriptError

LOGGER = logging.getLogger(__name__)


@dataclass(init=False)
class RefinementReport:
    """Refinement report dataclass. Summarize the obligation ledger of a
    script run.

    Args:
        architecture (str): Architecture file.
        script (str): Script file.
        ledger (ObligationLedger): Obligations of the accepted steps (and of
            the rejected one, if any).
        steps (int): Number of steps in the script.
        timestamp (float): UNIX timestamp of the run.
        mode (str): Default check mode description.
        error (ScriptError, optional): Rejection that aborted the script.
    """

    # Inputs
    architecture: str
    script: str
    mode: str

    # Progress
    steps: int
    applied: int

    # Obligations
    status: str
    discharged: int
    assumed: int
    failed: int
    exit_code: int

    # Global
    timestamp: float
    timestamp_human: str

    obligations: list = field(default_factory=list)

    # Rejection
    rejected_step: Optional[int] = None
    rejected_rule: Optional[str] = None
    errors: list = field(default_factory=list)
    witness: Optional[dict] = None

    def __init__(  # noqa: PLR0913
        self,
        architecture,
        script,
        ledger,
        steps,
        timestamp,
        mode="",
        error: Optional[ScriptError] = None,
    ):
        self.architecture = str(architecture)
        self.script = str(script)
        self.mode = mode
        self.steps = steps
        self.timestamp = timestamp
        self.timestamp_human = utils.get_human_time(timestamp)
        self.obligations = ledger.to_json()
        self.discharged = ledger.count(DISCHARGED)
        self.assumed = ledger.count(ASSUMED)
        self.failed = ledger.count(FAILED)
        self.errors = []
        self.rejected_step = None
        self.rejected_rule = None
        self.witness = None
        if error is None:
            self.applied = steps
            self.status = ledger.status
            self.exit_code = ledger.exit_code
        else:
            self.applied = error.index
            self.status = FAILED
            self.exit_code = EXIT_FAILED
            self.rejected_step = error.index
            self.rejected_rule = error.rule
            self.errors.append(error.message)
            if error.witness is not None:
                self.witness = error.witness.to_dict()

    @property
    def valid(self) -> bool:
        """True if every step was applied."""
        return self.rejected_step is None

    def to_json(self) -> dict:
        """Serialize dataclass to JSON."""
        return asdict(self)

    @property
    def info(self) -> str:
        """Run information."""
        return f"{self.architecture} | {self.script} | {self.applied}/{self.steps} steps"

    def to_text(self) -> str:
        """Ledger lines followed by the summary line."""
        lines = [
            f"{o['step']:>3} | {o['rule']:<30} | {o['premise']} | {o['mode']} | "
            f"{o['verdict']}" + (f" | {o['detail']}" if o["detail"] else "")
            for o in self.obligations
        ]
        lines.append(str(self))
        return "\n".join(lines)

    def __str__(self) -> str:
        if not self.valid:
            errors_str = " | ".join(self.errors)
            full_str = (
                f"{self.info} | REJECTED at step {self.rejected_step} "
                f"({self.rejected_rule}) | {errors_str}"
            )
        else:
            full_str = (
                f"{self.info} | Discharged: {self.discharged:<3} | "
                f"Assumed: {self.assumed:<3} | Status: {self.status}"
            )
        if COLORED_OUTPUT == 1:
            if self.status == FAILED:
                full_str = Colors.FAIL + full_str + Colors.ENDC
            elif self.status == ASSUMED:
                full_str = Colors.WARNING + full_str + Colors.ENDC
            else:
                full_str = Colors.OKGREEN + full_str + Colors.ENDC
        return full_str
