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
`script.py`
Parser of line-oriented refinement scripts (`.script`).

Each non-empty line is either a definition

    machine NAME = <behavior>
    invariant NAME = Lib(key=value, ...)

or a rule application `rule-name args [key=value ...]`, for instance

    add-output-channel ENC D
    refine-behavior ENC machine=ENC_DELTA
    refine-behavior-with-invariant RDB machine=RDB_R invariant=roundtrip mode=bounded depth=6
    fold PRE' components=PRE,ENC outputs=D
    rename-channel I J

Options `mode`, `depth`, `bound`, `samples` and `seed` override the default
check mode of a single step.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

from archrefine.frontend.lexer import tokenize
from archrefine.frontend.parser import ExpressionParser
from archrefine.rules import RefinementStep, StepKind

LOGGER = logging.getLogger(__name__)

# Script option -> CheckMode field
MODE_OPTIONS = {
    "mode": "kind",
    "depth": "depth",
    "bound": "interval_bound",
    "samples": "samples",
    "seed": "seed",
}

# Positional arguments per rule, beyond which only key=value pairs follow
POSITIONAL = {
    StepKind.ADD_COMPONENT: ("target",),
    StepKind.REMOVE_COMPONENT: ("target",),
    StepKind.EXPAND: ("target",),
    StepKind.ADD_OUTPUT_CHANNEL: ("target", "channel"),
    StepKind.REMOVE_OUTPUT_CHANNEL: ("target", "channel"),
    StepKind.ADD_INPUT_CHANNEL: ("target", "channel"),
    StepKind.REMOVE_INPUT_CHANNEL: ("target", "channel"),
    StepKind.REFINE_BEHAVIOR: ("target",),
    StepKind.REFINE_BEHAVIOR_WITH_INVARIANT: ("target",),
    StepKind.FOLD: ("target",),
    StepKind.RENAME_CHANNEL: ("old", "new"),
}

LIST_KEYS = ("components", "inputs", "outputs")


@dataclass
class Script:
    """A parsed refinement script.

    Args:
        steps (list): Refinement steps in order.
        machines (dict): Machines defined in the script.
        invariants (dict): Invariants defined in the script.
    """

    steps: list = field(default_factory=list)
    machines: dict = field(default_factory=dict)
    invariants: dict = field(default_factory=dict)


class ScriptLineParser(ExpressionParser):
    """Parser of one script line."""

    def __init__(self, tokens: list, file: str, script: Script):
        super().__init__(tokens, file, script.machines)
        self.script = script

    def parse_definition(self):
        keyword = self.advance()
        name = self.match("IDENTIFIER")
        self.match("EQUALS")
        if keyword.value == "machine":
            if name.value in self.script.machines:
                self.error(f"duplicate declaration of machine {name.value}", name.span)
            self.script.machines[name.value] = self.parse_behavior(allow_names=False)
        else:
            if name.value in self.script.invariants:
                self.error(f"duplicate declaration of invariant {name.value}", name.span)
            self.script.invariants[name.value] = self.parse_invariant(
                self.script.invariants, allow_names=False
            )
        self._end()

    def _end(self):
        if not self.peek_eof():
            self.error(f"unexpected '{self.nt.value}'")  # type: ignore[union-attr]

    def parse_step(self) -> RefinementStep:
        rule = self.match_name()
        try:
            kind = StepKind(rule.value)
        except ValueError:
            return self.error(f"unknown rule {rule.value}", rule.span)
        start = rule.span
        values: dict = {}
        for slot in POSITIONAL[kind]:
            if self.peek_eof():
                self.error(f"{kind.value}: missing {slot}", reference=kind.value)
            values[slot] = self.match("IDENTIFIER").value
        payload: dict = {}
        mode: dict = {}
        while not self.peek_eof():
            key = self.advance()
            self.match("EQUALS")
            if key.value in MODE_OPTIONS:
                mode[MODE_OPTIONS[key.value]] = self._option(key)
            elif key.value == "machine":
                payload["machine"] = self.parse_behavior()
            elif key.value == "invariant":
                payload["invariant"] = self.parse_invariant(self.script.invariants)
            elif key.value in LIST_KEYS:
                payload[key.value] = self._names()
            else:
                self.error(f"{kind.value}: unknown argument {key.value}", key.span, kind.value)
        if "channel" in values:
            payload["channel"] = values["channel"]
        if kind == StepKind.RENAME_CHANNEL:
            payload.update(old=values["old"], new=values["new"])
            target: tuple = ()
        else:
            target = (values["target"],)
        for key in ("inputs", "outputs"):
            if key in payload:
                payload[key] = frozenset(payload[key])
        if "components" in payload:
            payload["components"] = tuple(payload["components"])
        span = start.merge(self.ct.span) if self.ct is not None else start
        try:
            return RefinementStep(kind, target, payload, tuple(mode.items()), span)
        except ValueError as exc:
            return self.error(str(exc), span, kind.value)

    def _names(self) -> list:
        if self.peek("LBRACKET"):
            return self.match_list()
        return self.match_names()

    def _option(self, key):
        if key.value == "mode":
            return self.match("IDENTIFIER").value
        return self.match("INTEGER").value


def parse_script_document(
    text: str,
    file: str = "<string>",
    machines: Optional[dict] = None,
    invariants: Optional[dict] = None,
) -> Script:
    """Parse a refinement script.

    Args:
        text (str): Script content.
        file (str): File name for spans.
        machines (dict, optional): Machines visible to the script (for
            instance those declared in the architecture file).
        invariants (dict, optional): Invariants visible to the script.

    Returns:
        Script: Steps and the definitions made in the script.

    Raises:
        ParseError: On unknown rules or malformed payloads.
    """
    script = Script(machines=dict(machines or {}), invariants=dict(invariants or {}))
    for number, line in enumerate(text.splitlines(), start=1):
        tokens = tokenize(line, file, first_line=number)
        if not tokens:
            continue
        parser = ScriptLineParser(tokens, file, script)
        if parser.peek_kw("machine") or parser.peek_kw("invariant"):
            parser.parse_definition()
        else:
            script.steps.append(parser.parse_step())
    LOGGER.debug(f"Parsed {len(script.steps)} steps from {file}")
    return script


def parse_script(
    text: str,
    file: str = "<string>",
    machines: Optional[dict] = None,
    invariants: Optional[dict] = None,
) -> list:
    """Parse a refinement script into its list of `RefinementStep`."""
    return parse_script_document(text, file, machines, invariants).steps

