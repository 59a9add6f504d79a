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
`emitter.py`
Canonical architecture text: deterministic, sorted, and parsed back by
`parse_architecture` into a structurally equal system.
"""

import re

from archrefine.behavior import (
    AdaptedMachine,
    MachineBehavior,
    RenamedMachine,
    TrivialBehavior,
)
from archrefine.errors import ArchRefineError
from archrefine.frontend.lexer import KEYWORDS
from archrefine.machines.base import LibraryMachine
from archrefine.machines.table import EMPTY, EQUALS, HAS, NONEMPTY, Guard, TableMachine
from archrefine.system import System

INDENT = "  "

_IDENTIFIER = re.compile(r"^[A-Za-z_]\w*'*$")


def fmt_message(message) -> str:
    """Message literal."""
    if isinstance(message, int):
        return str(message)
    if isinstance(message, tuple):
        return "(" + ", ".join(fmt_message(m) for m in message) + ")"
    text = str(message)
    if _IDENTIFIER.match(text) and text not in KEYWORDS:
        return text
    escaped = text.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def fmt_value(value) -> str:
    """Library parameter value; tuples are written as lists."""
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(fmt_value(v) for v in value) + "]"
    return fmt_message(value)


def fmt_interval(interval: tuple) -> str:
    return "[" + ", ".join(fmt_message(m) for m in interval) + "]"


def fmt_names(names) -> str:
    return ", ".join(sorted(names))


def fmt_params(params: dict) -> str:
    return ", ".join(f"{key}={fmt_value(value)}" for key, value in params.items())


def fmt_behavior(behavior: MachineBehavior) -> str:
    """Behavior expression.

    Raises:
        ArchRefineError: For behaviors without a textual form.
    """
    if isinstance(behavior, TrivialBehavior):
        return "trivial"
    if isinstance(behavior, TableMachine):
        return behavior.name
    if isinstance(behavior, LibraryMachine):
        return f"{behavior.library_name()}({fmt_params(behavior.params())})"
    if isinstance(behavior, AdaptedMachine):
        return (
            f"adapt({fmt_behavior(behavior.inner)}, in=[{fmt_names(behavior.inputs)}], "
            f"out=[{fmt_names(behavior.outputs)}], chaotic=[{fmt_names(behavior.extra)}])"
        )
    if isinstance(behavior, RenamedMachine):
        pairs = ", ".join(f"{old} -> {new}" for old, new in behavior.mapping)
        return f"rename({fmt_behavior(behavior.inner)}, {pairs})"
    raise ArchRefineError(f"Behavior {behavior.label} has no textual form.")


def fmt_guard(guard: Guard) -> str:
    if guard.kind == EQUALS:
        return f"{guard.channel} = {fmt_interval(guard.value)}"  # type: ignore[arg-type]
    if guard.kind in (EMPTY, NONEMPTY):
        return f"{guard.channel} {guard.kind}"
    if guard.kind == HAS:
        return f"{guard.channel} has {fmt_message(guard.value)}"
    return f"{guard.channel} = _"


def emit_table(machine: TableMachine) -> list:
    """Lines of a `machine NAME { ... }` block."""
    lines = [f"machine {machine.name} {{"]
    lines.append(f"{INDENT}inputs: {fmt_names(machine.inputs)}".rstrip())
    lines.append(f"{INDENT}outputs: {fmt_names(machine.outputs)}".rstrip())
    if machine.chaotic:
        lines.append(f"{INDENT}chaotic: {fmt_names(machine.chaotic)}")
    lines.append(f"{INDENT}states: {', '.join(machine.states)}")
    lines.append(f"{INDENT}init: {machine.initial}")
    for state, options in machine.emissions:
        alternatives = " | ".join(
            ", ".join(f"{c} = {fmt_interval(v[c])}" for c in sorted(v)) for v in options
        )
        lines.append(f"{INDENT}emit {state}: {alternatives}".rstrip())
    for move in machine.moves:
        guards = " and ".join(fmt_guard(g) for g in move.guards) or "true"
        lines.append(f"{INDENT}on {move.source}: {guards} -> {', '.join(move.targets)}")
    lines.append("}")
    return lines


def collect_tables(system: System, tables=None) -> dict:
    """Table machines used anywhere in `system`, by name.

    Raises:
        ArchRefineError: If two different tables share a name.
    """
    tables = {} if tables is None else tables

    def visit(behavior):
        if isinstance(behavior, TableMachine):
            known = tables.setdefault(behavior.name, behavior)
            if known != behavior:
                raise ArchRefineError(f"Two different machines are named {behavior.name}.")
        elif isinstance(behavior, (AdaptedMachine, RenamedMachine)):
            visit(behavior.inner)

    for component in system.components:
        if component.sub is not None:
            collect_tables(component.sub, tables)
        else:
            visit(component.behavior)
    return tables


def emit_components(system: System, depth: int = 0) -> list:
    """Lines of the component and system blocks, indented by `depth`."""
    pad = INDENT * depth
    lines = []
    for component in system.components:
        lines.append(f"{pad}component {component.name} {{")
        lines.append(f"{pad}{INDENT}in: {fmt_names(component.inputs)}".rstrip())
        lines.append(f"{pad}{INDENT}out: {fmt_names(component.outputs)}".rstrip())
        if component.sub is not None:
            lines.append(f"{pad}{INDENT}sub {{")
            lines.extend(emit_components(component.sub, depth + 2))
            lines.append(f"{pad}{INDENT}}}")
        else:
            lines.append(f"{pad}{INDENT}behavior: {fmt_behavior(component.behavior)}")
        lines.append(f"{pad}}}")
        lines.append("")
    lines.append(f"{pad}system {{")
    lines.append(f"{pad}{INDENT}inputs: {fmt_names(system.inputs)}".rstrip())
    lines.append(f"{pad}{INDENT}outputs: {fmt_names(system.outputs)}".rstrip())
    lines.append(f"{pad}}}")
    return lines


def emit_canonical(system: System) -> str:
    """Canonical architecture text of `system`.

    Raises:
        ArchRefineError: If alphabets or machines cannot be named uniquely.
    """
    alphabets: dict = {}
    for _, alphabet in system.channels:
        known = alphabets.setdefault(alphabet.name, alphabet)
        if known != alphabet:
            raise ArchRefineError(f"Two different alphabets are named {alphabet.name}.")
    lines = []
    for name in sorted(alphabets):
        messages = ", ".join(fmt_message(m) for m in alphabets[name].messages)
        lines.append(f"alphabet {name} = {{{messages}}}")
    if alphabets:
        lines.append("")
    for channel, alphabet in system.channels:
        lines.append(f"channel {channel} : {alphabet.name}")
    if system.channels:
        lines.append("")
    tables = collect_tables(system)
    for name in sorted(tables):
        lines.extend(emit_table(tables[name]))
        lines.append("")
    lines.extend(emit_components(system))
    return "\n".join(lines) + "\n"
