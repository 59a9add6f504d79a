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
`interchange.py`
JSON interchange exporter. The document mirrors the type model:

    {
      "alphabets": {"Entry": [["k0", 0], ...], ...},
      "channels": {"In": "Entry", ...},
      "machines": {"NAME": {"inputs": [...], "outputs": [...], "chaotic": [...],
                            "states": [...], "initial": "s0",
                            "emissions": {"s0": [{"A": [1]}]},
                            "transitions": [{"source": "s0", "targets": ["s1"],
                                             "guards": [{"channel": "B",
                                                         "kind": "has",
                                                         "value": 1}]}]}},
      "components": {"PRE": {"inputs": [...], "outputs": [...],
                             "behavior": {...}} | {..., "sub": {...}}},
      "system": {"inputs": [...], "outputs": [...]}
    }

Behaviors are `{"trivial": true}`, `{"library": "Database", "params": {...}}`,
`{"machine": "NAME"}`, `{"adapt": <behavior>, "inputs": [...], "outputs":
[...], "chaotic": [...]}` or `{"rename": <behavior>, "mapping": {...}}`. A
`sub` holds `components` and `system` of the folded subarchitecture.
"""

import json
import logging

from archrefine.behavior import (
    AdaptedMachine,
    MachineBehavior,
    RenamedMachine,
    TrivialBehavior,
)
from archrefine.errors import ArchRefineError
from archrefine.frontend.emitter import collect_tables
from archrefine.machines.base import LibraryMachine
from archrefine.machines.table import TableMachine
from archrefine.streams import thaw
from archrefine.system import System

from .base import SystemExporter

LOGGER = logging.getLogger(__name__)


def behavior_to_dict(behavior: MachineBehavior) -> dict:
    """Interchange form of a behavior expression.

    Raises:
        ArchRefineError: For behaviors without an interchange form.
    """
    if isinstance(behavior, TrivialBehavior):
        return {"trivial": True}
    if isinstance(behavior, TableMachine):
        return {"machine": behavior.name}
    if isinstance(behavior, LibraryMachine):
        return {"library": behavior.library_name(), "params": thaw_params(behavior)}
    if isinstance(behavior, AdaptedMachine):
        return {
            "adapt": behavior_to_dict(behavior.inner),
            "inputs": sorted(behavior.inputs),
            "outputs": sorted(behavior.outputs),
            "chaotic": sorted(behavior.extra),
        }
    if isinstance(behavior, RenamedMachine):
        return {
            "rename": behavior_to_dict(behavior.inner),
            "mapping": dict(behavior.mapping),
        }
    raise ArchRefineError(f"Behavior {behavior.label} has no interchange form.")


def thaw_params(machine: LibraryMachine) -> dict:
    return {key: thaw(value) for key, value in machine.params().items()}


def table_to_dict(machine: TableMachine) -> dict:
    return {
        "inputs": sorted(machine.inputs),
        "outputs": sorted(machine.outputs),
        "chaotic": sorted(machine.chaotic),
        "states": list(machine.states),
        "initial": machine.initial,
        "emissions": {
            state: [{c: thaw(v[c]) for c in v} for v in options]
            for state, options in machine.emissions
        },
        "transitions": [
            {
                "source": move.source,
                "guards": [
                    {"channel": g.channel, "kind": g.kind, "value": thaw(g.value)}
                    for g in move.guards
                ],
                "targets": list(move.targets),
            }
            for move in machine.moves
        ],
    }


def components_to_dict(system: System) -> dict:
    components = {}
    for component in system.components:
        data: dict = {
            "inputs": sorted(component.inputs),
            "outputs": sorted(component.outputs),
        }
        if component.sub is not None:
            data["sub"] = {
                "components": components_to_dict(component.sub),
                "system": interface_to_dict(component.sub),
            }
        else:
            data["behavior"] = behavior_to_dict(component.behavior)
        components[component.name] = data
    return components


def interface_to_dict(system: System) -> dict:
    return {"inputs": sorted(system.inputs), "outputs": sorted(system.outputs)}


def to_interchange(system: System) -> dict:
    """Interchange document of `system`.

    Args:
        system (System): System to serialize.

    Returns:
        dict: JSON-serializable document.
    """
    alphabets = {}
    for _, alphabet in system.channels:
        alphabets[alphabet.name] = thaw(alphabet.messages)
    tables = collect_tables(system)
    return {
        "alphabets": alphabets,
        "channels": {channel: alphabet.name for channel, alphabet in system.channels},
        "machines": {name: table_to_dict(tables[name]) for name in sorted(tables)},
        "components": components_to_dict(system),
        "system": interface_to_dict(system),
    }


class InterchangeExporter(SystemExporter):
    """Exporter writing the JSON interchange document."""

    OPTIONAL_FIELDS = ["indent"]
    EXTENSION = ".json"

    def render(self, system: System, **fields) -> str:
        document = to_interchange(system)
        return json.dumps(document, indent=fields.get("indent", 2), sort_keys=True) + "\n"
