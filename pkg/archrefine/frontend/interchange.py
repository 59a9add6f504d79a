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
Loader of JSON interchange documents (see `archrefine.exporters.interchange`
for the schema).
"""

import logging
from typing import Optional, Union

from archrefine.behavior import AdaptedMachine, RenamedMachine, TrivialBehavior
from archrefine.constants import DEFAULT_INTERVAL_BOUND
from archrefine.errors import ArchRefineError, Diagnostic, ParseError, SourceSpan
from archrefine.machines.table import Guard, TableMachine, Transition
from archrefine.streams import Alphabet, Valuation
from archrefine.system import Component, System, as_component
from archrefine.utils import get_machine_cls, load_config

LOGGER = logging.getLogger(__name__)


class InterchangeLoader:
    """Builds a `System` from a parsed interchange document."""

    def __init__(self, document: dict, file: str, bound: int):
        self.document = document
        self.file = file
        self.bound = bound
        self.channels: dict = {}
        self.machines: dict = {}

    def error(self, message: str, path: str):
        span = SourceSpan(self.file, 1, 1, 1, 1)
        raise ParseError(Diagnostic("error", f"{path}: {message}", span))

    def load(self) -> System:
        alphabets = {
            name: Alphabet(name, tuple(messages))
            for name, messages in (self.document.get("alphabets") or {}).items()
        }
        for channel, alphabet in (self.document.get("channels") or {}).items():
            if alphabet not in alphabets:
                self.error(f"unknown alphabet {alphabet}", f"channels.{channel}")
            self.channels[channel] = alphabets[alphabet]
        for name, table in (self.document.get("machines") or {}).items():
            self.machines[name] = self.load_table(name, table)
        if "system" not in self.document:
            self.error("missing system", "system")
        system = self.load_system(self.document, "")
        LOGGER.debug(f"Loaded {len(system.components)} components from {self.file}")
        return system

    def load_system(self, data: dict, path: str) -> System:
        interface = data["system"] or {}
        components = [
            self.load_component(name, item, f"{path}components.{name}")
            for name, item in (data.get("components") or {}).items()
        ]
        inputs = frozenset(interface.get("inputs") or ())
        outputs = frozenset(interface.get("outputs") or ())
        self.check_declared(inputs | outputs, f"{path}system")
        return System(inputs, outputs, tuple(components), tuple(self.channels.items()))

    def load_component(self, name: str, data: dict, path: str) -> Component:
        inputs = frozenset(data.get("inputs") or ())
        outputs = frozenset(data.get("outputs") or ())
        self.check_declared(inputs | outputs, path)
        try:
            if "sub" in data:
                sub = self.load_system(data["sub"], f"{path}.sub.")
                component = as_component(sub.restrict_declarations(), name, bound=self.bound)
                if component.inputs != inputs or component.outputs != outputs:
                    self.error("does not match its subarchitecture interface", path)
                return component
            if "behavior" not in data:
                self.error("has no behavior", path)
            behavior = self.load_behavior(data["behavior"], f"{path}.behavior")
            return Component(name, inputs, outputs, behavior)
        except ParseError:
            raise
        except ArchRefineError as exc:
            return self.error(str(exc), path)

    def load_behavior(self, data: dict, path: str):
        if data.get("trivial"):
            return TrivialBehavior()
        if "machine" in data:
            if data["machine"] not in self.machines:
                self.error(f"unknown machine {data['machine']}", path)
            return self.machines[data["machine"]]
        if "library" in data:
            cls = get_machine_cls(data["library"])
            if cls is None:
                self.error(f"unknown machine library {data['library']}", path)
            try:
                return cls.from_params(**(data.get("params") or {}))
            except (TypeError, ValueError, ArchRefineError) as exc:
                return self.error(f"cannot instantiate {data['library']}: {exc}", path)
        if "adapt" in data:
            inner = self.load_behavior(data["adapt"], f"{path}.adapt")
            return AdaptedMachine.make(
                inner,
                data.get("inputs", inner.inputs),
                data.get("outputs", inner.outputs),
                data.get("chaotic") or (),
            )
        if "rename" in data:
            inner = self.load_behavior(data["rename"], f"{path}.rename")
            return RenamedMachine.make(inner, data.get("mapping") or {})
        return self.error("unknown behavior form", path)

    def load_table(self, name: str, data: dict) -> TableMachine:
        path = f"machines.{name}"
        try:
            moves = tuple(
                Transition(
                    move["source"],
                    tuple(
                        Guard(g["channel"], g["kind"], g.get("value"))
                        for g in move.get("guards") or ()
                    ),
                    tuple(move["targets"]),
                )
                for move in data.get("transitions") or ()
            )
            emissions = tuple(
                (state, tuple(Valuation(v) for v in options))
                for state, options in (data.get("emissions") or {}).items()
            )
            return TableMachine(
                name,
                frozenset(data.get("inputs") or ()),
                frozenset(data.get("outputs") or ()),
                frozenset(data.get("chaotic") or ()),
                tuple(data["states"]),
                data.get("initial", data["states"][0]),
                emissions,
                moves,
            )
        except (KeyError, IndexError, TypeError) as exc:
            return self.error(f"ill-formed machine: {exc}", path)
        except ArchRefineError as exc:
            return self.error(str(exc), path)

    def check_declared(self, channels: frozenset, path: str):
        unknown = sorted(channels - set(self.channels))
        if unknown:
            self.error(f"undeclared channels {unknown}", path)


def load_interchange(
    source: Union[str, dict],
    file: Optional[str] = None,
    bound: int = DEFAULT_INTERVAL_BOUND,
) -> System:
    """Build a system from an interchange document.

    Args:
        source (str or dict): File path, JSON text, or parsed document.
        file (str, optional): Name used in diagnostics.
        bound (int): Interval bound of folded components' blackboxes.

    Returns:
        System: The system, not checked for consistency.

    Raises:
        ParseError: On malformed documents.
    """
    if isinstance(source, dict):
        document = source
        file = file or "<document>"
    else:
        document = load_config(source) or {}
        if file is None:
            file = str(source) if "\n" not in str(source) else "<string>"
    loader = InterchangeLoader(document, file, bound)
    if not isinstance(document, dict):
        loader.error("not an interchange document", "")
    return loader.load()
