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
`table.py`
Explicit state-table machines, as written in `machine { ... }` blocks.
"""

import logging
from dataclasses import dataclass

from archrefine.behavior import MachineBehavior
from archrefine.errors import MachineError
from archrefine.streams import Valuation, freeze

LOGGER = logging.getLogger(__name__)

EQUALS = "equals"
EMPTY = "empty"
NONEMPTY = "nonempty"
HAS = "has"
IGNORE = "ignore"
GUARD_KINDS = (EQUALS, EMPTY, NONEMPTY, HAS, IGNORE)


@dataclass(frozen=True)
class Guard:
    """Predicate over one input channel's interval.

    Args:
        channel (str): Input channel.
        kind (str): 'equals' (interval equals `value`), 'empty', 'nonempty',
            'has' (interval contains message `value`) or 'ignore' (always
            true, does not count as reading the channel).
        value (obj): Interval or message, depending on `kind`.
    """

    channel: str
    kind: str
    value: object = None

    def __post_init__(self):
        if self.kind not in GUARD_KINDS:
            raise MachineError(f"Unknown guard kind {self.kind}.")
        object.__setattr__(self, "value", freeze(self.value))

    def matches(self, valuation: Valuation) -> bool:
        """Evaluate the guard on one tick's valuation."""
        interval = valuation[self.channel]
        if self.kind == EQUALS:
            return interval == self.value
        if self.kind == EMPTY:
            return not interval
        if self.kind == NONEMPTY:
            return bool(interval)
        if self.kind == HAS:
            return self.value in interval
        return True

    @property
    def reads(self) -> bool:
        """Whether the guard inspects its channel."""
        return self.kind != IGNORE


@dataclass(frozen=True)
class Transition:
    """`on source: guards -> targets`; no guards means always enabled."""

    source: str
    guards: tuple
    targets: tuple

    def enabled(self, state: str, valuation: Valuation) -> bool:
        """Check source state and all guards."""
        return state == self.source and all(g.matches(valuation) for g in self.guards)


@dataclass(frozen=True)
class TableMachine(MachineBehavior):
    """Finite machine given by explicit emission and transition tables.

    States without an emission entry emit empty intervals. When no transition
    is enabled the machine stays in its state; when several are, every target
    is a possible successor.

    Args:
        name (str): Machine name.
        inputs (frozenset): Input channels.
        outputs (frozenset): Output channels.
        chaotic (frozenset): Unconstrained output channels.
        states (tuple): State names.
        initial (str): Initial state.
        emissions (tuple): Pairs (state, tuple of Valuation) over the
            non-chaotic outputs.
        moves (tuple): Transitions.
    """

    name: str
    inputs: frozenset
    outputs: frozenset
    chaotic: frozenset
    states: tuple
    initial: str
    emissions: tuple = ()
    moves: tuple = ()

    def __post_init__(self):
        for attr in ("inputs", "outputs", "chaotic"):
            object.__setattr__(self, attr, frozenset(getattr(self, attr)))
        emissions = tuple(
            (state, tuple(Valuation(v).complete(self.observable) for v in options))
            for state, options in self.emissions
        )
        object.__setattr__(self, "emissions", emissions)
        self._validate()

    def _validate(self):
        if not self.chaotic <= self.outputs:
            raise MachineError(f"{self.name}: chaotic channels must be outputs.")
        if self.initial not in self.states:
            raise MachineError(f"{self.name}: unknown initial state {self.initial}.")
        seen = set()
        for state, options in self.emissions:
            if state not in self.states:
                raise MachineError(f"{self.name}: emission for unknown state {state}.")
            if state in seen:
                raise MachineError(f"{self.name}: state {state} emits twice.")
            seen.add(state)
            if not options:
                raise MachineError(f"{self.name}: state {state} has no emission.")
            for option in options:
                for channel in option:
                    if channel not in self.observable:
                        raise MachineError(
                            f"{self.name}: emission on {channel}, which is not a "
                            "non-chaotic output."
                        )
        for move in self.moves:
            if move.source not in self.states:
                raise MachineError(f"{self.name}: unknown state {move.source}.")
            unknown = [t for t in move.targets if t not in self.states]
            if unknown or not move.targets:
                raise MachineError(f"{self.name}: bad targets {list(move.targets)}.")
            for guard in move.guards:
                if guard.channel not in self.inputs:
                    raise MachineError(
                        f"{self.name}: guard on {guard.channel}, which is not an input."
                    )

    def start(self):
        return self.initial

    def emit(self, state) -> tuple:
        for source, options in self.emissions:
            if source == state:
                return options
        return (Valuation().complete(self.observable),)

    def step(self, state, emission, valuation: Valuation) -> tuple:
        targets: list = []
        for move in self.moves:
            if move.enabled(state, valuation):
                targets.extend(t for t in move.targets if t not in targets)
        return tuple(targets) or (state,)

    @property
    def reads(self) -> frozenset:
        return frozenset(
            guard.channel for move in self.moves for guard in move.guards if guard.reads
        )

    @property
    def label(self) -> str:
        return self.name
