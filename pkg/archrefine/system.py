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
`system.py`
Components, systems, consistency, composition and blackbox semantics.
"""

import itertools
import logging
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from typing import Optional

from archrefine.behavior import (
    AdaptedMachine,
    MachineBehavior,
    TrivialBehavior,
    check_interface,
)
from archrefine.constants import DEFAULT_INTERVAL_BOUND, STATE_CEILING
from archrefine.errors import (
    ArchRefineError,
    BudgetError,
    CompositionError,
    ConsistencyError,
    InterfaceError,
)
from archrefine.streams import (
    IntervalUniverse,
    NamedStreamTuple,
    Valuation,
)

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Component:
    """A named unit with an interface and a behavior.

    Args:
        name (str): Component name.
        inputs (frozenset): Channels read (in.c).
        outputs (frozenset): Channels controlled (out.c).
        behavior (MachineBehavior): Behavior with exactly this interface.
        sub (System, optional): Subarchitecture the component was folded
            from; `behavior` is then its blackbox.
    """

    name: str
    inputs: frozenset
    outputs: frozenset
    behavior: MachineBehavior
    sub: Optional["System"] = None

    def __post_init__(self):
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        check_interface(self.behavior, self.inputs, self.outputs)
        if self.sub is not None and (
            self.sub.inputs != self.inputs or self.sub.outputs != self.outputs
        ):
            raise InterfaceError(
                f"Component {self.name} does not match its subarchitecture interface."
            )

    def with_behavior(self, behavior: MachineBehavior) -> "Component":
        """Same component with another behavior (drops the subarchitecture)."""
        return Component(
            self.name, behavior.inputs, behavior.outputs, behavior, sub=None
        )


@dataclass(frozen=True)
class Violation:
    """One breach of a consistency condition (numbered 1 to 5)."""

    condition: int
    message: str
    channels: tuple = ()
    components: tuple = ()

    def __str__(self) -> str:
        return f"condition {self.condition}: {self.message}"


@dataclass(frozen=True)
class System:
    """A system (I, O, C) plus the alphabets of its channels.

    Args:
        inputs (frozenset): Channels controlled by the environment (in.S).
        outputs (frozenset): Externally visible channels (out.S).
        components (tuple): Components, kept sorted by name.
        channels (tuple): Pairs (channel name, Alphabet).
    """

    inputs: frozenset
    outputs: frozenset
    components: tuple = ()
    channels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        object.__setattr__(
            self, "components", tuple(sorted(self.components, key=lambda c: c.name))
        )
        object.__setattr__(self, "channels", tuple(sorted(dict(self.channels).items())))

    @property
    def names(self) -> tuple:
        """Component names."""
        return tuple(c.name for c in self.components)

    def component(self, name: str) -> Component:
        """Component called `name`.

        Raises:
            ArchRefineError: If there is no such component.
        """
        for component in self.components:
            if component.name == name:
                return component
        raise ArchRefineError(f"No component named {name}.")

    def has_component(self, name: str) -> bool:
        """Check whether a component called `name` exists."""
        return name in self.names

    @property
    def controlled(self) -> frozenset:
        """out.C, the channels written by some component."""
        return frozenset().union(*(c.outputs for c in self.components))

    @property
    def read(self) -> frozenset:
        """in.C, the channels read by some component."""
        return frozenset().union(*(c.inputs for c in self.components))

    @property
    def internal(self) -> frozenset:
        """Controlled channels not visible at the system boundary."""
        return self.controlled - self.outputs

    @property
    def used_channels(self) -> frozenset:
        """Every channel mentioned by the interface or a component."""
        return self.inputs | self.outputs | self.controlled | self.read

    def readers(self, channel: str) -> tuple:
        """Names of components reading `channel`."""
        return tuple(c.name for c in self.components if channel in c.inputs)

    def writer(self, channel: str) -> Optional[str]:
        """Name of the component controlling `channel`, if any."""
        for component in self.components:
            if channel in component.outputs:
                return component.name
        return None

    def alphabet_map(self) -> dict:
        """Channel name to Alphabet."""
        return dict(self.channels)

    def universe(self, bound: int = DEFAULT_INTERVAL_BOUND) -> IntervalUniverse:
        """Interval universe over the declared channels."""
        return IntervalUniverse(self.channels, bound)

    def with_components(self, components: Iterable[Component]) -> "System":
        """S WITH a new component set."""
        return replace(self, components=tuple(components))

    def replace_component(self, component: Component) -> "System":
        """S WITH the component of the same name replaced."""
        return self.with_components(
            component if c.name == component.name else c for c in self.components
        )

    def declare(self, channels: Iterable) -> "System":
        """Add channel declarations (pairs name, Alphabet)."""
        merged = dict(self.channels)
        merged.update(dict(channels))
        return replace(self, channels=tuple(merged.items()))

    def restrict_declarations(self) -> "System":
        """Keep only the declarations of used channels."""
        used = self.used_channels
        return replace(
            self, channels=tuple((n, a) for n, a in self.channels if n in used)
        )


def check_consistency(system: System) -> list:
    """Check the five consistency conditions.

    Returns:
        list: Violations, empty when the system is consistent.
    """
    violations = []
    counts = Counter(c.name for c in system.components)
    for name, count in sorted(counts.items()):
        if count > 1:
            violations.append(
                Violation(1, f"component name {name} used {count} times", (), (name,))
            )
    for first, second in itertools.combinations(system.components, 2):
        shared = first.outputs & second.outputs
        if shared:
            violations.append(
                Violation(
                    2,
                    f"channels {sorted(shared)} controlled by both "
                    f"{first.name} and {second.name}",
                    tuple(sorted(shared)),
                    (first.name, second.name),
                )
            )
    clash = system.inputs & system.controlled
    if clash:
        violations.append(
            Violation(
                3,
                f"system inputs {sorted(clash)} are controlled by a component",
                tuple(sorted(clash)),
            )
        )
    dangling = system.read - system.controlled - system.inputs
    if dangling:
        violations.append(
            Violation(
                4,
                f"channels {sorted(dangling)} are read but controlled by nobody",
                tuple(sorted(dangling)),
                tuple(sorted({r for ch in dangling for r in system.readers(ch)})),
            )
        )
    uncontrolled = system.outputs - system.controlled
    if uncontrolled:
        violations.append(
            Violation(
                5,
                f"system outputs {sorted(uncontrolled)} are controlled by no component",
                tuple(sorted(uncontrolled)),
            )
        )
    return violations


def ensure_consistent(system: System):
    """Raise `ConsistencyError` when `system` violates a condition."""
    violations = check_consistency(system)
    if violations:
        raise ConsistencyError(violations)


@dataclass(frozen=True)
class ComposedMachine(MachineBehavior):
    """Lock-step parallel composition with implicit feedback.

    States and emissions are tuples with one entry per member. Every tick each
    member emits from its state; the joined valuation of the external inputs
    and all emitted outputs then feeds every member's step. Chaotic outputs
    that some member reads are concretized from `universe`.

    Args:
        members (tuple): Machines with pairwise disjoint outputs.
        universe (IntervalUniverse, optional): Alphabets for chaotic channels
            read internally.
    """

    members: tuple
    universe: Optional[IntervalUniverse] = field(default=None, compare=False)

    def __post_init__(self):
        seen: set = set()
        for member in self.members:
            shared = seen & member.outputs
            if shared:
                raise CompositionError(
                    f"Output channels {sorted(shared)} are produced twice."
                )
            seen |= member.outputs
        if self.hidden_chaos and self.universe is None:
            raise CompositionError(
                f"Chaotic channels {sorted(self.hidden_chaos)} are read internally; "
                "an interval universe is required to compose."
            )

    @property
    def outputs(self) -> frozenset:
        return frozenset().union(*(m.outputs for m in self.members))

    @property
    def inputs(self) -> frozenset:
        return frozenset().union(*(m.inputs for m in self.members)) - self.outputs

    @property
    def chaotic(self) -> frozenset:
        return frozenset().union(*(m.chaotic for m in self.members))

    @property
    def reads(self) -> frozenset:
        return frozenset().union(*(m.reads for m in self.members)) - self.outputs

    @property
    def hidden_chaos(self) -> frozenset:
        """Chaotic outputs read by some member."""
        read = frozenset().union(*(m.inputs for m in self.members))
        return self.chaotic & read

    def start(self):
        return tuple(m.start() for m in self.members)

    def emit(self, state) -> tuple:
        member_options = [m.emit(s) for m, s in zip(self.members, state)]
        chaos = sorted(self.hidden_chaos)
        if chaos:
            chaos_options = self.universe.valuations(chaos)  # type: ignore[union-attr]
        else:
            chaos_options = [Valuation()]
        return tuple(
            (emissions, chaos_valuation)
            for emissions in itertools.product(*member_options)
            for chaos_valuation in chaos_options
        )

    def observe(self, emission) -> Valuation:
        emissions, _ = emission
        observed: dict = {}
        for member, member_emission in zip(self.members, emissions):
            observed.update(member.observe(member_emission))
        return Valuation(observed)

    def step(self, state, emission, valuation: Valuation) -> tuple:
        emissions, chaos_valuation = emission
        joint = dict(valuation)
        for member, member_emission in zip(self.members, emissions):
            joint.update(member.observe(member_emission))
        joint.update(chaos_valuation)
        joint_valuation = Valuation(joint)
        successors = [
            member.step(s, e, joint_valuation.complete(member.inputs))
            for member, s, e in zip(self.members, state, emissions)
        ]
        return tuple(itertools.product(*successors))

    @property
    def label(self) -> str:
        return "compose(" + ", ".join(m.label for m in self.members) + ")"


def compose(
    behaviors: Iterable[MachineBehavior], universe: Optional[IntervalUniverse] = None
) -> MachineBehavior:
    """Compose machines in parallel with implicit feedback.

    Raises:
        CompositionError: If two machines share an output channel.
    """
    members = tuple(behaviors)
    if not members:
        return TrivialBehavior()
    if len(members) == 1 and not members[0].inputs & members[0].outputs:
        return members[0]
    return ComposedMachine(members, universe)


def blackbox(
    system: System,
    universe: Optional[IntervalUniverse] = None,
    bound: int = DEFAULT_INTERVAL_BOUND,
) -> MachineBehavior:
    """Externally visible behavior ⟦S⟧.

    Args:
        system (System): Consistent system.
        universe (IntervalUniverse, optional): Defaults to the system's
            declared channels with message bound `bound`.
        bound (int): Interval bound used when `universe` is not given.

    Raises:
        ConsistencyError: If the system is inconsistent.
    """
    ensure_consistent(system)
    universe = universe or system.universe(bound)
    composed = compose((c.behavior for c in system.components), universe)
    return AdaptedMachine.make(composed, system.inputs, system.outputs)


def as_component(
    system: System,
    name: str,
    universe: Optional[IntervalUniverse] = None,
    bound: int = DEFAULT_INTERVAL_BOUND,
) -> Component:
    """Package a system as one hierarchical component c_S.

    Raises:
        ConsistencyError: If the system is inconsistent.
    """
    behavior = blackbox(system, universe, bound)
    return Component(name, system.inputs, system.outputs, behavior, sub=system)


def _emission_options(component: Component, states: frozenset, universe) -> list:
    """Possible valuations of a component's outputs at the current tick."""
    behavior = component.behavior
    observed = {
        behavior.observe(e).restrict(behavior.observable)
        for state in states
        for e in behavior.emit(state)
    }
    chaos = sorted(behavior.chaotic)
    if not chaos:
        return sorted(observed, key=repr)
    return [
        o.merge(v) for o in sorted(observed, key=repr) for v in universe.valuations(chaos)
    ]


def blackbox_oracle(
    system: System,
    stream: NamedStreamTuple,
    ticks: Optional[int] = None,
    universe: Optional[IntervalUniverse] = None,
    bound: int = DEFAULT_INTERVAL_BOUND,
    ceiling: int = STATE_CEILING,
) -> set:
    """Brute-force ⟦S⟧ on one input, independent of composition.

    Enumerates, tick by tick, every valuation of the controlled channels that
    each component could have produced, keeps those that every component
    accepts for its own inputs, and projects the survivors onto the system
    outputs. Chaotic channels range over all intervals of the universe.

    Args:
        system (System): Consistent system.
        stream (NamedStreamTuple): Input over exactly `system.inputs`.
        ticks (int, optional): Number of ticks (defaults to the input length).
        universe (IntervalUniverse, optional): Interval universe.
        bound (int): Interval bound used when `universe` is not given.
        ceiling (int): Maximum number of partial runs kept per tick.

    Returns:
        set: NamedStreamTuple over `system.outputs`.

    Raises:
        ConsistencyError: If the system is inconsistent.
        InterfaceError: If the input channels do not match.
        BudgetError: If more than `ceiling` partial runs are alive.
    """
    ensure_consistent(system)
    ticks = stream.tick_len if ticks is None else ticks
    if stream.domain != system.inputs:
        raise InterfaceError(
            f"Input channels {sorted(stream.domain)} do not match system inputs "
            f"{sorted(system.inputs)}."
        )
    universe = universe or system.universe(bound)
    components = system.components
    moves: dict = {}

    def transitions(index: int, state, local_in: Valuation) -> list:
        key = (index, state, local_in)
        if key not in moves:
            moves[key] = components[index].behavior.transitions(state, local_in)
        return moves[key]

    # per-component state sets -> visible histories reaching them
    start = tuple(frozenset([c.behavior.start()]) for c in components)
    frontier: dict = {start: {()}}
    for tick in range(ticks):
        external = stream.at(tick)
        successors: dict = {}
        for state_sets, histories in frontier.items():
            options = [
                _emission_options(c, s, universe) for c, s in zip(components, state_sets)
            ]
            for combo in itertools.product(*options):
                link = dict(external)
                for valuation in combo:
                    link.update(valuation)
                link_valuation = Valuation(link)
                next_sets = []
                for index, (component, states) in enumerate(zip(components, state_sets)):
                    local_in = link_valuation.restrict(component.inputs)
                    local_out = link_valuation.restrict(component.behavior.observable)
                    reached = frozenset(
                        successor
                        for state in states
                        for observed, successor in transitions(index, state, local_in)
                        if observed == local_out
                    )
                    if not reached:
                        break
                    next_sets.append(reached)
                else:
                    visible = link_valuation.restrict(system.outputs)
                    successors.setdefault(tuple(next_sets), set()).update(
                        history + (visible,) for history in histories
                    )
        if sum(len(h) for h in successors.values()) > ceiling:
            raise BudgetError(f"Oracle exceeds {ceiling} partial runs at tick {tick}.")
        frontier = successors
    return {
        NamedStreamTuple.from_valuations(history, system.outputs)
        for history in set().union(*frontier.values())
    }
