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
`behavior.py`
Executable component behaviors: nondeterministic, time-guarded per-tick
Moore machines, interface adaption and the trivial behavior.

A machine is driven tick by tick. At tick `t` it picks an emission from
`emit(state)` (so output never depends on the current tick's input), then
consumes the tick's input valuation with `step(state, emission, valuation)`.
`observe(emission)` projects the emission onto the non-chaotic outputs.
Emissions may carry hidden data (composites, adapters); only `observe`
defines what is visible.
"""

import logging
import random
from abc import ABC, abstractmethod
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Optional

from archrefine.constants import DEFAULT_SAMPLES, DEFAULT_SEED, STATE_CEILING
from archrefine.errors import AdaptionError, BudgetError, InterfaceError
from archrefine.streams import (
    EMPTY_VALUATION,
    IntervalUniverse,
    NamedStreamTuple,
    Valuation,
    truncate,
)

LOGGER = logging.getLogger(__name__)


class MachineBehavior(ABC):
    """Base class of every machine behavior.

    Subclasses provide `inputs`, `outputs` and `chaotic` (frozensets of
    channel names), either as dataclass fields or as properties.
    """

    inputs: frozenset
    outputs: frozenset
    chaotic: frozenset

    @abstractmethod
    def start(self):
        """Initial state."""
        raise NotImplementedError

    @abstractmethod
    def emit(self, state) -> tuple:
        """Nonempty tuple of emissions available in `state`."""
        raise NotImplementedError

    @abstractmethod
    def step(self, state, emission, valuation: Valuation) -> tuple:
        """Nonempty tuple of successor states.

        Args:
            state (obj): Current state.
            emission (obj): Emission chosen at this tick.
            valuation (Valuation): This tick's intervals on `inputs`.
        """
        raise NotImplementedError

    def observe(self, emission) -> Valuation:
        """Visible part of an emission (valuation over `observable`)."""
        return emission

    def transitions(self, state, valuation: Valuation) -> list:
        """All (observed valuation, next state) pairs for one tick."""
        pairs = []
        for emission in self.emit(state):
            observed = self.observe(emission)
            for successor in self.step(state, emission, valuation):
                pair = (observed, successor)
                if pair not in pairs:
                    pairs.append(pair)
        return pairs

    @property
    def reads(self) -> frozenset:
        """Input channels referenced by some guard or update."""
        return self.inputs

    @property
    def observable(self) -> frozenset:
        """Non-chaotic outputs."""
        return self.outputs - self.chaotic

    @property
    def label(self) -> str:
        """Short human-readable description."""
        return type(self).__name__


@dataclass(frozen=True)
class TrivialBehavior(MachineBehavior):
    """The unique behavior without inputs and outputs."""

    @property
    def inputs(self) -> frozenset:
        return frozenset()

    @property
    def outputs(self) -> frozenset:
        return frozenset()

    @property
    def chaotic(self) -> frozenset:
        return frozenset()

    def start(self):
        return ()

    def emit(self, state) -> tuple:
        return (EMPTY_VALUATION,)

    def step(self, state, emission, valuation: Valuation) -> tuple:
        return ((),)

    @property
    def label(self) -> str:
        return "trivial"


@dataclass(frozen=True)
class AdaptedMachine(MachineBehavior):
    """`inner` seen through a changed interface.

    Inputs of `inner` missing from `inputs` are fed empty intervals. Outputs
    of `inner` missing from `outputs` are hidden. Channels in `extra` are new
    chaotic outputs.

    Use `AdaptedMachine.make` rather than the constructor: it collapses
    nested adapters and returns `inner` when nothing changes.
    """

    inner: MachineBehavior
    inputs: frozenset
    outputs: frozenset
    extra: frozenset = frozenset()

    def __post_init__(self):
        for name in ("inputs", "outputs", "extra"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if not self.extra <= self.outputs:
            raise AdaptionError("Chaotic extra outputs must be outputs.")
        if self.extra & self.inner.outputs:
            raise AdaptionError(
                f"Chaotic extra outputs {sorted(self.extra & self.inner.outputs)} "
                "clash with outputs of the adapted machine."
            )
        missing = self.outputs - self.extra - self.inner.outputs
        if missing:
            raise AdaptionError(
                f"Outputs {sorted(missing)} are neither produced nor chaotic."
            )

    @classmethod
    def make(
        cls,
        inner: MachineBehavior,
        inputs: Iterable[str],
        outputs: Iterable[str],
        extra: Iterable[str] = (),
    ) -> MachineBehavior:
        """Normalizing constructor."""
        inputs, outputs, extra = frozenset(inputs), frozenset(outputs), frozenset(extra)
        if isinstance(inner, AdaptedMachine):
            base = inner.inner
            repinned = (base.inputs - inner.inputs) & inputs
            if not repinned and not extra & base.outputs:
                extra = (inner.extra & outputs) | extra
                return cls.make(base, inputs, outputs, extra)
        if not extra and inputs == inner.inputs and outputs == inner.outputs:
            return inner
        return cls(inner, inputs, outputs, extra)

    @property
    def chaotic(self) -> frozenset:
        return (self.inner.chaotic & self.outputs) | self.extra

    @property
    def reads(self) -> frozenset:
        return self.inner.reads & self.inputs

    @property
    def pinned(self) -> frozenset:
        """Inner inputs fed with empty intervals."""
        return self.inner.inputs - self.inputs

    def _inner_valuation(self, valuation: Valuation) -> Valuation:
        return valuation.restrict(self.inner.inputs & self.inputs).complete(
            self.inner.inputs
        )

    def start(self):
        return self.inner.start()

    def emit(self, state) -> tuple:
        return self.inner.emit(state)

    def observe(self, emission) -> Valuation:
        return self.inner.observe(emission).restrict(self.observable)

    def step(self, state, emission, valuation: Valuation) -> tuple:
        return self.inner.step(state, emission, self._inner_valuation(valuation))

    def transitions(self, state, valuation: Valuation) -> list:
        pairs = []
        for observed, successor in self.inner.transitions(
            state, self._inner_valuation(valuation)
        ):
            pair = (observed.restrict(self.observable), successor)
            if pair not in pairs:
                pairs.append(pair)
        return pairs

    @property
    def label(self) -> str:
        return f"adapt({self.inner.label})"


@dataclass(frozen=True)
class RenamedMachine(MachineBehavior):
    """`inner` with channels renamed by `mapping` (pairs old -> new)."""

    inner: MachineBehavior
    mapping: tuple

    def __post_init__(self):
        mapping = tuple(sorted(dict(self.mapping).items()))
        object.__setattr__(self, "mapping", mapping)
        channels = self.inner.inputs | self.inner.outputs
        renamed = [self._forward.get(c, c) for c in channels]
        if len(set(renamed)) != len(renamed):
            raise InterfaceError("Channel renaming must be injective.")

    @classmethod
    def make(cls, inner: MachineBehavior, mapping: Mapping) -> MachineBehavior:
        """Normalizing constructor: merges nested renamings, drops identities."""
        mapping = dict(mapping)
        if isinstance(inner, RenamedMachine):
            first = dict(inner.mapping)
            base = inner.inner
            channels = base.inputs | base.outputs
            merged = {}
            for channel in channels:
                middle = first.get(channel, channel)
                merged[channel] = mapping.get(middle, middle)
            return cls.make(base, merged)
        channels = inner.inputs | inner.outputs
        mapping = {
            old: new for old, new in mapping.items() if old in channels and old != new
        }
        if not mapping:
            return inner
        return cls(inner, tuple(mapping.items()))

    @property
    def _forward(self) -> dict:
        return dict(self.mapping)

    @property
    def _backward(self) -> dict:
        return {new: old for old, new in self.mapping}

    def _rename(self, channels: frozenset) -> frozenset:
        forward = self._forward
        return frozenset(forward.get(c, c) for c in channels)

    @property
    def inputs(self) -> frozenset:
        return self._rename(self.inner.inputs)

    @property
    def outputs(self) -> frozenset:
        return self._rename(self.inner.outputs)

    @property
    def chaotic(self) -> frozenset:
        return self._rename(self.inner.chaotic)

    @property
    def reads(self) -> frozenset:
        return self._rename(self.inner.reads)

    def start(self):
        return self.inner.start()

    def emit(self, state) -> tuple:
        return self.inner.emit(state)

    def observe(self, emission) -> Valuation:
        return self.inner.observe(emission).rename(self._forward)

    def step(self, state, emission, valuation: Valuation) -> tuple:
        return self.inner.step(state, emission, valuation.rename(self._backward))

    def transitions(self, state, valuation: Valuation) -> list:
        forward = self._forward
        return [
            (observed.rename(forward), successor)
            for observed, successor in self.inner.transitions(
                state, valuation.rename(self._backward)
            )
        ]

    @property
    def label(self) -> str:
        return f"rename({self.inner.label})"


def adapt_interface(
    machine: MachineBehavior, inputs: Iterable[str], outputs: Iterable[str]
) -> MachineBehavior:
    """Interface adaption: new inputs are ignored, dropped outputs hidden.

    Args:
        machine (MachineBehavior): Machine to adapt.
        inputs (set): New input set, a superset of `machine.inputs`.
        outputs (set): New output set, a subset of `machine.outputs`.

    Returns:
        MachineBehavior: Adapted machine.

    Raises:
        AdaptionError: If `inputs` drops a channel or `outputs` adds one.
    """
    inputs, outputs = frozenset(inputs), frozenset(outputs)
    if not machine.inputs <= inputs:
        raise AdaptionError(
            f"Adaption would drop inputs {sorted(machine.inputs - inputs)}."
        )
    if not outputs <= machine.outputs:
        raise AdaptionError(
            f"Adaption would add outputs {sorted(outputs - machine.outputs)}."
        )
    return AdaptedMachine.make(machine, inputs, outputs)


def drop_inputs(machine: MachineBehavior, channels: Iterable[str]) -> MachineBehavior:
    """Remove input `channels`, feeding them empty intervals from now on."""
    return AdaptedMachine.make(
        machine, machine.inputs - frozenset(channels), machine.outputs
    )


def add_chaotic_output(machine: MachineBehavior, channel: str) -> MachineBehavior:
    """Add an unconstrained output `channel`."""
    extra = frozenset([channel])
    return AdaptedMachine.make(
        machine, machine.inputs, machine.outputs | extra, extra
    )


def check_interface(
    machine: MachineBehavior, inputs: Iterable[str], outputs: Iterable[str]
):
    """Raise `InterfaceError` unless `machine` has exactly this interface."""
    inputs, outputs = frozenset(inputs), frozenset(outputs)
    if machine.inputs != inputs or machine.outputs != outputs:
        raise InterfaceError(
            f"{machine.label} has interface ({sorted(machine.inputs)}, "
            f"{sorted(machine.outputs)}), expected ({sorted(inputs)}, "
            f"{sorted(outputs)})."
        )


def _check_input(machine: MachineBehavior, stream: NamedStreamTuple, ticks: int):
    if stream.domain != machine.inputs:
        raise InterfaceError(
            f"Input channels {sorted(stream.domain)} do not match machine "
            f"inputs {sorted(machine.inputs)}."
        )
    if ticks > stream.tick_len:
        raise InterfaceError(
            f"Input has {stream.tick_len} ticks, {ticks} requested."
        )


def run(
    machine: MachineBehavior,
    stream: NamedStreamTuple,
    ticks: Optional[int] = None,
    ceiling: int = STATE_CEILING,
) -> set:
    """All output prefixes (over non-chaotic outputs) for an input prefix.

    Args:
        machine (MachineBehavior): Machine to run.
        stream (NamedStreamTuple): Input over exactly `machine.inputs`.
        ticks (int, optional): Number of ticks (defaults to the input length).
        ceiling (int): Maximum number of (state, history) pairs explored.

    Returns:
        set: NamedStreamTuple over `machine.observable`, length `ticks`.

    Raises:
        InterfaceError: If the input channels do not match.
        BudgetError: If the frontier grows beyond `ceiling`.
    """
    ticks = stream.tick_len if ticks is None else ticks
    _check_input(machine, stream, ticks)
    # state -> output histories reaching it
    frontier: dict = {machine.start(): {()}}
    for tick in range(ticks):
        valuation = stream.at(tick)
        successors: dict = {}
        for state, histories in frontier.items():
            for observed, successor in machine.transitions(state, valuation):
                successors.setdefault(successor, set()).update(
                    history + (observed,) for history in histories
                )
        if sum(len(h) for h in successors.values()) > ceiling:
            raise BudgetError(
                f"Run of {machine.label} exceeds {ceiling} branches at tick {tick}."
            )
        frontier = successors
    observable = machine.observable
    return {
        NamedStreamTuple.from_valuations(history, observable)
        for history in set().union(*frontier.values())
    }


def membership(
    machine: MachineBehavior,
    stream: NamedStreamTuple,
    output: NamedStreamTuple,
    ticks: Optional[int] = None,
) -> bool:
    """Check whether `output` is a possible reaction to `stream`.

    Chaotic channels of `machine` match any content and may be omitted from
    `output`.

    Raises:
        InterfaceError: If the channel sets do not match the interface.
    """
    ticks = stream.tick_len if ticks is None else ticks
    _check_input(machine, stream, ticks)
    observable = machine.observable
    if not observable <= output.domain <= machine.outputs:
        raise InterfaceError(
            f"Output channels {sorted(output.domain)} do not match machine "
            f"outputs {sorted(machine.outputs)}."
        )
    if ticks > output.tick_len:
        raise InterfaceError(f"Output has {output.tick_len} ticks, {ticks} requested.")
    states = {machine.start()}
    for tick in range(ticks):
        valuation = stream.at(tick)
        expected = output.at(tick).restrict(observable)
        states = {
            successor
            for state in states
            for observed, successor in machine.transitions(state, valuation)
            if observed == expected
        }
        if not states:
            return False
    return True


@dataclass
class TimeGuardednessReport:
    """Outcome of a time-guardedness check.

    Args:
        machine (str): Machine label.
        samples (int): Number of prefix-sharing input pairs tried.
        ticks (int): Prefix length of the sampled inputs.
        violations (list): Tuples (x, y, i) with x↓i = y↓i but differing
            output sets at i+1.
    """

    machine: str
    samples: int
    ticks: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """True when no violation was found."""
        return not self.violations


def random_stream(
    universe: IntervalUniverse, channels: Iterable[str], ticks: int, rng: random.Random
) -> NamedStreamTuple:
    """Pseudo-random tuple over `channels` drawn from `universe`."""
    channels = sorted(channels)
    valuations = [
        Valuation({c: rng.choice(universe.intervals(c)) for c in channels})
        for _ in range(ticks)
    ]
    return NamedStreamTuple.from_valuations(valuations, channels)


def check_time_guardedness(
    machine: MachineBehavior,
    universe: IntervalUniverse,
    samples: int = DEFAULT_SAMPLES,
    ticks: int = 4,
    seed: int = DEFAULT_SEED,
) -> TimeGuardednessReport:
    """Sample input pairs sharing a prefix and compare the output sets.

    For each pair (x, y) with x↓i = y↓i the output sets truncated to i+1
    ticks must coincide.

    Args:
        machine (MachineBehavior): Machine under test.
        universe (IntervalUniverse): Alphabets of the machine's inputs.
        samples (int): Number of input pairs.
        ticks (int): Length of the sampled inputs.
        seed (int): Random seed.

    Returns:
        TimeGuardednessReport: Report with the violating pairs.

    Raises:
        ValueError: If `ticks` is not positive.
    """
    if ticks < 1:
        raise ValueError("Time-guardedness checks need at least one tick.")
    rng = random.Random(seed)
    report = TimeGuardednessReport(machine.label, samples, ticks)
    for sample in range(samples):
        shared = sample % ticks
        x = random_stream(universe, machine.inputs, ticks, rng)
        suffix = random_stream(universe, machine.inputs, ticks - shared, rng)
        y = NamedStreamTuple.of(
            {
                c: truncate(x[c], shared) + suffix[c]
                for c in sorted(machine.inputs)
            },
            tick_len=ticks,
        )
        outputs_x = {truncate(o, shared + 1) for o in run(machine, x, ticks)}
        outputs_y = {truncate(o, shared + 1) for o in run(machine, y, ticks)}
        if outputs_x != outputs_y:
            report.violations.append((x, y, shared))
    if report.violations:
        LOGGER.warning(
            f"{machine.label} | {len(report.violations)} time-guardedness "
            f"violations in {samples} samples."
        )
    return report


def reachable_states(
    machine: MachineBehavior, universe: IntervalUniverse, ceiling: int = STATE_CEILING
) -> set:
    """States reachable under all valuations of the machine's inputs.

    Raises:
        BudgetError: If more than `ceiling` states are reachable.
    """
    valuations = universe.valuations(machine.inputs)
    seen = {machine.start()}
    todo = [machine.start()]
    while todo:
        state = todo.pop()
        for valuation in valuations:
            for _, successor in machine.transitions(state, valuation):
                if successor not in seen:
                    seen.add(successor)
                    todo.append(successor)
                    if len(seen) > ceiling:
                        raise BudgetError(
                            f"{machine.label} has more than {ceiling} "
                            "reachable states."
                        )
    return seen


def submachine_refines(
    fine: MachineBehavior,
    coarse: MachineBehavior,
    universe: IntervalUniverse,
    ceiling: int = STATE_CEILING,
) -> bool:
    """Check that `coarse` simulates `fine` (sound for trace inclusion).

    Computes the greatest relation R over pairs reachable in lock step such
    that for (f, c) in R every move of f under a valuation is matched by a
    move of c with the same observation into a related pair. The comparison
    ignores the chaotic channels of `coarse`; `fine` may not have chaotic
    channels that `coarse` constrains.

    Args:
        fine (MachineBehavior): Refining machine.
        coarse (MachineBehavior): Refined machine.
        universe (IntervalUniverse): Alphabets of the input channels.
        ceiling (int): Maximum number of explored state pairs.

    Returns:
        bool: True if a simulation relating the initial states exists.

    Raises:
        InterfaceError: If the interfaces differ.
        BudgetError: If the explored pair space exceeds `ceiling`.
    """
    check_interface(fine, coarse.inputs, coarse.outputs)
    if not fine.chaotic <= coarse.chaotic:
        LOGGER.debug(
            f"{fine.label} leaves {sorted(fine.chaotic - coarse.chaotic)} "
            f"unconstrained where {coarse.label} does not."
        )
        return False
    observable = coarse.observable
    valuations = universe.valuations(coarse.inputs)

    # moves[(f, c)][k] = list over fine moves of candidate successor pairs
    start = (fine.start(), coarse.start())
    moves: dict = {}
    todo = [start]
    while todo:
        pair = todo.pop()
        if pair in moves:
            continue
        f_state, c_state = pair
        obligations = []
        for valuation in valuations:
            coarse_moves: dict = {}
            for observed, successor in coarse.transitions(c_state, valuation):
                coarse_moves.setdefault(observed, set()).add(successor)
            for observed, f_next in fine.transitions(f_state, valuation):
                options = {
                    (f_next, c_next)
                    for c_next in coarse_moves.get(observed.restrict(observable), ())
                }
                obligations.append(options)
                todo.extend(p for p in options if p not in moves)
        moves[pair] = obligations
        if len(moves) > ceiling:
            raise BudgetError(
                f"Simulation check explores more than {ceiling} state pairs."
            )

    related = set(moves)
    changed = True
    while changed:
        changed = False
        for pair in list(related):
            if any(not options & related for options in moves[pair]):
                related.discard(pair)
                changed = True
    LOGGER.debug(
        f"Simulation {fine.label} <= {coarse.label}: "
        f"{len(related)}/{len(moves)} pairs related."
    )
    return start in related
