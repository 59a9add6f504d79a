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
`oracle.py`
Bounded enumeration engines: input enumeration, trace inclusion and
equality, invariant validity and refinement under an invariant.

All searches are layered: layer `t` holds the distinct search nodes reached
after `t` ticks, each with a pointer to its parent, so a failure found at
tick `t` is backtracked into a replayable witness.
"""

import itertools
import logging
import random
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass, field
from typing import Optional

from archrefine.behavior import (
    AdaptedMachine,
    MachineBehavior,
    drop_inputs,
    random_stream,
)
from archrefine.constants import (
    BUDGET_CEILING,
    DEFAULT_DEPTH,
    DEFAULT_INTERVAL_BOUND,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    EXHAUSTIVE,
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    SAMPLED,
    STATE_CEILING,
)
from archrefine.errors import BudgetError, InterfaceError
from archrefine.streams import IntervalUniverse, NamedStreamTuple, Valuation
from archrefine.system import (
    ComposedMachine,
    System,
    blackbox,
    compose,
    ensure_consistent,
)

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnumerationBudget:
    """Bounds of an enumeration.

    Args:
        depth (int): Number of ticks T.
        interval_bound (int): Maximum messages per interval L.
        mode (str): 'exhaustive' or 'sampled'.
        samples (int): Number of sampled inputs in sampled mode.
        seed (int): Seed of the sampled mode.
        ceiling (int): Largest input space listed by `enumerate_inputs`,
            and largest number of input valuations per tick in searches.
        state_ceiling (int): Largest search layer kept in memory.
        alphabets (tuple): Pairs (channel, Alphabet) overriding declared
            alphabets.
    """

    depth: int = DEFAULT_DEPTH
    interval_bound: int = DEFAULT_INTERVAL_BOUND
    mode: str = EXHAUSTIVE
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    ceiling: int = BUDGET_CEILING
    state_ceiling: int = STATE_CEILING
    alphabets: tuple = ()

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("Enumeration depth must be at least 1.")
        if self.interval_bound < 0:
            raise ValueError("Interval bound must be non-negative.")
        if self.mode not in (EXHAUSTIVE, SAMPLED):
            raise ValueError(f"Unknown enumeration mode {self.mode}.")
        if self.mode == SAMPLED and self.samples < 1:
            raise ValueError("Sampled mode needs a positive sample count.")

    @classmethod
    def from_settings(cls, settings: dict) -> "EnumerationBudget":
        """Build from a budget dict (see `utils.get_budget`)."""
        keys = ("depth", "interval_bound", "mode", "samples", "seed", "ceiling")
        values = {k: settings[k] for k in keys if settings.get(k) is not None}
        if "state_ceiling" in settings:
            values["state_ceiling"] = settings["state_ceiling"]
        return cls(**values)

    def universe(self, *systems: System) -> IntervalUniverse:
        """Interval universe over the systems' declared channels."""
        alphabets: dict = {}
        for system in systems:
            alphabets.update(dict(system.channels))
        alphabets.update(dict(self.alphabets))
        return IntervalUniverse(tuple(alphabets.items()), self.interval_bound)

    def describe(self) -> str:
        """Short description for ledgers ('exhaustive T=5 L=1')."""
        text = f"{self.mode} T={self.depth} L={self.interval_bound}"
        if self.mode == SAMPLED:
            text += f" n={self.samples} seed={self.seed}"
        return text


@dataclass
class Witness:
    """Counterexample: an input prefix plus the offending trace.

    Args:
        input (NamedStreamTuple): Input prefix.
        trace (NamedStreamTuple, optional): Offending output or channel trace.
        note (str): What goes wrong.
    """

    input: NamedStreamTuple
    trace: Optional[NamedStreamTuple] = None
    note: str = ""

    def to_dict(self) -> dict:
        """Serializable form, loadable as a trace by `simulate`."""
        data: dict = {"trace": self.input.to_dict(), "ticks": self.input.tick_len}
        if self.trace is not None:
            data["output"] = self.trace.to_dict()
        if self.note:
            data["note"] = self.note
        return data

    def __str__(self) -> str:
        trace = f" -> {self.trace}" if self.trace is not None else ""
        return f"{self.note}: {self.input}{trace}"


@dataclass
class Verdict:
    """Outcome of a bounded check."""

    status: str
    witness: Optional[Witness] = None
    coverage: str = ""
    details: dict = field(default_factory=dict)

    @classmethod
    def holds(cls, coverage: str = "") -> "Verdict":
        return cls(HOLDS, coverage=coverage)

    @classmethod
    def fails(cls, witness: Witness, coverage: str = "") -> "Verdict":
        return cls(FAILS, witness=witness, coverage=coverage)

    @classmethod
    def inconclusive(cls, coverage: str = "") -> "Verdict":
        return cls(INCONCLUSIVE, coverage=coverage)

    @property
    def ok(self) -> bool:
        """True if the property holds within the budget."""
        return self.status == HOLDS

    def __str__(self) -> str:
        text = f"{self.status} ({self.coverage})"
        if self.witness is not None:
            text += f" | witness: {self.witness}"
        return text


def input_space_size(
    channels: Iterable[str], universe: IntervalUniverse, depth: int
) -> int:
    """((Σ_{l≤L} |A|^l)^|channels|)^T, computed per channel alphabet."""
    return universe.size(channels) ** depth


def enumerate_inputs(
    channels: Iterable[str], universe: IntervalUniverse, budget: EnumerationBudget
) -> Iterator[NamedStreamTuple]:
    """Yield input tuples over `channels` of length `budget.depth`.

    Exhaustive mode yields every tuple exactly once; sampled mode yields
    `budget.samples` reproducible pseudo-random tuples.

    Raises:
        BudgetError: In exhaustive mode, if the space exceeds the ceiling.
    """
    channels = sorted(channels)
    if budget.mode == SAMPLED:
        rng = random.Random(budget.seed)
        for _ in range(budget.samples):
            yield random_stream(universe, channels, budget.depth, rng)
        return
    size = input_space_size(channels, universe, budget.depth)
    if size > budget.ceiling:
        raise BudgetError(
            f"Input space of {size} tuples exceeds the ceiling of {budget.ceiling}."
        )
    valuations = universe.valuations(channels)
    for combo in itertools.product(valuations, repeat=budget.depth):
        yield NamedStreamTuple.from_valuations(combo, channels)


class _Failure(Exception):
    def __init__(self, labels: list, tick: int, note: str):
        super().__init__(note)
        self.labels = labels
        self.tick = tick
        self.note = note


def _search(
    root,
    expand: Callable,
    depth: int,
    ceiling: int,
    prune: bool = True,
):
    """Layered search; `expand(node, tick)` yields (label, child, note) with
    `child is None` signalling a failure described by `note`.

    Raises:
        _Failure: With the labels from the root to the failing move.
        BudgetError: If a layer grows beyond `ceiling`.
    """
    layers: list = [{root: None}]
    visited = {root}
    for tick in range(depth):
        layer: dict = {}
        for node in layers[-1]:
            for label, child, note in expand(node, tick):
                if child is None:
                    raise _Failure(_backtrack(layers, node) + [label], tick, note)
                if child in layer or (prune and child in visited):
                    continue
                layer[child] = (node, label)
                visited.add(child)
            if len(layer) > ceiling:
                raise BudgetError(
                    f"Search layer {tick + 1} exceeds {ceiling} nodes."
                )
        LOGGER.debug(f"Search layer {tick + 1}: {len(layer)} nodes.")
        if not layer:
            break
        layers.append(layer)


def _backtrack(layers: list, node) -> list:
    labels = []
    for layer in reversed(layers[1:]):
        parent, label = layer[node]
        labels.append(label)
        node = parent
    return list(reversed(labels))


def _valuation_source(
    channels: Iterable[str], universe: IntervalUniverse, budget: EnumerationBudget
) -> Iterator[Callable]:
    """Yield per-search functions tick -> list of input valuations.

    Exhaustive searches branch over one tick of input at a time, so the
    ceiling bounds the valuations per tick; the layer size is bounded by
    `budget.state_ceiling` in `_search`.
    """
    channels = sorted(channels)
    if budget.mode == SAMPLED:
        for stream in enumerate_inputs(channels, universe, budget):
            yield lambda tick, stream=stream: [stream.at(tick).restrict(channels)]
        return
    size = universe.size(channels)
    if size > budget.ceiling:
        raise BudgetError(
            f"{size} input valuations per tick exceed the ceiling of {budget.ceiling}."
        )
    valuations = universe.valuations(channels)
    yield lambda tick: valuations


def _run_searches(
    root, make_expand: Callable, channels, universe, budget
) -> Optional[_Failure]:
    prune = budget.mode == EXHAUSTIVE
    for valuations_at in _valuation_source(channels, universe, budget):
        try:
            _search(root, make_expand(valuations_at), budget.depth, budget.state_ceiling, prune)
        except _Failure as failure:
            return failure
    return None


def check_machine_inclusion(
    fine: MachineBehavior,
    coarse: MachineBehavior,
    universe: IntervalUniverse,
    budget: EnumerationBudget,
    compare: Optional[frozenset] = None,
) -> Verdict:
    """Bounded check that every output of `fine` is an output of `coarse`.

    Args:
        fine (MachineBehavior): Refining machine.
        coarse (MachineBehavior): Refined machine, same interface.
        universe (IntervalUniverse): Alphabets of the input channels.
        budget (EnumerationBudget): Bounds.
        compare (frozenset, optional): Channels compared; defaults to the
            non-chaotic outputs of `coarse`, in which case `fine` may only
            be chaotic where `coarse` is.

    Returns:
        Verdict: fails carries (input, fine output) not produced by `coarse`.

    Raises:
        InterfaceError: If the interfaces differ.
    """
    if fine.inputs != coarse.inputs or fine.outputs != coarse.outputs:
        raise InterfaceError(
            f"Cannot compare {fine.label} and {coarse.label}: interfaces differ."
        )
    coverage = budget.describe()
    inputs = sorted(coarse.inputs)
    if compare is None:
        compare = coarse.observable
        loose = fine.chaotic - coarse.chaotic
        if loose:
            witness = Witness(
                NamedStreamTuple.empty(inputs, 1),
                None,
                f"channels {sorted(loose)} unconstrained in the refinement",
            )
            return Verdict.fails(witness, coverage)

    def make_expand(valuations_at):
        def expand(node, tick):
            f_state, c_states = node
            for valuation in valuations_at(tick):
                coarse_moves: dict = {}
                for c_state in c_states:
                    for observed, successor in coarse.transitions(c_state, valuation):
                        key = observed.restrict(compare)
                        coarse_moves.setdefault(key, set()).add(successor)
                for observed, f_next in fine.transitions(f_state, valuation):
                    seen = observed.restrict(compare)
                    reached = coarse_moves.get(seen)
                    if not reached:
                        yield (valuation, seen), None, f"output not allowed at tick {tick}"
                    else:
                        yield (valuation, seen), (f_next, frozenset(reached)), ""

        return expand

    root = (fine.start(), frozenset([coarse.start()]))
    try:
        failure = _run_searches(root, make_expand, inputs, universe, budget)
    except BudgetError as exc:
        LOGGER.warning(f"Inclusion check inconclusive: {exc}")
        return Verdict.inconclusive(f"{coverage}; {exc}")
    if failure is None:
        return Verdict.holds(coverage)
    stream = NamedStreamTuple.from_valuations([v for v, _ in failure.labels], inputs)
    trace = NamedStreamTuple.from_valuations([o for _, o in failure.labels], compare)
    return Verdict.fails(Witness(stream, trace, failure.note), coverage)


def check_machine_equality(
    first: MachineBehavior,
    second: MachineBehavior,
    universe: IntervalUniverse,
    budget: EnumerationBudget,
) -> Verdict:
    """Bounded trace equality; chaotic channels of either side are wildcards."""
    compare = first.outputs - first.chaotic - second.chaotic
    verdict = check_machine_inclusion(first, second, universe, budget, compare)
    if not verdict.ok:
        return verdict
    return check_machine_inclusion(second, first, universe, budget, compare)


def _check_same_interface(old: System, new: System):
    if old.inputs != new.inputs or old.outputs != new.outputs:
        raise InterfaceError(
            f"Systems have different interfaces: ({sorted(old.inputs)}, "
            f"{sorted(old.outputs)}) vs ({sorted(new.inputs)}, {sorted(new.outputs)})."
        )


def check_trace_inclusion(
    old: System, new: System, budget: EnumerationBudget
) -> Verdict:
    """Bounded check of ⟦new⟧(i) ⊆ ⟦old⟧(i) for all enumerated inputs.

    Raises:
        InterfaceError: If the system interfaces differ.
        ConsistencyError: If a system is inconsistent.
    """
    _check_same_interface(old, new)
    universe = budget.universe(old, new)
    return check_machine_inclusion(
        blackbox(new, universe), blackbox(old, universe), universe, budget
    )


def check_trace_equality(
    first: System, second: System, budget: EnumerationBudget
) -> Verdict:
    """Bounded blackbox trace equality with chaos-aware comparison."""
    _check_same_interface(first, second)
    universe = budget.universe(first, second)
    return check_machine_equality(
        blackbox(first, universe), blackbox(second, universe), universe, budget
    )


def check_input_independence(
    machine: MachineBehavior,
    channel: str,
    universe: IntervalUniverse,
    budget: EnumerationBudget,
) -> Verdict:
    """Bounded check that `machine` does not depend on input `channel`.

    Compares the machine with a copy whose `channel` is fed empty intervals.
    """
    pinned = AdaptedMachine.make(
        drop_inputs(machine, [channel]), machine.inputs, machine.outputs
    )
    return check_machine_equality(machine, pinned, universe, budget)


def influencing_components(system: System, channels: Iterable[str]) -> tuple:
    """Components whose outputs reach `channels`, directly or through others.

    Machines always emit and always have a successor, so leaving out the
    other components does not change the histories over `channels`.
    """
    writers = {channel: c for c in system.components for channel in c.outputs}
    todo = [writers[ch] for ch in channels if ch in writers]
    cone: dict = {}
    while todo:
        component = todo.pop()
        if component.name in cone:
            continue
        cone[component.name] = component
        todo.extend(writers[ch] for ch in component.inputs if ch in writers)
    return tuple(c for c in system.components if c.name in cone)


def _system_machine(system: System, universe: IntervalUniverse, components=None):
    components = system.components if components is None else components
    members = tuple(c.behavior for c in components)
    machine = compose(members, universe)
    if not isinstance(machine, ComposedMachine):
        machine = ComposedMachine(members, universe)
    return machine


def _check_invariant_domain(system: System, invariant):
    allowed = system.inputs | system.controlled
    outside = invariant.channels - allowed
    if outside:
        raise InterfaceError(
            f"Invariant {invariant.name} mentions {sorted(outside)} outside "
            "the system inputs and controlled channels."
        )
    chaotic = frozenset().union(
        *(c.behavior.chaotic for c in system.components)
    ) & invariant.channels
    if chaotic:
        raise InterfaceError(
            f"Invariant {invariant.name} constrains chaotic channels {sorted(chaotic)}."
        )


def check_invariant_validity(
    system: System, invariant, budget: EnumerationBudget
) -> Verdict:
    """Bounded check that every run of `system` satisfies `invariant`.

    Enumerates all external inputs and all nondeterministic choices up to
    `budget.depth` ticks and evaluates the invariant on every prefix of the
    channel history l over I ∪ out.C. Only the components influencing the
    invariant's channels, and the system inputs they read, take part.

    Returns:
        Verdict: fails carries the input and the offending history over the
            invariant's channels.

    Raises:
        InterfaceError: If the invariant mentions unknown or chaotic channels.
    """
    ensure_consistent(system)
    _check_invariant_domain(system, invariant)
    coverage = budget.describe()
    universe = budget.universe(system)
    channels = invariant.channels
    cone = influencing_components(system, channels)
    machine = _system_machine(system, universe, cone)
    read = frozenset().union(channels, *(c.inputs for c in cone))
    inputs = sorted(system.inputs & read)
    LOGGER.debug(
        f"Invariant {invariant.name} depends on {[c.name for c in cone]} "
        f"and inputs {inputs}."
    )

    def make_expand(valuations_at):
        def expand(node, tick):
            state, monitor = node
            for valuation in valuations_at(tick):
                for emission in machine.emit(state):
                    link = dict(valuation)
                    link.update(machine.observe(emission))
                    link.update(emission[1])
                    observed = Valuation(link).restrict(channels)
                    holds, monitor_next = invariant.advance(monitor, observed)
                    label = (valuation, observed)
                    if not holds:
                        yield label, None, f"invariant {invariant.name} violated at tick {tick}"
                        continue
                    for successor in machine.step(state, emission, valuation):
                        yield label, (successor, monitor_next), ""

        return expand

    root = (machine.start(), invariant.initial())
    try:
        failure = _run_searches(root, make_expand, inputs, universe, budget)
    except BudgetError as exc:
        LOGGER.warning(f"Invariant check inconclusive: {exc}")
        return Verdict.inconclusive(f"{coverage}; {exc}")
    if failure is None:
        return Verdict.holds(coverage)
    stream = NamedStreamTuple.from_valuations(
        [v for v, _ in failure.labels], system.inputs
    )
    trace = NamedStreamTuple.from_valuations([o for _, o in failure.labels], channels)
    return Verdict.fails(Witness(stream, trace, failure.note), coverage)


def check_refinement_under_invariant(  # noqa: PLR0913
    system: System,
    name: str,
    replacement: MachineBehavior,
    invariant,
    budget: EnumerationBudget,
) -> Verdict:
    """Bounded check of Ψ(l) ⇒ β(l↾in.c) ⊆ behav.c(l↾in.c).

    Enumerates histories l over in.c and the invariant's channels, computing
    channels the invariant derives and discarding histories that violate it,
    and tracks the replacement against the current behavior of `name`.

    Returns:
        Verdict: fails carries the history l (as input) and the replacement
            output not allowed by the current behavior.
    """
    component = system.component(name)
    current = component.behavior
    if replacement.inputs != current.inputs or replacement.outputs != current.outputs:
        raise InterfaceError(
            f"Replacement {replacement.label} does not have the interface of {name}."
        )
    _check_invariant_domain(system, invariant)
    coverage = budget.describe()
    universe = budget.universe(system)
    compare = current.observable
    loose = replacement.chaotic - current.chaotic
    channels = sorted(component.inputs | invariant.channels)
    free = sorted(frozenset(channels) - invariant.derives)
    if loose:
        witness = Witness(
            NamedStreamTuple.empty(free, 1),
            None,
            f"channels {sorted(loose)} unconstrained in the refinement",
        )
        return Verdict.fails(witness, coverage)

    def make_expand(valuations_at):
        def expand(node, tick):
            monitor, f_state, c_states = node
            for free_valuation in valuations_at(tick):
                history = free_valuation.merge(invariant.derive(monitor, free_valuation))
                holds, monitor_next = invariant.advance(
                    monitor, history.restrict(invariant.channels)
                )
                if not holds:
                    continue
                local = history.restrict(component.inputs)
                coarse_moves: dict = {}
                for c_state in c_states:
                    for observed, successor in current.transitions(c_state, local):
                        coarse_moves.setdefault(observed.restrict(compare), set()).add(
                            successor
                        )
                for observed, f_next in replacement.transitions(f_state, local):
                    seen = observed.restrict(compare)
                    label = (history, seen)
                    reached = coarse_moves.get(seen)
                    if not reached:
                        yield label, None, f"{name} output not allowed at tick {tick}"
                    else:
                        yield label, (monitor_next, f_next, frozenset(reached)), ""

        return expand

    root = (invariant.initial(), replacement.start(), frozenset([current.start()]))
    try:
        failure = _run_searches(root, make_expand, free, universe, budget)
    except BudgetError as exc:
        LOGGER.warning(f"Refinement check under invariant inconclusive: {exc}")
        return Verdict.inconclusive(f"{coverage}; {exc}")
    if failure is None:
        return Verdict.holds(coverage)
    stream = NamedStreamTuple.from_valuations([h for h, _ in failure.labels], channels)
    trace = NamedStreamTuple.from_valuations([o for _, o in failure.labels], compare)
    return Verdict.fails(Witness(stream, trace, failure.note), coverage)


def check_input_freedom(
    system: System, invariant, budget: EnumerationBudget, depth: int = 2
) -> Verdict:
    """Check that `invariant` does not restrict the system inputs.

    Every input history over the invariant's input channels (up to `depth`
    ticks) must extend to some history of its other channels satisfying the
    invariant.

    Returns:
        Verdict: fails carries an input prefix no history can extend.
    """
    _check_invariant_domain(system, invariant)
    universe = budget.universe(system)
    depth = min(depth, budget.depth)
    coverage = f"exhaustive T={depth} L={budget.interval_bound}"
    restricted = sorted(invariant.channels & system.inputs)
    if not restricted:
        return Verdict.holds(coverage)
    others = sorted(invariant.channels - system.inputs - invariant.derives)
    other_valuations = universe.valuations(others)
    input_valuations = universe.valuations(restricted)

    def extend(monitors: frozenset, prefix: list) -> Optional[list]:
        if len(prefix) == depth:
            return None
        for valuation in input_valuations:
            reached = set()
            for monitor in monitors:
                for other in other_valuations:
                    free = valuation.merge(other)
                    full = invariant.derive(monitor, free).merge(free)
                    holds, monitor_next = invariant.advance(monitor, full)
                    if holds:
                        reached.add(monitor_next)
            if not reached:
                return prefix + [valuation]
            blocked = extend(frozenset(reached), prefix + [valuation])
            if blocked is not None:
                return blocked
        return None

    blocked = extend(frozenset([invariant.initial()]), [])
    if blocked is None:
        return Verdict.holds(coverage)
    stream = NamedStreamTuple.from_valuations(blocked, restricted)
    note = f"invariant {invariant.name} restricts the system inputs {restricted}"
    return Verdict.fails(Witness(stream, None, note), coverage)
