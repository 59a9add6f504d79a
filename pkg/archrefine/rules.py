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
`rules.py`
Refinement rules. Every rule maps a system to a refined system and records
how each of its premises was discharged in an `ObligationLedger`.

Premises about channel sets and names are always checked syntactically.
Premises about behaviors are discharged according to the step's `CheckMode`:
'syntactic' tries a structural argument and records the premise as assumed
otherwise, 'bounded' falls back to bounded enumeration, 'assumed' records the
premise without checking it.
"""

import enum
import logging
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field, replace
from typing import Any, Optional

from archrefine.behavior import (
    MachineBehavior,
    RenamedMachine,
    TrivialBehavior,
    add_chaotic_output,
    adapt_interface,
    drop_inputs,
    submachine_refines,
)
from archrefine.constants import (
    ASSUMED,
    BOUNDED,
    BUDGET_CEILING,
    CHECK_MODES,
    DEFAULT_DEPTH,
    DEFAULT_INTERVAL_BOUND,
    DEFAULT_SEED,
    DISCHARGED,
    EXHAUSTIVE,
    EXIT_ASSUMED,
    EXIT_FAILED,
    EXIT_OK,
    FAILED,
    FAILS,
    HOLDS,
    SAMPLED,
    STATE_CEILING,
    SYNTACTIC,
)
from archrefine.errors import (
    ArchRefineError,
    BudgetError,
    ConsistencyError,
    InterfaceError,
    RuleRejected,
    ScriptError,
    SourceSpan,
)
from archrefine.invariants.base import Invariant
from archrefine.invariants.tautology import TautologyInvariant
from archrefine.oracle import (
    EnumerationBudget,
    Verdict,
    Witness,
    check_input_freedom,
    check_input_independence,
    check_invariant_validity,
    check_machine_inclusion,
    check_refinement_under_invariant,
)
from archrefine.system import (
    Component,
    System,
    as_component,
    check_consistency,
)

LOGGER = logging.getLogger(__name__)


class StepKind(enum.Enum):
    """Refinement rules, valued by their script keyword."""

    REFINE_BEHAVIOR = "refine-behavior"
    REFINE_BEHAVIOR_WITH_INVARIANT = "refine-behavior-with-invariant"
    ADD_OUTPUT_CHANNEL = "add-output-channel"
    REMOVE_OUTPUT_CHANNEL = "remove-output-channel"
    ADD_INPUT_CHANNEL = "add-input-channel"
    REMOVE_INPUT_CHANNEL = "remove-input-channel"
    ADD_COMPONENT = "add-component"
    REMOVE_COMPONENT = "remove-component"
    EXPAND = "expand"
    FOLD = "fold"
    RENAME_CHANNEL = "rename-channel"


# Required / optional payload keys per rule
PAYLOAD_KEYS: dict = {
    StepKind.REFINE_BEHAVIOR: ({"machine"}, set()),
    StepKind.REFINE_BEHAVIOR_WITH_INVARIANT: ({"machine", "invariant"}, set()),
    StepKind.ADD_OUTPUT_CHANNEL: ({"channel"}, set()),
    StepKind.REMOVE_OUTPUT_CHANNEL: ({"channel"}, set()),
    StepKind.ADD_INPUT_CHANNEL: ({"channel"}, set()),
    StepKind.REMOVE_INPUT_CHANNEL: ({"channel"}, set()),
    StepKind.ADD_COMPONENT: (set(), set()),
    StepKind.REMOVE_COMPONENT: (set(), set()),
    StepKind.EXPAND: (set(), set()),
    StepKind.FOLD: ({"components"}, {"inputs", "outputs"}),
    StepKind.RENAME_CHANNEL: ({"old", "new"}, set()),
}


@dataclass(frozen=True)
class CheckMode:
    """How behavioral premises are discharged.

    Args:
        kind (str): 'syntactic', 'bounded' or 'assumed'.
        depth (int): Enumeration depth T of bounded checks.
        interval_bound (int): Interval bound L of bounded checks.
        samples (int, optional): Sample count; None means exhaustive.
        seed (int): Seed of sampled checks.
        ceiling (int): Largest input space, or per-tick valuation count in
            searches, enumerated exhaustively.
        state_ceiling (int): Largest explored state space.
    """

    kind: str = SYNTACTIC
    depth: int = DEFAULT_DEPTH
    interval_bound: int = DEFAULT_INTERVAL_BOUND
    samples: Optional[int] = None
    seed: int = DEFAULT_SEED
    ceiling: int = BUDGET_CEILING
    state_ceiling: int = STATE_CEILING

    def __post_init__(self):
        if self.kind not in CHECK_MODES:
            raise ValueError(f"Unknown check mode {self.kind}, expected {CHECK_MODES}.")
        if self.depth < 1 or self.interval_bound < 0:
            raise ValueError("Bounded checks need depth >= 1 and bound >= 0.")
        if self.samples is not None and self.samples < 1:
            raise ValueError("Sample count must be positive.")

    @classmethod
    def from_settings(cls, settings: Mapping) -> "CheckMode":
        """Build from a budget dict (see `utils.get_budget`)."""
        keys = ("depth", "interval_bound", "seed", "ceiling", "state_ceiling")
        values = {k: settings[k] for k in keys if settings.get(k) is not None}
        if settings.get("check") is not None:
            values["kind"] = settings["check"]
        if settings.get("mode") == SAMPLED:
            values["samples"] = settings.get("samples")
        return cls(**values)

    def budget(self) -> EnumerationBudget:
        """Enumeration budget of bounded checks."""
        return EnumerationBudget(
            depth=self.depth,
            interval_bound=self.interval_bound,
            mode=EXHAUSTIVE if self.samples is None else SAMPLED,
            samples=self.samples or 1,
            seed=self.seed,
            ceiling=self.ceiling,
            state_ceiling=self.state_ceiling,
        )

    def describe(self) -> str:
        """'syntactic', 'assumed' or 'bounded(exhaustive T=5 L=1)'."""
        if self.kind == BOUNDED:
            return f"bounded({self.budget().describe()})"
        return self.kind


@dataclass(frozen=True)
class RefinementStep:
    """One rule application.

    Args:
        kind (StepKind): Rule.
        target (tuple): Component name(s) the rule acts on; the new
            component name for fold; empty for rename.
        payload (dict): Rule-specific data (see `PAYLOAD_KEYS`).
        mode (tuple): Pairs overriding the default `CheckMode` fields.
        span (SourceSpan, optional): Location in the script file.
    """

    kind: StepKind
    target: tuple = ()
    payload: dict = field(default_factory=dict, hash=False)
    mode: tuple = ()
    span: Optional[SourceSpan] = field(default=None, compare=False)

    def __post_init__(self):
        required, optional = PAYLOAD_KEYS[self.kind]
        keys = set(self.payload)
        missing = required - keys
        unknown = keys - required - optional
        if missing or unknown:
            raise ValueError(
                f"{self.kind.value}: payload keys {sorted(keys)} do not match "
                f"required {sorted(required)} / optional {sorted(optional)}."
            )
        if self.kind != StepKind.RENAME_CHANNEL and len(self.target) != 1:
            raise ValueError(f"{self.kind.value} needs exactly one target.")
        object.__setattr__(self, "mode", tuple(sorted(dict(self.mode).items())))

    @property
    def rule(self) -> str:
        """Script keyword of the rule."""
        return self.kind.value

    def check_mode(self, defaults: CheckMode) -> CheckMode:
        """Default mode with this step's overrides applied."""
        return replace(defaults, **dict(self.mode)) if self.mode else defaults

    def __str__(self) -> str:
        words = [self.rule, *self.target]
        for key, value in self.payload.items():
            if isinstance(value, (set, frozenset)):
                value = ",".join(sorted(value))
            elif isinstance(value, (list, tuple)):
                value = ",".join(value)
            elif not isinstance(value, str):
                value = getattr(value, "label", None) or getattr(value, "name", value)
            words.append(f"{key}={value}")
        return " ".join(words)


@dataclass
class Obligation:
    """A rule premise and how it was discharged.

    Args:
        step (int): Step index in the script (0-based).
        rule (str): Rule keyword.
        premise (str): Premise text.
        mode (str): Discharge mode actually used.
        verdict (str): 'discharged', 'assumed' or 'failed'.
        counterexample (Witness, optional): Witness of a failed premise.
        detail (str): Free-form note.
    """

    step: int
    rule: str
    premise: str
    mode: str
    verdict: str
    counterexample: Optional[Witness] = None
    detail: str = ""

    def to_json(self) -> dict:
        """Serialize to a JSON-compatible dict."""
        return {
            "step": self.step,
            "rule": self.rule,
            "premise": self.premise,
            "mode": self.mode,
            "verdict": self.verdict,
            "counterexample": (
                self.counterexample.to_dict() if self.counterexample else None
            ),
            "detail": self.detail,
        }

    def __str__(self) -> str:
        detail = f" | {self.detail}" if self.detail else ""
        return (
            f"{self.step:>3} | {self.rule:<30} | {self.premise} | "
            f"{self.mode} | {self.verdict}{detail}"
        )


@dataclass
class ObligationLedger:
    """Ordered record of obligations."""

    obligations: list = field(default_factory=list)

    def add(self, obligation: Obligation):
        self.obligations.append(obligation)

    def extend(self, other: "ObligationLedger"):
        self.obligations.extend(other.obligations)

    def count(self, verdict: str) -> int:
        """Number of obligations with `verdict`."""
        return sum(1 for o in self.obligations if o.verdict == verdict)

    @property
    def status(self) -> str:
        """'failed' if any failed, else 'assumed' if any assumed, else 'discharged'."""
        if self.count(FAILED):
            return FAILED
        if self.count(ASSUMED):
            return ASSUMED
        return DISCHARGED

    @property
    def exit_code(self) -> int:
        """CLI exit code matching `status`."""
        return {FAILED: EXIT_FAILED, ASSUMED: EXIT_ASSUMED}.get(self.status, EXIT_OK)

    def to_text(self) -> str:
        """One line per premise."""
        return "\n".join(str(o) for o in self.obligations)

    def to_json(self) -> list:
        return [o.to_json() for o in self.obligations]

    def __len__(self) -> int:
        return len(self.obligations)

    def __iter__(self):
        return iter(self.obligations)


class _Premises:
    """Records the obligations of one rule application."""

    def __init__(self, rule: StepKind, index: int, mode: CheckMode):
        self.rule = rule.value
        self.index = index
        self.mode = mode
        self.ledger = ObligationLedger()

    def _record(self, premise, mode, verdict, witness=None, detail="") -> Obligation:
        obligation = Obligation(
            self.index, self.rule, premise, mode, verdict, witness, detail
        )
        self.ledger.add(obligation)
        return obligation

    def reject(self, premise: str, message: str, witness: Optional[Witness] = None):
        """Record a failed premise and raise `RuleRejected`."""
        self._record(premise, SYNTACTIC, FAILED, witness, message)
        LOGGER.error(f"{self.index:>3} | {self.rule} | {message}")
        raise RuleRejected(self.rule, message, self.ledger, witness)

    def syntactic(self, premise: str, holds: bool, message: str = ""):
        """Check a structural premise."""
        if not holds:
            self.reject(premise, message or f"premise violated: {premise}")
        self._record(premise, SYNTACTIC, DISCHARGED)

    def bounded(self, premise: str, verdict: Verdict, budget: EnumerationBudget):
        """Record a bounded verdict; failures reject the rule."""
        mode = f"bounded({budget.describe()})"
        if verdict.status == HOLDS:
            self._record(premise, mode, DISCHARGED)
        elif verdict.status == FAILS:
            message = f"premise violated: {premise}"
            if verdict.witness is not None:
                message += f" ({verdict.witness.note})"
            self._record(premise, mode, FAILED, verdict.witness, message)
            LOGGER.error(f"{self.index:>3} | {self.rule} | {message}")
            raise RuleRejected(self.rule, message, self.ledger, verdict.witness)
        else:
            self._record(premise, mode, ASSUMED, detail=f"inconclusive: {verdict.coverage}")

    def semantic(
        self,
        premise: str,
        check: Callable[[EnumerationBudget], Verdict],
        fast_path: Optional[Callable[[], bool]] = None,
        strict: Optional[str] = None,
    ):
        """Discharge a behavioral premise according to the check mode.

        Args:
            premise (str): Premise text.
            check (callable): Bounded check, called with the budget.
            fast_path (callable, optional): Structural argument.
            strict (str, optional): When set, a failed structural argument
                rejects the rule in syntactic mode with this message.
        """
        if self.mode.kind == ASSUMED:
            self._record(premise, ASSUMED, ASSUMED)
            return
        if fast_path is not None and _safe(fast_path):
            self._record(premise, SYNTACTIC, DISCHARGED)
            return
        if self.mode.kind == SYNTACTIC:
            if strict:
                self.reject(premise, strict)
            self._record(premise, SYNTACTIC, ASSUMED, detail="no structural argument")
            return
        budget = self.mode.budget()
        LOGGER.debug(f"{self.index:>3} | {self.rule} | {premise} | {budget.describe()}")
        self.bounded(premise, check(budget), budget)


def _safe(fast_path: Callable[[], bool]) -> bool:
    try:
        return fast_path()
    except BudgetError as exc:
        LOGGER.debug(f"Structural argument abandoned: {exc}")
        return False


def _component(premises: _Premises, system: System, name: str) -> Component:
    premises.syntactic(
        f"{name} ∈ arch.S", system.has_component(name), f"no component named {name}"
    )
    return system.component(name)


def _result(system: System, premises: _Premises) -> tuple:
    LOGGER.info(
        f"{premises.index:>3} | {premises.rule:<30} | {premises.ledger.status}"
    )
    return system, premises.ledger


def refine_behavior(
    system: System,
    name: str,
    behavior: MachineBehavior,
    mode: CheckMode = CheckMode(),
    index: int = 0,
) -> tuple:
    """Replace the behavior of `name` by a refinement.

    Premise: ∀i: β(i) ⊆ behav.c(i).

    Returns:
        tuple: (System, ObligationLedger).

    Raises:
        RuleRejected: If a premise fails.
    """
    premises = _Premises(StepKind.REFINE_BEHAVIOR, index, mode)
    component = _component(premises, system, name)
    current = component.behavior
    premises.syntactic(
        "β has the interface of c",
        behavior.inputs == current.inputs and behavior.outputs == current.outputs,
        f"{behavior.label} does not have the interface of {name}",
    )
    universe = system.universe(mode.interval_bound)
    premises.semantic(
        "∀i: β(i) ⊆ behav.c(i)",
        lambda budget: check_machine_inclusion(behavior, current, universe, budget),
        lambda: submachine_refines(behavior, current, universe, mode.state_ceiling),
    )
    return _result(system.replace_component(component.with_behavior(behavior)), premises)


def refine_behavior_with_invariant(  # noqa: PLR0913
    system: System,
    name: str,
    behavior: MachineBehavior,
    invariant: Invariant,
    mode: CheckMode = CheckMode(),
    index: int = 0,
) -> tuple:
    """Replace the behavior of `name` by one that refines it in context.

    Premises: Ψ does not restrict the system inputs;
    (∀c ∈ C: l↾out.c ∈ behav.c(l↾in.c)) ⇒ Ψ(l);
    Ψ(l) ⇒ β(l↾in.c) ⊆ behav.c(l↾in.c).
    """
    premises = _Premises(StepKind.REFINE_BEHAVIOR_WITH_INVARIANT, index, mode)
    component = _component(premises, system, name)
    current = component.behavior
    premises.syntactic(
        "β has the interface of c",
        behavior.inputs == current.inputs and behavior.outputs == current.outputs,
        f"{behavior.label} does not have the interface of {name}",
    )
    outside = invariant.channels - system.inputs - system.controlled
    premises.syntactic(
        "Ψ is a predicate over I ∪ out.C",
        not outside,
        f"invariant {invariant.name} mentions unknown channels {sorted(outside)}",
    )
    freedom_premise = "Ψ does not restrict the system inputs"
    if not invariant.channels & system.inputs:
        premises.syntactic(freedom_premise, True)
    else:
        budget = mode.budget()
        try:
            verdict = check_input_freedom(system, invariant, budget)
        except InterfaceError as exc:
            premises.reject(freedom_premise, str(exc))
        premises.bounded(freedom_premise, verdict, budget)

    def validity(budget):
        try:
            return check_invariant_validity(system, invariant, budget)
        except InterfaceError as exc:
            premises.reject("(∀c ∈ C: l↾out.c ∈ behav.c(l↾in.c)) ⇒ Ψ(l)", str(exc))

    def under_invariant(budget):
        try:
            return check_refinement_under_invariant(
                system, name, behavior, invariant, budget
            )
        except InterfaceError as exc:
            premises.reject("Ψ(l) ⇒ β(l↾in.c) ⊆ behav.c(l↾in.c)", str(exc))

    universe = system.universe(mode.interval_bound)
    premises.semantic(
        "(∀c ∈ C: l↾out.c ∈ behav.c(l↾in.c)) ⇒ Ψ(l)",
        validity,
        lambda: isinstance(invariant, TautologyInvariant),
    )
    premises.semantic(
        "Ψ(l) ⇒ β(l↾in.c) ⊆ behav.c(l↾in.c)",
        under_invariant,
        lambda: submachine_refines(behavior, current, universe, mode.state_ceiling),
    )
    return _result(system.replace_component(component.with_behavior(behavior)), premises)


def add_output_channel(
    system: System, name: str, channel: str, mode: CheckMode = CheckMode(), index: int = 0
) -> tuple:
    """Add an unconstrained output `channel` to `name`.

    Premise: p ∈ ℂ \\ (I ∪ out.C).
    """
    premises = _Premises(StepKind.ADD_OUTPUT_CHANNEL, index, mode)
    component = _component(premises, system, name)
    premises.syntactic(
        "p ∈ ℂ",
        channel in system.alphabet_map(),
        f"channel {channel} is not declared",
    )
    taken = system.inputs | system.controlled
    premises.syntactic(
        "p ∉ I ∪ out.C",
        channel not in taken,
        f"channel {channel} is already controlled by "
        f"{system.writer(channel) or 'the environment'}",
    )
    behavior = add_chaotic_output(component.behavior, channel)
    return _result(system.replace_component(component.with_behavior(behavior)), premises)


def remove_output_channel(
    system: System, name: str, channel: str, mode: CheckMode = CheckMode(), index: int = 0
) -> tuple:
    """Remove output `channel` of `name`.

    Premise: p ∉ O ∪ in.C.
    """
    premises = _Premises(StepKind.REMOVE_OUTPUT_CHANNEL, index, mode)
    component = _component(premises, system, name)
    premises.syntactic(
        "p ∈ out.c", channel in component.outputs, f"{channel} is not an output of {name}"
    )
    premises.syntactic(
        "p ∉ O", channel not in system.outputs, f"{channel} is a system output"
    )
    readers = system.readers(channel)
    premises.syntactic(
        "p ∉ in.C", not readers, f"{channel} is read by {', '.join(readers)}"
    )
    behavior = adapt_interface(
        component.behavior, component.inputs, component.outputs - {channel}
    )
    return _result(system.replace_component(component.with_behavior(behavior)), premises)


def add_input_channel(
    system: System, name: str, channel: str, mode: CheckMode = CheckMode(), index: int = 0
) -> tuple:
    """Connect `channel` to `name` as an ignored input.

    Premise: p ∈ I ∪ out.C.
    """
    premises = _Premises(StepKind.ADD_INPUT_CHANNEL, index, mode)
    component = _component(premises, system, name)
    premises.syntactic(
        "p ∉ in.c", channel not in component.inputs, f"{channel} is already an input of {name}"
    )
    premises.syntactic(
        "p ∈ I ∪ out.C",
        channel in system.inputs | system.controlled,
        f"channel {channel} is dangling",
    )
    behavior = adapt_interface(
        component.behavior, component.inputs | {channel}, component.outputs
    )
    return _result(system.replace_component(component.with_behavior(behavior)), premises)


def remove_input_channel(
    system: System, name: str, channel: str, mode: CheckMode = CheckMode(), index: int = 0
) -> tuple:
    """Disconnect input `channel` from `name`.

    Premise: behav.c does not depend on p, so that
    β(i↾in.c\\{p}) = behav.c(i).
    """
    premises = _Premises(StepKind.REMOVE_INPUT_CHANNEL, index, mode)
    component = _component(premises, system, name)
    premises.syntactic(
        "p ∈ in.c", channel in component.inputs, f"{channel} is not an input of {name}"
    )
    current = component.behavior
    universe = system.universe(mode.interval_bound)
    premises.semantic(
        "β(i↾in.c\\{p}) = behav.c(i)",
        lambda budget: check_input_independence(current, channel, universe, budget),
        lambda: channel not in current.reads,
        strict=f"machine of {name} reads {channel}",
    )
    behavior = drop_inputs(current, [channel])
    return _result(system.replace_component(component.with_behavior(behavior)), premises)


def add_component(
    system: System, name: str, mode: CheckMode = CheckMode(), index: int = 0
) -> tuple:
    """Add a component (n, ∅, ∅, α).

    Premise: ∀c ∈ C: name.c ≠ n.
    """
    premises = _Premises(StepKind.ADD_COMPONENT, index, mode)
    premises.syntactic(
        "∀c ∈ C: name.c ≠ n",
        not system.has_component(name),
        f"component name {name} is already used",
    )
    component = Component(name, frozenset(), frozenset(), TrivialBehavior())
    return _result(system.with_components(system.components + (component,)), premises)


def remove_component(
    system: System, name: str, mode: CheckMode = CheckMode(), index: int = 0
) -> tuple:
    """Remove a component without outputs.

    Premise: out.c = ∅.
    """
    premises = _Premises(StepKind.REMOVE_COMPONENT, index, mode)
    component = _component(premises, system, name)
    premises.syntactic(
        "out.c = ∅",
        not component.outputs,
        f"{name} controls {sorted(component.outputs)}",
    )
    return _result(
        system.with_components(c for c in system.components if c.name != name), premises
    )


def expand(
    system: System, name: str, mode: CheckMode = CheckMode(), index: int = 0
) -> tuple:
    """Replace a hierarchical component by its subarchitecture T.

    Premises: c = (n, I_T, O_T, ⟦T⟧); out.C_T ∩ out.C_S = out.c;
    out.C_T ∩ I_S = ∅.
    """
    premises = _Premises(StepKind.EXPAND, index, mode)
    component = _component(premises, system, name)
    sub = component.sub
    premises.syntactic(
        "c = (n, I_T, O_T, ⟦T⟧)",
        sub is not None,
        f"{name} has no recorded subarchitecture",
    )
    others = [c for c in system.components if c.name != name]
    clashes = sub.controlled & system.controlled - component.outputs
    premises.syntactic(
        "out.C_T ∩ out.C_S = out.c",
        not clashes,
        f"internal channels {sorted(clashes)} of {name} collide with the system",
    )
    inputs = sub.controlled & system.inputs
    premises.syntactic(
        "out.C_T ∩ I_S = ∅",
        not inputs,
        f"internal channels {sorted(inputs)} of {name} are system inputs",
    )
    read_outside = (sub.controlled - component.outputs) & frozenset().union(
        *(c.inputs for c in others)
    )
    premises.syntactic(
        "internal channels of T are unknown to S",
        not read_outside,
        f"internal channels {sorted(read_outside)} of {name} are read in the system",
    )
    names = set(sub.names) & {c.name for c in others}
    premises.syntactic(
        "names of T are fresh in S",
        not names,
        f"component names {sorted(names)} collide with the system",
    )
    expanded = system.with_components(others + list(sub.components)).declare(sub.channels)
    return _result(expanded, premises)


def fold(  # noqa: PLR0913
    system: System,
    name: str,
    components: Iterable[str],
    inputs: Optional[Iterable[str]] = None,
    outputs: Optional[Iterable[str]] = None,
    mode: CheckMode = CheckMode(),
    index: int = 0,
) -> tuple:
    """Replace the subarchitecture T formed by `components` by one
    hierarchical component `name` with interface (I_T, O_T).

    Premises: in.C_T \\ out.C_T ⊆ I_T ⊆ (I ∪ out.C) \\ out.C_T;
    out.C_T ∩ (O ∪ in.(C\\C_T)) ⊆ O_T ⊆ out.C_T; n fresh. Missing I_T / O_T
    default to the lower bounds.
    """
    premises = _Premises(StepKind.FOLD, index, mode)
    selected = tuple(sorted(set(components)))
    unknown = [n for n in selected if not system.has_component(n)]
    premises.syntactic(
        "C_T ⊆ arch.S", not unknown and bool(selected), f"unknown components {unknown}"
    )
    chosen = [system.component(n) for n in selected]
    rest = [c for c in system.components if c.name not in selected]
    premises.syntactic(
        "n fresh",
        name not in {c.name for c in rest},
        f"component name {name} is already used",
    )
    controlled = frozenset().union(*(c.outputs for c in chosen))
    read = frozenset().union(*(c.inputs for c in chosen))
    read_outside = frozenset().union(*(c.inputs for c in rest))
    inputs_low = read - controlled
    inputs_high = (system.inputs | system.controlled) - controlled
    outputs_low = controlled & (system.outputs | read_outside)
    sub_inputs = inputs_low if inputs is None else frozenset(inputs)
    sub_outputs = outputs_low if outputs is None else frozenset(outputs)
    premises.syntactic(
        "in.C_T \\ out.C_T ⊆ I_T",
        inputs_low <= sub_inputs,
        f"I_T misses {sorted(inputs_low - sub_inputs)}",
    )
    premises.syntactic(
        "I_T ⊆ (I ∪ out.C) \\ out.C_T",
        sub_inputs <= inputs_high,
        f"I_T contains {sorted(sub_inputs - inputs_high)}",
    )
    premises.syntactic(
        "out.C_T ∩ (O ∪ in.(C\\C_T)) ⊆ O_T",
        outputs_low <= sub_outputs,
        f"O_T misses {sorted(outputs_low - sub_outputs)}",
    )
    premises.syntactic(
        "O_T ⊆ out.C_T",
        sub_outputs <= controlled,
        f"O_T contains {sorted(sub_outputs - controlled)}",
    )
    sub = System(sub_inputs, sub_outputs, tuple(chosen), system.channels)
    sub = sub.restrict_declarations()
    folded = as_component(sub, name, bound=mode.interval_bound)
    return _result(system.with_components(rest + [folded]), premises)


def _all_channels(system: System) -> frozenset:
    channels = system.used_channels
    for component in system.components:
        if component.sub is not None:
            channels |= _all_channels(component.sub)
    return channels


def rename_in_system(system: System, old: str, new: str, bound: int) -> System:
    """Rename channel `old` to `new` everywhere in `system`, recursively."""

    def swap(channels: frozenset) -> frozenset:
        return frozenset(new if c == old else c for c in channels)

    components = []
    for component in system.components:
        if component.sub is not None:
            sub = rename_in_system(component.sub, old, new, bound)
            components.append(as_component(sub, component.name, bound=bound))
        else:
            behavior = RenamedMachine.make(component.behavior, {old: new})
            components.append(
                Component(component.name, swap(component.inputs), swap(component.outputs), behavior)
            )
    channels = tuple((new if n == old else n, a) for n, a in system.channels)
    return System(swap(system.inputs), swap(system.outputs), tuple(components), channels)


def rename_channel(
    system: System, old: str, new: str, mode: CheckMode = CheckMode(), index: int = 0
) -> tuple:
    """Rename internal channel `old` to the unused name `new`.

    Premises: old ∉ I ∪ O; new unused in S.
    """
    premises = _Premises(StepKind.RENAME_CHANNEL, index, mode)
    premises.syntactic(
        "old ∈ out.C ∪ in.C",
        old in system.controlled | system.read,
        f"channel {old} is not used by any component",
    )
    premises.syntactic(
        "old ∉ I ∪ O",
        old not in system.inputs | system.outputs,
        f"channel {old} is part of the system interface",
    )
    declared = system.alphabet_map()
    premises.syntactic(
        "new unused in S",
        new not in _all_channels(system)
        and (new not in declared or declared.get(new) == declared.get(old)),
        f"channel name {new} is already used",
    )
    return _result(rename_in_system(system, old, new, mode.interval_bound), premises)


def _resolve(value: Any, catalog: Mapping, kind: str):
    if isinstance(value, str):
        if value not in catalog:
            raise ArchRefineError(f"Unknown {kind} {value}.")
        return catalog[value]
    return value


def apply_step(  # noqa: PLR0911
    system: System,
    step: RefinementStep,
    mode: CheckMode,
    index: int = 0,
    machines: Optional[Mapping] = None,
    invariants: Optional[Mapping] = None,
) -> tuple:
    """Apply one step; returns (System, ObligationLedger)."""
    machines = machines or {}
    invariants = invariants or {}
    target = step.target[0] if step.target else None
    payload = step.payload
    kind = step.kind
    if kind == StepKind.REFINE_BEHAVIOR:
        machine = _resolve(payload["machine"], machines, "machine")
        return refine_behavior(system, target, machine, mode, index)
    if kind == StepKind.REFINE_BEHAVIOR_WITH_INVARIANT:
        machine = _resolve(payload["machine"], machines, "machine")
        invariant = _resolve(payload["invariant"], invariants, "invariant")
        return refine_behavior_with_invariant(system, target, machine, invariant, mode, index)
    if kind == StepKind.FOLD:
        return fold(
            system,
            target,
            payload["components"],
            payload.get("inputs"),
            payload.get("outputs"),
            mode,
            index,
        )
    if kind == StepKind.RENAME_CHANNEL:
        return rename_channel(system, payload["old"], payload["new"], mode, index)
    channel_rules = {
        StepKind.ADD_OUTPUT_CHANNEL: add_output_channel,
        StepKind.REMOVE_OUTPUT_CHANNEL: remove_output_channel,
        StepKind.ADD_INPUT_CHANNEL: add_input_channel,
        StepKind.REMOVE_INPUT_CHANNEL: remove_input_channel,
    }
    if kind in channel_rules:
        return channel_rules[kind](system, target, payload["channel"], mode, index)
    component_rules = {
        StepKind.ADD_COMPONENT: add_component,
        StepKind.REMOVE_COMPONENT: remove_component,
        StepKind.EXPAND: expand,
    }
    return component_rules[kind](system, target, mode, index)


def apply_script(
    system: System,
    steps: Iterable[RefinementStep],
    defaults: CheckMode = CheckMode(),
    machines: Optional[Mapping] = None,
    invariants: Optional[Mapping] = None,
) -> tuple:
    """Apply `steps` in order.

    Args:
        system (System): Initial system.
        steps (list): Refinement steps.
        defaults (CheckMode): Mode of steps without overrides.
        machines (dict): Machines referenced by name in payloads.
        invariants (dict): Invariants referenced by name in payloads.

    Returns:
        tuple: (final System, ObligationLedger of all steps).

    Raises:
        ScriptError: On the first rejected step, with the partial ledger and
            the last accepted system.
    """
    ledger = ObligationLedger()
    for index, step in enumerate(steps):
        try:
            mode = step.check_mode(defaults)
            system_next, step_ledger = apply_step(
                system, step, mode, index, machines, invariants
            )
        except RuleRejected as exc:
            if exc.ledger is not None:
                ledger.extend(exc.ledger)
            raise ScriptError(
                index, step.rule, exc.message, ledger, system, exc.witness
            ) from exc
        except (ArchRefineError, ValueError) as exc:
            LOGGER.error(f"{index:>3} | {step.rule} | {exc}")
            raise ScriptError(index, step.rule, str(exc), ledger, system) from exc
        violations = check_consistency(system_next)
        if violations:
            error = ConsistencyError(violations)
            raise ScriptError(index, step.rule, str(error), ledger, system)
        ledger.extend(step_ledger)
        system = system_next
    return system, ledger

