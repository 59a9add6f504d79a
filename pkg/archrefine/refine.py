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
`refine.py`
Pipelines behind the CLI: load architectures and scripts, apply scripts,
check refinements, simulate and export.
"""

import logging
import pprint
import time
from pathlib import Path
from typing import Optional

from archrefine import utils
from archrefine.behavior import run
from archrefine.constants import DEFAULT_INTERVAL_BOUND
from archrefine.errors import ArchRefineError, Diagnostic, ScriptError, SourceSpan
from archrefine.frontend.interchange import load_interchange
from archrefine.frontend.parser import Document, parse_document
from archrefine.frontend.script import Script, parse_script_document
from archrefine.machines.table import TableMachine
from archrefine.oracle import EnumerationBudget, Verdict, check_trace_inclusion
from archrefine.report import RefinementReport
from archrefine.rules import CheckMode, apply_script
from archrefine.streams import NamedStreamTuple, TimedStreamPrefix
from archrefine.system import System, blackbox, check_consistency

LOGGER = logging.getLogger(__name__)


def load_architecture(path, bound: int = DEFAULT_INTERVAL_BOUND) -> Document:
    """Load an architecture from a `.arch` or `.json` file.

    Args:
        path (str): File path.
        bound (int): Interval bound of folded components' blackboxes.

    Returns:
        Document: System plus the named machines and invariants.
    """
    path = Path(path)
    LOGGER.debug(f"Loading architecture from {path}")
    if path.suffix == ".json":
        system = load_interchange(str(path), file=str(path), bound=bound)
        machines = _tables(system)
        return Document(system, machines=machines)
    return parse_document(path.read_text(encoding="utf8"), str(path), bound)


def _tables(system: System) -> dict:
    tables = {}
    for component in system.components:
        if isinstance(component.behavior, TableMachine):
            tables[component.behavior.name] = component.behavior
    return tables


def check(path) -> list:
    """Consistency diagnostics of an architecture file.

    Args:
        path (str): Architecture file.

    Returns:
        list: One `Diagnostic` per violation, referencing its condition and
            located at the first component involved (or the system block).
    """
    document = load_architecture(path)
    fallback = document.span_of("system", "system") or SourceSpan(str(path), 1, 1, 1, 1)
    diagnostics = []
    for violation in check_consistency(document.system):
        span = None
        for name in violation.components:
            span = span or document.span_of("component", name)
        diagnostics.append(
            Diagnostic(
                "error",
                violation.message,
                span or fallback,
                f"condition {violation.condition}",
            )
        )
    LOGGER.debug(f"{path}: {len(diagnostics)} violations")
    return diagnostics


def load_script(path, document: Optional[Document] = None) -> Script:
    """Parse a `.script` file, seeing the architecture's named machines."""
    document = document or Document(System(frozenset(), frozenset()))
    text = Path(path).read_text(encoding="utf8")
    return parse_script_document(
        text, str(path), machines=document.machines, invariants=document.invariants
    )


def refine(
    architecture,
    script,
    settings: Optional[dict] = None,
    timestamp: Optional[float] = None,
) -> tuple:
    """Run pipeline to apply a refinement script to an architecture.

    Args:
        architecture (str): Architecture file.
        script (str): Script file.
        settings (dict, optional): Budget settings (see `utils.get_budget`).
        timestamp (float, optional): UNIX timestamp. Defaults to now.

    Returns:
        tuple: (RefinementReport, System) where the system is the final one,
            or the last accepted one if a step was rejected.
    """
    start = time.time()
    if timestamp is None:
        timestamp = time.time()
    settings = settings or utils.get_budget()
    defaults = CheckMode.from_settings(settings)
    document = load_architecture(architecture, defaults.interval_bound)
    parsed = load_script(script, document)
    LOGGER.info(
        f"Applying {len(parsed.steps)} steps to {architecture} "
        f"({defaults.describe()})"
    )
    try:
        system, ledger = apply_script(
            document.system, parsed.steps, defaults, parsed.machines, parsed.invariants
        )
        report = RefinementReport(
            architecture, script, ledger, len(parsed.steps), timestamp,
            mode=defaults.describe(),
        )
    except ScriptError as exc:
        system = exc.system
        report = RefinementReport(
            architecture, script, exc.ledger, len(parsed.steps), timestamp,
            mode=defaults.describe(), error=exc,
        )
    if report.valid:
        LOGGER.info(report)
    else:
        LOGGER.error(report)
    LOGGER.debug(pprint.pformat(report.to_json()))
    run_duration = round(time.time() - start, 1)
    LOGGER.info(f"Run finished in {run_duration}s.")
    return report, system


def verify_refinement(old, new, settings: Optional[dict] = None) -> Verdict:
    """Bounded check that architecture `new` refines architecture `old`.

    Args:
        old (str): Architecture file of the abstract system.
        new (str): Architecture file of the refined system.
        settings (dict, optional): Budget settings.

    Returns:
        Verdict: holds, fails (with witness) or inconclusive.
    """
    settings = settings or utils.get_budget()
    budget = EnumerationBudget.from_settings(settings)
    old_system = load_architecture(old, budget.interval_bound).system
    new_system = load_architecture(new, budget.interval_bound).system
    LOGGER.info(f"Checking {new} against {old} ({budget.describe()})")
    verdict = check_trace_inclusion(old_system, new_system, budget)
    LOGGER.debug(f"Verdict: {verdict}")
    return verdict


def complete_trace(trace: NamedStreamTuple, channels, ticks: int) -> NamedStreamTuple:
    """Restrict `trace` to `channels`, padding with empty intervals.

    Raises:
        ArchRefineError: If the trace is shorter than `ticks`.
    """
    if trace.domain and trace.tick_len < ticks:
        raise ArchRefineError(f"Trace has {trace.tick_len} ticks, {ticks} requested.")
    entries = {}
    for channel in channels:
        if channel in trace:
            entries[channel] = trace[channel].truncate(ticks)
        else:
            entries[channel] = TimedStreamPrefix.empty(ticks)
    ignored = sorted(trace.domain - frozenset(channels))
    if ignored:
        LOGGER.warning(f"Trace channels {ignored} are not inputs and are ignored.")
    return NamedStreamTuple.of(entries, tick_len=ticks)


def simulate(
    system: System,
    trace: NamedStreamTuple,
    ticks: Optional[int] = None,
    component: Optional[str] = None,
    bound: int = DEFAULT_INTERVAL_BOUND,
) -> list:
    """Run a system (or one of its components) on an input trace.

    Args:
        system (System): Consistent system.
        trace (NamedStreamTuple): Input trace; missing inputs are empty.
        ticks (int, optional): Tick count, defaults to the trace length.
        component (str, optional): Run only this component.
        bound (int): Interval bound of chaotic enumeration.

    Returns:
        list: Output traces, sorted by their text form.
    """
    ticks = trace.tick_len if ticks is None else ticks
    if component is not None:
        machine = system.component(component).behavior
    else:
        machine = blackbox(system, bound=bound)
    stream = complete_trace(trace, machine.inputs, ticks)
    LOGGER.debug(f"Simulating {machine.label} for {ticks} ticks")
    outputs = run(machine, stream, ticks)
    return sorted(outputs, key=str)


def export(system: System, fmt: str, path: Optional[str] = None) -> str:
    """Render `system` with the exporter called `fmt`.

    Args:
        system (System): System to export.
        fmt (str): Exporter name ('canonical', 'interchange', 'dot') or
            full class path of a plugin exporter.
        path (str, optional): Output file.

    Raises:
        ImportError: If no exporter is found.
    """
    cls_name = fmt if "." in fmt else utils.capitalize(utils.snake_to_caml(fmt))
    exporter = utils.get_exporter_cls(cls_name)
    if not exporter:
        raise ImportError(f'Exporter "{fmt}" not found.')
    return exporter().export(system, path=path)
