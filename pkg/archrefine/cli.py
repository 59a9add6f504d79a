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
`cli.py`
Command-Line interface of `archrefine`.
"""

import json
import logging
import os
import sys
import time
from pathlib import Path

import click
from pkg_resources import get_distribution

from archrefine import refine as pipeline
from archrefine import utils
from archrefine.constants import (
    CHECK_MODES,
    EXIT_FAILED,
    EXIT_INCONCLUSIVE,
    EXIT_OK,
    FAILS,
    HOLDS,
    SAMPLED,
)
from archrefine.errors import ArchRefineError, ParseError
from archrefine.streams import NamedStreamTuple

sys.path.append(os.getcwd())  # dynamic machine / invariant / exporter loading

LOGGER = logging.getLogger(__name__)

EXPORT_FORMATS = ("canonical", "interchange", "dot")


def budget_options(func):
    """Enumeration budget flags shared by commands running bounded checks."""
    options = [
        click.option("--config", "-c", type=click.Path(exists=True), help="Config file (YAML / JSON)"),
        click.option("--depth", "-T", type=int, help="Enumeration depth (ticks)"),
        click.option("--bound", "-L", type=int, help="Messages per interval"),
        click.option("--samples", type=int, help="Sample inputs instead of enumerating them"),
        click.option("--seed", type=int, help="Seed of the sampled mode"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def get_settings(config, depth, bound, samples, seed, check=None) -> dict:
    """Budget settings: flags > config file > environment / defaults."""
    config_dict = utils.load_config(config) if config else None
    return utils.get_budget(
        config_dict,
        check=check,
        depth=depth,
        interval_bound=bound,
        samples=samples,
        seed=seed,
        mode=SAMPLED if samples is not None else None,
    )


def fail(exc: Exception, code: int = EXIT_FAILED):
    """Print a one-line error (a diagnostic for parse errors) and exit."""
    if isinstance(exc, ParseError):
        click.echo(str(exc.diagnostic), err=True)
    else:
        click.echo(f"error: {utils.fmt_traceback(exc)}", err=True)
    if utils.is_debug_enabled():
        LOGGER.exception(exc)
    sys.exit(code)


def write_witness(path, witness):
    """Write a replayable witness trace."""
    Path(path).write_text(json.dumps(witness, indent=2) + "\n", encoding="utf8")
    click.echo(f"Witness written to {path}")


@click.group(invoke_without_command=True)
@click.option(
    "--version",
    "-v",
    is_flag=True,
    help="Show archrefine version.",
)
@click.pass_context
def main(ctx, version):
    """CLI entrypoint."""
    utils.setup_logging()
    if ctx.invoked_subcommand is None or version:
        ver = get_distribution("archrefine").version
        click.echo(f"archrefine v{ver}")
        sys.exit(0)


@main.command()
@click.argument("architecture", type=click.Path(exists=True))
def check(architecture):
    """Check the consistency conditions of an architecture."""
    try:
        diagnostics = pipeline.check(architecture)
    except ArchRefineError as exc:
        fail(exc)
    for diagnostic in diagnostics:
        click.echo(str(diagnostic))
    if diagnostics:
        sys.exit(EXIT_FAILED)
    click.echo(f"{architecture}: consistent")


@main.command()
@click.argument("architecture", type=click.Path(exists=True))
@click.option("--input", "-i", "trace", type=click.Path(exists=True), help="Input trace (JSON / YAML)")
@click.option("--ticks", "-n", type=int, help="Number of ticks")
@click.option("--component", help="Run a single component")
@click.option("--bound", "-L", type=int, default=None, help="Messages per interval of chaotic outputs")
def simulate(architecture, trace, ticks, component, bound):
    """Print every output trace of an architecture for an input trace."""
    try:
        settings = utils.get_budget(interval_bound=bound)
        document = pipeline.load_architecture(architecture, settings["interval_bound"])
        if trace:
            stream = utils.load_trace(trace, tick_len=None)
        else:
            if ticks is None:
                raise ArchRefineError("Either --input or --ticks is required.")
            stream = NamedStreamTuple.empty((), ticks)
        outputs = pipeline.simulate(
            document.system, stream, ticks, component, settings["interval_bound"]
        )
    except ArchRefineError as exc:
        fail(exc)
    click.echo(f"{len(outputs)} output trace(s)")
    for output in outputs:
        click.echo(str(output))


@main.command()
@click.argument("architecture", type=click.Path(exists=True))
@click.argument("script", type=click.Path(exists=True))
@click.option("--mode", "-m", type=click.Choice(CHECK_MODES), help="Default premise check mode")
@budget_options
@click.option("--out", "-o", type=click.Path(), help="Write the resulting architecture")
@click.option("--report", "-r", type=click.Path(), help="Write the JSON report")
@click.option("--witness", "-w", type=click.Path(), help="Write the witness of a rejected step")
@click.option(
    "--timestamp",
    "-t",
    type=float,
    default=None,
    help="Report timestamp (defaults to now).",
)
def refine(  # noqa: PLR0913
    architecture, script, mode, config, depth, bound, samples, seed, out, report, witness, timestamp
):
    """Apply a refinement script and print the obligation ledger."""
    start = time.time()
    try:
        settings = get_settings(config, depth, bound, samples, seed, check=mode)
        result, system = pipeline.refine(architecture, script, settings, timestamp)
    except (ArchRefineError, ValueError) as exc:
        fail(exc)
    click.echo(result.to_text())
    if report:
        Path(report).write_text(json.dumps(result.to_json(), indent=2) + "\n", encoding="utf8")
    if witness and result.witness is not None:
        write_witness(witness, result.witness)
    if out and result.valid:
        fmt = "interchange" if Path(out).suffix == ".json" else "canonical"
        pipeline.export(system, fmt, out)
    end = time.time()
    duration = round(end - start, 1)
    LOGGER.debug(f"Refinement finished in {duration}s")
    sys.exit(result.exit_code)


@main.command(name="verify-refinement")
@click.argument("old", type=click.Path(exists=True))
@click.argument("new", type=click.Path(exists=True))
@budget_options
@click.option("--witness", "-w", type=click.Path(), help="Write the witness trace")
def verify_refinement(old, new, config, depth, bound, samples, seed, witness):
    """Bounded check that NEW refines OLD."""
    try:
        settings = get_settings(config, depth, bound, samples, seed)
        verdict = pipeline.verify_refinement(old, new, settings)
    except (ArchRefineError, ValueError) as exc:
        fail(exc)
    click.echo(str(verdict))
    if verdict.status == HOLDS:
        sys.exit(EXIT_OK)
    if verdict.status == FAILS:
        if witness and verdict.witness is not None:
            write_witness(witness, verdict.witness.to_dict())
        sys.exit(EXIT_FAILED)
    sys.exit(EXIT_INCONCLUSIVE)


@main.command()
@click.argument("architecture", type=click.Path(exists=True))
@click.option(
    "--format",
    "-f",
    "fmt",
    default="canonical",
    show_default=True,
    help=f"Exporter ({', '.join(EXPORT_FORMATS)}) or plugin class path",
)
@click.option("--out", "-o", type=click.Path(), help="Output file (defaults to stdout)")
def export(architecture, fmt, out):
    """Export an architecture in another format."""
    try:
        system = pipeline.load_architecture(architecture).system
        text = pipeline.export(system, fmt, out)
    except (ArchRefineError, ImportError) as exc:
        fail(exc)
    if not out:
        click.echo(text, nl=False)


@main.command(name="export-dot")
@click.argument("architecture", type=click.Path(exists=True))
@click.option("--out", "-o", type=click.Path(), help="Output file (defaults to stdout)")
@click.pass_context
def export_dot(ctx, architecture, out):
    """Export the structure diagram of an architecture as DOT."""
    ctx.invoke(export, architecture=architecture, fmt="dot", out=out)


if __name__ == "__main__":
    main()
