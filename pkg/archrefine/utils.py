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
`utils.py`
Utility functions.
"""

import errno
import importlib
import logging
import os
import pprint
import re
import sys
import warnings
from datetime import datetime
from pathlib import Path
from typing import Optional

import yaml
from dateutil import tz

from archrefine.constants import (
    BUDGET_CEILING,
    DEBUG,
    DEFAULT_DEPTH,
    DEFAULT_INTERVAL_BOUND,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    EXHAUSTIVE,
    STATE_CEILING,
    SYNTACTIC,
)
from archrefine.streams import NamedStreamTuple

LOGGER = logging.getLogger(__name__)

BUDGET_KEYS = {
    "check": SYNTACTIC,
    "mode": EXHAUSTIVE,
    "depth": DEFAULT_DEPTH,
    "interval_bound": DEFAULT_INTERVAL_BOUND,
    "samples": DEFAULT_SAMPLES,
    "seed": DEFAULT_SEED,
    "ceiling": BUDGET_CEILING,
    "state_ceiling": STATE_CEILING,
}


def load_config(path: str, ctx: os._Environ = os.environ) -> Optional[dict]:
    """Load an archrefine config (or trace) from a local path or directly
    from a string content.

    Args:
        path (str): File path, or data as string.
        ctx (dict): Context for variable replacement.

    Returns:
        dict: Config parsed.
    """
    abspath = Path(path)
    try:
        if abspath.is_file():
            return parse_config(path=str(abspath.resolve()), ctx=ctx)
        LOGGER.debug(f"Path {path} not found. Trying to load from string")
        return parse_config(content=str(path), ctx=ctx)
    except OSError as exc:
        if exc.errno == errno.ENAMETOOLONG:
            return parse_config(content=str(path), ctx=ctx)
        raise


def parse_config(
    path: Optional[str] = None, content=None, ctx: os._Environ = os.environ
):
    """Load a YAML (or JSON) document and resolve `${VAR}` references in it.

    Args:
        path (str): the path to the file.
        content (str): the document content as a string.
        ctx (dict): Context to replace env variables from (defaults to
            `os.environ`).

    Returns:
        dict: Parsed document.
    """
    pattern = re.compile(r".*?\${(\w+)}.*?")

    def replace_env_vars(content, ctx) -> str:
        match = pattern.findall(content)
        if match:
            full_value = content
            for var in match:
                try:
                    full_value = full_value.replace(f"${{{var}}}", ctx[var])
                except KeyError as exception:
                    LOGGER.error(
                        f'Environment variable "{var}" should be set.', exc_info=True
                    )
                    raise exception
            content = full_value
        return content

    if path:
        with Path(path).open(encoding="utf8") as config:
            content = config.read()
    if ctx:
        content = replace_env_vars(content, ctx)
    data = yaml.safe_load(content)
    if isinstance(data, str):
        LOGGER.error(
            "Error serializing document into dict. This might be due to a "
            "syntax error in the YAML / JSON file."
        )
    LOGGER.debug(pprint.pformat(data))
    return data


def get_budget(config: Optional[dict] = None, **overrides) -> dict:
    """Resolve enumeration budget settings.

    Precedence: explicit overrides (CLI flags) > `budget:` section of the
    config file > environment variables / built-in defaults.

    Args:
        config (dict, optional): Parsed config file.
        overrides: Values passed on the command line (None means unset).

    Returns:
        dict: Budget settings with every key of `BUDGET_KEYS`.
    """
    budget = dict(BUDGET_KEYS)
    section = (config or {}).get("budget") or {}
    for key, value in section.items():
        if key not in budget:
            LOGGER.warning(f'Unknown budget key "{key}" ignored.')
            continue
        budget[key] = type(budget[key])(value)
    for key, value in overrides.items():
        if value is not None:
            budget[key] = value
    return budget


def load_trace(path: str, tick_len: Optional[int] = None) -> NamedStreamTuple:
    """Load an input trace `{channel: [[message, ...], ...]}` from YAML/JSON.

    Args:
        path (str): File path or document content.
        tick_len (int, optional): Tick count, needed for traces over no
            channel.

    Returns:
        NamedStreamTuple: The trace.
    """
    data = load_config(path) or {}
    if "trace" in data:
        if tick_len is None:
            tick_len = data.get("ticks")
        data = data["trace"] or {}
    return NamedStreamTuple.of(data, tick_len=tick_len)


def is_debug_enabled():
    """Check if DEBUG mode is enabled."""
    return DEBUG == 1


def setup_logging():
    """Setup logging for the CLI."""
    if is_debug_enabled():
        level = logging.DEBUG
        format_str = "%(name)s - %(levelname)s - %(message)s"
    else:
        level = logging.INFO
        format_str = "%(levelname)s - %(message)s"
    logging.basicConfig(
        stream=sys.stderr, level=level, format=format_str, datefmt="%m/%d/%Y %I:%M:%S"
    )
    LOGGER.debug(f"DEBUG mode is enabled. DEBUG={DEBUG}")


def get_human_time(timestamp: float, timezone: Optional[str] = None) -> str:
    """Get human-readable timestamp from UNIX UTC timestamp.

    Args:
        timestamp (float): UNIX UTC timestamp.
        timezone (optional): Explicit timezone (e.g: "America/Chicago").

    Returns:
        str: Formatted human-readable date in ISO format.
    """
    to_zone = tz.gettz(timezone) if timezone is not None else tz.tzlocal()
    return datetime.fromtimestamp(timestamp, tz=to_zone).isoformat()


def get_machine_cls(machine: str):
    """Get a machine library class (`DeltaEncoder` or `pkg.mod.MyMachine`)."""
    return import_cls(machine, "Machine")


def get_invariant_cls(invariant: str):
    """Get an invariant library class (`RoundTrip` or `pkg.mod.MyInvariant`)."""
    return import_cls(invariant, "Invariant")


def get_exporter_cls(exporter: str):
    """Get an exporter class (`Dot` or `pkg.mod.MyExporter`)."""
    return import_cls(exporter, "Exporter")


def import_cls(cls_name, expected_type):
    """Import class dynamically from full name.
    If `cls_name` is not part of the core, try import from local path (plugins).

    Args:
        cls_name: Class name to import.
        expected_type: Type of class expected ('Machine', 'Invariant',
            'Exporter').

    Returns:
        obj: Imported class object, or None.
    """
    # plugin class
    if "." in cls_name:
        package, name = cls_name.rsplit(".", maxsplit=1)
        return import_dynamic(package, name, prefix=expected_type)

    # archrefine core class
    modules_name = f"{expected_type.lower()}s"
    full_cls_name = f"{cls_name}{expected_type}"
    filename = caml_to_snake(cls_name)
    return import_dynamic(
        f"archrefine.{modules_name}.{filename}", full_cls_name, prefix=expected_type
    )


def import_dynamic(package: str, name: str, prefix: str = "class"):
    """Import class or method dynamically from package and name.

    Args:
        package: Where the method or class is located in the import path.
        name: Name of method or class.

    Returns:
        obj: Imported class or method object, or None.
    """
    try:
        return getattr(importlib.import_module(package), name)
    except Exception as exception:
        warnings.warn(
            f'{prefix} "{package}.{name}" not found. Please ensure that the '
            "package and class name are valid and importable.",
            ImportWarning,
            stacklevel=2,
        )
        if DEBUG:
            LOGGER.debug(exception, exc_info=True)
        return None


def capitalize(word: str) -> str:
    """Only capitalize the first letter of a word, even when written in
    CamlCase.
    """
    return re.sub("([a-zA-Z])", lambda x: x.groups()[0].upper(), word, count=1)


def snake_to_caml(word: str) -> str:
    """Convert a string written in snake_case to a string in CamlCase."""
    return re.sub("_.", lambda x: x.group()[1].upper(), word)


def caml_to_snake(word: str) -> str:
    """Convert a string written in CamlCase to a string written in snake_case."""
    return re.sub(r"(?<!^)(?=[A-Z])", "_", word).lower()


def fmt_traceback(exc) -> str:
    """Format exception to be human-friendly.

    Args:
        exc (Exception): Exception to format.

    Returns:
        str: Formatted exception.
    """
    return exc.__class__.__name__ + ": " + str(exc).replace("\n", " ")
