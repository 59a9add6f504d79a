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
`base.py`
Base exporter abstract class.
"""

import logging
from abc import ABCMeta, abstractmethod
from pathlib import Path

from archrefine.system import System

LOGGER = logging.getLogger(__name__)


class SystemExporter:  # pytype: disable=ignored-metaclass
    """Abstract class to render a system into a text format. Subclasses are
    named `<Format>Exporter` and live in `archrefine.exporters.<format>`.

    Exporter options are passed as keyword arguments; only the keys listed in
    `REQUIRED_FIELDS` / `OPTIONAL_FIELDS` reach `render`.
    """

    __metaclass__ = ABCMeta  # pytype: disable=ignored-metaclass

    REQUIRED_FIELDS: list = []
    OPTIONAL_FIELDS: list = []
    EXTENSION: str = ".txt"

    def export(self, system: System, **config) -> str:
        """Render `system` and optionally write it to `config['path']`.

        Args:
            system (System): System to export.
            config (dict): Exporter config.

        Returns:
            str: Rendered text.
        """
        missing = [key for key in self.REQUIRED_FIELDS if key not in config]
        if missing:
            raise ValueError(
                f"{self.__class__.__name__} is missing required fields {missing}."
            )
        fields = {
            key: value
            for key, value in config.items()
            if key in self.REQUIRED_FIELDS or key in self.OPTIONAL_FIELDS
        }
        LOGGER.debug(f"Exporting system with {self.__class__.__name__}")
        text = self.render(system, **fields)
        path = config.get("path")
        if path:
            Path(path).write_text(text, encoding="utf8")
            LOGGER.info(f"Wrote {path}")
        return text

    @abstractmethod
    def render(self, system: System, **fields) -> str:
        """Render `system`.

        Args:
            system (System): System to export.
            fields (dict): Exporter options.

        Returns:
            str: Rendered text.
        """
        raise NotImplementedError
