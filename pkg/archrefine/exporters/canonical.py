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
`canonical.py`
Canonical architecture text exporter.
"""

import logging

from archrefine.frontend.emitter import emit_canonical
from archrefine.system import System

from .base import SystemExporter

LOGGER = logging.getLogger(__name__)


class CanonicalExporter(SystemExporter):
    """Exporter writing `.arch` text."""

    EXTENSION = ".arch"

    def render(self, system: System, **fields) -> str:
        return emit_canonical(system)
