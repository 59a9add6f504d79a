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
`frontend`
Architecture and script parsers, canonical emitters.
"""

from archrefine.exporters.dot import emit_dot
from archrefine.frontend.emitter import emit_canonical
from archrefine.frontend.interchange import load_interchange
from archrefine.frontend.parser import parse_architecture, parse_document
from archrefine.frontend.script import parse_script, parse_script_document

__all__ = [
    "emit_canonical",
    "emit_dot",
    "load_interchange",
    "parse_architecture",
    "parse_document",
    "parse_script",
    "parse_script_document",
]
