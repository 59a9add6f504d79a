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
`dot.py`
Graphviz DOT exporter (system structure diagram).
"""

import logging

import networkx as nx
from networkx.drawing.nx_pydot import to_pydot

from archrefine.constants import ENVIRONMENT_NODE
from archrefine.system import System

from .base import SystemExporter

LOGGER = logging.getLogger(__name__)


def structure_graph(system: System) -> nx.MultiDiGraph:
    """Component graph of `system`.

    One node per component plus the boundary node `ENV`; one edge per
    (writer, reader) pair of every channel, labelled with the channel name.
    System inputs leave `ENV`, system outputs enter it.
    """
    graph = nx.MultiDiGraph(name="system")
    graph.add_node(ENVIRONMENT_NODE, shape="plaintext")
    for component in system.components:
        shape = "box3d" if component.sub is not None else "box"
        graph.add_node(component.name, shape=shape)
    for component in system.components:
        for channel in sorted(component.inputs):
            writer = system.writer(channel)
            if writer is None and channel in system.inputs:
                writer = ENVIRONMENT_NODE
            if writer is not None:
                graph.add_edge(writer, component.name, key=channel, label=channel)
    for channel in sorted(system.outputs):
        writer = system.writer(channel)
        if writer is None and channel in system.inputs:
            writer = ENVIRONMENT_NODE
        if writer is not None:
            graph.add_edge(writer, ENVIRONMENT_NODE, key=channel, label=channel)
    return graph


def emit_dot(system: System) -> str:
    """DOT text of the system structure diagram."""
    graph = structure_graph(system)
    LOGGER.debug(
        f"DOT graph with {graph.number_of_nodes()} nodes, "
        f"{graph.number_of_edges()} edges"
    )
    return to_pydot(graph).to_string()


class DotExporter(SystemExporter):
    """Exporter writing Graphviz `.dot` files."""

    EXTENSION = ".dot"

    def render(self, system: System, **fields) -> str:
        return emit_dot(system)
