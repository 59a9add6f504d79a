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
"""stubs.py

Stubs and builders for systems, machines and plugins used across the tests.
"""

import os
import random
import sys
from types import ModuleType

from archrefine.behavior import drop_inputs
from archrefine.machines.delay import DelayMachine
from archrefine.machines.table import HAS, Guard, TableMachine, Transition
from archrefine.streams import Alphabet, NamedStreamTuple, Valuation
from archrefine.system import Component, System
from archrefine.utils import load_config

TEST_DIR = os.path.dirname(os.path.abspath(__file__))
SAMPLE_DIR = os.path.join(os.path.dirname(os.path.dirname(TEST_DIR)), "samples/")
TOY_DIR = os.path.join(SAMPLE_DIR, "toy")
DATABASE_DIR = os.path.join(SAMPLE_DIR, "database")

CTX = {
    "ARCHREFINE_TOY_DEPTH": "3",
}

BIT = Alphabet("Bit", (0, 1))


def add_dynamic(name, code, type):
    """Dynamically add a machine, invariant or exporter to archrefine.

    Args:
        name (str): Name of machine / invariant / exporter.
        code (str): Plugin code.
        type (str): 'machines', 'invariants' or 'exporters'.
    """
    mod = ModuleType(name)
    module_name = f"archrefine.{type}.{name}"
    sys.modules[module_name] = mod
    exec(code, mod.__dict__)


def get_fixture_path(filename):
    """Get path for a fixture file.

    Args:
        filename (str): Filename of file in fixtures/.

    Returns:
        str: Full path of file in fixtures/.
    """
    return os.path.join(TEST_DIR, "fixtures/", filename)


def get_sample_path(*parts):
    """Get path for a file in samples/."""
    return os.path.join(SAMPLE_DIR, *parts)


def load_fixture(filename, ctx=os.environ):
    """Load a fixture from the test/fixtures/ directory and replace context
    environmental variables in it.

    Args:
        filename (str): Filename of the fixture to load.
        ctx (dict): Context dictionary (env variables).

    Returns:
        dict: Loaded fixture.
    """
    path = get_fixture_path(filename)
    return load_config(path, ctx=ctx)


def load_sample(filename, ctx=os.environ):
    """Load a sample from the samples/ directory and replace context
    environmental variables in it.

    Args:
        filename (str): Filename of the sample to load, relative to samples/.
        ctx (dict): Context dictionary (env variables).

    Returns:
        dict: Loaded sample.
    """
    filename = os.path.join(SAMPLE_DIR, filename)
    return load_config(filename, ctx=ctx)


def read_text(path):
    with open(path, encoding="utf8") as f:
        return f.read()


def bit_channels(*names):
    """Channel declarations over the Bit alphabet."""
    return tuple((name, BIT) for name in names)


def delay(source, target):
    return DelayMachine(input=source, output=target)


def stream(**channels):
    """Named stream tuple from `channel=[[...], [...]]` keyword arguments."""
    return NamedStreamTuple.of(channels)


def _lit(name, moves, states=("idle", "lit"), emissions=None):
    if emissions is None:
        emissions = (("lit", (Valuation({"Z": (1,)}),)),)
    return TableMachine(
        name, {"Y"}, {"Z"}, set(), states, states[0], emissions, tuple(moves)
    )


def blink_any():
    """May light Z one tick after any idle tick."""
    return _lit(
        "BLINK_ANY",
        [
            Transition("idle", (), ("idle", "lit")),
            Transition("lit", (), ("idle",)),
        ],
    )


def blink():
    """Lights Z exactly one tick after Y carried a 1."""
    return _lit(
        "BLINK",
        [
            Transition("idle", (Guard("Y", HAS, 1),), ("lit",)),
            Transition("lit", (), ("idle",)),
        ],
    )


def blink_maybe():
    """Lights Z, or not, one tick after Y carried a 1."""
    return _lit(
        "BLINK_MAYBE",
        [
            Transition("idle", (Guard("Y", HAS, 1),), ("idle", "lit")),
            Transition("lit", (), ("idle",)),
        ],
    )


def blink_loud():
    """Lights Z at every tick, starting with the first."""
    return _lit(
        "BLINK_LOUD",
        [],
        states=("loud",),
        emissions=(("loud", (Valuation({"Z": (1,)}),)),),
    )


def relay_system(behavior=None):
    """A relays X to Y with one tick of delay, B drives Z from Y."""
    behavior = behavior or blink_any()
    components = (
        Component("A", {"X"}, {"Y"}, delay("X", "Y")),
        Component("B", {"Y"}, {"Z"}, behavior),
    )
    return System({"X"}, {"Z"}, components, bit_channels("X", "Y", "Z", "W"))


def dark():
    """Never lights Z."""
    return TableMachine("DARK", {"Y"}, {"Z"}, set(), ("off",), "off")


def silent_relay(behavior):
    """Relay whose A ignores X, so Y stays empty."""
    components = (
        Component("A", set(), {"Y"}, drop_inputs(delay("X", "Y"), ["X"])),
        Component("B", {"Y"}, {"Z"}, behavior),
    )
    return System({"X"}, {"Z"}, components, bit_channels("X", "Y", "Z"))


def relay_machines():
    return {
        "BLINK_ANY": blink_any(),
        "BLINK": blink(),
        "BLINK_MAYBE": blink_maybe(),
        "BLINK_LOUD": blink_loud(),
    }


def consistency_pairs():
    """Consistent / inconsistent system pairs, one per consistency condition.

    Returns:
        dict: Condition number to (consistent system, system violating
            exactly that condition).
    """
    channels = bit_channels("W", "X", "Y", "Z")

    def comp(name, source, target):
        return Component(name, {source}, {target}, delay(source, target))

    return {
        1: (
            System({"X"}, {"Z"}, (comp("A", "X", "Y"), comp("B", "Y", "Z")), channels),
            System({"X"}, {"Z"}, (comp("A", "X", "Y"), comp("A", "Y", "Z")), channels),
        ),
        2: (
            System({"X"}, {"Y"}, (comp("A", "X", "Y"), comp("B", "X", "Z")), channels),
            System({"X"}, {"Y"}, (comp("A", "X", "Y"), comp("B", "X", "Y")), channels),
        ),
        3: (
            System({"X"}, {"Y"}, (comp("A", "X", "Y"),), channels),
            System({"X", "Y"}, {"Y"}, (comp("A", "X", "Y"),), channels),
        ),
        4: (
            System(
                {"X", "W"}, {"Y", "Z"}, (comp("A", "X", "Y"), comp("B", "W", "Z")), channels
            ),
            System({"X"}, {"Y", "Z"}, (comp("A", "X", "Y"), comp("B", "W", "Z")), channels),
        ),
        5: (
            System({"X"}, {"Y"}, (comp("A", "X", "Y"),), channels),
            System({"X"}, {"Y", "W"}, (comp("A", "X", "Y"),), channels),
        ),
    }


_BIT_INTERVALS = ((), (0,), (1,))


def random_table(rng, name, inputs, output, max_states=3):
    """Random nondeterministic table machine over Bit channels.

    Args:
        rng (random.Random): Random generator.
        name (str): Machine name.
        inputs (list): Input channels.
        output (str): The single output channel.
        max_states (int): Maximum number of states.
    """
    states = tuple(f"s{i}" for i in range(rng.randint(1, max_states)))
    emissions = []
    for state in states:
        options = rng.sample(_BIT_INTERVALS, rng.randint(1, 2))
        emissions.append((state, tuple(Valuation({output: o}) for o in options)))
    moves = []
    for state in states:
        for _ in range(rng.randint(0, 2)):
            guards = ()
            if inputs and rng.random() < 0.7:
                channel = rng.choice(sorted(inputs))
                kind = rng.choice(["has", "empty", "nonempty"])
                value = rng.choice([0, 1]) if kind == "has" else None
                guards = (Guard(channel, kind, value),)
            targets = tuple(rng.sample(states, rng.randint(1, min(2, len(states)))))
            moves.append(Transition(state, guards, targets))
    return TableMachine(
        name, set(inputs), {output}, set(), states, states[0], tuple(emissions), tuple(moves)
    )


def random_system(rng, max_components=3, max_visible=None):
    """Random consistent system with input X and feedback between components.

    Component `Ck` controls channel `Ok` and reads at most two of X and the
    other components' outputs; at most `max_visible` outputs are external.
    """
    count = rng.randint(1, max_components)
    outputs = [f"O{k}" for k in range(count)]
    available = ["X"] + outputs
    components = []
    for k in range(count):
        candidates = [c for c in available if c != outputs[k]]
        inputs = rng.sample(candidates, rng.randint(0, min(2, len(candidates))))
        machine = random_table(rng, f"T{k}", inputs, outputs[k])
        components.append(Component(f"C{k}", set(inputs), {outputs[k]}, machine))
    visible = rng.sample(outputs, rng.randint(1, min(count, max_visible or count)))
    return System({"X"}, set(visible), tuple(components), bit_channels(*available))


def seeded(seed=0):
    return random.Random(seed)


# Add custom machines / exporters for testing purposes
with open(get_fixture_path("mealy_machine.py")) as f:
    MEALY_MACHINE_CODE = f.read()
with open(get_fixture_path("fail_exporter.py")) as f:
    FAIL_EXPORTER_CODE = f.read()
add_dynamic("mealy", MEALY_MACHINE_CODE, "machines")
add_dynamic("fail", FAIL_EXPORTER_CODE, "exporters")
