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
`fixtures.py`
The data acquisition example: a preprocessor feeding a remote database,
refactored in eight steps so that the link carries difference-encoded
entries.

The machines are reconstructions from a prose description; their timing is
chosen so that the initial and the refactored system answer queries with
the same latency. The initial database holds every store entry for two
ticks in an internal pipeline, matching the two extra hops
(encoder, decoder) of the refactored path.
"""

from pathlib import Path

from archrefine.behavior import adapt_interface
from archrefine.constants import DEFAULT_KEYS, DEFAULT_MODULUS
from archrefine.invariants.round_trip import RoundTripInvariant
from archrefine.machines.database import INTERLEAVED, DatabaseMachine
from archrefine.machines.delta_decoder import DeltaDecoderMachine
from archrefine.machines.delta_encoder import DeltaEncoderMachine
from archrefine.machines.preprocessor import PreprocessorMachine
from archrefine.rules import RefinementStep, StepKind
from archrefine.streams import Alphabet
from archrefine.system import Component, System

SAMPLES_DIR = Path(__file__).resolve().parents[2] / "samples" / "database"
ARCHITECTURE_FILE = SAMPLES_DIR / "db_initial.arch"
SCRIPT_FILE = SAMPLES_DIR / "delta_refactor.script"
INTERCHANGE_FILE = SAMPLES_DIR / "db_initial.json"

# Domain of the shipped sample files, small enough for whole-system
# inclusion checks at depth 5; DEFAULT_KEYS / DEFAULT_MODULUS give the
# full domain, on which the script still discharges every premise.
MODULUS = 3
KEYS = ("k0",)
FULL_DOMAIN = {"keys": DEFAULT_KEYS, "modulus": DEFAULT_MODULUS}

# Latency of the encoder / decoder path
LAG = 2


def alphabets(keys=KEYS, modulus: int = MODULUS) -> dict:
    """Channel name to Alphabet for every channel of the example."""
    key = Alphabet("Key", tuple(keys))
    data = Alphabet("Data", tuple(range(modulus)))
    entry = Alphabet("Entry", tuple((k, d) for k in keys for d in range(modulus)))
    return {
        "In": entry,
        "I": entry,
        "D": entry,
        "R": entry,
        "Key": key,
        "Data": data,
    }


def build_machines(modulus: int = MODULUS) -> dict:
    """Machines of the example, by component role.

    Returns:
        dict: PRE, RDB, ENC, DEC and RDB_R, plus the variants
            RDB_INTERLEAVED (nondeterministic store / query order) and
            DEC_CORRUPT (decoder off by one).
    """
    remote = DatabaseMachine(store="R", query="Key", answer="Data")
    return {
        "PRE": PreprocessorMachine(input="In", output="I", modulus=modulus),
        "RDB": DatabaseMachine(store="I", query="Key", answer="Data", delay=LAG),
        "ENC": DeltaEncoderMachine(input="I", output="D", modulus=modulus),
        "DEC": DeltaDecoderMachine(input="D", output="R", modulus=modulus),
        "RDB_R": adapt_interface(remote, ["I", "Key", "R"], ["Data"]),
        "RDB_INTERLEAVED": DatabaseMachine(
            store="I", query="Key", answer="Data", delay=LAG, ordering=INTERLEAVED
        ),
        "DEC_CORRUPT": DeltaDecoderMachine(
            input="D", output="R", modulus=modulus, skew=1
        ),
    }


def initial_system(keys=KEYS, modulus: int = MODULUS, rdb: str = "RDB") -> System:
    """Preprocessor PRE feeding the remote database RDB.

    Args:
        keys (tuple): Key set.
        modulus (int): Size of the data domain.
        rdb (str): Machine used for RDB ('RDB' or 'RDB_INTERLEAVED').
    """
    machines = build_machines(modulus)
    components = (
        Component("PRE", {"In"}, {"I"}, machines["PRE"]),
        Component("RDB", {"I", "Key"}, {"Data"}, machines[rdb]),
    )
    channels = tuple(alphabets(keys, modulus).items())
    return System({"In", "Key"}, {"Data"}, components, channels)


def psi_invariant(modulus: int = MODULUS) -> RoundTripInvariant:
    """R carries the round trip of I, two ticks late."""
    return RoundTripInvariant(source="I", target="R", modulus=modulus, lag=LAG)


def literal_psi(modulus: int = MODULUS) -> RoundTripInvariant:
    """l(I) equals the round trip of l(I); holds on every history."""
    return RoundTripInvariant(source="I", target="I", modulus=modulus, lag=0)


def delta_refactor_steps(modulus: int = MODULUS, decoder: str = "DEC") -> list:
    """The eight refactoring steps as thirteen rule applications.

    Args:
        modulus (int): Size of the data domain.
        decoder (str): Decoder machine ('DEC' or 'DEC_CORRUPT').
    """
    machines = build_machines(modulus)
    invariant_mode = (("kind", "bounded"), ("depth", 6))
    return [
        RefinementStep(StepKind.ADD_COMPONENT, ("ENC",)),
        RefinementStep(StepKind.ADD_COMPONENT, ("DEC",)),
        RefinementStep(StepKind.ADD_OUTPUT_CHANNEL, ("ENC",), {"channel": "D"}),
        RefinementStep(StepKind.ADD_OUTPUT_CHANNEL, ("DEC",), {"channel": "R"}),
        RefinementStep(StepKind.ADD_INPUT_CHANNEL, ("ENC",), {"channel": "I"}),
        RefinementStep(StepKind.ADD_INPUT_CHANNEL, ("DEC",), {"channel": "D"}),
        RefinementStep(StepKind.REFINE_BEHAVIOR, ("ENC",), {"machine": machines["ENC"]}),
        RefinementStep(
            StepKind.REFINE_BEHAVIOR, ("DEC",), {"machine": machines[decoder]}
        ),
        RefinementStep(StepKind.ADD_INPUT_CHANNEL, ("RDB",), {"channel": "R"}),
        RefinementStep(
            StepKind.REFINE_BEHAVIOR_WITH_INVARIANT,
            ("RDB",),
            {"machine": machines["RDB_R"], "invariant": psi_invariant(modulus)},
            mode=invariant_mode,
        ),
        RefinementStep(StepKind.REMOVE_INPUT_CHANNEL, ("RDB",), {"channel": "I"}),
        RefinementStep(StepKind.FOLD, ("PRE'",), {"components": ("ENC", "PRE")}),
        RefinementStep(StepKind.FOLD, ("RDB'",), {"components": ("DEC", "RDB")}),
    ]


# Rule applications (0-based indices) making up each of the eight steps
STEP_GROUPS = {
    1: (0, 1),
    2: (2, 3),
    3: (4, 5),
    4: (6, 7),
    5: (8,),
    6: (9,),
    7: (10,),
    8: (11, 12),
}


def _interfaces(components: dict) -> dict:
    return {
        name: (frozenset(inputs), frozenset(outputs))
        for name, (inputs, outputs) in components.items()
    }


_INITIAL = {"PRE": ({"In"}, {"I"}), "RDB": ({"I", "Key"}, {"Data"})}


def expected_interfaces() -> list:
    """Component interfaces after every rule application of the script.

    Returns:
        list: One dict per step, component name to (inputs, outputs).
    """
    after = []
    current = dict(_INITIAL)

    def record(changes=None):
        current.update(changes or {})
        after.append(_interfaces(current))

    record({"ENC": (set(), set())})
    record({"DEC": (set(), set())})
    record({"ENC": (set(), {"D"})})
    record({"DEC": (set(), {"R"})})
    record({"ENC": ({"I"}, {"D"})})
    record({"DEC": ({"D"}, {"R"})})
    record()
    record()
    record({"RDB": ({"I", "Key", "R"}, {"Data"})})
    record()
    record({"RDB": ({"Key", "R"}, {"Data"})})
    del current["PRE"], current["ENC"]
    record({"PRE'": ({"In"}, {"D"})})
    del current["DEC"], current["RDB"]
    record({"RDB'": ({"D", "Key"}, {"Data"})})
    return after


def interfaces_of(system: System) -> dict:
    """Component name to (inputs, outputs) of `system`."""
    return {c.name: (c.inputs, c.outputs) for c in system.components}

