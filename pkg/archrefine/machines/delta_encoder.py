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
`delta_encoder.py`
Running difference encoder.
"""

from dataclasses import dataclass

from archrefine.constants import DEFAULT_MODULUS
from archrefine.corpus.codec import delta_star
from archrefine.machines.base import LibraryMachine
from archrefine.streams import Valuation


@dataclass(frozen=True)
class DeltaEncoderMachine(LibraryMachine):
    """Replaces each entry (k, d) by (k, Δ(M(k), d)) one tick later.

    The state holds the database M of the last datum seen per key, so the
    flattened output is `delta_star(∅, flattened input)`.

    Args:
        input (str): Plain entry channel.
        output (str): Encoded entry channel.
        modulus (int): Size of the data domain.
    """

    input: str = "I"
    output: str = "D"
    modulus: int = DEFAULT_MODULUS

    @property
    def inputs(self) -> frozenset:
        return frozenset([self.input])

    @property
    def outputs(self) -> frozenset:
        return frozenset([self.output])

    def start(self):
        return ((), ())

    def emit(self, state) -> tuple:
        return (Valuation({self.output: state[1]}),)

    def step(self, state, emission, valuation: Valuation) -> tuple:
        database = dict(state[0])
        entries = valuation[self.input]
        encoded = delta_star(database, entries, self.modulus)
        for key, datum in entries:
            database[key] = datum
        return ((tuple(sorted(database.items())), encoded),)
