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
`delta_decoder.py`
Running difference decoder.
"""

from dataclasses import dataclass

from archrefine.constants import DEFAULT_MODULUS
from archrefine.corpus.codec import lookup, rho
from archrefine.machines.base import LibraryMachine
from archrefine.streams import Valuation


@dataclass(frozen=True)
class DeltaDecoderMachine(LibraryMachine):
    """Replaces each entry (k, δ) by (k, ρ(M(k), δ)) one tick later.

    Args:
        input (str): Encoded entry channel.
        output (str): Restored entry channel.
        modulus (int): Size of the data domain.
        skew (int): Added to every restored datum; nonzero values give a
            faulty decoder.
    """

    input: str = "D"
    output: str = "R"
    modulus: int = DEFAULT_MODULUS
    skew: int = 0

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
        decoded = []
        for key, diff in valuation[self.input]:
            datum = (rho(lookup(database, key), diff, self.modulus) + self.skew) % (
                self.modulus
            )
            decoded.append((key, datum))
            database[key] = datum
        return ((tuple(sorted(database.items())), tuple(decoded)),)
