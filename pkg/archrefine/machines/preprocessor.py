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
`preprocessor.py`
Per-entry preprocessing of raw (key, datum) measurements.
"""

from dataclasses import dataclass

from archrefine.constants import DEFAULT_MODULUS
from archrefine.machines.base import LibraryMachine
from archrefine.streams import Valuation


def preprocess(datum: int, modulus: int = DEFAULT_MODULUS) -> int:
    """Preprocessing function applied to every datum."""
    return (datum + 1) % modulus


@dataclass(frozen=True)
class PreprocessorMachine(LibraryMachine):
    """Maps every entry (k, d) received at tick t to (k, f(d)) at tick t+1.

    Args:
        input (str): Raw entry channel.
        output (str): Preprocessed entry channel.
        modulus (int): Size of the data domain.
    """

    input: str = "In"
    output: str = "I"
    modulus: int = DEFAULT_MODULUS

    @property
    def inputs(self) -> frozenset:
        return frozenset([self.input])

    @property
    def outputs(self) -> frozenset:
        return frozenset([self.output])

    def start(self):
        return ()

    def emit(self, state) -> tuple:
        return (Valuation({self.output: state}),)

    def step(self, state, emission, valuation: Valuation) -> tuple:
        return (
            tuple(
                (key, preprocess(datum, self.modulus))
                for key, datum in valuation[self.input]
            ),
        )
