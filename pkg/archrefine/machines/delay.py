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
`delay.py`
Unit-delay identity machine.
"""

from dataclasses import dataclass

from archrefine.machines.base import LibraryMachine
from archrefine.streams import Valuation


@dataclass(frozen=True)
class DelayMachine(LibraryMachine):
    """Copies the interval received on `input` at tick t to `output` at t+1.

    Args:
        input (str): Input channel.
        output (str): Output channel.
    """

    input: str
    output: str

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
        return (valuation[self.input],)
