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
`silent.py`
Invariant stating that some channels never carry a message.
"""

from dataclasses import dataclass

from archrefine.invariants.base import Invariant
from archrefine.streams import Valuation


@dataclass(frozen=True)
class SilentInvariant(Invariant):
    """Every interval on `over` is empty.

    Args:
        over (tuple): Silent channels.
    """

    over: tuple = ()

    @property
    def channels(self) -> frozenset:
        return frozenset(self.over)

    @property
    def derives(self) -> frozenset:
        return frozenset(self.over)

    def initial(self):
        return None

    def derive(self, monitor, valuation: Valuation) -> Valuation:
        return Valuation({channel: () for channel in self.over})

    def advance(self, monitor, valuation: Valuation) -> tuple:
        return all(not valuation[c] for c in self.over), None
