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
`round_trip.py`
Invariant relating an entry stream to its encoded-then-decoded copy.
"""

from dataclasses import dataclass

from archrefine.constants import DEFAULT_MODULUS
from archrefine.corpus.codec import delta_star, rho_star
from archrefine.invariants.base import Invariant
from archrefine.streams import Valuation


@dataclass(frozen=True)
class RoundTripInvariant(Invariant):
    """`target` carries ρ*_∅(Δ*_∅(source)), delayed by `lag` ticks.

    The encoded and decoded histories are computed interval by interval
    with running databases, so the flattened target history equals the
    round trip of the flattened source history, chunked like the source.
    With `target == source` and `lag == 0` the invariant states
    l(I) = ρ*_∅(Δ*_∅(l(I))).

    Args:
        source (str): Entry channel.
        target (str): Channel carrying the round trip.
        modulus (int): Size of the data domain.
        lag (int): Ticks between a source interval and its round trip.
    """

    source: str = "I"
    target: str = "I"
    modulus: int = DEFAULT_MODULUS
    lag: int = 0

    def __post_init__(self):
        if self.lag < 0:
            raise ValueError("Lag must be non-negative.")
        if self.target == self.source and self.lag:
            raise ValueError("A channel cannot lag behind itself.")

    @property
    def channels(self) -> frozenset:
        return frozenset([self.source, self.target])

    @property
    def derives(self) -> frozenset:
        if self.target == self.source:
            return frozenset()
        return frozenset([self.target])

    def initial(self):
        return (((),) * self.lag, (), ())

    def _expected(self, monitor, valuation: Valuation) -> tuple:
        pending, encoder_db, decoder_db = monitor
        pending = pending + (valuation[self.source],)
        due, pending = pending[0], pending[1:]
        encoded = delta_star(dict(encoder_db), due, self.modulus)
        decoded = rho_star(dict(decoder_db), encoded, self.modulus)
        encoder = dict(encoder_db)
        encoder.update(due)
        decoder = dict(decoder_db)
        decoder.update(decoded)
        return decoded, (
            pending,
            tuple(sorted(encoder.items())),
            tuple(sorted(decoder.items())),
        )

    def derive(self, monitor, valuation: Valuation) -> Valuation:
        if self.target == self.source:
            return Valuation()
        expected, _ = self._expected(monitor, valuation)
        return Valuation({self.target: expected})

    def advance(self, monitor, valuation: Valuation) -> tuple:
        expected, monitor = self._expected(monitor, valuation)
        return valuation[self.target] == expected, monitor
