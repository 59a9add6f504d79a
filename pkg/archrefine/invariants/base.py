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
`base.py`
Base class of prefix-closed invariants over channel histories.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import fields

from archrefine.streams import NamedStreamTuple, Valuation, freeze

LOGGER = logging.getLogger(__name__)


class Invariant(ABC):
    """Safety predicate over prefixes of a channel history l.

    An invariant is evaluated incrementally by a monitor: `initial()` gives
    the monitor state for the empty prefix and `advance(monitor, valuation)`
    consumes one tick, returning whether the extended prefix still satisfies
    the invariant. Invariants that fix some channels as a function of the
    others list them in `derives` and compute them in `derive`.

    Subclasses are frozen dataclasses named `<Name>Invariant` in
    `archrefine.invariants.<name>`.
    """

    @property
    @abstractmethod
    def channels(self) -> frozenset:
        """Channels the invariant talks about."""
        raise NotImplementedError

    @property
    def derives(self) -> frozenset:
        """Channels computed from the others."""
        return frozenset()

    @abstractmethod
    def initial(self):
        """Monitor state of the empty prefix."""
        raise NotImplementedError

    @abstractmethod
    def advance(self, monitor, valuation: Valuation) -> tuple:
        """Consume one tick over `channels`; returns (holds, next monitor)."""
        raise NotImplementedError

    def derive(self, monitor, valuation: Valuation) -> Valuation:
        """Values of `derives` at this tick, given the other channels."""
        return Valuation()

    def holds(self, history: NamedStreamTuple) -> bool:
        """Evaluate the invariant on every prefix of `history`."""
        monitor = self.initial()
        for tick in range(history.tick_len):
            ok, monitor = self.advance(
                monitor, history.at(tick).restrict(self.channels)
            )
            if not ok:
                return False
        return True

    @classmethod
    def library_name(cls) -> str:
        """Name used in script files (`RoundTrip`)."""
        name = cls.__name__
        return name[: -len("Invariant")] if name.endswith("Invariant") else name

    @classmethod
    def from_params(cls, **params) -> "Invariant":
        """Instantiate from parsed parameters (lists become tuples)."""
        return cls(**{key: freeze(value) for key, value in params.items()})

    def params(self) -> dict:
        """Parameters in declaration order."""
        return {f.name: getattr(self, f.name) for f in fields(self)}  # type: ignore[arg-type]

    @property
    def name(self) -> str:
        """Short human-readable description."""
        args = ", ".join(f"{k}={v}" for k, v in self.params().items())
        return f"{self.library_name()}({args})"
