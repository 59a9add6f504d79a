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
`database.py`
Key/value store answering queries with one tick of latency.
"""

import logging
from dataclasses import dataclass

from archrefine.corpus.codec import update
from archrefine.machines.base import LibraryMachine
from archrefine.streams import Valuation

LOGGER = logging.getLogger(__name__)

STORES_FIRST = "stores-first"
INTERLEAVED = "interleaved"
ORDERINGS = (STORES_FIRST, INTERLEAVED)


@dataclass(frozen=True)
class DatabaseMachine(LibraryMachine):
    """Stores (key, datum) entries and answers key queries.

    Every tick the machine applies the store entries that are due, then
    answers each query `k` with the datum stored under `k`, emitted on the
    next tick. Unset keys are not answered.

    Args:
        store (str): Channel carrying (key, datum) entries.
        query (str): Channel carrying keys.
        answer (str): Channel carrying answered data.
        delay (int): Number of ticks a store entry spends in an internal
            pipeline before it is applied.
        ordering (str): 'stores-first', or 'interleaved' to let each tick
            answer queries before or after the stores, nondeterministically.
    """

    store: str = "I"
    query: str = "Key"
    answer: str = "Data"
    delay: int = 0
    ordering: str = STORES_FIRST

    def __post_init__(self):
        if self.ordering not in ORDERINGS:
            raise ValueError(
                f"Unknown ordering {self.ordering}, expected one of {ORDERINGS}."
            )
        if self.delay < 0:
            raise ValueError("Delay must be non-negative.")

    @property
    def inputs(self) -> frozenset:
        return frozenset([self.store, self.query])

    @property
    def outputs(self) -> frozenset:
        return frozenset([self.answer])

    def start(self):
        return ((), ((),) * self.delay, ())

    def emit(self, state) -> tuple:
        return (Valuation({self.answer: state[2]}),)

    def step(self, state, emission, valuation: Valuation) -> tuple:
        items, pipeline, _ = state
        pipeline = pipeline + (valuation[self.store],)
        due, pipeline = pipeline[0], pipeline[1:]
        database = dict(items)
        stored = dict(database)
        for key, datum in due:
            stored = update(stored, key, datum)
        queries = valuation[self.query]
        after = self._answer(stored, queries)
        successors = [(tuple(sorted(stored.items())), pipeline, after)]
        if self.ordering == INTERLEAVED:
            before = self._answer(database, queries)
            if before != after:
                successors.append((tuple(sorted(stored.items())), pipeline, before))
        return tuple(successors)

    @staticmethod
    def _answer(database: dict, queries: tuple) -> tuple:
        return tuple(database[key] for key in queries if key in database)
