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
`codec.py`
Difference encoding of database updates.

Data values are residues modulo `modulus`. A database is a mapping from keys
to data; a missing key holds the distinguished value `BOTTOM`, which is never
transmitted on a channel.
"""

import enum
from collections.abc import Mapping, Sequence

from archrefine.constants import DEFAULT_MODULUS


class Bottom(enum.Enum):
    """The 'no data' value of an unset database key."""

    BOTTOM = "⊥"

    def __repr__(self) -> str:
        return "⊥"


BOTTOM = Bottom.BOTTOM


def lookup(database: Mapping, key):
    """M(k), with `BOTTOM` for unset keys."""
    return database.get(key, BOTTOM)


def update(database: Mapping, key, datum) -> dict:
    """M[k↦d] as a new mapping."""
    updated = dict(database)
    updated[key] = datum
    return updated


def delta(old, new: int, modulus: int = DEFAULT_MODULUS) -> int:
    """Difference between an old and a new datum, Δ(⊥, d) = d."""
    if old is BOTTOM:
        return new
    return (new - old) % modulus


def rho(old, diff: int, modulus: int = DEFAULT_MODULUS) -> int:
    """Restore a datum from the old one and a difference, ρ(⊥, δ) = δ."""
    if old is BOTTOM:
        return diff
    return (old + diff) % modulus


def delta_star(
    database: Mapping, entries: Sequence, modulus: int = DEFAULT_MODULUS
) -> tuple:
    """Encode a sequence of (key, datum) entries as running differences.

    Each entry is encoded against the value the key held before it; the
    database is updated with the plain datum afterwards.
    """
    encoded = []
    for key, datum in entries:
        encoded.append((key, delta(lookup(database, key), datum, modulus)))
        database = update(database, key, datum)
    return tuple(encoded)


def rho_star(
    database: Mapping, entries: Sequence, modulus: int = DEFAULT_MODULUS
) -> tuple:
    """Decode a sequence of (key, difference) entries, inverse of `delta_star`."""
    decoded = []
    for key, diff in entries:
        datum = rho(lookup(database, key), diff, modulus)
        decoded.append((key, datum))
        database = update(database, key, datum)
    return tuple(decoded)
