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
`streams.py`
Finite prefixes of timed streams and named stream tuples.

A timed stream is an infinite sequence of intervals, each carrying a finite
sequence of messages. Only finite prefixes are ever materialized: a
`TimedStreamPrefix` of length `n` holds intervals `0 .. n-1`.
"""

import itertools
from collections.abc import Hashable, Iterable, Iterator, Mapping
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Optional, Union

from archrefine.errors import (
    JoinError,
    OutOfRangeError,
    StreamError,
    UnknownChannelError,
)

Message = Hashable
Interval = tuple  # tuple[Message, ...]


def freeze(value: Any) -> Any:
    """Turn lists (as found in JSON / YAML documents) into tuples, recursively.

    Args:
        value (obj): Message, interval or nested list.

    Returns:
        obj: Hashable equivalent of `value`.
    """
    if isinstance(value, (list, tuple)):
        return tuple(freeze(item) for item in value)
    return value


def thaw(value: Any) -> Any:
    """Inverse of `freeze`: turn tuples into lists for serialization."""
    if isinstance(value, (list, tuple)):
        return [thaw(item) for item in value]
    return value


@dataclass(frozen=True)
class Alphabet:
    """A declared finite message alphabet."""

    name: str
    messages: tuple

    def __post_init__(self):
        if not self.name:
            raise StreamError("Alphabet name must not be empty.")
        messages = tuple(freeze(m) for m in self.messages)
        if len(set(messages)) != len(messages):
            raise StreamError(f"Alphabet {self.name} declares duplicate messages.")
        object.__setattr__(self, "messages", messages)

    def __contains__(self, message) -> bool:
        return message in self.messages

    def __len__(self) -> int:
        return len(self.messages)

    def intervals(self, bound: int) -> tuple:
        """All intervals with at most `bound` messages from this alphabet."""
        return _intervals(self.messages, bound)


@lru_cache(maxsize=256)
def _intervals(messages: tuple, bound: int) -> tuple:
    result = []
    for length in range(bound + 1):
        result.extend(itertools.product(messages, repeat=length))
    return tuple(result)


@dataclass(frozen=True)
class Channel:
    """A channel identifier together with the alphabet it carries."""

    name: str
    alphabet: Alphabet

    def __post_init__(self):
        if not self.name:
            raise StreamError("Channel name must not be empty.")

    def admits(self, interval: Interval) -> bool:
        """Check that every message of `interval` is in the alphabet."""
        return all(message in self.alphabet for message in interval)


class Valuation(Mapping):
    """Immutable, hashable map from channel names to one interval each.

    A valuation holds one tick's slice of a named stream tuple.
    """

    __slots__ = ("_data", "_hash")

    def __init__(self, data: Optional[Union[Mapping, Iterable]] = None):
        items = dict(data or {})
        self._data = {name: freeze(interval) for name, interval in items.items()}
        self._hash = hash(frozenset(self._data.items()))

    def __getitem__(self, name: str) -> Interval:
        return self._data[name]

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self._data))

    def __len__(self) -> int:
        return len(self._data)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, Valuation):
            return self._hash == other._hash and self._data == other._data
        if isinstance(other, Mapping):
            return self._data == dict(other.items())
        return NotImplemented

    def __repr__(self) -> str:
        body = ", ".join(f"{name}={list(self._data[name])}" for name in self)
        return f"Valuation({body})"

    def restrict(self, channels: Iterable[str]) -> "Valuation":
        """Keep only `channels` (missing ones are skipped)."""
        return Valuation({c: self._data[c] for c in channels if c in self._data})

    def merge(self, other: Mapping) -> "Valuation":
        """Union of two valuations; `other` wins on shared channels."""
        data = dict(self._data)
        data.update(other)
        return Valuation(data)

    def rename(self, mapping: Mapping[str, str]) -> "Valuation":
        """Rename channels according to `mapping` (others unchanged)."""
        return Valuation({mapping.get(c, c): v for c, v in self._data.items()})

    def complete(self, channels: Iterable[str]) -> "Valuation":
        """Restrict to `channels`, filling missing ones with empty intervals."""
        return Valuation({c: self._data.get(c, ()) for c in channels})


EMPTY_VALUATION = Valuation()


@dataclass(frozen=True)
class TimedStreamPrefix:
    """The first `length` intervals of a timed stream."""

    intervals: tuple = ()

    def __post_init__(self):
        object.__setattr__(
            self, "intervals", tuple(freeze(i) for i in self.intervals)
        )

    @classmethod
    def empty(cls, length: int) -> "TimedStreamPrefix":
        """Prefix of `length` empty intervals."""
        return cls(((),) * length)

    @property
    def length(self) -> int:
        """Tick count."""
        return len(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __getitem__(self, tick: int) -> Interval:
        return self.intervals[tick]

    def __add__(self, other: "TimedStreamPrefix") -> "TimedStreamPrefix":
        return TimedStreamPrefix(self.intervals + other.intervals)

    def truncate(self, ticks: int) -> "TimedStreamPrefix":
        """First `ticks` intervals (x↓ticks)."""
        if not 0 <= ticks <= self.length:
            raise OutOfRangeError(
                f"Cannot truncate a prefix of length {self.length} to {ticks}."
            )
        return TimedStreamPrefix(self.intervals[:ticks])

    def flatten(self) -> tuple:
        """Concatenation of all intervals."""
        return tuple(itertools.chain.from_iterable(self.intervals))

    def shift(self, lag: int) -> "TimedStreamPrefix":
        """Delay by `lag` ticks, keeping the prefix length."""
        if lag < 0:
            raise StreamError("Lag must be non-negative.")
        delayed = ((),) * lag + self.intervals
        return TimedStreamPrefix(delayed[: self.length])


def head_tail(messages: tuple) -> tuple:
    """Split a message sequence `a & r` into its head `a` and rest `r`.

    Raises:
        StreamError: If the sequence is empty.
    """
    if not messages:
        raise StreamError("Cannot split an empty message sequence.")
    return messages[0], tuple(messages[1:])


def rechunk(messages: tuple, shape: TimedStreamPrefix) -> TimedStreamPrefix:
    """Distribute `messages` over intervals sized like those of `shape`.

    Used to lift length-preserving sequence functions to timed prefixes.
    """
    if len(messages) != len(shape.flatten()):
        raise StreamError("Message count does not match the prefix shape.")
    intervals, offset = [], 0
    for interval in shape.intervals:
        intervals.append(tuple(messages[offset : offset + len(interval)]))
        offset += len(interval)
    return TimedStreamPrefix(tuple(intervals))


@dataclass(frozen=True)
class NamedStreamTuple:
    """Finite map from channel names to prefixes of a common length."""

    entries: tuple
    tick_len: int

    def __post_init__(self):
        entries = tuple(sorted(dict(self.entries).items()))
        for name, prefix in entries:
            if not isinstance(prefix, TimedStreamPrefix):
                raise StreamError(f"Entry {name} is not a TimedStreamPrefix.")
            if prefix.length != self.tick_len:
                raise StreamError(
                    f"Entry {name} has {prefix.length} intervals, "
                    f"expected {self.tick_len}."
                )
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(
        cls, mapping: Mapping, tick_len: Optional[int] = None
    ) -> "NamedStreamTuple":
        """Build a tuple from `{name: prefix or list of intervals}`.

        Args:
            mapping (dict): Channel name to `TimedStreamPrefix` or nested lists.
            tick_len (int, optional): Required when `mapping` is empty.

        Returns:
            NamedStreamTuple: The tuple.
        """
        entries = {}
        for name, value in mapping.items():
            if not isinstance(value, TimedStreamPrefix):
                value = TimedStreamPrefix(tuple(value))
            entries[name] = value
        if tick_len is None:
            lengths = {p.length for p in entries.values()}
            if len(lengths) != 1:
                raise StreamError("Cannot infer the tick length of the tuple.")
            tick_len = lengths.pop()
        return cls(tuple(entries.items()), tick_len)

    @classmethod
    def empty(cls, channels: Iterable[str], tick_len: int) -> "NamedStreamTuple":
        """Tuple whose channels carry only empty intervals."""
        prefix = TimedStreamPrefix.empty(tick_len)
        return cls(tuple((c, prefix) for c in channels), tick_len)

    @classmethod
    def from_valuations(
        cls, valuations: Iterable[Mapping], channels: Iterable[str]
    ) -> "NamedStreamTuple":
        """Assemble a tuple from per-tick valuations (missing entries empty)."""
        valuations = list(valuations)
        channels = sorted(channels)
        entries = {
            c: TimedStreamPrefix(tuple(v.get(c, ()) for v in valuations))
            for c in channels
        }
        return cls(tuple(entries.items()), len(valuations))

    @property
    def domain(self) -> frozenset:
        """Channel names of the tuple."""
        return frozenset(name for name, _ in self.entries)

    def __getitem__(self, name: str) -> TimedStreamPrefix:
        for channel, prefix in self.entries:
            if channel == name:
                return prefix
        raise UnknownChannelError(f"Channel {name} not in {sorted(self.domain)}.")

    def __contains__(self, name: str) -> bool:
        return name in self.domain

    def at(self, tick: int) -> Valuation:
        """Valuation of all channels at `tick`."""
        if not 0 <= tick < self.tick_len:
            raise OutOfRangeError(f"Tick {tick} outside [0, {self.tick_len}).")
        return Valuation({name: prefix[tick] for name, prefix in self.entries})

    def valuations(self) -> list:
        """Per-tick valuations."""
        return [self.at(t) for t in range(self.tick_len)]

    def to_dict(self) -> dict:
        """Serializable form `{channel: [[message, ...], ...]}`."""
        return {name: thaw(prefix.intervals) for name, prefix in self.entries}

    def __str__(self) -> str:
        parts = []
        for name, prefix in self.entries:
            ticks = ",".join(
                "⟨" + ",".join(_fmt(m) for m in interval) + "⟩"
                for interval in prefix.intervals
            )
            parts.append(f"{name}↦⟨{ticks}⟩")
        return "{" + ", ".join(parts) + "}"


def _fmt(message) -> str:
    if isinstance(message, tuple):
        return "(" + ",".join(_fmt(m) for m in message) + ")"
    return str(message)


def truncate(x, ticks: int):
    """x↓ticks for a prefix or a named stream tuple.

    Raises:
        OutOfRangeError: If `ticks` exceeds the available prefix length.
    """
    if isinstance(x, TimedStreamPrefix):
        return x.truncate(ticks)
    if not 0 <= ticks <= x.tick_len:
        raise OutOfRangeError(
            f"Cannot truncate a tuple of length {x.tick_len} to {ticks}."
        )
    return NamedStreamTuple(
        tuple((name, prefix.truncate(ticks)) for name, prefix in x.entries), ticks
    )


def restrict(x: NamedStreamTuple, channels: Iterable[str]) -> NamedStreamTuple:
    """x↾channels.

    Raises:
        UnknownChannelError: If a channel is outside the tuple's domain.
    """
    channels = frozenset(channels)
    unknown = channels - x.domain
    if unknown:
        raise UnknownChannelError(
            f"Cannot restrict to unknown channels {sorted(unknown)}."
        )
    return NamedStreamTuple(
        tuple((name, prefix) for name, prefix in x.entries if name in channels),
        x.tick_len,
    )


def flatten(x: TimedStreamPrefix) -> tuple:
    """Concatenation of all intervals of a prefix."""
    return x.flatten()


def join(x: NamedStreamTuple, y: NamedStreamTuple) -> NamedStreamTuple:
    """Disjoint union of two tuples of the same length.

    Raises:
        JoinError: On overlapping domains or unequal lengths.
    """
    overlap = x.domain & y.domain
    if overlap:
        raise JoinError(f"Cannot join tuples sharing channels {sorted(overlap)}.")
    if x.tick_len != y.tick_len:
        raise JoinError(
            f"Cannot join tuples of lengths {x.tick_len} and {y.tick_len}."
        )
    return NamedStreamTuple(x.entries + y.entries, x.tick_len)


@dataclass(frozen=True)
class IntervalUniverse:
    """Bounded interval space per channel: alphabets plus a message bound.

    Args:
        alphabets (tuple): Pairs (channel name, Alphabet).
        bound (int): Maximum number of messages per interval.
    """

    alphabets: tuple
    bound: int

    def __post_init__(self):
        if self.bound < 0:
            raise StreamError("Interval bound must be non-negative.")
        object.__setattr__(
            self, "alphabets", tuple(sorted(dict(self.alphabets).items()))
        )

    @classmethod
    def of(cls, channels, bound: int) -> "IntervalUniverse":
        """Build from `Channel` objects or a `{name: Alphabet}` mapping."""
        if isinstance(channels, Mapping):
            pairs = tuple(channels.items())
        else:
            pairs = tuple((c.name, c.alphabet) for c in channels)
        return cls(pairs, bound)

    def alphabet(self, channel: str) -> Alphabet:
        """Alphabet of `channel`.

        Raises:
            UnknownChannelError: If no alphabet is declared for the channel.
        """
        for name, alphabet in self.alphabets:
            if name == channel:
                return alphabet
        raise UnknownChannelError(f"No alphabet declared for channel {channel}.")

    def intervals(self, channel: str) -> tuple:
        """All intervals of `channel` within the bound."""
        return self.alphabet(channel).intervals(self.bound)

    def size(self, channels: Iterable[str]) -> int:
        """Number of valuations over `channels` for one tick."""
        count = 1
        for channel in channels:
            count *= len(self.intervals(channel))
        return count

    def valuations(self, channels: Iterable[str]) -> list:
        """All valuations over `channels` for one tick."""
        channels = sorted(channels)
        choices = [self.intervals(c) for c in channels]
        return [
            Valuation(dict(zip(channels, combo)))
            for combo in itertools.product(*choices)
        ]

    def with_bound(self, bound: int) -> "IntervalUniverse":
        """Same alphabets, different message bound."""
        return IntervalUniverse(self.alphabets, bound)
