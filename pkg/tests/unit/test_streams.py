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

import unittest

from hypothesis import given
from hypothesis import strategies as st

from archrefine.errors import (
    JoinError,
    OutOfRangeError,
    StreamError,
    UnknownChannelError,
)
from archrefine.streams import (
    Alphabet,
    Channel,
    IntervalUniverse,
    NamedStreamTuple,
    TimedStreamPrefix,
    Valuation,
    flatten,
    head_tail,
    join,
    rechunk,
    restrict,
    truncate,
)

from .test_stubs import BIT, stream

intervals = st.lists(st.sampled_from([0, 1]), max_size=2).map(tuple)
prefixes = st.lists(intervals, max_size=6).map(lambda i: TimedStreamPrefix(tuple(i)))


@st.composite
def tuples(draw, channels=("X", "Y")):
    ticks = draw(st.integers(min_value=0, max_value=5))
    entries = {
        c: draw(st.lists(intervals, min_size=ticks, max_size=ticks)) for c in channels
    }
    return NamedStreamTuple.of(entries, tick_len=ticks)


class TestAlphabet(unittest.TestCase):
    def test_intervals(self):
        self.assertEqual(BIT.intervals(1), ((), (0,), (1,)))
        self.assertEqual(len(BIT.intervals(2)), 7)
        self.assertEqual(BIT.intervals(0), ((),))

    def test_duplicate_messages(self):
        with self.assertRaises(StreamError):
            Alphabet("Twice", (1, 1))

    def test_tuple_messages_are_frozen(self):
        entry = Alphabet("Entry", [["k0", 0], ["k0", 1]])
        self.assertIn(("k0", 1), entry)
        self.assertEqual(len(entry), 2)

    def test_channel_admits(self):
        channel = Channel("X", BIT)
        self.assertTrue(channel.admits((0, 1, 1)))
        self.assertTrue(channel.admits(()))
        self.assertFalse(channel.admits((2,)))


class TestValuation(unittest.TestCase):
    def test_equality_and_hash(self):
        first = Valuation({"X": [1], "Y": []})
        second = Valuation({"Y": (), "X": (1,)})
        self.assertEqual(first, second)
        self.assertEqual(hash(first), hash(second))
        self.assertEqual(first, {"X": (1,), "Y": ()})
        self.assertEqual(len({first, second}), 1)

    def test_restrict_merge_rename(self):
        valuation = Valuation({"X": (1,), "Y": (0,)})
        self.assertEqual(valuation.restrict(["X", "Q"]), {"X": (1,)})
        self.assertEqual(valuation.merge({"Y": ()}), {"X": (1,), "Y": ()})
        self.assertEqual(valuation.rename({"X": "Z"}), {"Z": (1,), "Y": (0,)})

    def test_complete(self):
        valuation = Valuation({"X": (1,), "Y": (0,)})
        self.assertEqual(valuation.complete(["X", "Z"]), {"X": (1,), "Z": ()})

    def test_iteration_is_sorted(self):
        self.assertEqual(list(Valuation({"b": (), "a": ()})), ["a", "b"])


class TestTimedStreamPrefix(unittest.TestCase):
    def test_truncate(self):
        prefix = TimedStreamPrefix(((1,), (), (0, 1)))
        self.assertEqual(prefix.truncate(2), TimedStreamPrefix(((1,), ())))
        self.assertEqual(prefix.truncate(0).length, 0)
        with self.assertRaises(OutOfRangeError):
            prefix.truncate(4)

    def test_flatten_and_shift(self):
        prefix = TimedStreamPrefix(((1,), (), (0, 1)))
        self.assertEqual(flatten(prefix), (1, 0, 1))
        self.assertEqual(prefix.shift(1), TimedStreamPrefix(((), (1,), ())))
        with self.assertRaises(StreamError):
            prefix.shift(-1)

    def test_head_tail(self):
        self.assertEqual(head_tail((1, 0, 1)), (1, (0, 1)))
        with self.assertRaises(StreamError):
            head_tail(())

    def test_rechunk(self):
        shape = TimedStreamPrefix(((0,), (), (0, 0)))
        self.assertEqual(
            rechunk((1, 2, 3), shape), TimedStreamPrefix(((1,), (), (2, 3)))
        )
        with self.assertRaises(StreamError):
            rechunk((1,), shape)

    @given(prefixes, st.integers(min_value=0, max_value=6), st.integers(min_value=0, max_value=6))
    def test_truncate_composes(self, prefix, first, second):
        first, second = min(first, prefix.length), min(second, prefix.length)
        self.assertEqual(
            prefix.truncate(first).truncate(min(first, second)),
            prefix.truncate(min(first, second)),
        )

    @given(prefixes, prefixes)
    def test_flatten_distributes_over_concatenation(self, first, second):
        self.assertEqual(flatten(first + second), flatten(first) + flatten(second))

    @given(prefixes)
    def test_rechunk_inverts_flatten(self, prefix):
        self.assertEqual(rechunk(flatten(prefix), prefix), prefix)

    @given(prefixes, st.integers(min_value=0, max_value=8))
    def test_shift_keeps_length(self, prefix, lag):
        shifted = prefix.shift(lag)
        self.assertEqual(shifted.length, prefix.length)
        lead = min(lag, prefix.length)
        self.assertEqual(shifted.truncate(lead), TimedStreamPrefix.empty(lead))


class TestNamedStreamTuple(unittest.TestCase):
    def test_of_and_str(self):
        x = stream(Z=[[], [], [1], []])
        self.assertEqual(x.tick_len, 4)
        self.assertEqual(str(x), "{Z↦⟨⟨⟩,⟨⟩,⟨1⟩,⟨⟩⟩}")

    def test_str_of_entries(self):
        x = stream(I=[[("k0", 1)]])
        self.assertEqual(str(x), "{I↦⟨⟨(k0,1)⟩⟩}")

    def test_length_mismatch(self):
        with self.assertRaises(StreamError):
            stream(X=[[1]], Y=[[], []])

    def test_empty_needs_length(self):
        with self.assertRaises(StreamError):
            NamedStreamTuple.of({})
        self.assertEqual(NamedStreamTuple.of({}, tick_len=3).tick_len, 3)

    def test_at_and_valuations(self):
        x = stream(X=[[1], []], Y=[[], [0]])
        self.assertEqual(x.at(1), {"X": (), "Y": (0,)})
        self.assertEqual(len(x.valuations()), 2)
        with self.assertRaises(OutOfRangeError):
            x.at(2)

    def test_from_valuations_fills_missing(self):
        x = NamedStreamTuple.from_valuations([{"X": (1,)}, {}], ["X", "Y"])
        self.assertEqual(x.to_dict(), {"X": [[1], []], "Y": [[], []]})

    def test_restrict_unknown(self):
        x = stream(X=[[1]])
        with self.assertRaises(UnknownChannelError):
            restrict(x, ["Y"])
        with self.assertRaises(UnknownChannelError):
            x["Y"]

    def test_join_errors(self):
        with self.assertRaises(JoinError):
            join(stream(X=[[1]]), stream(X=[[0]]))
        with self.assertRaises(JoinError):
            join(stream(X=[[1]]), stream(Y=[[0], []]))

    def test_truncate_tuple(self):
        x = stream(X=[[1], [0]], Y=[[], []])
        self.assertEqual(truncate(x, 1), stream(X=[[1]], Y=[[]]))
        with self.assertRaises(OutOfRangeError):
            truncate(x, 3)

    @given(tuples(("X",)), tuples(("Y",)))
    def test_join_then_restrict(self, x, y):
        if x.tick_len != y.tick_len:
            return
        joined = join(x, y)
        self.assertEqual(restrict(joined, ["X"]), x)
        self.assertEqual(restrict(joined, ["Y"]), y)

    @given(tuples(), st.integers(min_value=0, max_value=5))
    def test_truncate_commutes_with_restrict(self, x, ticks):
        ticks = min(ticks, x.tick_len)
        self.assertEqual(
            restrict(truncate(x, ticks), ["X"]), truncate(restrict(x, ["X"]), ticks)
        )

    @given(tuples())
    def test_valuations_round_trip(self, x):
        self.assertEqual(NamedStreamTuple.from_valuations(x.valuations(), x.domain), x)


class TestIntervalUniverse(unittest.TestCase):
    def setUp(self):
        self.universe = IntervalUniverse.of({"X": BIT, "Y": BIT}, 1)

    def test_size_and_valuations(self):
        self.assertEqual(self.universe.size(["X", "Y"]), 9)
        self.assertEqual(len(self.universe.valuations(["X", "Y"])), 9)
        self.assertEqual(self.universe.valuations([]), [Valuation()])

    def test_unknown_channel(self):
        with self.assertRaises(UnknownChannelError):
            self.universe.intervals("Z")

    def test_with_bound(self):
        self.assertEqual(self.universe.with_bound(2).size(["X"]), 7)

    def test_of_channels(self):
        universe = IntervalUniverse.of([Channel("X", BIT)], 0)
        self.assertEqual(universe.intervals("X"), ((),))

    def test_negative_bound(self):
        with self.assertRaises(StreamError):
            IntervalUniverse((), -1)


if __name__ == "__main__":
    unittest.main()
