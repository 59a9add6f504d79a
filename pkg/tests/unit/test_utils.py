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

from archrefine.errors import BudgetError
from archrefine.invariants.round_trip import RoundTripInvariant
from archrefine.machines.delta_encoder import DeltaEncoderMachine
from archrefine.utils import (
    caml_to_snake,
    capitalize,
    fmt_traceback,
    get_budget,
    get_human_time,
    get_invariant_cls,
    get_machine_cls,
    import_dynamic,
    load_config,
    load_trace,
    snake_to_caml,
)

from .test_stubs import CTX, get_sample_path, stream


class TestUtils(unittest.TestCase):
    def test_get_human_time(self):
        # Timezones
        tz_UTC = "UTC"
        tz_Paris = "Europe/Paris"
        tz_Chicago = "America/Chicago"

        # Timestamp 1
        timestamp_20230615T16 = 1686845838
        utc_time_20230615T16 = "2023-06-15T16:17:18+00:00"
        paris_time_20230615T16 = "2023-06-15T18:17:18+02:00"
        chicago_time_20230615T16 = "2023-06-15T11:17:18-05:00"

        # Timestamp 2
        timestamp_20231215T16 = 1702660513.987654
        utc_time_20231215T16 = "2023-12-15T17:15:13.987654+00:00"
        chicago_time_20231215T16 = "2023-12-15T11:15:13.987654-06:00"

        self.assertEqual(
            get_human_time(timestamp_20230615T16, timezone=tz_UTC), utc_time_20230615T16
        )
        self.assertEqual(
            get_human_time(timestamp_20230615T16, timezone=tz_Paris),
            paris_time_20230615T16,
        )
        self.assertEqual(
            get_human_time(timestamp_20230615T16, timezone=tz_Chicago),
            chicago_time_20230615T16,
        )
        self.assertEqual(
            get_human_time(timestamp_20231215T16, timezone=tz_UTC), utc_time_20231215T16
        )
        self.assertEqual(
            get_human_time(timestamp_20231215T16, timezone=tz_Chicago),
            chicago_time_20231215T16,
        )

    def test_get_budget_defaults(self):
        budget = get_budget()
        self.assertEqual(budget["check"], "syntactic")
        self.assertEqual(budget["depth"], 5)
        self.assertEqual(budget["interval_bound"], 1)
        self.assertEqual(budget["mode"], "exhaustive")

    def test_get_budget_precedence(self):
        config = load_config(get_sample_path("toy", "config.yaml"), ctx=CTX)
        budget = get_budget(config)
        self.assertEqual(budget["depth"], 3)
        budget = get_budget(config, depth=7, seed=None)
        self.assertEqual(budget["depth"], 7)
        self.assertEqual(budget["seed"], 0)

    def test_get_budget_unknown_key(self):
        with self.assertLogs("archrefine.utils", level="WARNING"):
            budget = get_budget({"budget": {"colour": "red", "samples": "12"}})
        self.assertNotIn("colour", budget)
        self.assertEqual(budget["samples"], 12)

    def test_load_config_missing_env(self):
        with self.assertRaises(KeyError):
            load_config(get_sample_path("toy", "config.yaml"), ctx={"HOME": "/root"})

    def test_load_trace(self):
        trace = load_trace(get_sample_path("toy", "relay_trace.json"))
        self.assertEqual(trace, stream(X=[[1], [], [0], []]))
        trace = load_trace('{"trace": {}, "ticks": 3}')
        self.assertEqual(trace.tick_len, 3)
        trace = load_trace("X: [[1], []]")
        self.assertEqual(trace, stream(X=[[1], []]))

    def test_get_machine_cls(self):
        self.assertIs(get_machine_cls("DeltaEncoder"), DeltaEncoderMachine)
        self.assertEqual(get_machine_cls("Mealy").library_name(), "Mealy")
        with self.assertWarns(ImportWarning):
            self.assertIsNone(get_machine_cls("Nope"))

    def test_get_invariant_cls(self):
        self.assertIs(get_invariant_cls("RoundTrip"), RoundTripInvariant)
        with self.assertWarns(ImportWarning):
            self.assertIsNone(get_invariant_cls("archrefine.invariants.silent.Nope"))

    def test_import_dynamic(self):
        self.assertIs(
            import_dynamic("archrefine.errors", "BudgetError", prefix="class"),
            BudgetError,
        )
        with self.assertWarns(ImportWarning):
            import_dynamic("archrefine.nope", "Nope", prefix="class")

    def test_names(self):
        self.assertEqual(capitalize("deltaEncoder"), "DeltaEncoder")
        self.assertEqual(snake_to_caml("round_trip"), "roundTrip")
        self.assertEqual(caml_to_snake("DeltaEncoder"), "delta_encoder")

    def test_fmt_traceback(self):
        exc = BudgetError("too many\ninputs")
        self.assertEqual(fmt_traceback(exc), "BudgetError: too many inputs")


if __name__ == "__main__":
    unittest.main()
