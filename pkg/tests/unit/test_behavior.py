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

from archrefine.behavior import (
    AdaptedMachine,
    RenamedMachine,
    TrivialBehavior,
    adapt_interface,
    add_chaotic_output,
    check_interface,
    check_time_guardedness,
    drop_inputs,
    membership,
    random_stream,
    reachable_states,
    run,
    submachine_refines,
)
from archrefine.errors import AdaptionError, BudgetError, InterfaceError
from archrefine.oracle import EnumerationBudget, enumerate_inputs
from archrefine.streams import IntervalUniverse, NamedStreamTuple
from archrefine.system import compose
from archrefine.utils import get_machine_cls

from .test_stubs import (
    BIT,
    blink,
    blink_any,
    blink_loud,
    blink_maybe,
    delay,
    random_table,
    seeded,
    stream,
)

UNIVERSE = IntervalUniverse.of({c: BIT for c in ("P", "W", "X", "Y", "Z")}, 1)


class TestRun(unittest.TestCase):
    def test_delay(self):
        outputs = run(delay("X", "Y"), stream(X=[[1], [0], []]))
        self.assertEqual(outputs, {stream(Y=[[], [1], [0]])})

    def test_trivial(self):
        trivial = TrivialBehavior()
        self.assertEqual(trivial.label, "trivial")
        outputs = run(trivial, NamedStreamTuple.empty((), 3))
        self.assertEqual(len(outputs), 1)
        self.assertEqual(next(iter(outputs)).tick_len, 3)

    def test_nondeterministic_outputs(self):
        outputs = run(blink_any(), stream(Y=[[], [], []]))
        self.assertEqual(len(outputs), 3)
        self.assertIn(stream(Z=[[], [1], []]), outputs)
        self.assertNotIn(stream(Z=[[1], [], []]), outputs)

    def test_guarded_table(self):
        outputs = run(blink(), stream(Y=[[1], [], []]))
        self.assertEqual(outputs, {stream(Z=[[], [1], []])})

    def test_fewer_ticks(self):
        outputs = run(delay("X", "Y"), stream(X=[[1], [0], []]), ticks=2)
        self.assertEqual(outputs, {stream(Y=[[], [1]])})

    def test_interface_mismatch(self):
        with self.assertRaises(InterfaceError):
            run(delay("X", "Y"), stream(Y=[[1]]))
        with self.assertRaises(InterfaceError):
            run(delay("X", "Y"), stream(X=[[1]]), ticks=2)

    def test_branch_ceiling(self):
        with self.assertRaises(BudgetError):
            run(blink_any(), stream(Y=[[], [], [], []]), ceiling=1)

    def test_membership(self):
        machine = blink_any()
        self.assertTrue(membership(machine, stream(Y=[[], []]), stream(Z=[[], [1]])))
        self.assertFalse(membership(machine, stream(Y=[[], []]), stream(Z=[[1], []])))

    def test_membership_omits_chaotic_channels(self):
        machine = add_chaotic_output(delay("X", "Y"), "W")
        self.assertEqual(machine.chaotic, frozenset(["W"]))
        x = stream(X=[[1], []])
        self.assertTrue(membership(machine, x, stream(Y=[[], [1]])))
        self.assertTrue(membership(machine, x, stream(Y=[[], [1]], W=[[0], [1]])))
        with self.assertRaises(InterfaceError):
            membership(machine, x, stream(W=[[0], [1]]))

    def test_random_stream_is_reproducible(self):
        first = random_stream(UNIVERSE, ["X", "Y"], 5, seeded(3))
        second = random_stream(UNIVERSE, ["X", "Y"], 5, seeded(3))
        self.assertEqual(first, second)
        self.assertEqual(first.domain, frozenset(["X", "Y"]))


class TestAdaption(unittest.TestCase):
    def test_add_then_remove_chaotic_output_collapses(self):
        machine = delay("X", "Y")
        widened = add_chaotic_output(machine, "W")
        self.assertIsInstance(widened, AdaptedMachine)
        self.assertIs(adapt_interface(widened, {"X"}, {"Y"}), machine)

    def test_identity_adaption(self):
        machine = delay("X", "Y")
        self.assertIs(AdaptedMachine.make(machine, {"X"}, {"Y"}), machine)

    def test_new_input_is_ignored(self):
        machine = adapt_interface(delay("X", "Y"), {"X", "P"}, {"Y"})
        self.assertEqual(machine.reads, frozenset(["X"]))
        outputs = run(machine, stream(X=[[1], []], P=[[0], [1]]))
        self.assertEqual(outputs, {stream(Y=[[], [1]])})

    def test_hidden_output(self):
        machine = adapt_interface(TrivialBehavior(), set(), set())
        self.assertIsInstance(machine, TrivialBehavior)
        hidden = AdaptedMachine.make(delay("X", "Y"), {"X"}, set())
        self.assertEqual(run(hidden, stream(X=[[1]])), {NamedStreamTuple.empty((), 1)})

    def test_dropped_input_is_pinned(self):
        dropped = drop_inputs(delay("X", "Y"), ["X"])
        self.assertEqual(dropped.inputs, frozenset())
        self.assertEqual(dropped.pinned, frozenset(["X"]))
        self.assertEqual(
            run(dropped, NamedStreamTuple.empty((), 2)), {stream(Y=[[], []])}
        )

    def test_readded_input_stays_pinned(self):
        machine = delay("X", "Y")
        readded = adapt_interface(drop_inputs(machine, ["X"]), {"X"}, {"Y"})
        self.assertNotEqual(readded, machine)
        self.assertEqual(readded.reads, frozenset())
        self.assertEqual(run(readded, stream(X=[[1], []])), {stream(Y=[[], []])})

    def test_adaption_errors(self):
        machine = delay("X", "Y")
        with self.assertRaises(AdaptionError):
            adapt_interface(machine, set(), {"Y"})
        with self.assertRaises(AdaptionError):
            adapt_interface(machine, {"X"}, {"Y", "W"})
        with self.assertRaises(AdaptionError):
            AdaptedMachine(machine, {"X"}, {"Y", "W"})

    def test_check_interface(self):
        check_interface(delay("X", "Y"), ["X"], ["Y"])
        with self.assertRaises(InterfaceError):
            check_interface(delay("X", "Y"), ["X"], ["Z"])


class TestRenaming(unittest.TestCase):
    def test_rename_run(self):
        machine = RenamedMachine.make(delay("X", "Y"), {"X": "P"})
        self.assertEqual(machine.inputs, frozenset(["P"]))
        self.assertEqual(run(machine, stream(P=[[1], []])), {stream(Y=[[], [1]])})

    def test_rename_back_restores_machine(self):
        machine = delay("X", "Y")
        renamed = RenamedMachine.make(machine, {"X": "P"})
        self.assertIs(RenamedMachine.make(renamed, {"P": "X"}), machine)

    def test_identity_and_unknown_channels(self):
        machine = delay("X", "Y")
        self.assertIs(RenamedMachine.make(machine, {"X": "X", "Q": "R"}), machine)

    def test_nested_renamings_merge(self):
        machine = delay("X", "Y")
        twice = RenamedMachine.make(RenamedMachine.make(machine, {"X": "P"}), {"P": "Q"})
        self.assertIs(twice.inner, machine)
        self.assertEqual(dict(twice.mapping), {"X": "Q"})

    def test_non_injective(self):
        with self.assertRaises(InterfaceError):
            RenamedMachine.make(delay("X", "Y"), {"X": "Y"})


class TestTimeGuardedness(unittest.TestCase):
    def test_library_and_table_machines(self):
        for machine in (delay("X", "Y"), blink(), blink_any(), blink_loud()):
            report = check_time_guardedness(machine, UNIVERSE, samples=200)
            self.assertTrue(report.ok, machine.label)
            self.assertEqual(report.samples, 200)

    def test_random_tables(self):
        rng = seeded(11)
        for index in range(30):
            inputs = rng.sample(["X", "Y"], rng.randint(0, 2))
            machine = random_table(rng, f"R{index}", inputs, "Z")
            report = check_time_guardedness(machine, UNIVERSE, samples=200, seed=index)
            self.assertTrue(report.ok, f"table {index}")

    def test_ticks_must_be_positive(self):
        with self.assertRaises(ValueError):
            check_time_guardedness(delay("X", "Y"), UNIVERSE, ticks=0)

    def test_mealy_machine_is_caught(self):
        mealy = get_machine_cls("Mealy")(input="X", output="Y")
        report = check_time_guardedness(mealy, UNIVERSE, samples=50)
        self.assertFalse(report.ok)
        x, y, shared = report.violations[0]
        self.assertEqual(x["X"].truncate(shared), y["X"].truncate(shared))


class TestSimulation(unittest.TestCase):
    def test_reachable_states(self):
        self.assertEqual(reachable_states(blink(), UNIVERSE), {"idle", "lit"})
        with self.assertRaises(BudgetError):
            reachable_states(blink(), UNIVERSE, ceiling=1)

    def test_narrowing_is_simulated(self):
        self.assertTrue(submachine_refines(blink(), blink_any(), UNIVERSE))
        self.assertTrue(submachine_refines(blink(), blink_maybe(), UNIVERSE))
        self.assertTrue(submachine_refines(blink_maybe(), blink_any(), UNIVERSE))
        self.assertTrue(submachine_refines(blink_any(), blink_any(), UNIVERSE))

    def test_widening_is_not_simulated(self):
        self.assertFalse(submachine_refines(blink_any(), blink(), UNIVERSE))
        self.assertFalse(submachine_refines(blink_loud(), blink_any(), UNIVERSE))

    def test_chaos_is_not_a_refinement_of_data(self):
        widened = add_chaotic_output(TrivialBehavior(), "Z")
        constrained = drop_inputs(delay("X", "Z"), ["X"])
        self.assertFalse(submachine_refines(widened, constrained, UNIVERSE))
        self.assertTrue(submachine_refines(constrained, widened, UNIVERSE))

    def test_interface_mismatch(self):
        with self.assertRaises(InterfaceError):
            submachine_refines(delay("X", "Y"), blink(), UNIVERSE)


class TestProperties(unittest.TestCase):
    def machines(self):
        rng = seeded(5)
        library = [delay("X", "Y"), blink(), blink_any(), blink_maybe(), blink_loud()]
        tables = [random_table(rng, f"T{i}", ["X"], "Y") for i in range(20)]
        return library + tables

    def test_run_agrees_with_membership(self):
        budget = EnumerationBudget(depth=3)
        for machine in self.machines():
            outputs = list(enumerate_inputs(machine.observable, UNIVERSE, budget))
            for x in enumerate_inputs(machine.inputs, UNIVERSE, budget):
                reactions = run(machine, x)
                self.assertTrue(reactions, machine.label)
                for y in outputs:
                    self.assertEqual(
                        membership(machine, x, y), y in reactions, machine.label
                    )

    def test_adaption_applied_twice(self):
        machine = compose([delay("X", "Y"), delay("Y", "Z")])
        first = adapt_interface(machine, {"X", "P"}, {"Y", "Z"})
        twice = adapt_interface(first, {"X", "P", "W"}, {"Z"})
        once = adapt_interface(machine, {"X", "P", "W"}, {"Z"})
        self.assertEqual(twice, once)
        budget = EnumerationBudget(depth=2)
        for x in enumerate_inputs({"P", "W", "X"}, UNIVERSE, budget):
            self.assertEqual(run(twice, x), run(once, x))

    def test_submachine_implies_run_inclusion(self):
        rng = seeded(9)
        tables = [
            random_table(rng, f"S{i}", ["X"], "Y", max_states=2) for i in range(12)
        ]
        inputs = list(enumerate_inputs({"X"}, UNIVERSE, EnumerationBudget(depth=4)))
        related = 0
        for fine in tables:
            for coarse in tables:
                if not submachine_refines(fine, coarse, UNIVERSE):
                    continue
                related += 1
                for x in inputs:
                    self.assertLessEqual(run(fine, x), run(coarse, x))
        self.assertGreaterEqual(related, len(tables))


if __name__ == "__main__":
    unittest.main()
