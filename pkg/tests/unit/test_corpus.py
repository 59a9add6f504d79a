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

import itertools
import unittest
from dataclasses import replace

from archrefine.behavior import check_time_guardedness, run
from archrefine.constants import (
    BOUNDED,
    DEFAULT_MODULUS,
    DISCHARGED,
    FAILS,
    SAMPLED,
)
from archrefine.corpus.codec import (
    BOTTOM,
    delta,
    delta_star,
    lookup,
    rho,
    rho_star,
    update,
)
from archrefine.corpus.fixtures import (
    FULL_DOMAIN,
    STEP_GROUPS,
    alphabets,
    build_machines,
    delta_refactor_steps,
    expected_interfaces,
    initial_system,
    interfaces_of,
    literal_psi,
    psi_invariant,
)
from archrefine.errors import ScriptError
from archrefine.invariants.round_trip import RoundTripInvariant
from archrefine.machines.database import INTERLEAVED, DatabaseMachine
from archrefine.machines.preprocessor import PreprocessorMachine, preprocess
from archrefine.oracle import (
    EnumerationBudget,
    check_invariant_validity,
    check_trace_equality,
    check_trace_inclusion,
)
from archrefine.rules import apply_script
from archrefine.streams import IntervalUniverse, NamedStreamTuple, restrict
from archrefine.system import blackbox, compose

from .test_stubs import seeded, stream

ENTRIES = [(k, d) for k in ("k0", "k1") for d in range(4)]


class TestCodec(unittest.TestCase):
    def test_bottom(self):
        self.assertIs(lookup({}, "k0"), BOTTOM)
        self.assertEqual(repr(BOTTOM), "⊥")
        self.assertEqual(delta(BOTTOM, 3), 3)
        self.assertEqual(rho(BOTTOM, 3), 3)

    def test_differences(self):
        self.assertEqual(delta(1, 0, 4), 3)
        self.assertEqual(rho(1, 3, 4), 0)
        self.assertEqual(update({"k0": 1}, "k0", 2), {"k0": 2})

    def test_delta_star(self):
        entries = (("k0", 1), ("k0", 3), ("k1", 2))
        encoded = delta_star({}, entries, 4)
        self.assertEqual(encoded, (("k0", 1), ("k0", 2), ("k1", 2)))
        self.assertEqual(rho_star({}, encoded, 4), entries)

    def test_round_trip_from_empty_database(self):
        for length in range(7):
            for entries in itertools.product(ENTRIES, repeat=length):
                self.assertEqual(rho_star({}, delta_star({}, entries)), entries)

    def test_round_trip_from_random_databases(self):
        rng = seeded(5)
        databases = {
            tuple((k, rng.randrange(4)) for k in ("k0", "k1") if rng.random() < 0.5)
            for _ in range(1000)
        }
        self.assertEqual(len(databases), 25)
        for length in range(7):
            for entries in itertools.product(ENTRIES, repeat=length):
                for database in map(dict, databases):
                    self.assertEqual(
                        rho_star(database, delta_star(database, entries)), entries
                    )


class TestMachines(unittest.TestCase):
    def test_preprocessor(self):
        self.assertEqual(preprocess(3, 4), 0)
        machine = PreprocessorMachine(modulus=3)
        outputs = run(machine, stream(In=[[("k0", 2)], []]))
        self.assertEqual(outputs, {stream(I=[[], [("k0", 0)]])})

    def test_database_answers_one_tick_later(self):
        machine = DatabaseMachine()
        x = stream(I=[[("k0", 1)], [], []], Key=[[], ["k0"], []])
        self.assertEqual(run(machine, x), {stream(Data=[[], [], [1]])})

    def test_database_delay(self):
        machine = DatabaseMachine(delay=2)
        x = stream(I=[[("k0", 1)], [], [], []], Key=[[], ["k0"], [], ["k0"]])
        outputs = run(machine, x)
        self.assertEqual(outputs, {stream(Data=[[], [], [], []])})
        x = stream(I=[[("k0", 1)], [], [], [], []], Key=[[], [], ["k0"], [], []])
        self.assertEqual(run(machine, x), {stream(Data=[[], [], [], [1], []])})

    def test_database_validation(self):
        with self.assertRaises(ValueError):
            DatabaseMachine(ordering="random")
        with self.assertRaises(ValueError):
            DatabaseMachine(delay=-1)

    def test_interleaved_ordering(self):
        x = stream(I=[[("k0", 1)], []], Key=[["k0"], []])
        self.assertEqual(len(run(DatabaseMachine(), x)), 1)
        outputs = run(DatabaseMachine(ordering=INTERLEAVED), x)
        self.assertEqual(outputs, {stream(Data=[[], [1]]), stream(Data=[[], []])})

    def test_encoder_then_decoder_restores_entries(self):
        machines = build_machines()
        pipeline = compose([machines["ENC"], machines["DEC"]])
        x = stream(I=[[("k0", 1)], [("k0", 2), ("k0", 0)], [], []])
        (output,) = run(pipeline, x)
        self.assertEqual(
            restrict(output, ["D"]),
            stream(D=[[], [("k0", 1)], [("k0", 1), ("k0", 1)], []]),
        )
        self.assertEqual(
            restrict(output, ["R"]),
            stream(R=[[], [], [("k0", 1)], [("k0", 2), ("k0", 0)]]),
        )

    def test_corrupt_decoder(self):
        machines = build_machines()
        pipeline = compose([machines["ENC"], machines["DEC_CORRUPT"]])
        (output,) = run(pipeline, stream(I=[[("k0", 1)], [], []]))
        self.assertEqual(output["R"][2], (("k0", 2),))

    def test_machines_are_time_guarded(self):
        universe = IntervalUniverse.of(alphabets(), 1)
        for name, machine in build_machines().items():
            report = check_time_guardedness(machine, universe, samples=200)
            self.assertTrue(report.ok, name)


class TestInvariants(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(ValueError):
            RoundTripInvariant(lag=-1)
        with self.assertRaises(ValueError):
            RoundTripInvariant(source="I", target="I", lag=1)

    def test_psi(self):
        psi = psi_invariant()
        self.assertEqual(psi.channels, frozenset(["I", "R"]))
        self.assertEqual(psi.derives, frozenset(["R"]))
        history = stream(I=[[("k0", 1)], [], []], R=[[], [], [("k0", 1)]])
        self.assertTrue(psi.holds(history))
        history = stream(I=[[("k0", 1)], [], []], R=[[], [], [("k0", 2)]])
        self.assertFalse(psi.holds(history))
        self.assertEqual(psi.name, "RoundTrip(source=I, target=R, modulus=3, lag=2)")

    def test_literal_psi_is_a_tautology(self):
        psi = literal_psi()
        self.assertEqual(psi.derives, frozenset())
        universe = IntervalUniverse.of(alphabets(), 2)
        rng = seeded(1)
        for _ in range(50):
            entries = [rng.choice(universe.intervals("I")) for _ in range(5)]
            self.assertTrue(psi.holds(NamedStreamTuple.of({"I": entries})))
        verdict = check_invariant_validity(
            initial_system(), psi, EnumerationBudget(depth=3)
        )
        self.assertTrue(verdict.ok)


class TestDeltaRefactor(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.initial = initial_system()
        cls.systems = []
        cls.ledgers = []
        system = cls.initial
        for step in delta_refactor_steps():
            system, ledger = apply_script(system, [step])
            cls.systems.append(system)
            cls.ledgers.append(ledger)
        cls.final = system

    def test_step_groups(self):
        self.assertEqual(len(delta_refactor_steps()), 13)
        indices = sorted(i for group in STEP_GROUPS.values() for i in group)
        self.assertEqual(indices, list(range(13)))

    def test_interfaces_after_every_step(self):
        for index, (system, expected) in enumerate(
            zip(self.systems, expected_interfaces())
        ):
            self.assertEqual(interfaces_of(system), expected, f"step {index}")

    def test_all_premises_discharged(self):
        for index, ledger in enumerate(self.ledgers):
            self.assertEqual(ledger.status, DISCHARGED, f"step {index}")

    def test_only_the_invariant_step_is_bounded(self):
        for index, ledger in enumerate(self.ledgers):
            bounded = [o for o in ledger if o.mode.startswith(BOUNDED)]
            if index == 9:
                self.assertTrue(bounded)
            else:
                self.assertFalse(bounded, f"step {index}")

    def test_whole_script_in_one_go(self):
        final, ledger = apply_script(self.initial, delta_refactor_steps())
        self.assertEqual(final, self.final)
        self.assertEqual(ledger.exit_code, 0)

    def test_final_system_is_equivalent(self):
        budget = EnumerationBudget(depth=5)
        self.assertTrue(check_trace_inclusion(self.initial, self.final, budget).ok)
        self.assertTrue(check_trace_equality(self.initial, self.final, budget).ok)

    def test_assumed_invariant_step_gives_same_system(self):
        steps = delta_refactor_steps()
        steps[9] = replace(steps[9], mode=(("kind", "assumed"),))
        final, ledger = apply_script(self.initial, steps)
        self.assertEqual(final, self.final)
        self.assertEqual(ledger.exit_code, 2)

    def test_corrupt_decoder_is_rejected(self):
        with self.assertRaises(ScriptError) as ctx:
            apply_script(self.initial, delta_refactor_steps(decoder="DEC_CORRUPT"))
        self.assertEqual(ctx.exception.index, 9)
        self.assertEqual(ctx.exception.rule, "refine-behavior-with-invariant")
        self.assertIsNotNone(ctx.exception.witness)

    def test_corrupt_final_system_has_replayable_witness(self):
        steps = delta_refactor_steps(decoder="DEC_CORRUPT")
        steps[9] = replace(steps[9], mode=(("kind", "assumed"),))
        corrupt, ledger = apply_script(self.initial, steps)
        self.assertEqual(ledger.exit_code, 2)
        verdict = check_trace_inclusion(
            self.initial, corrupt, EnumerationBudget(depth=5)
        )
        self.assertEqual(verdict.status, FAILS)
        witness = verdict.witness
        self.assertIn(witness.trace, run(blackbox(corrupt), witness.input))
        self.assertNotIn(witness.trace, run(blackbox(self.initial), witness.input))

    def test_interleaved_database_is_coarser(self):
        budget = EnumerationBudget(depth=5)
        interleaved = initial_system(rdb="RDB_INTERLEAVED")
        self.assertTrue(check_trace_inclusion(interleaved, self.initial, budget).ok)
        self.assertFalse(check_trace_inclusion(self.initial, interleaved, budget).ok)


class TestFullDomain(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.initial = initial_system(**FULL_DOMAIN)
        cls.final, cls.ledger = apply_script(
            cls.initial, delta_refactor_steps(DEFAULT_MODULUS)
        )

    def test_domain(self):
        alphabet = dict(self.initial.channels)["In"]
        self.assertEqual(len(alphabet.messages), 8)
        universe = IntervalUniverse.of(alphabets(**FULL_DOMAIN), 1)
        self.assertEqual(universe.size(["In"]), 9)

    def test_script_discharges_every_premise(self):
        self.assertEqual(self.ledger.status, DISCHARGED)
        self.assertEqual(self.ledger.exit_code, 0)
        bounded = [o for o in self.ledger if o.mode.startswith(BOUNDED)]
        self.assertTrue(bounded)
        for obligation in bounded:
            self.assertEqual(obligation.step, 9)
            self.assertIn("T=6", obligation.mode)

    def test_final_system_agrees_on_sampled_inputs(self):
        budget = EnumerationBudget(depth=5, mode=SAMPLED, samples=200, seed=7)
        self.assertTrue(check_trace_inclusion(self.initial, self.final, budget).ok)
        self.assertTrue(check_trace_inclusion(self.final, self.initial, budget).ok)

    def test_database_with_two_keys(self):
        machine = DatabaseMachine()
        x = stream(I=[[("k0", 1)], [("k1", 3)], [], []], Key=[[], ["k1"], ["k0"], []])
        self.assertEqual(run(machine, x), {stream(Data=[[], [], [3], [1]])})


if __name__ == "__main__":
    unittest.main()
