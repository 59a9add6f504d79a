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

import json
import os
import tempfile
import unittest

from click.testing import CliRunner

from archrefine.cli import main
from archrefine.frontend import parse_architecture

from .test_stubs import CTX, get_fixture_path, get_sample_path, read_text

cwd = os.path.dirname(os.path.abspath(__file__))
root = os.path.dirname(os.path.dirname(cwd))


class TestCLI(unittest.TestCase):
    def setUp(self):
        for key, value in CTX.items():
            os.environ[key] = value
        self.toy = f"{root}/samples/toy"
        self.relay = f"{self.toy}/relay.arch"
        self.refined = f"{self.toy}/relay_refined.arch"
        self.config = f"{self.toy}/config.yaml"
        self.cli = CliRunner()
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def invoke(self, *args):
        return self.cli.invoke(main, list(args))

    def test_cli_check(self):
        result = self.invoke("check", self.relay)
        self.assertEqual(result.exit_code, 0)
        self.assertIn("consistent", result.output)

    def test_cli_check_inconsistent(self):
        result = self.invoke("check", f"{self.toy}/inconsistent.arch")
        self.assertEqual(result.exit_code, 1)
        self.assertIn("[condition 2]", result.output)

    def test_cli_check_parse_error(self):
        result = self.invoke("check", get_fixture_path("undeclared.arch"))
        self.assertEqual(result.exit_code, 1)
        self.assertIn("undeclared channels ['Y']", result.output)

    def test_cli_simulate(self):
        result = self.invoke("simulate", self.refined, "-i", f"{self.toy}/relay_trace.json")
        self.assertEqual(result.exit_code, 0)
        self.assertIn("1 output trace(s)", result.output)
        self.assertIn("{Z↦⟨⟨⟩,⟨⟩,⟨1⟩,⟨⟩⟩}", result.output)

    def test_cli_simulate_component(self):
        args = ["simulate", self.relay, "-i", f"{self.toy}/relay_trace.json"]
        result = self.invoke(*args, "--component", "A")
        self.assertEqual(result.exit_code, 0)
        self.assertIn("{Y↦⟨⟨⟩,⟨1⟩,⟨⟩,⟨0⟩⟩}", result.output)

    def test_cli_simulate_no_input(self):
        result = self.invoke("simulate", self.relay)
        self.assertEqual(result.exit_code, 1)
        self.assertIn("Either --input or --ticks is required.", result.output)

    def test_cli_refine(self):
        out = os.path.join(self.tmp.name, "relay_out.arch")
        report = os.path.join(self.tmp.name, "report.json")
        result = self.invoke(
            "refine", self.relay, f"{self.toy}/relay.script", "-o", out, "-r", report
        )
        self.assertEqual(result.exit_code, 0)
        self.assertIn("Status: discharged", result.output)
        system = parse_architecture(read_text(out))
        self.assertIn("Y2", system.used_channels)
        with open(report, encoding="utf8") as f:
            self.assertEqual(json.load(f)["applied"], 8)

    def test_cli_refine_assumed(self):
        result = self.invoke("refine", f"{self.toy}/relay_loud.arch", f"{self.toy}/relay_loud.script")
        self.assertEqual(result.exit_code, 2)

    def test_cli_refine_rejected(self):
        witness = os.path.join(self.tmp.name, "witness.json")
        result = self.invoke(
            "refine",
            f"{self.toy}/relay_loud.arch",
            f"{self.toy}/relay_loud.script",
            "--mode",
            "bounded",
            "-c",
            self.config,
            "-w",
            witness,
        )
        self.assertEqual(result.exit_code, 1)
        self.assertIn("REJECTED at step 0", result.output)
        with open(witness, encoding="utf8") as f:
            self.assertIn("trace", json.load(f))

    def test_cli_refine_database(self):
        database = get_sample_path("database")
        out = os.path.join(self.tmp.name, "db_final.json")
        result = self.invoke(
            "refine",
            f"{database}/db_initial.arch",
            f"{database}/delta_refactor.script",
            "-o",
            out,
        )
        self.assertEqual(result.exit_code, 0)
        self.assertIn("refine-behavior-with-invariant", result.output)
        with open(out, encoding="utf8") as f:
            self.assertEqual(sorted(json.load(f)["components"]), ["PRE'", "RDB'"])

    def test_cli_verify_refinement(self):
        result = self.invoke("verify-refinement", self.relay, self.refined, "-T", "4")
        self.assertEqual(result.exit_code, 0)
        self.assertIn("holds", result.output)

    def test_cli_verify_refinement_fails(self):
        witness = os.path.join(self.tmp.name, "witness.json")
        result = self.invoke(
            "verify-refinement", self.refined, self.relay, "-c", self.config, "-w", witness
        )
        self.assertEqual(result.exit_code, 1)
        self.assertIn("fails", result.output)
        self.assertTrue(os.path.exists(witness))

    def test_cli_verify_refinement_sampled(self):
        result = self.invoke(
            "verify-refinement", self.relay, self.refined, "--samples", "20", "--seed", "1"
        )
        self.assertEqual(result.exit_code, 0)
        self.assertIn("sampled", result.output)

    def test_cli_export(self):
        result = self.invoke("export", self.relay)
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(parse_architecture(result.output), parse_architecture(read_text(self.relay)))
        result = self.invoke("export", self.relay, "-f", "interchange")
        self.assertEqual(json.loads(result.output)["system"]["outputs"], ["Z"])

    def test_cli_export_dot(self):
        out = os.path.join(self.tmp.name, "relay.dot")
        result = self.invoke("export-dot", self.relay, "-o", out)
        self.assertEqual(result.exit_code, 0)
        self.assertIn("ENV", read_text(out))

    def test_cli_export_unknown_format(self):
        result = self.invoke("export", self.relay, "-f", "nope")
        self.assertEqual(result.exit_code, 1)
        self.assertIn('Exporter "nope" not found.', result.output)


if __name__ == "__main__":
    unittest.main()
