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
`constants.py`
Constants and environment variables used in `archrefine`.
"""

import os

# Enumeration budgets
DEFAULT_DEPTH: int = int(os.environ.get("ARCHREFINE_DEPTH", "5"))
DEFAULT_INTERVAL_BOUND: int = int(os.environ.get("ARCHREFINE_INTERVAL_BOUND", "1"))
DEFAULT_SAMPLES: int = int(os.environ.get("ARCHREFINE_SAMPLES", "200"))
DEFAULT_SEED: int = int(os.environ.get("ARCHREFINE_SEED", "0"))
BUDGET_CEILING: int = int(os.environ.get("ARCHREFINE_BUDGET_CEILING", "2000000"))
STATE_CEILING: int = int(os.environ.get("ARCHREFINE_STATE_CEILING", "20000"))

# Global
COLORED_OUTPUT: int = int(os.environ.get("COLORED_OUTPUT", "0"))
DEBUG: int = int(os.environ.get("DEBUG", "0"))

# Discharge modes
SYNTACTIC: str = "syntactic"
BOUNDED: str = "bounded"
ASSUMED: str = "assumed"
CHECK_MODES: tuple[str, ...] = (SYNTACTIC, BOUNDED, ASSUMED)

# Enumeration modes
EXHAUSTIVE: str = "exhaustive"
SAMPLED: str = "sampled"

# Obligation verdicts
DISCHARGED: str = "discharged"
FAILED: str = "failed"

# Oracle verdicts
HOLDS: str = "holds"
FAILS: str = "fails"
INCONCLUSIVE: str = "inconclusive"

# CLI exit codes
EXIT_OK: int = 0
EXIT_FAILED: int = 1
EXIT_ASSUMED: int = 2
EXIT_INCONCLUSIVE: int = 3

# Boundary pseudo-node used in DOT exports
ENVIRONMENT_NODE: str = "ENV"

# Corpus defaults
DEFAULT_MODULUS: int = 4
DEFAULT_KEYS: tuple[str, ...] = ("k0", "k1")


class Colors:
    """Colors for console output."""

    OKGREEN: str = "\033[92m"
    WARNING: str = "\033[93m"
    FAIL: str = "\033[91m"
    ENDC: str = "\033[0m"
