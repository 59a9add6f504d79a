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
Base class of the built-in machine library.
"""

import logging
from dataclasses import fields

from archrefine.behavior import MachineBehavior
from archrefine.streams import freeze

LOGGER = logging.getLogger(__name__)


class LibraryMachine(MachineBehavior):
    """Machine instantiable by name from architecture files.

    Subclasses are frozen dataclasses named `<Name>Machine` living in
    `archrefine.machines.<name>`; their dataclass fields are the parameters
    accepted in `Name(param=value, ...)` expressions.
    """

    @classmethod
    def library_name(cls) -> str:
        """Name used in architecture files (`DeltaEncoder`)."""
        name = cls.__name__
        return name[: -len("Machine")] if name.endswith("Machine") else name

    @classmethod
    def from_params(cls, **params) -> "LibraryMachine":
        """Instantiate from parsed parameters (lists become tuples).

        Raises:
            TypeError: On unknown or missing parameters.
        """
        LOGGER.debug(f"Instantiating {cls.library_name()} with {params}")
        return cls(**{key: freeze(value) for key, value in params.items()})

    def params(self) -> dict:
        """Parameters in declaration order."""
        return {f.name: getattr(self, f.name) for f in fields(self)}  # type: ignore[arg-type]

    @property
    def chaotic(self) -> frozenset:
        return frozenset()

    @property
    def label(self) -> str:
        args = ", ".join(f"{k}={v}" for k, v in self.params().items())
        return f"{self.library_name()}({args})"
