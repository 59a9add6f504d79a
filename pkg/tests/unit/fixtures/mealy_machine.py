"""Machine whose output at tick t depends on its input at tick t."""

from dataclasses import dataclass

from archrefine.machines.base import LibraryMachine
from archrefine.streams import Valuation


@dataclass(frozen=True)
class MealyMachine(LibraryMachine):
    """Echoes the current interval of `input` on `output`."""

    input: str = "X"
    output: str = "Y"

    @property
    def inputs(self) -> frozenset:
        return frozenset([self.input])

    @property
    def outputs(self) -> frozenset:
        return frozenset([self.output])

    def start(self):
        return ()

    def emit(self, state) -> tuple:
        return (Valuation({self.output: ()}),)

    def step(self, state, emission, valuation: Valuation) -> tuple:
        return ((),)

    def transitions(self, state, valuation: Valuation) -> list:
        return [(Valuation({self.output: valuation[self.input]}), ())]
